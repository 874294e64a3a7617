"""End-to-end run: manifest -> features -> pair series -> correlations.

A run consumes a manifest plus a feature directory with this layout::

    features/
      embeddings.jsonl            embedding store (sound/street/aerial)
      rasters/<site_id>.<view>.json   label rasters, view in {street, aerial}
      label_probabilities.jsonl   audio label scores (optional)
      audio_bga.json              audio weight table (optional, user-supplied)

and produces, per scope (ALL plus each city), one correlation row per
computable comparison:

* ``embed:street~sound``, ``embed:aerial~sound``, ``embed:combined~sound``,
  ``embed:aerial~street``: cosine over encoder embeddings;
* ``seg-dist:street~sound``, ``seg-dist:aerial~sound``: cosine over
  scene class-distribution vectors against sound embeddings;
* ``bga:<view>~sound``: cosine over 3-component ecological vectors,
  sound side projected from audio label probabilities through the
  user-supplied table;
* ``bga-{bio,geo,anthro}:<view>~sound``: per-category agreement.

Sites are dropped pairwise per comparison (complete-case): a comparison
uses exactly the sites carrying both of its feature kinds. Comparisons
or strata that cannot be computed are recorded with a reason, never
silently dropped. Reruns with identical inputs and config are
byte-identical, permutation tests included.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._version import __version__
from .ecology import (
    BGAMatrix,
    BGAVector,
    audio_bga_vector,
    bga_matrix_for_view,
    bga_vector,
    load_bga_matrix,
)
from .errors import ConfigurationError, ManifestError, SoundscapeAlignError
from .manifest import (
    ALL_EXCLUSION_FLAGS,
    ExclusionFlag,
    Manifest,
    filter_sites,
    load_manifest,
    validate_manifest,
)
from .segmentation import ClassDistribution, class_distribution
from .similarity import (
    PairVector,
    bga_category_pair_similarity,
    pairwise_similarity,
    write_pair_vector_csv,
)
from .stats import CorrelationResult, correlate, stratify_by_city
from .store import (
    LabelProbabilities,
    LabelRaster,
    collect_site_vectors,
    combine_views,
    read_embeddings,
    read_label_probabilities,
    read_label_raster,
)
from .validation import format_float

VIEWS = ("street", "aerial")

EMBEDDINGS_FILE = "embeddings.jsonl"
RASTER_DIR = "rasters"
LABEL_PROBABILITIES_FILE = "label_probabilities.jsonl"
AUDIO_BGA_FILE = "audio_bga.json"

AUDIO_BGA_NOTE = (
    "bga comparisons project audio label probabilities through a "
    "user-supplied weight table; treat them as configuration-dependent"
)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; echoed into the report."""

    manifest_path: str
    features_dir: str
    out_dir: str = "out"
    seed: int = 42
    permutations: int = 9999
    exclude: frozenset[ExclusionFlag] = ALL_EXCLUSION_FLAGS
    cities: tuple[str, ...] = ()
    strict_files: bool = False

    def __post_init__(self) -> None:
        if self.permutations < 99:
            raise ConfigurationError(
                f"need at least 99 permutations, got {self.permutations}"
            )
        object.__setattr__(
            self,
            "exclude",
            frozenset(ExclusionFlag(f) for f in self.exclude),
        )
        object.__setattr__(self, "cities", tuple(self.cities))

    def echo(self) -> dict:
        return {
            "manifest": self.manifest_path,
            "features": self.features_dir,
            "out": self.out_dir,
            "seed": self.seed,
            "permutations": self.permutations,
            "exclude": sorted(f.value for f in self.exclude),
            "cities": list(self.cities),
            "strict_files": self.strict_files,
        }


@dataclass(frozen=True)
class SkippedComparison:
    scope: str
    comparison_id: str
    reason: str


@dataclass(frozen=True)
class Report:
    """Sorted correlation rows plus the metadata to reproduce them."""

    rows: tuple[CorrelationResult, ...]
    skipped: tuple[SkippedComparison, ...]
    config: dict
    version: str
    input_digests: dict
    warnings: dict
    notes: tuple[str, ...] = ()


@dataclass
class RunInputs:
    manifest: Manifest
    site_vectors: dict[str, dict[str, np.ndarray]]
    distributions: dict[str, dict[str, ClassDistribution]]
    bga: dict[str, dict[str, BGAVector]]
    input_digests: dict[str, str]
    warnings: dict
    notes: tuple[str, ...]


@dataclass
class RunResult:
    report: Report
    pair_vectors: dict[str, tuple[PairVector, PairVector]]
    inputs: RunInputs


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return "sha256:" + digest.hexdigest()


def load_inputs(cfg: RunConfig) -> RunInputs:
    """Read and validate every input file; build per-site feature maps."""
    manifest_path = Path(cfg.manifest_path)
    manifest = load_manifest(manifest_path)
    violations = validate_manifest(manifest, strict_files=cfg.strict_files)
    if violations:
        raise ManifestError(
            f"manifest {manifest_path} is invalid:\n  " + "\n  ".join(violations)
        )
    manifest = filter_sites(manifest, cfg.exclude)
    if cfg.cities:
        known = set(manifest.cities())
        unknown = [c for c in cfg.cities if c not in known]
        if unknown:
            raise ManifestError(
                f"city filter names unknown cities {unknown}; "
                f"manifest has {sorted(known)}"
            )
        kept = tuple(s for s in manifest.sites if s.city in cfg.cities)
        manifest = Manifest(sites=kept, source_path=manifest.source_path)
    site_ids = set(manifest.site_ids())

    features_dir = Path(cfg.features_dir)
    if not features_dir.is_dir():
        raise ConfigurationError(f"feature directory not found: {features_dir}")
    digests = {"manifest": _sha256(manifest_path)}
    warnings_meta: dict = {}
    notes: list[str] = []

    # Embeddings: sound may arrive per clip; stored combined records are
    # ignored so the combined view is always rebuilt from its halves and
    # the mean-of-cosines identity holds by construction.
    site_vectors: dict[str, dict[str, np.ndarray]] = {}
    embeddings_path = features_dir / EMBEDDINGS_FILE
    if embeddings_path.exists():
        digests[EMBEDDINGS_FILE] = _sha256(embeddings_path)
        records = read_embeddings(embeddings_path)
        ignored = sorted(
            {r.site_id for r in records if r.modality == "combined"}
        )
        if ignored:
            warnings_meta["ignored_combined_records"] = ignored
        for modality in ("sound", "street", "aerial"):
            vectors = collect_site_vectors(records, modality)
            vectors = {s: v for s, v in vectors.items() if s in site_ids}
            if vectors:
                site_vectors[modality] = dict(sorted(vectors.items()))
    street = site_vectors.get("street", {})
    aerial = site_vectors.get("aerial", {})
    combined = {
        s: combine_views(street[s], aerial[s])
        for s in sorted(set(street) & set(aerial))
    }
    if combined:
        site_vectors["combined"] = combined

    # Label rasters -> class distributions -> ecological vectors.
    distributions: dict[str, dict[str, ClassDistribution]] = {v: {} for v in VIEWS}
    raster_dir = features_dir / RASTER_DIR
    unrecognized = []
    if raster_dir.is_dir():
        for raster_path in sorted(raster_dir.glob("*.json")):
            stem = raster_path.name[: -len(".json")]
            site_id, _, view = stem.rpartition(".")
            if view not in VIEWS or not site_id:
                unrecognized.append(raster_path.name)
                continue
            if site_id not in site_ids:
                continue
            digests[f"{RASTER_DIR}/{raster_path.name}"] = _sha256(raster_path)
            distributions[view][site_id] = class_distribution(
                read_label_raster(raster_path)
            )
    if unrecognized:
        warnings_meta["unrecognized_raster_files"] = unrecognized

    unmapped_classes: Counter = Counter()
    bga: dict[str, dict[str, BGAVector]] = {}
    for view in VIEWS:
        if not distributions[view]:
            continue
        matrix = bga_matrix_for_view(view)
        bga[view] = {
            s: bga_vector(dist, matrix, unmapped_classes)
            for s, dist in sorted(distributions[view].items())
        }

    # Audio side of the ecological comparisons: label probabilities
    # projected through the user-supplied table, when both are present.
    label_probs: dict[str, LabelProbabilities] = {}
    probs_path = features_dir / LABEL_PROBABILITIES_FILE
    if probs_path.exists():
        digests[LABEL_PROBABILITIES_FILE] = _sha256(probs_path)
        for rec in read_label_probabilities(probs_path):
            if rec.site_id in site_ids:
                label_probs[rec.site_id] = rec
    audio_matrix: BGAMatrix | None = None
    audio_bga_path = features_dir / AUDIO_BGA_FILE
    if audio_bga_path.exists():
        digests[AUDIO_BGA_FILE] = _sha256(audio_bga_path)
        audio_matrix = load_bga_matrix(audio_bga_path)
    unmapped_labels: Counter = Counter()
    if audio_matrix is not None and label_probs:
        bga["audio"] = {
            s: audio_bga_vector(lp, audio_matrix, unmapped_labels)
            for s, lp in sorted(label_probs.items())
        }
        notes.append(AUDIO_BGA_NOTE)

    if unmapped_classes:
        warnings_meta["unmapped_classes"] = dict(sorted(unmapped_classes.items()))
    if unmapped_labels:
        warnings_meta["unmapped_audio_labels"] = dict(
            sorted(unmapped_labels.items())
        )

    return RunInputs(
        manifest=manifest,
        site_vectors=site_vectors,
        distributions=distributions,
        bga=bga,
        input_digests=dict(sorted(digests.items())),
        warnings=warnings_meta,
        notes=tuple(notes),
    )


def _distribution_vectors(
    dists: Mapping[str, ClassDistribution]
) -> dict[str, np.ndarray]:
    """Align class distributions onto one shared class axis."""
    class_names = sorted({name for d in dists.values() for name in d.proportions})
    return {
        site: np.array([d.get(name) for name in class_names], dtype=np.float64)
        for site, d in dists.items()
    }


def _nonzero_bga_arrays(
    vectors: Mapping[str, BGAVector], view: str, warnings_meta: dict
) -> dict[str, np.ndarray]:
    """BGA vectors as arrays, dropping all-zero scenes (cosine-undefined)."""
    arrays = {s: v.as_array() for s, v in vectors.items()}
    zero = sorted(s for s, a in arrays.items() if not a.any())
    if zero:
        warnings_meta.setdefault("zero_bga_sites", {})[view] = zero
    return {s: a for s, a in arrays.items() if a.any()}


def build_pair_vectors(
    inputs: RunInputs,
) -> tuple[dict[str, tuple[PairVector, PairVector]], list[SkippedComparison]]:
    """One (x, y) pair-series couple per computable comparison.

    Each comparison is restricted to the sites carrying both of its
    feature kinds; both series share one canonical PairIndex.
    """
    vec = inputs.site_vectors
    warnings_meta = inputs.warnings
    sound = vec.get("sound", {})
    dist_vectors = {
        view: _distribution_vectors(inputs.distributions[view])
        for view in VIEWS
        if inputs.distributions[view]
    }
    bga_arrays = {
        view: _nonzero_bga_arrays(inputs.bga[view], view, warnings_meta)
        for view in inputs.bga
    }

    cosine_comparisons: list[tuple[str, Mapping, Mapping]] = [
        ("embed:street~sound", vec.get("street", {}), sound),
        ("embed:aerial~sound", vec.get("aerial", {}), sound),
        ("embed:combined~sound", vec.get("combined", {}), sound),
        ("embed:aerial~street", vec.get("aerial", {}), vec.get("street", {})),
        ("seg-dist:street~sound", dist_vectors.get("street", {}), sound),
        ("seg-dist:aerial~sound", dist_vectors.get("aerial", {}), sound),
        ("bga:street~sound", bga_arrays.get("street", {}), bga_arrays.get("audio", {})),
        ("bga:aerial~sound", bga_arrays.get("aerial", {}), bga_arrays.get("audio", {})),
    ]
    category_comparisons: list[tuple[str, str, Mapping, Mapping]] = [
        (
            f"bga-{category}:{view}~sound",
            category,
            inputs.bga.get(view, {}),
            inputs.bga.get("audio", {}),
        )
        for category in ("bio", "geo", "anthro")
        for view in VIEWS
    ]

    pair_vectors: dict[str, tuple[PairVector, PairVector]] = {}
    skipped: list[SkippedComparison] = []

    def common_sites(cid: str, x_map: Mapping, y_map: Mapping) -> list[str] | None:
        left, right = cid.split(":", 1)[1].split("~")
        if not x_map:
            skipped.append(
                SkippedComparison("ALL", cid, f"no {left} features available")
            )
            return None
        if not y_map:
            skipped.append(
                SkippedComparison("ALL", cid, f"no {right} features available")
            )
            return None
        common = sorted(set(x_map) & set(y_map))
        if len(common) < 3:
            skipped.append(
                SkippedComparison(
                    "ALL",
                    cid,
                    f"only {len(common)} sites carry both {left} and "
                    f"{right} features; need 3",
                )
            )
            return None
        return common

    for cid, x_map, y_map in cosine_comparisons:
        common = common_sites(cid, x_map, y_map)
        if common is None:
            continue
        x_pv = pairwise_similarity({s: x_map[s] for s in common}, cid)
        y_pv = pairwise_similarity({s: y_map[s] for s in common}, cid)
        pair_vectors[cid] = (x_pv, y_pv)

    for cid, category, x_map, y_map in category_comparisons:
        common = common_sites(cid, x_map, y_map)
        if common is None:
            continue
        x_pv = bga_category_pair_similarity(
            {s: x_map[s] for s in common}, category, cid
        )
        y_pv = bga_category_pair_similarity(
            {s: y_map[s] for s in common}, category, cid
        )
        pair_vectors[cid] = (x_pv, y_pv)

    return pair_vectors, skipped


def correlate_all(
    pair_vectors: Mapping[str, tuple[PairVector, PairVector]],
    manifest: Manifest,
    cfg: RunConfig,
) -> tuple[list[CorrelationResult], list[SkippedComparison]]:
    """ALL-scope plus per-city correlation rows for every comparison."""
    rows: list[CorrelationResult] = []
    skipped: list[SkippedComparison] = []
    for cid, (x_pv, y_pv) in pair_vectors.items():
        scoped = [("ALL", x_pv, y_pv)]
        x_strata = stratify_by_city(x_pv, manifest)
        y_strata = stratify_by_city(y_pv, manifest)
        scoped += [
            (city, x_strata[city], y_strata[city]) for city in x_strata
        ]
        for scope, x_scoped, y_scoped in scoped:
            if x_scoped.index.n_pairs < 3:
                skipped.append(
                    SkippedComparison(
                        scope,
                        cid,
                        f"only {x_scoped.index.n_sites} sites in scope; need 3",
                    )
                )
                continue
            try:
                rows.append(
                    correlate(
                        x_scoped,
                        y_scoped,
                        comparison_id=cid,
                        scope=scope,
                        permutations=cfg.permutations,
                        seed=cfg.seed,
                    )
                )
            except SoundscapeAlignError as exc:
                skipped.append(SkippedComparison(scope, cid, str(exc)))
    rows.sort(key=lambda row: (row.scope, row.comparison_id))
    skipped.sort(key=lambda s: (s.scope, s.comparison_id))
    return rows, skipped


def run_pipeline(cfg: RunConfig) -> RunResult:
    """Execute the full run; writes nothing (see the emit_* functions)."""
    inputs = load_inputs(cfg)
    pair_vectors, skipped = build_pair_vectors(inputs)
    rows, late_skipped = correlate_all(pair_vectors, inputs.manifest, cfg)
    all_skipped = sorted(
        skipped + late_skipped, key=lambda s: (s.scope, s.comparison_id)
    )
    report = Report(
        rows=tuple(rows),
        skipped=tuple(all_skipped),
        config=cfg.echo(),
        version=__version__,
        input_digests=inputs.input_digests,
        warnings=inputs.warnings,
        notes=inputs.notes,
    )
    return RunResult(report=report, pair_vectors=pair_vectors, inputs=inputs)


def _json_dumps(value, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits, insertion-ordered keys."""
    pad = "  " * indent
    child = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{child}{json.dumps(str(k))}: {_json_dumps(v, indent + 1)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(
            f"{child}{_json_dumps(v, indent + 1)}" for v in value
        )
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return json.dumps(str(value))


def _row_dict(row: CorrelationResult) -> dict:
    return {
        "scope": row.scope,
        "comparison_id": row.comparison_id,
        "r": row.r,
        "p_t": row.p_t,
        "p_perm": row.p_perm,
        "n_sites": row.n_sites,
        "n_pairs": row.n_pairs,
    }


def emit_report(report: Report, out_dir: str | Path) -> list[Path]:
    """Write report.csv (6 significant digits) and report.json (17).

    Rows are sorted by (scope, comparison_id); the CSV column set is
    fixed, and both renderings carry identical row content. p_t is the
    naive parametric value; p_perm is the permutation value.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    lines = ["scope,comparison_id,r,p_t,p_perm,n_sites,n_pairs"]
    for row in report.rows:
        lines.append(
            f"{row.scope},{row.comparison_id},"
            f"{format(row.r, '.6g')},{format(row.p_t, '.6g')},"
            f"{format(row.p_perm, '.6g')},{row.n_sites},{row.n_pairs}"
        )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    doc = {
        "version": report.version,
        "config": report.config,
        "input_digests": report.input_digests,
        "p_value_kinds": {"p_t": "naive parametric t", "p_perm": "permutation"},
        "notes": list(report.notes),
        "warnings": report.warnings,
        "skipped": [
            {"scope": s.scope, "comparison_id": s.comparison_id, "reason": s.reason}
            for s in report.skipped
        ],
        "rows": [_row_dict(row) for row in report.rows],
    }
    json_path = out_dir / "report.json"
    json_path.write_text(_json_dumps(doc) + "\n", encoding="utf-8")
    return [csv_path, json_path]


def pair_csv_name(comparison_id: str) -> str:
    """Filesystem-safe file name for one comparison's pair series."""
    return comparison_id.replace(":", "--").replace("~", "-vs-") + ".csv"


def emit_pair_csvs(
    pair_vectors: Mapping[str, tuple[PairVector, PairVector]],
    out_dir: str | Path,
) -> list[Path]:
    """Write each comparison's two aligned pair series (ALL scope)."""
    pairs_dir = Path(out_dir) / "pairs"
    pairs_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for cid in sorted(pair_vectors):
        x_pv, y_pv = pair_vectors[cid]
        left, right = cid.split(":", 1)[1].split("~")
        base = pair_csv_name(cid)[: -len(".csv")]
        for tag, pv in ((left, x_pv), (right, y_pv)):
            path = pairs_dir / f"{base}.{tag}.csv"
            write_pair_vector_csv(pv, path)
            written.append(path)
    return written


def emit_features(inputs: RunInputs, out_dir: str | Path) -> list[Path]:
    """Write per-site class distributions and ecological vectors as CSV."""
    features_dir = Path(out_dir) / "features"
    features_dir.mkdir(parents=True, exist_ok=True)
    written = []

    dist_path = features_dir / "class_distributions.csv"
    lines = ["site_id,view,class,proportion"]
    for view in VIEWS:
        for site_id, dist in sorted(inputs.distributions[view].items()):
            for name, share in sorted(dist.proportions.items()):
                lines.append(
                    f"{site_id},{view},{json.dumps(name)},{format_float(share)}"
                )
    dist_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(dist_path)

    bga_path = features_dir / "bga_vectors.csv"
    lines = ["site_id,view,bio,geo,anthro"]
    for view in sorted(inputs.bga):
        for site_id, v in sorted(inputs.bga[view].items()):
            lines.append(
                f"{site_id},{view},{format_float(v.bio)},"
                f"{format_float(v.geo)},{format_float(v.anthro)}"
            )
    bga_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(bga_path)
    return written
