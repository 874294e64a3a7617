"""Flat-file feature store and the vector operations layered on it.

Three text formats carry features into the core:

* Embedding store: JSON Lines, one record per line,
  ``{"site_id":…, "modality":…, "model_id":…, "dim":N, "vector":[…]}``.
  Reals are serialized with 17 significant digits, which round-trips
  binary64 losslessly, so write-then-read is bit-exact.
* Label raster: a JSON document
  ``{"width":W, "height":H, "legend":{"0":"Road", …}, "rows":[[ids…]…]}``
  with H rows of W integer class ids, every id present in the legend.
* Label probabilities: JSON Lines ``{"site_id":…, "labels":{"name":p}}``
  with probabilities in [0, 1].

Sound embeddings may arrive per clip under record ids
``"<site_id>#clip<k>"``; (site_id, modality) is unique per file, and dim
must be consistent per (modality, model_id). Site-level sound vectors
come from mean-then-normalize aggregation over a site's clips.

The combined street+aerial view is the concatenation of the two
l2-normalized halves, renormalized; this construction makes the combined
cosine of any site pair exactly the mean of the per-view cosines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateVectorError, FormatError
from .validation import as_float_vector, check_direction, format_float

MODALITIES = ("sound", "street", "aerial", "combined")

#: Separates a site id from a clip tag in clip-level record ids.
CLIP_SEPARATOR = "#"


def clip_record_id(site_id: str, clip_index: int) -> str:
    """Record id for clip ``clip_index`` of a site, e.g. ``"L001#clip0"``."""
    return f"{site_id}{CLIP_SEPARATOR}clip{clip_index}"


def parent_site_id(record_id: str) -> str:
    """Site id portion of a record id (identity for site-level ids)."""
    return record_id.split(CLIP_SEPARATOR, 1)[0]


def is_clip_record(record_id: str) -> bool:
    return CLIP_SEPARATOR in record_id


@dataclass(frozen=True, eq=False)
class EmbeddingRecord:
    site_id: str
    modality: str
    model_id: str
    vector: np.ndarray
    dim: int = 0

    def __post_init__(self) -> None:
        if self.modality not in MODALITIES:
            raise ValueError(
                f"modality must be one of {MODALITIES}, got {self.modality!r}"
            )
        vector = as_float_vector(self.vector, "vector")
        if not np.all(np.isfinite(vector)):
            raise ValueError("vector entries must all be finite")
        declared = self.dim or vector.size
        if declared != vector.size:
            raise ValueError(
                f"declared dim {declared} does not match vector length {vector.size}"
            )
        object.__setattr__(self, "vector", vector)
        object.__setattr__(self, "dim", int(declared))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        return (
            self.site_id == other.site_id
            and self.modality == other.modality
            and self.model_id == other.model_id
            and self.dim == other.dim
            and np.array_equal(self.vector, other.vector)
        )


def write_embeddings(records: Iterable[EmbeddingRecord], path: str | Path) -> None:
    """Write an embedding store file, enforcing its uniqueness invariants."""
    records = list(records)
    _check_store_invariants(records)
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                "{"
                f'"site_id":{json.dumps(rec.site_id)},'
                f'"modality":{json.dumps(rec.modality)},'
                f'"model_id":{json.dumps(rec.model_id)},'
                f'"dim":{rec.dim},'
                '"vector":['
                + ",".join(format_float(x) for x in rec.vector)
                + "]}\n"
            )


def read_embeddings(path: str | Path) -> list[EmbeddingRecord]:
    """Read and validate an embedding store file."""
    path = Path(path)
    records = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read embedding store {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        try:
            rec = EmbeddingRecord(
                site_id=str(obj["site_id"]),
                modality=str(obj["modality"]),
                model_id=str(obj["model_id"]),
                vector=np.asarray(obj["vector"], dtype=np.float64),
                dim=int(obj["dim"]),
            )
        except KeyError as exc:
            raise FormatError(f"{path}:{lineno}: missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        records.append(rec)
    try:
        _check_store_invariants(records)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return records


def _check_store_invariants(records: Sequence[EmbeddingRecord]) -> None:
    seen: set[tuple[str, str]] = set()
    dims: dict[tuple[str, str], int] = {}
    for rec in records:
        key = (rec.site_id, rec.modality)
        if key in seen:
            raise FormatError(
                f"duplicate record for site {rec.site_id!r} modality {rec.modality!r}"
            )
        seen.add(key)
        dim_key = (rec.modality, rec.model_id)
        expected = dims.setdefault(dim_key, rec.dim)
        if rec.dim != expected:
            raise FormatError(
                f"inconsistent dim for modality {rec.modality!r} model "
                f"{rec.model_id!r}: {expected} then {rec.dim}"
            )


def l2_normalize(v) -> np.ndarray:
    """Scale a vector to unit Euclidean norm, preserving direction."""
    v = check_direction(v, "vector")
    return v / np.linalg.norm(v)


def aggregate_clip_embeddings(clip_vectors: Sequence) -> np.ndarray:
    """Site-level vector: arithmetic mean of clip vectors, l2-normalized.

    Permutation-invariant in clip order. Raises on an empty input, on
    mixed dimensions, and on a zero-norm mean (opposed clips cancel).
    """
    if len(clip_vectors) == 0:
        raise ValueError("need at least one clip vector")
    arrays = [as_float_vector(v, f"clip_vectors[{i}]") for i, v in enumerate(clip_vectors)]
    dims = {a.size for a in arrays}
    if len(dims) != 1:
        raise ValueError(f"clip vectors have mixed dimensions {sorted(dims)}")
    mean = np.mean(arrays, axis=0)
    try:
        return l2_normalize(mean)
    except DegenerateVectorError:
        raise DegenerateVectorError(
            "clip vectors cancel: their mean has zero norm"
        ) from None


def combine_views(street, aerial) -> np.ndarray:
    """Fuse street and aerial vectors of equal dim into one of dim 2N.

    Both halves are l2-normalized, concatenated, and renormalized (the
    concatenation of two unit vectors has norm sqrt(2) by construction).
    Consequence: for any two sites, cos(combined_i, combined_j) equals
    (cos(street_i, street_j) + cos(aerial_i, aerial_j)) / 2.
    """
    s = l2_normalize(street)
    a = l2_normalize(aerial)
    if s.size != a.size:
        raise ValueError(
            f"street dim {s.size} does not match aerial dim {a.size}"
        )
    return np.concatenate([s, a]) / np.sqrt(2.0)


def collect_site_vectors(
    records: Iterable[EmbeddingRecord],
    modality: str,
    model_id: str | None = None,
) -> dict[str, np.ndarray]:
    """Site-level vectors of one modality, aggregating clip records.

    Clip records (ids containing ``#``) are grouped under their parent
    site and reduced with aggregate_clip_embeddings; site-level records
    pass through unchanged. A site holding both kinds is ambiguous and
    rejected. When ``model_id`` is None the records must agree on a
    single model id for the modality.
    """
    matching = [r for r in records if r.modality == modality]
    if model_id is not None:
        matching = [r for r in matching if r.model_id == model_id]
    else:
        model_ids = sorted({r.model_id for r in matching})
        if len(model_ids) > 1:
            raise ValueError(
                f"modality {modality!r} mixes model ids {model_ids}; "
                "pass model_id to disambiguate"
            )
    direct: dict[str, np.ndarray] = {}
    clips: dict[str, list[np.ndarray]] = {}
    for rec in matching:
        site = parent_site_id(rec.site_id)
        if is_clip_record(rec.site_id):
            clips.setdefault(site, []).append(rec.vector)
        else:
            direct[site] = rec.vector
    both = sorted(set(direct) & set(clips))
    if both:
        raise FormatError(
            f"sites {both} have both site-level and clip-level "
            f"{modality!r} records"
        )
    out = dict(direct)
    for site, vectors in clips.items():
        out[site] = aggregate_clip_embeddings(vectors)
    return out


@dataclass(frozen=True)
class LabelRaster:
    """Dense class-id grid with its legend."""

    width: int
    height: int
    legend: Mapping[int, str]
    cells: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells)
        if not np.issubdtype(cells.dtype, np.integer):
            raise ValueError("cells must be integers")
        if self.width < 1 or self.height < 1:
            raise ValueError("raster dimensions must be positive")
        if cells.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {cells.shape} does not match "
                f"height x width ({self.height}, {self.width})"
            )
        legend = {int(k): str(v) for k, v in self.legend.items()}
        present = set(np.unique(cells).tolist())
        missing = sorted(present - set(legend))
        if missing:
            raise FormatError(f"cell ids {missing} missing from legend")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "legend", legend)


def read_label_raster(path: str | Path) -> LabelRaster:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read label raster {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    try:
        width = int(obj["width"])
        height = int(obj["height"])
        legend = {int(k): str(v) for k, v in obj["legend"].items()}
        rows = obj["rows"]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"{path}: malformed raster document: {exc}") from None
    if len(rows) != height or any(len(row) != width for row in rows):
        raise FormatError(
            f"{path}: rows do not form a {height}x{width} grid"
        )
    try:
        return LabelRaster(
            width=width,
            height=height,
            legend=legend,
            cells=np.asarray(rows, dtype=np.int64),
        )
    except (ValueError, FormatError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_label_raster(raster: LabelRaster, path: str | Path) -> None:
    doc = {
        "width": raster.width,
        "height": raster.height,
        "legend": {str(k): v for k, v in sorted(raster.legend.items())},
        "rows": raster.cells.tolist(),
    }
    Path(path).write_text(
        json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class LabelProbabilities:
    """Per-site audio label scores in [0, 1]."""

    site_id: str
    labels: Mapping[str, float]

    def __post_init__(self) -> None:
        labels = {str(k): float(v) for k, v in self.labels.items()}
        if not labels:
            raise ValueError("at least one label is required")
        for name, p in labels.items():
            if not (math.isfinite(p) and 0.0 <= p <= 1.0):
                raise ValueError(
                    f"probability for label {name!r} is {p}, outside [0, 1]"
                )
        object.__setattr__(self, "labels", labels)


def read_label_probabilities(path: str | Path) -> list[LabelProbabilities]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read label probabilities {path}: {exc}") from exc
    out = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            rec = LabelProbabilities(
                site_id=str(obj["site_id"]), labels=obj["labels"]
            )
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        if rec.site_id in seen:
            raise FormatError(
                f"{path}:{lineno}: duplicate site_id {rec.site_id!r}"
            )
        seen.add(rec.site_id)
        out.append(rec)
    return out


def write_label_probabilities(
    records: Iterable[LabelProbabilities], path: str | Path
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            labels = ",".join(
                f"{json.dumps(name)}:{format_float(p)}"
                for name, p in rec.labels.items()
            )
            fh.write(
                f'{{"site_id":{json.dumps(rec.site_id)},"labels":{{{labels}}}}}\n'
            )


def write_spectrogram_json(spectrogram, path: str | Path) -> None:
    """Debug export of a spectrogram as a raster-style JSON document.

    Mirrors the LabelRaster layout (width, height, rows) with real-valued
    cells at 17 significant digits, plus the transform parameters.
    """
    values = np.asarray(getattr(spectrogram, "values", spectrogram), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("spectrogram must be 2-D")
    height, width = values.shape
    cfg = getattr(spectrogram, "config", None)
    cfg_json = ""
    if cfg is not None:
        cfg_json = (
            '"config":{'
            f'"n_fft":{cfg.n_fft},"hop":{cfg.hop},"n_mels":{cfg.n_mels},'
            f'"fmin_hz":{format_float(cfg.fmin_hz)},'
            f'"fmax_hz":{format_float(cfg.fmax_hz)},'
            f'"log_floor":{format_float(cfg.log_floor)}'
            "},"
        )
    rows = ",".join(
        "[" + ",".join(format_float(x) for x in row) + "]" for row in values
    )
    Path(path).write_text(
        f'{{"width":{width},"height":{height},{cfg_json}"rows":[{rows}]}}\n',
        encoding="utf-8",
    )
