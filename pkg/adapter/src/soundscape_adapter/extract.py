"""Walk a manifest and emit feature files in the core formats.

Stub mode synthesizes every output from keyed hashes; real mode runs
the configured checkpoints. Per-site media or inference failures in
real mode become sidecar error records (``errors.jsonl``) and the run
continues; configuration and checkpoint problems abort instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from soundscape_align import (
    EmbeddingRecord,
    LabelProbabilities,
    LabelRaster,
    Manifest,
    clip_record_id,
    l2_normalize,
    load_manifest,
    write_embeddings,
    write_label_probabilities,
    write_label_raster,
)

from .config import AERIAL_CLASSES, AdapterConfig
from .stub import stub_label_probabilities, stub_raster, stub_unit_vector

EMBEDDINGS_FILE = "embeddings.jsonl"
RASTER_DIR = "rasters"
LABEL_PROBABILITIES_FILE = "label_probabilities.jsonl"
ERRORS_FILE = "errors.jsonl"


@dataclass(frozen=True)
class SiteError:
    """One failed (site, stage); the run continued past it."""

    site_id: str
    stage: str
    message: str


@dataclass
class ExtractOutcome:
    written: list[str]
    errors: list[SiteError]


def _media_root(cfg: AdapterConfig, manifest: Manifest) -> Path:
    if cfg.media_root:
        return Path(cfg.media_root)
    if manifest.source_path:
        return Path(manifest.source_path).parent
    return Path(".")


def _resolve(root: Path, media_path: str) -> Path:
    path = Path(media_path)
    return path if path.is_absolute() else root / path


def extract_embeddings(cfg: AdapterConfig, manifest: Manifest) -> ExtractOutcome:
    """One embedding store file: per-clip sound records plus one street
    and one aerial record per site that carries that modality."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    root = _media_root(cfg, manifest)
    backend = None
    if not cfg.stub_mode:
        from .real import EmbeddingBackend

        backend = EmbeddingBackend(cfg)

    records: list[EmbeddingRecord] = []
    errors: list[SiteError] = []
    for site in manifest.sites:
        paths = site.modality_paths()
        if "audio" in paths:
            model_id = "stub-sound" if cfg.stub_mode else cfg.sound_model
            try:
                if cfg.stub_mode:
                    vectors = [
                        stub_unit_vector(
                            clip_record_id(site.site_id, k), "sound", cfg.stub_seed
                        )
                        for k in range(cfg.clips_per_site)
                    ]
                else:
                    vectors = backend.sound_clip_vectors(_resolve(root, paths["audio"]))
                records += [
                    EmbeddingRecord(
                        clip_record_id(site.site_id, k), "sound", model_id, v
                    )
                    for k, v in enumerate(vectors)
                ]
            except Exception as exc:
                if cfg.stub_mode:
                    raise
                errors.append(SiteError(site.site_id, "sound", str(exc)))
        for view in ("street", "aerial"):
            if view not in paths:
                continue
            model_id = f"stub-{view}" if cfg.stub_mode else getattr(cfg, f"{view}_model")
            try:
                if cfg.stub_mode:
                    vector = stub_unit_vector(site.site_id, view, cfg.stub_seed)
                else:
                    extract = getattr(backend, f"{view}_vector")
                    vector = l2_normalize(extract(_resolve(root, paths[view])))
                records.append(
                    EmbeddingRecord(site.site_id, view, model_id, vector)
                )
            except Exception as exc:
                if cfg.stub_mode:
                    raise
                errors.append(SiteError(site.site_id, view, str(exc)))

    store_path = out_dir / EMBEDDINGS_FILE
    write_embeddings(records, store_path)
    return ExtractOutcome(written=[str(store_path)], errors=errors)


def segment_images(cfg: AdapterConfig, manifest: Manifest) -> ExtractOutcome:
    """Label rasters per (site, view), plus audio label scores when
    configured. Rasters are total labelings over the view's legend."""
    out_dir = Path(cfg.out_dir)
    raster_dir = out_dir / RASTER_DIR
    raster_dir.mkdir(parents=True, exist_ok=True)
    root = _media_root(cfg, manifest)
    seg_backend = None
    tag_backend = None
    if not cfg.stub_mode:
        from .real import AudioTagBackend, SegmentationBackend

        seg_backend = SegmentationBackend(cfg)
        if cfg.audio_labels:
            tag_backend = AudioTagBackend(cfg)

    written: list[str] = []
    errors: list[SiteError] = []
    label_records: list[LabelProbabilities] = []
    legends = {"street": cfg.street_prompts, "aerial": AERIAL_CLASSES}
    for site in manifest.sites:
        paths = site.modality_paths()
        for view in ("street", "aerial"):
            if view not in paths:
                continue
            try:
                if cfg.stub_mode:
                    raster = stub_raster(site.site_id, view, cfg.stub_seed)
                else:
                    names = legends[view]
                    cells = seg_backend.raster(
                        view, _resolve(root, paths[view]), names
                    )
                    raster = LabelRaster(
                        width=cells.shape[1],
                        height=cells.shape[0],
                        legend={i: n for i, n in enumerate(names)},
                        cells=cells,
                    )
            except Exception as exc:
                if cfg.stub_mode:
                    raise
                errors.append(SiteError(site.site_id, f"{view}-segmentation", str(exc)))
                continue
            raster_path = raster_dir / f"{site.site_id}.{view}.json"
            write_label_raster(raster, raster_path)
            written.append(str(raster_path))
        if cfg.audio_labels and "audio" in paths:
            try:
                if cfg.stub_mode:
                    label_records.append(
                        stub_label_probabilities(site.site_id, cfg.stub_seed)
                    )
                else:
                    label_records.append(
                        LabelProbabilities(
                            site_id=site.site_id,
                            labels=tag_backend.label_scores(
                                _resolve(root, paths["audio"])
                            ),
                        )
                    )
            except Exception as exc:
                if cfg.stub_mode:
                    raise
                errors.append(SiteError(site.site_id, "audio-labels", str(exc)))

    if label_records:
        labels_path = out_dir / LABEL_PROBABILITIES_FILE
        write_label_probabilities(label_records, labels_path)
        written.append(str(labels_path))
    return ExtractOutcome(written=written, errors=errors)


def extract_all(cfg: AdapterConfig) -> ExtractOutcome:
    """Load the manifest, run both extraction stages, write the error
    sidecar when anything failed."""
    manifest = load_manifest(cfg.manifest_path)
    embeddings = extract_embeddings(cfg, manifest)
    segmentation = segment_images(cfg, manifest)
    written = embeddings.written + segmentation.written
    errors = embeddings.errors + segmentation.errors
    if errors:
        errors_path = Path(cfg.out_dir) / ERRORS_FILE
        with errors_path.open("w", encoding="utf-8", newline="\n") as fh:
            for err in errors:
                fh.write(
                    json.dumps(
                        {
                            "site_id": err.site_id,
                            "stage": err.stage,
                            "error": err.message,
                        },
                        separators=(",", ":"),
                    )
                    + "\n"
                )
        written.append(str(errors_path))
    return ExtractOutcome(written=written, errors=errors)
