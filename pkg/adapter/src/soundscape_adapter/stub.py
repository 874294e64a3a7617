"""Deterministic no-weights feature synthesis.

Every stub output is a pure function of its key (record id, modality or
view, stub seed): values come from a counter-mode SHA-256 stream over
the key, so two runs with the same seed produce byte-identical files on
any platform, and no media is ever read.
"""

from __future__ import annotations

import hashlib
from typing import Iterator

import numpy as np

from soundscape_align import LabelProbabilities, LabelRaster

from .config import AERIAL_CLASSES, STREET_CLASSES

#: Dimension of stub embeddings, matching the transformer checkpoints
#: the real mode wraps.
STUB_DIM = 768

#: Side length of stub label rasters.
STUB_RASTER_SIZE = 16

#: Label space of the stub audio tagger. The mapping of audio labels to
#: ecological weights stays user configuration either way, so any fixed
#: vocabulary serves.
AUDIO_STUB_LABELS: tuple[str, ...] = (
    "bird song",
    "insects",
    "wind",
    "rain",
    "water",
    "speech",
    "traffic",
    "music",
    "machinery",
)


def _uint64_stream(key: str) -> Iterator[int]:
    counter = 0
    while True:
        digest = hashlib.sha256(f"{key}|{counter}".encode("utf-8")).digest()
        for offset in range(0, 32, 8):
            yield int.from_bytes(digest[offset : offset + 8], "big")
        counter += 1


def _uniforms(key: str, count: int) -> np.ndarray:
    """count floats in [0, 1), derived only from the key."""
    stream = _uint64_stream(key)
    return np.array([next(stream) / 2.0**64 for _ in range(count)], dtype=np.float64)


def stub_unit_vector(
    record_id: str, modality: str, stub_seed: int, dim: int = STUB_DIM
) -> np.ndarray:
    """Unit-norm embedding for one store record."""
    u = _uniforms(f"embed|{stub_seed}|{modality}|{record_id}", dim) * 2.0 - 1.0
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        u[0] = 1.0
        norm = 1.0
    return u / norm


def _classes_for_view(view: str) -> tuple[str, ...]:
    if view == "street":
        return STREET_CLASSES
    if view == "aerial":
        return AERIAL_CLASSES
    raise ValueError(f"unknown raster view {view!r}")


def stub_raster(
    site_id: str,
    view: str,
    stub_seed: int,
    width: int = STUB_RASTER_SIZE,
    height: int = STUB_RASTER_SIZE,
) -> LabelRaster:
    """Total labeling over the view's built-in class legend."""
    classes = _classes_for_view(view)
    u = _uniforms(f"raster|{stub_seed}|{view}|{site_id}", width * height)
    cells = np.floor(u * len(classes)).astype(np.int64).reshape(height, width)
    legend = {i: name for i, name in enumerate(classes)}
    return LabelRaster(width=width, height=height, legend=legend, cells=cells)


def stub_label_probabilities(site_id: str, stub_seed: int) -> LabelProbabilities:
    """Independent per-label scores in [0, 1), multi-label style."""
    u = _uniforms(f"labels|{stub_seed}|audio|{site_id}", len(AUDIO_STUB_LABELS))
    return LabelProbabilities(
        site_id=site_id, labels=dict(zip(AUDIO_STUB_LABELS, u))
    )
