"""Cosine similarity over site pairs, in one canonical pair order.

All per-pair series in a run share a single canonical ordering: sites
sorted lexicographically by id, then all unordered pairs (i, j) with
i < j, row-major over the upper triangle. Correlating two series is only
meaningful when their pair indexes are identical, and that identity is
asserted, never assumed.

Scalar ecological categories get their own pair similarity,
1 - |b_k(i) - b_k(j)|, because cosine degenerates on scalars.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateVectorError
from .validation import as_float_vector, check_direction, format_float


@dataclass(frozen=True)
class PairIndex:
    """Canonically ordered site pairs: sites sorted, pairs (i, j), i < j."""

    sites: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def from_site_ids(cls, site_ids) -> "PairIndex":
        ids = [str(s) for s in site_ids]
        if len(set(ids)) != len(ids):
            dupes = sorted({s for s in ids if ids.count(s) > 1})
            raise ValueError(f"duplicate site ids {dupes}")
        sites = tuple(sorted(ids))
        pairs = tuple(
            (sites[i], sites[j])
            for i in range(len(sites))
            for j in range(i + 1, len(sites))
        )
        return cls(sites=sites, pairs=pairs)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class PairVector:
    """One real value per canonical pair, tagged with a comparison id."""

    index: PairIndex
    values: np.ndarray
    comparison_id: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.index.n_pairs:
            raise ValueError(
                f"{values.size} values for {self.index.n_pairs} pairs"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("pair values must all be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def cosine(u, v) -> float:
    """cos(u, v) = u.v / (|u||v|), clamped into [-1, 1] against rounding."""
    u = check_direction(u, "u")
    v = check_direction(v, "v")
    if u.size != v.size:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    with np.errstate(over="ignore", invalid="ignore"):
        value = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    if not np.isfinite(value):
        # Squared magnitudes under/overflowed; directions are still fine,
        # so rescale each vector to max-abs 1 and recompute.
        u = u / np.max(np.abs(u))
        v = v / np.max(np.abs(v))
        value = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return min(1.0, max(-1.0, value))


def pairwise_similarity(
    items: Mapping[str, Sequence], comparison_id: str = ""
) -> PairVector:
    """Cosine similarity for every site pair, in canonical order."""
    if len(items) < 2:
        raise ValueError(f"need at least 2 sites, got {len(items)}")
    vectors = {}
    for site_id, v in items.items():
        try:
            vectors[site_id] = check_direction(v, "vector")
        except (ValueError, DegenerateVectorError) as exc:
            raise type(exc)(f"site {site_id!r}: {exc}") from None
    dims = sorted({v.size for v in vectors.values()})
    if len(dims) != 1:
        raise ValueError(f"sites have mixed vector dimensions {dims}")
    index = PairIndex.from_site_ids(vectors)
    values = np.array(
        [cosine(vectors[i], vectors[j]) for i, j in index.pairs], dtype=np.float64
    )
    return PairVector(index=index, values=values, comparison_id=comparison_id)


def bga_category_pair_similarity(
    vectors: Mapping, category: str, comparison_id: str = ""
) -> PairVector:
    """Agreement on one ecological category: 1 - |b_k(i) - b_k(j)|.

    ``vectors`` maps site id to a BGAVector (or any object with bio/geo/
    anthro attributes, or a 3-sequence). Components must lie in [0, 1]
    so the result lies in [0, 1]; symmetric in i and j by construction.
    """
    if category not in ("bio", "geo", "anthro"):
        raise ValueError(
            f"category must be one of ('bio', 'geo', 'anthro'), got {category!r}"
        )
    if len(vectors) < 2:
        raise ValueError(f"need at least 2 sites, got {len(vectors)}")
    position = ("bio", "geo", "anthro").index(category)
    components = {}
    for site_id, v in vectors.items():
        value = getattr(v, category, None)
        if value is None:
            value = as_float_vector(v, f"site {site_id!r}")[position]
        value = float(value)
        if not np.isfinite(value) or not 0.0 <= value <= 1.0:
            raise ValueError(
                f"site {site_id!r}: {category} component {value} outside [0, 1]"
            )
        components[site_id] = value
    index = PairIndex.from_site_ids(components)
    values = np.array(
        [1.0 - abs(components[i] - components[j]) for i, j in index.pairs],
        dtype=np.float64,
    )
    return PairVector(index=index, values=values, comparison_id=comparison_id)


def write_pair_vector_csv(pv: PairVector, path: str | Path) -> None:
    """Export a pair series as ``site_i,site_j,value`` in canonical order."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["site_i", "site_j", "value"])
        for (site_i, site_j), value in zip(pv.index.pairs, pv.values):
            writer.writerow([site_i, site_j, format_float(value)])
