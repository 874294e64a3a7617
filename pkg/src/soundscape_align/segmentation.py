"""Scene-level class distributions from dense label rasters.

A segmented scene is reduced to the proportion of pixels per class:
proportion(c) = count(cells == c) / (width * height). Legend classes
absent from the cells get proportion 0, so every scene from one legend
yields a vector over the same class set. Spatial arrangement is
deliberately discarded; only counts matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .store import LabelRaster


@dataclass(frozen=True)
class ClassDistribution:
    """Pixel proportions per class name; sums to 1 within 1e-12."""

    proportions: Mapping[str, float]
    total_pixels: int

    def __post_init__(self) -> None:
        props = {str(k): float(v) for k, v in self.proportions.items()}
        if self.total_pixels < 1:
            raise ValueError("total_pixels must be positive")
        if not props:
            raise ValueError("at least one class is required")
        if any(v < 0.0 for v in props.values()):
            raise ValueError("proportions must be nonnegative")
        if abs(sum(props.values()) - 1.0) > 1e-12:
            raise ValueError("proportions must sum to 1")
        object.__setattr__(self, "proportions", props)

    def get(self, class_name: str) -> float:
        return self.proportions.get(class_name, 0.0)


def class_distribution(raster: LabelRaster) -> ClassDistribution:
    """Pixel-count proportions of a raster over its full legend.

    The raster type already guarantees a total labeling (every cell id
    present in the legend) and at least one pixel. Distinct legend ids
    sharing one class name pool their counts.
    """
    total = raster.cells.size
    if total == 0:
        raise ValueError("raster has no pixels")
    ids, counts = np.unique(raster.cells, return_counts=True)
    count_by_id = dict(zip(ids.tolist(), counts.tolist()))
    proportions: dict[str, float] = {}
    for class_id, name in sorted(raster.legend.items()):
        share = count_by_id.get(class_id, 0) / total
        proportions[name] = proportions.get(name, 0.0) + share
    return ClassDistribution(proportions=proportions, total_pixels=total)
