"""Biophony/Geophony/Anthrophony projection of scene class distributions.

Each scene class carries a fixed (bio, geo, anthro) weight triple
describing how strongly that land cover is expected to source each
sound category; a scene's ecological vector is the proportion-weighted
sum b_k = sum_c p(c) * W(c)_k, deliberately not renormalized. Two
built-in weight tables cover the aerial and street class vocabularies;
audio label probabilities can be projected the same way through a
user-supplied table, since no published audio mapping exists.

Classes with no row in the table contribute zero to every category and
are tallied rather than rejected: segmentation models routinely emit
classes (e.g. "Sky") that carry no ecological weight.
"""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, FormatError
from .segmentation import ClassDistribution
from .store import LabelProbabilities

CATEGORIES = ("bio", "geo", "anthro")

BGA_VIEWS = ("aerial", "street", "audio_custom")

#: (bio, geo, anthro) weights per aerial land-cover class.
_AERIAL_WEIGHTS = {
    "Grassland": (1.0, 0.3, 0.0),
    "Forest/Vegetation": (1.0, 0.3, 0.0),
    "Wetlands": (1.0, 0.3, 0.0),
    "Waterbody": (0.3, 1.0, 0.0),
    "Bare Land": (0.1, 0.1, 1.0),
    "Road/Sidewalk": (0.1, 0.0, 1.0),
    "Building": (0.1, 0.0, 1.0),
    "Vehicles": (0.0, 0.0, 1.0),
    "Cropland": (1.0, 0.0, 0.3),
}

#: (bio, geo, anthro) weights per street-level scene class.
_STREET_WEIGHTS = {
    "Road": (0.0, 0.0, 1.0),
    "Sidewalk": (0.3, 0.0, 1.0),
    "Building": (0.3, 0.0, 1.0),
    "Vegetation": (1.0, 0.3, 0.0),
    "Waterbody": (1.0, 1.0, 0.0),
    "Person": (0.0, 0.0, 1.0),
    "Car, Truck, Bus, etc": (0.0, 0.0, 1.0),
}

VEHICLE_CLASS = "Car, Truck, Bus, etc"

#: Individual vehicle class names that resolve to the grouped street row.
STREET_VEHICLE_ALIASES = {
    name: VEHICLE_CLASS
    for name in ("Car", "Truck", "Bus", "Motorcycle", "Train", "Bicycle")
}


@dataclass(frozen=True)
class BGAVector:
    """Per-category ecological potential of one scene or sound."""

    bio: float
    geo: float
    anthro: float

    def __post_init__(self) -> None:
        for name in CATEGORIES:
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} component must be finite and >= 0")
            object.__setattr__(self, name, value)

    def as_array(self) -> np.ndarray:
        return np.array([self.bio, self.geo, self.anthro], dtype=np.float64)

    def component(self, category: str) -> float:
        if category not in CATEGORIES:
            raise ValueError(f"category must be one of {CATEGORIES}, got {category!r}")
        return getattr(self, category)


@dataclass(frozen=True)
class BGAMatrix:
    """Class-name to (bio, geo, anthro) weight table for one view.

    ``aliases`` maps alternative class names onto table rows, so
    adapters may emit e.g. "Car" where the table groups vehicles into
    one row.
    """

    view: str
    weights: Mapping[str, tuple[float, float, float]]
    aliases: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.view not in BGA_VIEWS:
            raise ValueError(f"view must be one of {BGA_VIEWS}, got {self.view!r}")
        weights = {}
        for name, triple in self.weights.items():
            values = tuple(float(v) for v in triple)
            if len(values) != len(CATEGORIES):
                raise ValueError(
                    f"class {name!r} needs {len(CATEGORIES)} weights, got {len(values)}"
                )
            if any(not np.isfinite(v) or not 0.0 <= v <= 1.0 for v in values):
                raise ValueError(f"weights for class {name!r} must lie in [0, 1]")
            weights[str(name)] = values
        aliases = {str(k): str(v) for k, v in self.aliases.items()}
        for alias, target in aliases.items():
            if target not in weights:
                raise ValueError(
                    f"alias {alias!r} points to unknown class {target!r}"
                )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "aliases", aliases)

    def lookup(self, class_name: str) -> tuple[float, float, float] | None:
        """Weight triple for a class name, following aliases; None if unmapped."""
        if class_name in self.weights:
            return self.weights[class_name]
        target = self.aliases.get(class_name)
        if target is not None:
            return self.weights[target]
        return None


def bga_matrix_for_view(view: str) -> BGAMatrix:
    """The built-in weight table for the aerial or street view."""
    if view == "aerial":
        return BGAMatrix(view="aerial", weights=_AERIAL_WEIGHTS)
    if view == "street":
        return BGAMatrix(
            view="street", weights=_STREET_WEIGHTS, aliases=STREET_VEHICLE_ALIASES
        )
    raise ValueError(f"no built-in weight table for view {view!r}")


def load_bga_matrix(path: str | Path) -> BGAMatrix:
    """Load a custom weight table from JSON.

    Expected document: ``{"view":"audio_custom","weights":{"bird":[1.0,0.0,0.0],…}}``
    with an optional ``"aliases"`` mapping.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read weight table {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return BGAMatrix(
            view=str(obj["view"]),
            weights={k: tuple(v) for k, v in obj["weights"].items()},
            aliases=obj.get("aliases", {}),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"{path}: malformed weight table: {exc}") from None


def _weighted_sum(
    shares: Mapping[str, float],
    matrix: BGAMatrix,
    unmapped_tally: Counter | None,
    kind: str,
) -> BGAVector:
    totals = np.zeros(len(CATEGORIES), dtype=np.float64)
    unmapped = []
    for name, share in shares.items():
        triple = matrix.lookup(name)
        if triple is None:
            unmapped.append(name)
            continue
        totals += float(share) * np.asarray(triple, dtype=np.float64)
    if unmapped:
        if unmapped_tally is not None:
            unmapped_tally.update(unmapped)
        else:
            warnings.warn(
                f"{kind} {sorted(unmapped)} missing from the {matrix.view!r} "
                "weight table; contributing zero",
                stacklevel=3,
            )
    return BGAVector(bio=totals[0], geo=totals[1], anthro=totals[2])


def bga_vector(
    p: ClassDistribution,
    matrix: BGAMatrix,
    unmapped_tally: Counter | None = None,
) -> BGAVector:
    """Project a class distribution: component k = sum_c p(c) * W(c)_k.

    The sum is not renormalized; with built-in tables every component
    lies in [0, 1] because proportions sum to 1 and weights are <= 1.
    Unmapped classes contribute zero and are either counted into
    ``unmapped_tally`` or reported once via ``warnings``.
    """
    if not p.proportions or sum(p.proportions.values()) == 0.0:
        raise ValueError("class distribution is empty")
    return _weighted_sum(p.proportions, matrix, unmapped_tally, "classes")


def audio_bga_vector(
    lp: LabelProbabilities,
    matrix: BGAMatrix,
    unmapped_tally: Counter | None = None,
) -> BGAVector:
    """Project audio label probabilities through a user-supplied table.

    Same weighted sum as bga_vector, over labels present in the table;
    absent labels contribute zero and are tallied. There is no published
    audio mapping, so the table is configuration, not ground truth.
    """
    if not matrix.weights:
        raise ConfigurationError("audio weight table is empty")
    return _weighted_sum(lp.labels, matrix, unmapped_tally, "labels")
