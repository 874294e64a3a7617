"""Estimator-style wrappers around the feature transforms.

Each transform stage is also available with the fit/transform calling
convention, so stages compose in standard pipelines and their
parameters travel through get_params/set_params/clone. All are
stateless in the sense of a normalizer: fit only validates parameters
(ClassProportionExtractor additionally learns its class axis), and
transform is a pure function of the input.
"""

from __future__ import annotations

from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .audio import (
    LogMelSpectrogram,
    SpectrogramConfig,
    Waveform,
    log_mel_spectrogram,
    patchify,
    segment_waveform,
)
from .ecology import BGAMatrix, bga_matrix_for_view, bga_vector
from .segmentation import ClassDistribution, class_distribution
from .store import LabelRaster


class ClipSegmenter(TransformerMixin, BaseEstimator):
    """Cut waveforms into fixed-length clips.

    transform consumes an iterable of Waveform and returns one flat
    list of clips, in input order; a waveform's clip count varies with
    its duration, so per-input grouping is up to the caller.
    """

    def __init__(self, clip_seconds: float = 10.0, min_tail_fraction: float = 0.5):
        self.clip_seconds = clip_seconds
        self.min_tail_fraction = min_tail_fraction

    def _check_params(self) -> None:
        if self.clip_seconds <= 0:
            raise ValueError("clip_seconds must be positive")
        if not 0.0 <= self.min_tail_fraction <= 1.0:
            raise ValueError("min_tail_fraction must be in [0, 1]")

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def transform(self, X) -> list[Waveform]:
        self._check_params()
        return [
            clip
            for waveform in X
            for clip in segment_waveform(
                waveform, self.clip_seconds, self.min_tail_fraction
            )
        ]


class LogMelExtractor(TransformerMixin, BaseEstimator):
    """Waveforms to log-Mel spectrograms."""

    def __init__(
        self,
        n_fft: int = 400,
        hop: int = 160,
        n_mels: int = 128,
        fmin_hz: float = 0.0,
        fmax_hz: float = 8_000.0,
        log_floor: float = 1e-10,
    ):
        self.n_fft = n_fft
        self.hop = hop
        self.n_mels = n_mels
        self.fmin_hz = fmin_hz
        self.fmax_hz = fmax_hz
        self.log_floor = log_floor

    def _config(self) -> SpectrogramConfig:
        return SpectrogramConfig(
            n_fft=self.n_fft,
            hop=self.hop,
            n_mels=self.n_mels,
            fmin_hz=self.fmin_hz,
            fmax_hz=self.fmax_hz,
            log_floor=self.log_floor,
        )

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X) -> list[LogMelSpectrogram]:
        cfg = self._config()
        return [log_mel_spectrogram(w, cfg) for w in X]


class Patchifier(TransformerMixin, BaseEstimator):
    """Spectrograms to flattened non-overlapping patch matrices."""

    def __init__(self, patch_h: int = 16, patch_w: int = 16):
        self.patch_h = patch_h
        self.patch_w = patch_w

    def _check_params(self) -> None:
        if self.patch_h < 1 or self.patch_w < 1:
            raise ValueError("patch dimensions must be positive")

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def transform(self, X) -> list[np.ndarray]:
        self._check_params()
        return [patchify(s, self.patch_h, self.patch_w).patches for s in X]


class ClassProportionExtractor(TransformerMixin, BaseEstimator):
    """Label rasters to rows of pixel proportions on a fixed class axis.

    fit learns the class axis as the sorted union of legend names seen
    (unless ``class_names`` pins it); transform maps each raster onto
    that axis, filling classes absent from a scene with 0.
    """

    def __init__(self, class_names=None):
        self.class_names = class_names

    def fit(self, X, y=None):
        if self.class_names is not None:
            names = list(self.class_names)
            if len(set(names)) != len(names):
                raise ValueError("class_names contains duplicates")
            self.class_names_ = list(names)
        else:
            seen: set[str] = set()
            for raster in X:
                seen.update(raster.legend.values())
            if not seen:
                raise ValueError("no classes found in any legend")
            self.class_names_ = sorted(seen)
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "class_names_")
        return np.asarray(self.class_names_, dtype=object)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "class_names_")
        rows = []
        for raster in X:
            dist = class_distribution(raster)
            unknown = sorted(set(dist.proportions) - set(self.class_names_))
            if unknown:
                raise ValueError(
                    f"raster contains classes {unknown} outside the learned axis"
                )
            rows.append([dist.get(name) for name in self.class_names_])
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), -1)


class BGAProjector(TransformerMixin, BaseEstimator):
    """Class distributions (or rasters) to (bio, geo, anthro) rows.

    Uses the built-in weight table for ``view`` unless ``matrix`` is
    given. Classes missing from the table contribute zero; their counts
    accumulate in ``unmapped_tally_`` after each transform.
    """

    def __init__(self, view: str = "street", matrix: BGAMatrix | None = None):
        self.view = view
        self.matrix = matrix

    def _resolve_matrix(self) -> BGAMatrix:
        if self.matrix is not None:
            return self.matrix
        return bga_matrix_for_view(self.view)

    def fit(self, X=None, y=None):
        self._resolve_matrix()
        return self

    def transform(self, X) -> np.ndarray:
        matrix = self._resolve_matrix()
        tally: Counter = Counter()
        rows = []
        for item in X:
            if isinstance(item, LabelRaster):
                item = class_distribution(item)
            if not isinstance(item, ClassDistribution):
                raise TypeError(
                    "expected LabelRaster or ClassDistribution, got "
                    f"{type(item).__name__}"
                )
            rows.append(bga_vector(item, matrix, tally).as_array())
        self.unmapped_tally_ = tally
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), 3)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["bio", "geo", "anthro"], dtype=object)
