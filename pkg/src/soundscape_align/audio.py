"""Waveform ingestion and the log-Mel spectrogram front end.

The transform is S = ln(max(Mel @ |STFT(x)|^2, log_floor)) with:

* STFT frames of ``n_fft`` samples every ``hop`` samples, multiplied by a
  periodic Hann window w[n] = 0.5 - 0.5*cos(2*pi*n/N); frame count is
  T' = 1 + floor((T - n_fft)/hop) and no padding is applied.
* Power (squared magnitude) of the one-sided rFFT, n_fft//2 + 1 bins.
* A triangular Mel filterbank on the HTK scale
  mel = 2595 * log10(1 + f/700), peak weight 1, no area normalization.
* Natural log with a positive floor, so every output entry is
  >= ln(log_floor) and the all-zero signal maps to exactly ln(log_floor).

Scaling identity: S(a*x) = S(x) + 2*ln(a) wherever both sides sit above
the floor, for any a > 0.

Recordings are cut into fixed-length clips (default 10 s) before
spectrogram extraction; a final partial clip is zero-padded to full
length when it holds at least ``min_tail_fraction`` of a clip worth of
real samples, and dropped otherwise.

All functions here are pure; no state is shared between calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import FormatError

DEFAULT_SAMPLE_RATE = 16_000


@dataclass(frozen=True)
class Waveform:
    """A finite mono signal with its sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must all be finite")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class SpectrogramConfig:
    """Parameters of the log-Mel transform.

    Defaults assume 16 kHz mono input: 25 ms windows, 10 ms hop,
    128 Mel bands spanning 0..8 kHz.
    """

    n_fft: int = 400
    hop: int = 160
    n_mels: int = 128
    fmin_hz: float = 0.0
    fmax_hz: float = 8_000.0
    log_floor: float = 1e-10

    def __post_init__(self) -> None:
        if self.n_fft < 1:
            raise ValueError("n_fft must be positive")
        if not 0 < self.hop <= self.n_fft:
            raise ValueError("hop must satisfy 0 < hop <= n_fft")
        if self.n_mels < 2:
            raise ValueError("n_mels must be at least 2")
        if not 0.0 <= self.fmin_hz < self.fmax_hz:
            raise ValueError("need 0 <= fmin_hz < fmax_hz")
        if not self.log_floor > 0.0:
            raise ValueError("log_floor must be positive")


@dataclass(frozen=True)
class LogMelSpectrogram:
    """F x T' grid of log-Mel energies plus the config that produced it."""

    values: np.ndarray
    config: SpectrogramConfig

    @property
    def n_mels(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PatchGrid:
    """Row-major non-overlapping partition of a spectrogram.

    ``patches[i]`` is the row-major flattening of patch i; patches are
    ordered row-major over the grid of patch positions.
    """

    patches: np.ndarray
    patch_h: int
    patch_w: int
    grid_shape: tuple[int, int] = field(default=(0, 0))

    @property
    def n_patches(self) -> int:
        return self.patches.shape[0]


def load_waveform(
    path: str | Path, expected_rate_hz: int | None = None
) -> Waveform:
    """Read a WAV file as float64 mono in [-1, 1].

    Supports PCM 16/24/32-bit and 32-bit float encodings. Multichannel
    audio is averaged to mono. Resampling is out of scope: when
    ``expected_rate_hz`` is given, a file at any other rate is rejected.
    """
    path = Path(path)
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise FormatError(f"audio file not found: {path}") from None
    except ValueError as exc:
        raise FormatError(f"unreadable WAV file {path}: {exc}") from exc

    if data.dtype == np.int16:
        samples = data / 2.0**15
    elif data.dtype == np.int32:
        # 24-bit PCM arrives as int32 with samples in the upper bytes,
        # so one scale covers both 24- and 32-bit.
        samples = data / 2.0**31
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise FormatError(
            f"unsupported WAV sample format {data.dtype} in {path}; "
            "use 16/24/32-bit PCM or 32-bit float"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if expected_rate_hz is not None and rate != expected_rate_hz:
        raise FormatError(
            f"{path}: sample rate {rate} Hz does not match the configured "
            f"{expected_rate_hz} Hz; resample before ingestion"
        )
    return Waveform(samples=samples, sample_rate_hz=int(rate))


def segment_waveform(
    w: Waveform,
    clip_seconds: float = 10.0,
    min_tail_fraction: float = 0.5,
) -> list[Waveform]:
    """Cut a waveform into consecutive non-overlapping fixed-length clips.

    The final partial clip is zero-padded to full length iff it carries
    at least ``min_tail_fraction`` of a clip of real samples; otherwise
    it is dropped. Concatenating the clips reproduces the input exactly
    over the samples they cover.
    """
    if clip_seconds <= 0:
        raise ValueError("clip_seconds must be positive")
    if not 0.0 <= min_tail_fraction <= 1.0:
        raise ValueError("min_tail_fraction must be in [0, 1]")
    clip_len = int(round(clip_seconds * w.sample_rate_hz))
    if clip_len < 1:
        raise ValueError("clip_seconds is below one sample at this rate")

    x = w.samples
    clips = []
    n_full = x.size // clip_len
    for k in range(n_full):
        clips.append(
            Waveform(x[k * clip_len : (k + 1) * clip_len], w.sample_rate_hz)
        )
    tail = x.size - n_full * clip_len
    if tail > 0 and tail >= min_tail_fraction * clip_len:
        padded = np.zeros(clip_len, dtype=np.float64)
        padded[:tail] = x[n_full * clip_len :]
        clips.append(Waveform(padded, w.sample_rate_hz))
    return clips


def hz_to_mel(f_hz):
    """HTK Mel scale: mel = 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    """Inverse of hz_to_mel."""
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: SpectrogramConfig, sample_rate_hz: int) -> np.ndarray:
    """Triangular Mel filterbank, shape (n_mels, n_fft//2 + 1).

    Band centers are spaced evenly on the Mel scale between fmin_hz and
    fmax_hz; each row samples a single triangle of peak 1 over a
    contiguous support. Entries are nonnegative and at most 1. A triangle
    narrower than the FFT bin spacing can sample to an all-zero row; such
    bands simply contribute the log floor downstream.
    """
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    if cfg.fmax_hz > sample_rate_hz / 2.0:
        raise ValueError(
            f"fmax_hz {cfg.fmax_hz} exceeds the Nyquist frequency "
            f"{sample_rate_hz / 2.0}"
        )
    n_bins = cfg.n_fft // 2 + 1
    fft_freqs = np.arange(n_bins, dtype=np.float64) * (sample_rate_hz / cfg.n_fft)
    mel_pts = np.linspace(
        hz_to_mel(cfg.fmin_hz), hz_to_mel(cfg.fmax_hz), cfg.n_mels + 2
    )
    hz_pts = mel_to_hz(mel_pts)
    if np.any(np.diff(hz_pts) <= 0.0):
        raise ValueError(
            "Mel breakpoints collapse; widen [fmin_hz, fmax_hz] or lower n_mels"
        )
    lower = hz_pts[:-2, np.newaxis]
    center = hz_pts[1:-1, np.newaxis]
    upper = hz_pts[2:, np.newaxis]
    rising = (fft_freqs - lower) / (center - lower)
    falling = (upper - fft_freqs) / (upper - center)
    return np.maximum(0.0, np.minimum(rising, falling))


def periodic_hann(n_fft: int) -> np.ndarray:
    """Periodic Hann window: w[n] = 0.5 - 0.5*cos(2*pi*n/N), n = 0..N-1."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)


def stft_power(samples: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """One-sided power spectrogram |STFT|^2, shape (n_fft//2+1, T').

    Frames start at multiples of ``hop``; no centering or padding, so
    T' = 1 + floor((T - n_fft)/hop). Requires T >= n_fft.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("samples must be 1-D")
    if x.size < n_fft:
        raise ValueError(
            f"waveform of {x.size} samples is shorter than one frame ({n_fft})"
        )
    frames = np.lib.stride_tricks.sliding_window_view(x, n_fft)[::hop]
    spectrum = np.fft.rfft(frames * periodic_hann(n_fft), axis=1)
    return (spectrum.real**2 + spectrum.imag**2).T


def log_mel_spectrogram(w: Waveform, cfg: SpectrogramConfig) -> LogMelSpectrogram:
    """Natural-log Mel power spectrogram with a positive floor."""
    power = stft_power(w.samples, cfg.n_fft, cfg.hop)
    fb = mel_filterbank(cfg, w.sample_rate_hz)
    values = np.log(np.maximum(fb @ power, cfg.log_floor))
    return LogMelSpectrogram(values=values, config=cfg)


def patchify(spectrogram, patch_h: int, patch_w: int) -> PatchGrid:
    """Partition a spectrogram into flattened non-overlapping patches.

    Accepts a LogMelSpectrogram or a bare 2-D array. Both dimensions
    must divide exactly; there is no implicit truncation. Patches are
    ordered row-major over patch positions and each is flattened
    row-major, so the grid can be reconstructed exactly.
    """
    values = np.asarray(getattr(spectrogram, "values", spectrogram), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("spectrogram must be 2-D")
    if patch_h < 1 or patch_w < 1:
        raise ValueError("patch dimensions must be positive")
    n_rows, n_cols = values.shape
    if n_rows % patch_h or n_cols % patch_w:
        raise ValueError(
            f"grid {n_rows}x{n_cols} is not divisible by patches "
            f"{patch_h}x{patch_w}"
        )
    patches = (
        values.reshape(n_rows // patch_h, patch_h, n_cols // patch_w, patch_w)
        .transpose(0, 2, 1, 3)
        .reshape(-1, patch_h * patch_w)
    )
    return PatchGrid(
        patches=patches,
        patch_h=patch_h,
        patch_w=patch_w,
        grid_shape=(n_rows, n_cols),
    )


def unpatchify(grid: PatchGrid) -> np.ndarray:
    """Exact inverse of patchify for the recorded grid shape."""
    n_rows, n_cols = grid.grid_shape
    return (
        grid.patches.reshape(
            n_rows // grid.patch_h,
            n_cols // grid.patch_w,
            grid.patch_h,
            grid.patch_w,
        )
        .transpose(0, 2, 1, 3)
        .reshape(n_rows, n_cols)
    )
