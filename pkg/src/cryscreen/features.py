"""Cepstral feature extraction from fixed-length sample windows.

The front end is a conventional speech chain: pre-emphasis, overlapping
frames under a Hamming window, magnitude spectrum, triangular mel
filterbank energies, log compression, and an orthonormal DCT-II that
keeps coefficients 1..n_coeffs (the 0th, a pure energy term, is
discarded). With the defaults an 8000-sample window becomes 14 frames of
12 coefficients, flattened frame-major into a 168-element vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class FeatureConfig:
    """Front-end geometry and constants.

    The analysis rate is declared, not read from file headers: a window of
    ``window_len`` samples is treated as one second of audio, so the
    default is an effective 8 kHz and the filterbank spans [0, 4 kHz].
    """

    window_len: int = 8000
    sample_rate_hz: int = 8000
    frame_len: int = 1024
    hop: int = 512
    n_filters: int = 24
    n_coeffs: int = 12
    alpha: float = 0.97
    floor: float = 1e-10

    def __post_init__(self):
        if self.window_len < 2:
            raise ConfigurationError("window_len must be at least 2")
        if self.sample_rate_hz < 1:
            raise ConfigurationError("sample_rate_hz must be positive")
        if self.frame_len < 2 or self.frame_len & (self.frame_len - 1):
            raise ConfigurationError("frame_len must be a power of two, at least 2")
        if self.frame_len > self.window_len:
            raise ConfigurationError("frame_len cannot exceed window_len")
        if self.hop < 1:
            raise ConfigurationError("hop must be at least 1")
        if self.n_filters < 1:
            raise ConfigurationError("n_filters must be positive")
        if not 1 <= self.n_coeffs <= self.n_filters:
            raise ConfigurationError("n_coeffs must lie in [1, n_filters]")
        if not 0.0 <= self.alpha < 1.0:
            raise ConfigurationError("pre-emphasis alpha must lie in [0, 1)")
        if self.floor <= 0.0:
            raise ConfigurationError("energy floor must be positive")

    @property
    def n_frames(self) -> int:
        return (self.window_len - self.frame_len) // self.hop + 1

    @property
    def feature_dim(self) -> int:
        return self.n_frames * self.n_coeffs


def pre_emphasize(x, alpha: float = 0.97) -> np.ndarray:
    """First-order pre-emphasis: y[0] = x[0], y[i] = x[i] - alpha*x[i-1]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ConfigurationError("need a nonempty 1-D signal")
    if not 0.0 <= alpha < 1.0:
        raise ConfigurationError("alpha must lie in [0, 1)")
    out = x.copy()
    out[1:] -= alpha * x[:-1]
    return out


def frame_signal(x, frame_len: int, hop: int) -> np.ndarray:
    """Slice a signal into overlapping frames, shape (n_frames, frame_len).

    Frame j covers samples [j*hop, j*hop + frame_len); trailing samples
    that cannot fill a frame are dropped.
    """
    x = np.asarray(x, dtype=np.float64)
    if hop < 1:
        raise ConfigurationError("hop must be at least 1")
    if frame_len < 1 or frame_len > x.size:
        raise ConfigurationError(
            f"frame_len {frame_len} is invalid for a signal of {x.size} samples"
        )
    n_frames = (x.size - frame_len) // hop + 1
    windows = np.lib.stride_tricks.sliding_window_view(x, frame_len)
    return windows[:: hop][:n_frames].copy()


@lru_cache(maxsize=8)
def _hamming(n: int) -> np.ndarray:
    w = 0.54 - 0.46 * np.cos(2.0 * np.pi * np.arange(n) / (n - 1))
    w.setflags(write=False)
    return w


def apply_window(frame) -> np.ndarray:
    """Multiply a frame elementwise by the Hamming window of its length."""
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[-1]
    if n < 2:
        raise ConfigurationError("windowing needs at least two samples")
    return frame * _hamming(n)


@lru_cache(maxsize=16)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev = (rev << 1) | ((idx >> b) & 1)
    rev.setflags(write=False)
    return rev


def fft_complex(x) -> np.ndarray:
    """Radix-2 decimation-in-time FFT over the last axis.

    The length must be a power of two; twiddles are recomputed per stage
    so precision is limited only by double rounding.
    """
    x = np.asarray(x)
    n = x.shape[-1]
    if n == 0 or n & (n - 1):
        raise ConfigurationError("FFT length must be a power of two")
    out = np.asarray(x, dtype=np.complex128)[..., _bit_reversal(n)].copy()
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp((-2j * np.pi / size) * np.arange(half))
        blocks = out.reshape(out.shape[:-1] + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        upper = even + odd
        lower = even - odd
        blocks[..., :half] = upper
        blocks[..., half:] = lower
        size *= 2
    return out


def fft_magnitude(frame) -> np.ndarray:
    """One-sided magnitude spectrum: |X_k| for bins 0..L/2 of a real frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 1:
        raise ConfigurationError("expected a single 1-D frame")
    n = frame.size
    if n < 2 or n & (n - 1):
        raise ConfigurationError("frame length must be a power of two, at least 2")
    return np.abs(fft_complex(frame)[: n // 2 + 1])


def mel_from_hz(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def hz_from_mel(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    """Triangular filters over one-sided spectrum bins, rows sum > 0."""

    weights: np.ndarray  # (n_filters, n_bins), nonnegative
    f_low: float
    f_high: float

    @property
    def n_filters(self) -> int:
        return self.weights.shape[0]

    @property
    def n_bins(self) -> int:
        return self.weights.shape[1]


def make_mel_filterbank(
    n_filters: int,
    n_bins: int,
    sample_rate_hz: int,
    f_low: float = 0.0,
    f_high: float | None = None,
) -> MelFilterbank:
    """Build triangles with centers uniformly spaced on the mel scale.

    ``n_bins`` is the one-sided bin count L/2+1 of an L-point transform.
    """
    if f_high is None:
        f_high = sample_rate_hz / 2.0
    if n_filters < 1:
        raise ConfigurationError("need at least one filter")
    if n_bins < 3:
        raise ConfigurationError("need at least three spectrum bins")
    if not 0.0 <= f_low < f_high <= sample_rate_hz / 2.0:
        raise ConfigurationError("require 0 <= f_low < f_high <= Nyquist")

    bin_hz = sample_rate_hz / (2.0 * (n_bins - 1))
    freqs = np.arange(n_bins) * bin_hz
    edges = hz_from_mel(np.linspace(mel_from_hz(f_low), mel_from_hz(f_high), n_filters + 2))

    weights = np.zeros((n_filters, n_bins))
    for m in range(n_filters):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (freqs - lo) / (center - lo)
        falling = (hi - freqs) / (hi - center)
        weights[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    if not (weights.sum(axis=1) > 0.0).all():
        raise ConfigurationError(
            "a mel filter covers no spectrum bin; reduce n_filters or raise the FFT size"
        )
    weights.setflags(write=False)
    return MelFilterbank(weights=weights, f_low=float(f_low), f_high=float(f_high))


@lru_cache(maxsize=8)
def _cached_filterbank(n_filters, n_bins, sample_rate_hz) -> MelFilterbank:
    return make_mel_filterbank(n_filters, n_bins, sample_rate_hz)


def mel_energies(spectrum, bank: MelFilterbank, floor: float = 1e-10) -> np.ndarray:
    """Filterbank energies over squared magnitudes, floored before the log stage.

    The floor keeps silent frames finite through log compression.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape != (bank.n_bins,):
        raise ConfigurationError(
            f"spectrum has {spectrum.shape} bins but the bank expects {bank.n_bins}"
        )
    energies = bank.weights @ (spectrum * spectrum)
    return np.maximum(energies, floor)


@lru_cache(maxsize=8)
def _dct_rows(n: int, n_coeffs: int) -> np.ndarray:
    # Orthonormal DCT-II rows 1..n_coeffs (row 0 carries only signal energy).
    k = np.arange(1, n_coeffs + 1)[:, None]
    i = np.arange(n)[None, :]
    rows = np.sqrt(2.0 / n) * np.cos(np.pi * k * (2 * i + 1) / (2.0 * n))
    rows.setflags(write=False)
    return rows


def dct_cepstrum(log_energies, n_coeffs: int = 12) -> np.ndarray:
    """Orthonormal DCT-II of log energies, coefficients 1..n_coeffs.

    A constant input has all its content in the discarded 0th term, so it
    short-circuits to exact zeros.
    """
    v = np.asarray(log_energies, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ConfigurationError("need a nonempty 1-D energy vector")
    if not 1 <= n_coeffs <= v.size:
        raise ConfigurationError("n_coeffs must lie in [1, n_filters]")
    if v.max() == v.min():
        return np.zeros(n_coeffs)
    return _dct_rows(v.size, n_coeffs) @ v


def extract_features(x, config: FeatureConfig | None = None) -> np.ndarray:
    """Window samples -> flattened cepstral matrix (frame-major).

    Composes pre-emphasis, framing, windowing, magnitude FFT, mel
    energies, log, and the DCT stage; output length is
    ``config.n_frames * config.n_coeffs`` (168 with the defaults).
    """
    cfg = config if config is not None else FeatureConfig()
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (cfg.window_len,):
        raise ConfigurationError(
            f"expected exactly {cfg.window_len} samples, got {x.shape}"
        )
    emphasized = pre_emphasize(x, cfg.alpha)
    frames = frame_signal(emphasized, cfg.frame_len, cfg.hop)
    bank = _cached_filterbank(cfg.n_filters, cfg.frame_len // 2 + 1, cfg.sample_rate_hz)
    rows = [
        dct_cepstrum(
            np.log(mel_energies(fft_magnitude(apply_window(frame)), bank, cfg.floor)),
            cfg.n_coeffs,
        )
        for frame in frames
    ]
    return np.concatenate(rows)
