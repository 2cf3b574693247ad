"""Deterministic synthetic two-class cry corpus.

The clinical recordings this tool was designed around are not
redistributable, so end-to-end runs use generated harmonic stacks
instead: each clip is a jittered fundamental with a few harmonics plus
uniform noise, and the two classes occupy different fundamental ranges.
That separation is exactly the kind of structure the cepstral front end
is built to capture, which makes the corpus a meaningful pipeline probe
rather than random data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioClip, encode_wav
from .errors import ConfigurationError

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ClassProfile:
    f0_low: float
    f0_high: float
    harmonics: int = 5
    jitter: float = 0.02
    noise_amp: float = 0.05


@dataclass(frozen=True)
class SynthSpec:
    n_positive: int
    n_negative: int
    seed: int = 42
    positive: ClassProfile = ClassProfile(600.0, 700.0)
    negative: ClassProfile = ClassProfile(400.0, 500.0)
    window_len: int = 8000
    sample_rate_hz: int = 8000

    def __post_init__(self):
        if self.n_positive < 0 or self.n_negative < 0:
            raise ConfigurationError("sample counts must be nonnegative")
        if self.window_len < 2 or self.sample_rate_hz < 2:
            raise ConfigurationError("window length and sample rate must be at least 2")
        nyquist = self.sample_rate_hz / 2.0
        for profile in (self.positive, self.negative):
            if not 0.0 < profile.f0_low <= profile.f0_high < nyquist:
                raise ConfigurationError("fundamental range must lie within (0, Nyquist)")
            if profile.harmonics < 1:
                raise ConfigurationError("need at least one harmonic")
            if profile.jitter < 0.0:
                raise ConfigurationError("jitter must be nonnegative")
            if not 0.0 <= profile.noise_amp <= 0.2:
                raise ConfigurationError("noise amplitude must lie in [0, 0.2]")
        if self.positive == self.negative:
            raise ConfigurationError("class profiles must be distinct")


def _clip_samples(spec: SynthSpec, profile: ClassProfile, class_code: int, index: int) -> np.ndarray:
    # One generator per (seed, class, index) keeps every clip stable no
    # matter how many clips are requested around it.
    rng = np.random.default_rng(
        np.random.SeedSequence((spec.seed & _SEED_MASK, class_code, index))
    )
    n = spec.window_len
    rate = spec.sample_rate_hz
    f0 = rng.uniform(profile.f0_low, profile.f0_high)
    instantaneous = f0 * (1.0 + profile.jitter * rng.standard_normal(n))
    phase = (2.0 * np.pi / rate) * np.concatenate(([0.0], np.cumsum(instantaneous[:-1])))
    signal = np.zeros(n)
    for h in range(1, profile.harmonics + 1):
        if h * f0 >= rate / 2.0:
            break  # folding aliased harmonics back down would blur the classes
        signal += np.sin(h * phase) / h
    peak = float(np.max(np.abs(signal)))
    if peak > 0.0:
        signal *= 0.8 / peak  # headroom for the additive noise
    signal += rng.uniform(-profile.noise_amp, profile.noise_amp, n)
    return np.clip(signal, -1.0, 1.0)


def generate_corpus(spec: SynthSpec) -> list:
    """(AudioClip, label) pairs: negatives first, then positives, by index."""
    corpus = []
    for index in range(spec.n_negative):
        samples = _clip_samples(spec, spec.negative, 0, index)
        corpus.append((AudioClip(samples, spec.sample_rate_hz), -1))
    for index in range(spec.n_positive):
        samples = _clip_samples(spec, spec.positive, 1, index)
        corpus.append((AudioClip(samples, spec.sample_rate_hz), 1))
    return corpus


def write_corpus(spec: SynthSpec, out_dir) -> Path:
    """Write 16-bit mono WAVs plus a manifest CSV; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    per_class = {-1: 0, 1: 0}
    for clip, label in generate_corpus(spec):
        word = "asphyxia" if label == 1 else "normal"
        name = f"{word}_{per_class[label]:04d}.wav"
        per_class[label] += 1
        (out_dir / name).write_bytes(encode_wav(clip.samples, clip.sample_rate_hz))
        rows.append((name, label))
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["filename", "label"])
        for name, label in rows:
            writer.writerow([name, f"{label:+d}"])
    return manifest
