"""WAV decoding and fixed-length windowing of cry recordings.

Only integer PCM (format tag 1) RIFF/WAVE files are accepted: 8 or 16 bits
per sample, one or two channels, any declared rate. Stereo is averaged to
mono. No resampling happens anywhere in the pipeline; the analysis window
is taken in raw samples, so every clip is characterized by its sample
count rather than by the rate its header declares.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientAudioError, UnsupportedEncodingError, WavFormatError

DEFAULT_WINDOW_LEN = 8000

_PCM_TAG = 1


@dataclass(frozen=True)
class AudioClip:
    """Mono audio decoded to float amplitudes within [-1.0, +1.0]."""

    samples: np.ndarray
    sample_rate_hz: int
    channels: int = 1

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("an AudioClip needs a nonempty 1-D sample array")
        if float(np.max(np.abs(samples))) > 1.0:
            raise ValueError("amplitudes must lie within [-1.0, +1.0]")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size


def decode_wav(data: bytes) -> AudioClip:
    """Decode RIFF/WAVE bytes holding integer PCM samples.

    16-bit samples are scaled by 1/32768 and 8-bit unsigned samples are
    mapped through (v - 128)/128. Stereo frames are averaged down to one
    channel before scaling.

    Raises WavFormatError for a malformed container and
    UnsupportedEncodingError for compressed, float, or otherwise
    unsupported encodings.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE container")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        if pos + 8 + size > len(data):
            raise WavFormatError(f"chunk {chunk_id!r} declares {size} bytes but the file is truncated")
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            if size < 16:
                raise WavFormatError("fmt chunk shorter than 16 bytes")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if payload is None:
        raise WavFormatError("missing data chunk")

    tag, n_channels, rate, _byte_rate, _block_align, bits = fmt
    if tag != _PCM_TAG:
        raise UnsupportedEncodingError(
            f"format tag {tag} is not supported; only integer PCM (tag 1) is accepted"
        )
    if n_channels not in (1, 2):
        raise UnsupportedEncodingError(f"{n_channels} channels not supported (mono or stereo only)")
    if bits not in (8, 16):
        raise UnsupportedEncodingError(f"{bits}-bit samples not supported (8 or 16 only)")
    if rate == 0:
        raise WavFormatError("declared sample rate is zero")

    frame_bytes = n_channels * (bits // 8)
    if len(payload) == 0:
        raise WavFormatError("data chunk holds no samples")
    if len(payload) % frame_bytes:
        raise WavFormatError("data chunk size is not a whole number of frames")

    if bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64)
    else:
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    if n_channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)

    if bits == 16:
        samples = raw / 32768.0
    else:
        samples = (raw - 128.0) / 128.0
    return AudioClip(samples=samples, sample_rate_hz=int(rate), channels=1)


def encode_wav(samples, sample_rate_hz: int) -> bytes:
    """Encode float amplitudes in [-1, +1] as a 16-bit PCM mono WAV."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("need a nonempty 1-D sample array")
    q = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    body = q.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _PCM_TAG, 1, sample_rate_hz, sample_rate_hz * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(body))
    return header + body


def fixed_length_window(clip: AudioClip, n: int = DEFAULT_WINDOW_LEN, pad: bool = False) -> np.ndarray:
    """Return the first ``n`` samples of a clip.

    Shorter clips raise InsufficientAudioError unless ``pad`` is set, in
    which case they are right-padded with zeros. Silent truncation or
    padding would corrupt downstream features invisibly, so padding is
    opt-in.
    """
    if n < 1:
        raise ValueError("window length must be positive")
    x = clip.samples
    if x.size >= n:
        return x[:n].copy()
    if not pad:
        raise InsufficientAudioError(
            f"clip has {x.size} samples but the window needs {n}; pass pad=True to zero-pad"
        )
    out = np.zeros(n, dtype=np.float64)
    out[: x.size] = x
    return out
