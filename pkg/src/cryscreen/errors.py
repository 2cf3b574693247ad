"""Exception types shared across the package."""


class CryscreenError(Exception):
    """Base class for every error this package raises on bad data or config."""


class WavFormatError(CryscreenError):
    """WAV bytes are not a well-formed RIFF/WAVE container."""


class UnsupportedEncodingError(CryscreenError):
    """WAV encoding other than 8/16-bit integer PCM, mono or stereo."""


class InsufficientAudioError(CryscreenError):
    """Clip shorter than the requested window while zero-padding is disabled."""


class ConfigurationError(CryscreenError):
    """Invalid parameter combination or mismatched dimensions."""


class DegenerateDataError(CryscreenError):
    """Data admits no meaningful fit (for example, zero overall variance)."""


class InvalidLabelsError(CryscreenError):
    """Labels are not drawn from {-1, +1}, or only one class is present."""


class SplitError(CryscreenError):
    """Dataset cannot be partitioned as requested."""


class UndefinedMetricsError(CryscreenError):
    """Evaluation metrics requested for an empty sample set."""


class ModelFormatError(CryscreenError):
    """Model file cannot be parsed, or its format version is unsupported."""
