"""Feature-table interchange format.

A feature CSV is the boundary between the signal-processing half and the
learning half of the pipeline. Its header row records the extraction
config as key=value cells after a leading ``label`` cell; every data row
is a ``+1``/``-1`` label followed by the feature values at 12 significant
digits.
"""

from __future__ import annotations

import csv
from dataclasses import asdict

import numpy as np

from .errors import ConfigurationError, InvalidLabelsError
from .features import FeatureConfig

_INT_KEYS = {"window_len", "sample_rate_hz", "frame_len", "hop", "n_filters", "n_coeffs"}
_FLOAT_KEYS = {"alpha", "floor"}


def _format_value(key, value):
    return str(int(value)) if key in _INT_KEYS else repr(float(value))


def write_features_csv(path, labels, features, config: FeatureConfig) -> None:
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or features.shape[0] != labels.size:
        raise ConfigurationError("features must be 2-D with one row per label")
    if features.shape[1] != config.feature_dim:
        raise ConfigurationError(
            f"feature width {features.shape[1]} does not match the config's {config.feature_dim}"
        )
    header = ["label"] + [f"{k}={_format_value(k, v)}" for k, v in asdict(config).items()]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for label, row in zip(labels, features):
            writer.writerow([f"{label:+d}"] + [f"{v:.12g}" for v in row])


def read_features_csv(path):
    """Returns (features, labels, FeatureConfig) or raises on a bad table."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigurationError(f"{path}: empty file, expected a feature table") from None
        if not header or header[0] != "label":
            raise ConfigurationError(f"{path}: header must start with a 'label' cell")
        config_kwargs = {}
        for cell in header[1:]:
            key, sep, raw = cell.partition("=")
            if not sep or key not in _INT_KEYS | _FLOAT_KEYS:
                raise ConfigurationError(f"{path}: unrecognized header cell {cell!r}")
            config_kwargs[key] = int(raw) if key in _INT_KEYS else float(raw)
        config = FeatureConfig(**config_kwargs)

        labels = []
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if row[0] not in ("+1", "1", "-1"):
                raise InvalidLabelsError(f"{path}:{line_no}: label must be +1 or -1, got {row[0]!r}")
            if len(row) - 1 != config.feature_dim:
                raise ConfigurationError(
                    f"{path}:{line_no}: expected {config.feature_dim} features, got {len(row) - 1}"
                )
            labels.append(1 if row[0] in ("+1", "1") else -1)
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{line_no}: {exc}") from None

    features = np.asarray(rows, dtype=np.float64).reshape(len(rows), config.feature_dim)
    return features, np.asarray(labels, dtype=np.int64), config


def read_manifest(path):
    """List of (filename, label) pairs from a corpus manifest CSV."""
    entries = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:2]] != ["filename", "label"]:
            raise ConfigurationError(f"{path}: manifest must start with a 'filename,label' header")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2 or row[1] not in ("+1", "1", "-1"):
                raise InvalidLabelsError(f"{path}:{line_no}: label must be +1 or -1")
            entries.append((row[0], 1 if row[1] in ("+1", "1") else -1))
    return entries
