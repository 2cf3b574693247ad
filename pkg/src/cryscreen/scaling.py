"""Mean normalization: per-feature means, one global standard deviation.

The scale factor is the standard deviation of the whole raw training
matrix (population convention, computed before any centering), not a
per-column value. Centering then dividing therefore leaves the training
matrix with column means of zero and a global standard deviation close
to, but not exactly, one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateDataError


@dataclass(frozen=True)
class ScalingParams:
    mean: np.ndarray  # per-feature means, shape (D,)
    std: float        # stddev of all raw training entries, > 0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        if mean.ndim != 1 or mean.size == 0:
            raise ConfigurationError("mean must be a nonempty 1-D vector")
        if not self.std > 0.0:
            raise ConfigurationError("std must be positive")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", float(self.std))


def fit_scaler(X) -> ScalingParams:
    """Fit column means and the global raw standard deviation of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ConfigurationError("X must be a 2-D feature matrix")
    if X.shape[0] < 2:
        raise ConfigurationError("need at least two training rows")
    std = float(X.std())  # population convention over all M*D raw entries
    if std == 0.0:
        raise DegenerateDataError("all feature values are identical; nothing to scale")
    return ScalingParams(mean=X.mean(axis=0), std=std)


def apply_scaler(X, params: ScalingParams) -> np.ndarray:
    """(X - mean) / std, for a matrix or a single feature row.

    Held-out data must be transformed with the training-set parameters
    unchanged.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim not in (1, 2) or X.shape[-1] != params.mean.size:
        raise ConfigurationError(
            f"feature width {X.shape[-1] if X.ndim else 0} does not match "
            f"the scaler's {params.mean.size} columns"
        )
    return (X - params.mean) / params.std
