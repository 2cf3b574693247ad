"""Kernel evaluation, Gram matrices, and a two-variable SMO trainer.

The trainer solves the soft-margin dual

    max  sum(alpha) - 1/2 * sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j)
    s.t. 0 <= alpha_i <= C,  sum_i alpha_i y_i = 0

by repeatedly taking the maximally violating pair and solving the
two-variable subproblem analytically, with an incrementally maintained
error cache. Selection is deterministic (lowest index wins ties), so
identical inputs always produce identical models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegenerateDataError, InvalidLabelsError
from .features import FeatureConfig
from .scaling import ScalingParams

SUPPORT_VECTOR_EPS = 1e-8

_FAMILIES = ("polynomial", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family with parameters.

    rbf:        K(x, y) = exp(-gamma * ||x - y||^2)
    polynomial: K(x, y) = (gamma * <x, y> + coef0)^degree
                (coef0 = 0 keeps the kernel homogeneous)
    """

    family: str
    gamma: float
    degree: int = 1
    coef0: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigurationError(f"unknown kernel family {self.family!r}")
        if not self.gamma > 0.0:
            raise ConfigurationError("gamma must be positive")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ConfigurationError("degree must be an integer >= 1")
        if self.coef0 < 0.0:
            raise ConfigurationError("coef0 must be nonnegative")


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tol: float = 1e-3
    max_iter: int = 10_000_000
    # Reserved for randomized working-set orderings; the max-violating-pair
    # rule used here is fully deterministic.
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0.0:
            raise ConfigurationError("C must be positive")
        if not self.tol > 0.0:
            raise ConfigurationError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1")


@dataclass(frozen=True)
class SvmModel:
    kernel: KernelSpec
    support_vectors: np.ndarray  # (S, D)
    dual_coeffs: np.ndarray      # (S,) values alpha_i * y_i, 0 < |a| <= C
    bias: float
    converged: bool
    n_iter: int
    train_config: TrainConfig
    scaling: Optional[ScalingParams] = None
    feature_config: Optional[FeatureConfig] = None


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel on a single pair of equal-length vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ConfigurationError("kernel arguments must be 1-D vectors of equal length")
    if spec.family == "rbf":
        diff = x - y
        return float(np.exp(-spec.gamma * np.dot(diff, diff)))
    return float((spec.gamma * np.dot(x, y) + spec.coef0) ** spec.degree)


def _kernel_block(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel values for all pairs of rows, shape (len(A), len(B))."""
    if spec.family == "rbf":
        a2 = np.einsum("ij,ij->i", A, A)
        b2 = np.einsum("ij,ij->i", B, B)
        d2 = np.maximum(a2[:, None] + b2[None, :] - 2.0 * (A @ B.T), 0.0)
        return np.exp(-spec.gamma * d2)
    return (spec.gamma * (A @ B.T) + spec.coef0) ** spec.degree


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """Pairwise kernel matrix, exactly symmetric (upper triangle mirrored)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ConfigurationError("X must be a nonempty 2-D matrix")
    G = _kernel_block(spec, X, X)
    if spec.family == "rbf":
        np.fill_diagonal(G, 1.0)  # K(x, x) = 1 holds exactly
    iu = np.triu_indices(G.shape[0], k=1)
    G[(iu[1], iu[0])] = G[iu]
    return G


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray
    bias: float
    converged: bool
    n_iter: int


def solve_dual(gram, y, c: float, tol: float = 1e-3, max_iter: int = 10_000_000) -> DualSolution:
    """SMO on a precomputed Gram matrix; labels must be -1/+1 with both present."""
    G = np.asarray(gram, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = y.size
    if G.shape != (m, m):
        raise ConfigurationError("gram matrix shape does not match the label count")
    if not np.isfinite(G).all():
        raise ConfigurationError("kernel produced non-finite values")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise InvalidLabelsError("labels must be -1 or +1")
    if (y > 0).all() or (y < 0).all():
        raise InvalidLabelsError("training needs both classes present")

    alpha = np.zeros(m)
    f_cache = np.zeros(m)  # f_i = sum_j alpha_j y_j K_ij, bias excluded
    diag = np.diag(G).copy()
    pos = y > 0
    # Membership in the movable sets uses a band around the box bounds:
    # arithmetic can leave an alpha one ulp inside a bound, and treating
    # it as interior creates phantom violations that cannot be moved.
    band = 1e-12 * c
    n_iter = 0
    converged = False

    while n_iter < max_iter:
        up = np.where(pos, alpha < c - band, alpha > band)
        low = np.where(pos, alpha > band, alpha < c - band)
        crit = y - f_cache
        if not up.any() or not low.any():
            converged = True
            break
        up_idx = np.flatnonzero(up)
        low_idx = np.flatnonzero(low)
        i = up_idx[np.argmax(crit[up_idx])]
        if crit[i] - crit[low_idx].min() <= tol:
            converged = True
            break
        # Second-order partner choice: among violators, take the pair with
        # the largest analytic objective gain. Plain min-crit selection
        # zigzags badly on near-singular Gram matrices.
        cand = low_idx[crit[low_idx] < crit[i]]
        gap = crit[i] - crit[cand]
        curv = np.maximum(diag[i] + diag[cand] - 2.0 * G[i, cand], 1e-12)
        j = cand[np.argmax(gap * gap / curv)]

        a1, a2 = alpha[i], alpha[j]
        y1, y2 = y[i], y[j]
        e1 = f_cache[i] - y1
        e2 = f_cache[j] - y2
        if y1 != y2:
            lo_bound = max(0.0, a2 - a1)
            hi_bound = min(c, c + a2 - a1)
        else:
            lo_bound = max(0.0, a1 + a2 - c)
            hi_bound = min(c, a1 + a2)
        eta = G[i, i] + G[j, j] - 2.0 * G[i, j]
        if eta <= 0.0:
            # Flat or indefinite direction from duplicate rows; a tiny
            # curvature makes the step land on a box bound.
            eta = 1e-12
        a2_new = a2 + y2 * (e1 - e2) / eta
        a2_new = min(max(a2_new, lo_bound), hi_bound)
        if a2_new == a2:
            break  # numerically stuck below the ulp of alpha; flag as such
        # The bounds keep a1 in the box mathematically; clamp the ulp of
        # rounding that the fused update can leak past them.
        a1_new = min(max(a1 + y1 * y2 * (a2 - a2_new), 0.0), c)
        f_cache += (a1_new - a1) * y1 * G[i] + (a2_new - a2) * y2 * G[j]
        alpha[i] = a1_new
        alpha[j] = a2_new
        n_iter += 1

    # Recompute once to drop incremental drift before deriving the bias.
    f_exact = (alpha * y) @ G
    crit = y - f_exact
    unbounded = (alpha > SUPPORT_VECTOR_EPS) & (alpha < c - SUPPORT_VECTOR_EPS)
    if unbounded.any():
        bias = float(crit[unbounded].mean())
    else:
        up = np.where(pos, alpha < c - band, alpha > band)
        low = np.where(pos, alpha > band, alpha < c - band)
        hi = crit[up].max() if up.any() else crit[low].min()
        lo = crit[low].min() if low.any() else crit[up].max()
        bias = float((hi + lo) / 2.0)
    return DualSolution(alpha=alpha, bias=bias, converged=converged, n_iter=n_iter)


def smo_train(X, y, kernel: KernelSpec, config: TrainConfig | None = None) -> SvmModel:
    """Train a soft-margin SVM; stores only vectors with alpha above 1e-8."""
    cfg = config if config is not None else TrainConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ConfigurationError("X must be 2-D with one row per label")
    if y.size < 2:
        raise InvalidLabelsError("need at least two training samples")

    G = gram_matrix(kernel, X)
    sol = solve_dual(G, y, cfg.C, tol=cfg.tol, max_iter=cfg.max_iter)

    keep = sol.alpha > SUPPORT_VECTOR_EPS
    if not keep.any():
        raise DegenerateDataError("training produced no support vectors")
    y = np.asarray(y, dtype=np.float64)
    return SvmModel(
        kernel=kernel,
        support_vectors=X[keep].copy(),
        dual_coeffs=(sol.alpha * y)[keep],
        bias=sol.bias,
        converged=sol.converged,
        n_iter=sol.n_iter,
        train_config=cfg,
    )


def decision_values(model: SvmModel, X) -> np.ndarray:
    """Decision function for each row of X (already in the model's feature space)."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.support_vectors.shape[1]:
        raise ConfigurationError(
            f"feature width {X.shape[-1]} does not match the model's "
            f"{model.support_vectors.shape[1]} dimensions"
        )
    values = _kernel_block(model.kernel, X, model.support_vectors) @ model.dual_coeffs + model.bias
    return values[0] if single else values


def decision_value(model: SvmModel, x) -> float:
    return float(decision_values(model, np.asarray(x, dtype=np.float64)))


def predict_many(model: SvmModel, X) -> np.ndarray:
    """Labels for each row; a decision value of exactly 0 maps to +1."""
    values = np.atleast_1d(decision_values(model, X))
    return np.where(values >= 0.0, 1, -1)


def predict(model: SvmModel, x) -> int:
    return 1 if decision_value(model, x) >= 0.0 else -1
