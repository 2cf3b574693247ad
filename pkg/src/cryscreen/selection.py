"""Stratified splitting, hyperparameter grids, and refit of the final model.

Scaling scope during search: the scaler is fit on the training portion
only and applied unchanged to the cross-validation portion; the final
refit recomputes the scaler on train+cv and stores it in the model, so
the held-out test set never leaks into any fit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, CryscreenError, InvalidLabelsError, SplitError
from .features import FeatureConfig
from .scaling import apply_scaler, fit_scaler
from .svm import KernelSpec, SvmModel, TrainConfig, predict_many, smo_train

RBF_COST_GRID = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0]
POLY_DEGREE_GRID = [1, 2, 3, 4, 5, 6, 7, 8]


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray   # (M, D)
    labels: np.ndarray     # (M,) in {-1, +1}
    ids: tuple             # provenance string per row

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise ConfigurationError("features must be a 2-D matrix")
        if labels.shape != (features.shape[0],) or len(self.ids) != features.shape[0]:
            raise ConfigurationError("features, labels, and ids must have matching counts")
        if labels.size and not np.isin(labels, (-1, 1)).all():
            raise InvalidLabelsError("labels must be -1 or +1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ids", tuple(self.ids))

    def __len__(self):
        return self.labels.size


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple = (0.6, 0.2, 0.2)
    seed: int = 42

    def __post_init__(self):
        if len(self.ratios) != 3 or any(r <= 0.0 for r in self.ratios):
            raise ConfigurationError("need three positive ratios")
        if abs(sum(self.ratios) - 1.0) > 1e-12:
            raise ConfigurationError("ratios must sum to 1")


def _allot(n: int, ratios) -> tuple:
    # Floor every quota, then hand leftover samples to training first,
    # then test, then cv. The 1e-9 nudge guards against float quotas that
    # land an ulp under a whole number.
    counts = [int(math.floor(r * n + 1e-9)) for r in ratios]
    leftover = n - sum(counts)
    for slot in (0, 2, 1):
        if leftover <= 0:
            break
        counts[slot] += 1
        leftover -= 1
    return tuple(counts)


def stratified_split(ds: LabeledDataset, spec: SplitSpec | None = None):
    """Partition into (train, cv, test) per class, then shuffle each set.

    Every class is sliced by the same ratio rule, so per-class counts are
    reproducible exactly; the two classes are then mixed together with the
    seeded generator.
    """
    spec = spec if spec is not None else SplitSpec()
    rng = np.random.default_rng(spec.seed)
    parts = ([], [], [])
    for label in (-1, 1):
        cls = np.flatnonzero(ds.labels == label)
        if cls.size < 3:
            raise SplitError(f"class {label:+d} has {cls.size} samples; at least 3 are required")
        perm = rng.permutation(cls)
        n_train, n_cv, _ = _allot(cls.size, spec.ratios)
        parts[0].append(perm[:n_train])
        parts[1].append(perm[n_train : n_train + n_cv])
        parts[2].append(perm[n_train + n_cv :])
    out = []
    for pieces in parts:
        idx = rng.permutation(np.concatenate(pieces))
        out.append(
            LabeledDataset(
                features=ds.features[idx],
                labels=ds.labels[idx],
                ids=tuple(ds.ids[k] for k in idx),
            )
        )
    return tuple(out)


def gamma_grid(n_features: int, factor: float = 3.0, count: int = 8) -> list:
    """Geometric grid starting at 1/n_features, multiplied by ``factor``."""
    if n_features < 1:
        raise ConfigurationError("n_features must be at least 1")
    if count < 1:
        raise ConfigurationError("count must be at least 1")
    base = 1.0 / n_features
    return [base * factor**k for k in range(count)]


@dataclass(frozen=True)
class GridCell:
    params: dict
    cv_error: float


@dataclass(frozen=True)
class GridSearchResult:
    kernel_family: str
    cells: tuple
    best_params: dict
    best_cv_error: float


def _search(train, cv, kernel_family, outer_values, gammas, cell_cost, base_config):
    if not outer_values or not gammas:
        raise ConfigurationError("parameter grids must be nonempty")
    if len(train) < 2 or len(cv) < 1:
        raise ConfigurationError("train and cv sets must be nonempty")
    scaler = fit_scaler(train.features)
    train_scaled = apply_scaler(train.features, scaler)
    cv_scaled = apply_scaler(cv.features, scaler)
    base = base_config if base_config is not None else TrainConfig()

    cells = []
    best = None
    for outer in sorted(outer_values):
        for gamma in sorted(gammas):
            if kernel_family == "polynomial":
                params = {"degree": float(outer), "gamma": float(gamma), "C": float(cell_cost)}
            else:
                params = {"C": float(outer), "gamma": float(gamma)}
            try:
                spec, cost = kernel_from_params(kernel_family, params)
                model = smo_train(train_scaled, train.labels, spec, replace(base, C=cost))
                error = float(np.mean(predict_many(model, cv_scaled) != cv.labels))
            except CryscreenError:
                error = float("inf")
            cell = GridCell(params=params, cv_error=error)
            cells.append(cell)
            if best is None or cell.cv_error < best.cv_error:
                best = cell
    return GridSearchResult(
        kernel_family=kernel_family,
        cells=tuple(cells),
        best_params=dict(best.params),
        best_cv_error=best.cv_error,
    )


def grid_search_poly(train, cv, degrees=None, gammas=None, c_fixed: float = 1.0,
                     base_config: TrainConfig | None = None) -> GridSearchResult:
    """Exhaustive (degree, gamma) search at fixed cost C.

    The cv metric is the plain misclassification rate; ties go to the
    smaller degree, then the smaller gamma. A cell whose training fails is
    recorded with infinite error rather than aborting the search.
    """
    degrees = POLY_DEGREE_GRID if degrees is None else list(degrees)
    gammas = gamma_grid(train.features.shape[1]) if gammas is None else list(gammas)
    return _search(train, cv, "polynomial", degrees, gammas, c_fixed, base_config)


def grid_search_rbf(train, cv, costs=None, gammas=None,
                    base_config: TrainConfig | None = None) -> GridSearchResult:
    """Exhaustive (C, gamma) search; ties go to smaller C, then smaller gamma."""
    costs = RBF_COST_GRID if costs is None else list(costs)
    gammas = gamma_grid(train.features.shape[1]) if gammas is None else list(gammas)
    return _search(train, cv, "rbf", costs, gammas, None, base_config)


def kernel_from_params(kernel_family: str, params: dict):
    """(KernelSpec, cost) from a grid cell or explicit parameter dict."""
    if kernel_family == "polynomial":
        spec = KernelSpec(
            family="polynomial",
            gamma=params["gamma"],
            degree=int(params["degree"]),
            coef0=float(params.get("coef0", 0.0)),
        )
    elif kernel_family == "rbf":
        spec = KernelSpec(family="rbf", gamma=params["gamma"])
    else:
        raise ConfigurationError(f"unknown kernel family {kernel_family!r}")
    return spec, float(params.get("C", 1.0))


def refit_final(train, cv, best_params: dict, kernel_family: str,
                base_config: TrainConfig | None = None,
                feature_config: FeatureConfig | None = None) -> SvmModel:
    """Retrain on train+cv with the selected parameters.

    The scaler is refit on the combined raw features (train rows first,
    then cv rows) and stored inside the returned model.
    """
    features = np.vstack([train.features, cv.features])
    labels = np.concatenate([train.labels, cv.labels])
    scaler = fit_scaler(features)
    spec, cost = kernel_from_params(kernel_family, best_params)
    base = base_config if base_config is not None else TrainConfig()
    model = smo_train(apply_scaler(features, scaler), labels, spec, replace(base, C=cost))
    return replace(model, scaling=scaler, feature_config=feature_config)


def write_grid_report(path, result: GridSearchResult, seed: int, split_ids: dict | None = None) -> None:
    """One row per cell plus the selected cell, then split provenance ids.

    The layout is deterministic so identical searches produce
    byte-identical files.
    """
    columns = ["row_type", "kernel", "degree", "gamma", "cost", "cv_error", "ids"]

    def param_fields(params):
        degree = params.get("degree")
        return [
            "" if degree is None else f"{int(degree)}",
            f"{params['gamma']:.12g}",
            f"{params.get('C', 1.0):.12g}",
        ]

    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        writer.writerow(["seed", "", "", "", "", f"{seed}", ""])
        for cell in result.cells:
            writer.writerow(
                ["cell", result.kernel_family, *param_fields(cell.params), f"{cell.cv_error:.12g}", ""]
            )
        writer.writerow(
            ["selected", result.kernel_family, *param_fields(result.best_params),
             f"{result.best_cv_error:.12g}", ""]
        )
        for name in ("train", "cv", "test"):
            if split_ids and name in split_ids:
                writer.writerow([f"split_{name}", "", "", "", "", "", ";".join(split_ids[name])])
