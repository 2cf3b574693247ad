"""Model persistence as self-describing JSON.

Numbers are serialized through Python's float repr, which round-trips
exactly, so a loaded model reproduces the original's decision values
bit for bit. Files with an unknown format_version are rejected rather
than guessed at.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .errors import ModelFormatError
from .features import FeatureConfig
from .scaling import ScalingParams
from .svm import KernelSpec, SvmModel, TrainConfig

FORMAT_VERSION = 1
_FILE_KIND = "cryscreen-svm-model"


def save_model(model: SvmModel, path, provenance: dict | None = None) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": _FILE_KIND,
        "kernel": asdict(model.kernel),
        "train_config": asdict(model.train_config),
        "feature_config": asdict(model.feature_config) if model.feature_config else None,
        "scaling": None
        if model.scaling is None
        else {"mean": model.scaling.mean.tolist(), "std": model.scaling.std},
        "bias": model.bias,
        "dual_coeffs": model.dual_coeffs.tolist(),
        "support_vectors": model.support_vectors.tolist(),
        "converged": model.converged,
        "n_iter": model.n_iter,
        "provenance": provenance or {},
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def load_model(path):
    """Returns (SvmModel, provenance dict)."""
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a valid model file ({exc})") from None
    if not isinstance(payload, dict):
        raise ModelFormatError(f"{path}: not a valid model file (top level is not an object)")
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format_version {version!r} is not supported (expected {FORMAT_VERSION})"
        )
    try:
        scaling = payload["scaling"]
        feature_config = payload["feature_config"]
        model = SvmModel(
            kernel=KernelSpec(**payload["kernel"]),
            support_vectors=np.asarray(payload["support_vectors"], dtype=np.float64),
            dual_coeffs=np.asarray(payload["dual_coeffs"], dtype=np.float64),
            bias=float(payload["bias"]),
            converged=bool(payload["converged"]),
            n_iter=int(payload["n_iter"]),
            train_config=TrainConfig(**payload["train_config"]),
            scaling=None
            if scaling is None
            else ScalingParams(mean=np.asarray(scaling["mean"], dtype=np.float64), std=scaling["std"]),
            feature_config=None if feature_config is None else FeatureConfig(**feature_config),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc})") from None
    return model, payload.get("provenance", {})
