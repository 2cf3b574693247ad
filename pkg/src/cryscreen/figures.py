"""Figure rendering for the report paths.

Each report-producing command drops a PNG next to its CSV: a 2x2
confusion heatmap for evaluation and a cv-error heatmap for a grid
search. Matplotlib is imported lazily with the Agg backend so headless
runs and figure-free commands stay cheap.
"""

from __future__ import annotations

import math

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_confusion_figure(cm, report, path) -> None:
    plt = _pyplot()
    counts = np.array([[cm.tp, cm.fp], [cm.fn, cm.tn]], dtype=float)
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    image = ax.imshow(counts, cmap="Blues")
    ax.set_xticks([0, 1], ["Asphyxia", "Normal"])
    ax.set_yticks([0, 1], ["Asphyxia", "Normal"])
    ax.set_xlabel("Actual")
    ax.set_ylabel("Predicted")
    threshold = counts.max() / 2.0 if counts.max() > 0 else 0.5
    for (r, c), value in np.ndenumerate(counts):
        ax.text(c, r, f"{int(value)}", ha="center", va="center",
                color="white" if value > threshold else "black")
    ax.set_title(
        f"accuracy {report.accuracy * 100:.2f}%   F-score {report.f_score * 100:.2f}%",
        fontsize=10,
    )
    fig.colorbar(image, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_grid_figure(result, path) -> None:
    plt = _pyplot()
    outer_key = "degree" if result.kernel_family == "polynomial" else "C"
    outer = sorted({cell.params[outer_key] for cell in result.cells})
    gammas = sorted({cell.params["gamma"] for cell in result.cells})
    errors = np.full((len(outer), len(gammas)), np.nan)
    for cell in result.cells:
        r = outer.index(cell.params[outer_key])
        c = gammas.index(cell.params["gamma"])
        if math.isfinite(cell.cv_error):
            errors[r, c] = cell.cv_error

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    image = ax.imshow(errors, cmap="viridis_r", aspect="auto")
    image.cmap.set_bad("lightgray")
    ax.set_xticks(range(len(gammas)), [f"{g:.4g}" for g in gammas], rotation=45, ha="right")
    ax.set_yticks(range(len(outer)), [f"{v:.4g}" for v in outer])
    ax.set_xlabel("gamma")
    ax.set_ylabel(outer_key)
    best = result.best_params
    ax.set_title(
        f"{result.kernel_family} search: best {outer_key}={best[outer_key]:.4g}, "
        f"gamma={best['gamma']:.4g}, cv error {result.best_cv_error:.4g}",
        fontsize=10,
    )
    fig.colorbar(image, ax=ax, label="cv error", shrink=0.9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
