"""Confusion matrix and evaluation metrics for the binary screen.

Positive means asphyxia. Precision, recall, and F-score are defined as 0
when their denominators vanish so degenerate classifiers still rank in a
grid search instead of erroring out.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .errors import ConfigurationError, InvalidLabelsError, UndefinedMetricsError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ConfigurationError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f_score: float


def confusion(predicted, actual) -> ConfusionMatrix:
    """Count tp/fp/fn/tn with +1 as the positive (asphyxia) label."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1:
        raise ConfigurationError("predicted and actual labels must be equal-length vectors")
    for labels in (predicted, actual):
        if labels.size and not np.isin(labels, (-1, 1)).all():
            raise InvalidLabelsError("labels must be -1 or +1")
    return ConfusionMatrix(
        tp=int(np.sum((predicted == 1) & (actual == 1))),
        fp=int(np.sum((predicted == 1) & (actual == -1))),
        fn=int(np.sum((predicted == -1) & (actual == 1))),
        tn=int(np.sum((predicted == -1) & (actual == -1))),
    )


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, precision, recall, and their harmonic-mean F-score."""
    total = cm.total
    if total == 0:
        raise UndefinedMetricsError("metrics are undefined for an empty sample set")
    accuracy = (cm.tp + cm.tn) / total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f_score = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(accuracy=accuracy, precision=precision, recall=recall, f_score=f_score)


def format_pct(value: float) -> str:
    """Fraction -> percentage with two decimals, rounded half-up."""
    return str(Decimal(repr(value * 100.0)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def render_report(cm: ConfusionMatrix, report: MetricsReport) -> str:
    """Human-readable block: the 2x2 table (rows predicted) plus the metrics."""
    lines = [
        "                     Actual",
        "                     Asphyxia    Normal",
        f"Predicted  Asphyxia  {cm.tp:8d}  {cm.fp:8d}",
        f"           Normal    {cm.fn:8d}  {cm.tn:8d}",
        "",
        f"Accuracy : {format_pct(report.accuracy)}%",
        f"Precision: {format_pct(report.precision)}%",
        f"Recall   : {format_pct(report.recall)}%",
        f"F-score  : {format_pct(report.f_score)}%",
    ]
    return "\n".join(lines)


def write_metrics_csv(path, cm: ConfusionMatrix, report: MetricsReport) -> None:
    """Machine-readable counterpart of render_report."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "value"])
        writer.writerow(["tp", cm.tp])
        writer.writerow(["fp", cm.fp])
        writer.writerow(["fn", cm.fn])
        writer.writerow(["tn", cm.tn])
        writer.writerow(["accuracy", f"{report.accuracy:.12g}"])
        writer.writerow(["precision", f"{report.precision:.12g}"])
        writer.writerow(["recall", f"{report.recall:.12g}"])
        writer.writerow(["f_score", f"{report.f_score:.12g}"])
