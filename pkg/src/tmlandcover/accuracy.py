"""Confusion matrices and accuracy metrics against ground truth."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classify import (
    PARALLELEPIPED,
    ClassifierConfig,
    MeanSigma,
    TrainingSet,
    classify,
    train_signatures,
)
from .errors import LandcoverError
from .raster import LabelRaster, MultibandImage


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are reference labels, columns are predicted labels."""

    labels: tuple[int, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def count(self, reference: int, predicted: int) -> int:
        return int(self.counts[self.labels.index(reference), self.labels.index(predicted)])


@dataclass(frozen=True)
class AccuracyReport:
    overall_accuracy: float
    producer_accuracy: dict
    user_accuracy: dict
    kappa: Optional[float]


def confusion_matrix(
    reference: LabelRaster,
    predicted: LabelRaster,
    ignore_zero_reference: bool = False,
    ignore_unclassified: bool = False,
) -> ConfusionMatrix:
    """Count (reference, predicted) label pairs.

    Unclassified predictions (label 0) are counted as errors unless
    ``ignore_unclassified`` drops those pixels.
    """
    ref = reference.labels
    pred = predicted.labels
    if ref.shape != pred.shape:
        raise LandcoverError(f"raster dimensions differ: {ref.shape} vs {pred.shape}")
    keep = np.ones(ref.shape, dtype=bool)
    if ignore_zero_reference:
        keep &= ref != 0
    if ignore_unclassified:
        keep &= pred != 0
    r = ref[keep].astype(np.int64)
    p = pred[keep].astype(np.int64)
    if r.size == 0:
        raise LandcoverError("no pixels left to assess")
    labels = np.union1d(np.unique(r), np.unique(p))
    n = labels.size
    ri = np.searchsorted(labels, r)
    pi = np.searchsorted(labels, p)
    counts = np.bincount(ri * n + pi, minlength=n * n).reshape(n, n)
    return ConfusionMatrix(tuple(int(v) for v in labels), counts)


def accuracy_report(cm: ConfusionMatrix) -> AccuracyReport:
    total = cm.total
    if total == 0:
        raise LandcoverError("confusion matrix is empty")
    counts = cm.counts.astype(np.float64)
    diag = np.diag(counts)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    po = float(diag.sum()) / total
    pe = float(np.dot(rows, cols)) / (total * total)
    producer = {lab: (float(diag[i] / rows[i]) if rows[i] else None) for i, lab in enumerate(cm.labels)}
    user = {lab: (float(diag[i] / cols[i]) if cols[i] else None) for i, lab in enumerate(cm.labels)}
    kappa = None if pe >= 1.0 else (po - pe) / (1.0 - pe)
    return AccuracyReport(po, producer, user, kappa)


def write_matrix_csv(cm: ConfusionMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ref\\pred", *cm.labels])
        for lab, row in zip(cm.labels, cm.counts):
            w.writerow([lab, *(int(v) for v in row)])


def report_rows(report: AccuracyReport) -> list[tuple[str, str, str]]:
    def fmt(v):
        return "" if v is None else repr(float(v))

    rows = [("overall_accuracy", "", fmt(report.overall_accuracy)), ("kappa", "", fmt(report.kappa))]
    rows += [("producer_accuracy", str(k), fmt(v)) for k, v in report.producer_accuracy.items()]
    rows += [("user_accuracy", str(k), fmt(v)) for k, v in report.user_accuracy.items()]
    return rows


def write_report_csv(report: AccuracyReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "label", "value"])
        w.writerows(report_rows(report))


def compare_methods(
    image: MultibandImage,
    training: TrainingSet,
    truth: LabelRaster,
    configs: Sequence[ClassifierConfig],
    ignore_zero_reference: bool = True,
    ignore_unclassified: bool = False,
) -> list[tuple[str, float]]:
    """Train once, classify with each config and rank configs by overall accuracy.

    Returns ``(config.name, overall_accuracy)`` rows, best first; equal
    accuracies keep their input order.
    """
    if not configs:
        raise LandcoverError("no classifier configurations to compare")
    sigma_rule = next((c.box_rule for c in configs if isinstance(c.box_rule, MeanSigma)
                       and c.method == PARALLELEPIPED), None)
    sigs = train_signatures(training, sigma_rule)
    rows = []
    for cfg in configs:
        pred = classify(image, sigs, cfg)
        cm = confusion_matrix(truth, pred, ignore_zero_reference, ignore_unclassified)
        rows.append((cfg.name, accuracy_report(cm).overall_accuracy))
    return sorted(rows, key=lambda r: -r[1])
