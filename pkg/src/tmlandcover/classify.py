"""Supervised per-pixel classifiers: parallelepiped and minimum distance to mean.

Signatures are always processed in ascending label order, so the order in
which they are passed never affects a result; ties go to the lowest label.
Label 0 is reserved for unclassified pixels.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import LandcoverError, MissingBandError
from .raster import LabelRaster, MultibandImage

PARALLELEPIPED = "parallelepiped"
MINIMUM_DISTANCE = "mindist"

OVERLAP_RULES = {
    "nearest": kernels.OVERLAP_NEAREST,
    "first": kernels.OVERLAP_FIRST,
    "none": kernels.OVERLAP_NONE,
}


@dataclass(frozen=True)
class MinMax:
    """Box spans the training min and max of each band."""

    def __str__(self):
        return "minmax"


@dataclass(frozen=True)
class MeanSigma:
    """Box spans mean +/- k standard deviations of each band."""

    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("MeanSigma k must be > 0")

    def __str__(self):
        return f"meansigma:{self.k:g}"


BoxRule = Union[MinMax, MeanSigma]


@dataclass(frozen=True)
class ClassifierConfig:
    method: str = MINIMUM_DISTANCE
    box_rule: BoxRule = field(default_factory=MinMax)
    overlap: str = "nearest"
    max_distance: Optional[float] = None

    def __post_init__(self):
        if self.method not in (PARALLELEPIPED, MINIMUM_DISTANCE):
            raise ValueError(f"unknown method {self.method!r}")
        if self.overlap not in OVERLAP_RULES:
            raise ValueError(f"unknown overlap rule {self.overlap!r}")
        if self.max_distance is not None and self.max_distance < 0:
            raise ValueError("max_distance must be >= 0")

    @property
    def name(self) -> str:
        if self.method == PARALLELEPIPED:
            return f"parallelepiped/{self.box_rule}/{self.overlap}"
        if self.max_distance is not None:
            return f"mindist/{self.max_distance:g}"
        return "mindist"


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Labelled feature vectors; ``features[:, k - 1]`` holds band ``k``."""

    labels: np.ndarray
    features: np.ndarray
    selected_bands: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim == 1:
            feats = feats[:, None]
        if feats.ndim != 2 or feats.shape[0] != labels.shape[0]:
            raise LandcoverError("training features must be (n_samples, n_bands) matching labels")
        if labels.size and labels.min() < 1:
            raise LandcoverError("training labels must be positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", feats)
        if self.selected_bands is not None:
            sel = tuple(int(b) for b in self.selected_bands)
            if not sel or len(set(sel)) != len(sel):
                raise LandcoverError("selected bands must be a non-empty set")
            for b in sel:
                if not 1 <= b <= feats.shape[1]:
                    raise MissingBandError(b, feats.shape[1])
            object.__setattr__(self, "selected_bands", tuple(sorted(sel)))

    @property
    def band_count(self) -> int:
        return self.features.shape[1]

    @property
    def bands(self) -> tuple[int, ...]:
        return self.selected_bands or tuple(range(1, self.band_count + 1))

    @classmethod
    def from_label_raster(cls, image: MultibandImage, truth: LabelRaster, **kwargs) -> "TrainingSet":
        """Every labelled (non-zero), fully valid pixel becomes a sample."""
        take = (truth.labels > 0) & image.valid_mask()
        return cls(truth.labels[take], image.data[:, take].T, **kwargs)


@dataclass(frozen=True, eq=False)
class ClassSignature:
    label: int
    bands: tuple[int, ...]
    mean: np.ndarray
    stddev: np.ndarray
    min: np.ndarray
    max: np.ndarray
    sample_count: int


def read_training_csv(path, selected_bands: Optional[Sequence[int]] = None) -> TrainingSet:
    """Read a ``label,b1,...,bN`` training file."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and "".join(r).strip()]
    if not rows:
        raise LandcoverError(f"{path}: empty training file")
    header = [h.strip() for h in rows[0]]
    expected = ["label"] + [f"b{i}" for i in range(1, len(header))]
    if header != expected or len(header) < 2:
        raise LandcoverError(f"{path}: header must be 'label,b1,...,bN', got {','.join(header)}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise LandcoverError(f"{path}: non-numeric training value ({exc})")
    if data.size == 0:
        raise LandcoverError(f"{path}: no training samples")
    if data.shape[1] != len(header):
        raise LandcoverError(f"{path}: rows must have {len(header)} fields")
    labels = data[:, 0]
    if np.any(labels != np.round(labels)):
        raise LandcoverError(f"{path}: labels must be integers")
    return TrainingSet(labels.astype(np.int64), data[:, 1:], selected_bands)


def write_training_csv(training: TrainingSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"] + [f"b{i}" for i in range(1, training.band_count + 1)])
        for lab, row in zip(training.labels, training.features):
            w.writerow([int(lab)] + [repr(float(v)) for v in row])


def train_signatures(training: TrainingSet, box_rule: Optional[BoxRule] = None) -> list[ClassSignature]:
    """Per-label mean, population stddev, min and max over the training samples.

    A MeanSigma box rule requires at least two samples per label.
    """
    if training.labels.size == 0:
        raise LandcoverError("training set is empty")
    need = 2 if isinstance(box_rule, MeanSigma) else 1
    cols = np.array(training.bands) - 1
    sigs = []
    for label in np.unique(training.labels):
        x = training.features[training.labels == label][:, cols]
        if x.shape[0] < need:
            raise LandcoverError(
                f"label {label} has {x.shape[0]} sample(s); {box_rule} boxes need {need}"
            )
        mean = x.mean(axis=0)
        sigs.append(
            ClassSignature(
                label=int(label),
                bands=training.bands,
                mean=mean,
                stddev=np.sqrt(((x - mean) ** 2).mean(axis=0)),
                min=x.min(axis=0),
                max=x.max(axis=0),
                sample_count=int(x.shape[0]),
            )
        )
    return sigs


def write_signatures_csv(sigs: Sequence[ClassSignature], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "band", "mean", "stddev", "min", "max", "count"])
        for s in sorted(sigs, key=lambda s: s.label):
            for i, band in enumerate(s.bands):
                w.writerow([s.label, band, repr(float(s.mean[i])), repr(float(s.stddev[i])),
                            repr(float(s.min[i])), repr(float(s.max[i])), s.sample_count])


def _prepare(image: MultibandImage, sigs: Sequence[ClassSignature]):
    if not sigs:
        raise LandcoverError("at least one class signature is required")
    sigs = sorted(sigs, key=lambda s: s.label)
    bands = sigs[0].bands
    for s in sigs:
        if s.bands != bands:
            raise LandcoverError("all signatures must use the same bands")
        if s.label < 1:
            raise LandcoverError("signature labels must be positive")
    if max(bands) > image.n_bands:
        raise MissingBandError(max(bands), image.n_bands)
    idx = np.array(bands) - 1
    pixels = np.ascontiguousarray(image.data[idx].reshape(len(bands), -1))
    valid = np.ones(pixels.shape[1], dtype=bool)
    for b in bands:
        valid &= image.valid_mask(b).ravel()
    means = np.ascontiguousarray(np.stack([s.mean for s in sigs]), dtype=np.float64)
    labels = np.array([s.label for s in sigs], dtype=np.uint16)
    return sigs, pixels, valid.astype(np.uint8), means, labels


def _to_map(index: np.ndarray, labels: np.ndarray, image: MultibandImage) -> LabelRaster:
    out = np.zeros(index.shape, dtype=np.uint16)
    hit = index >= 0
    out[hit] = labels[index[hit]]
    return LabelRaster(out.reshape(image.height, image.width))


def classify_minimum_distance(
    image: MultibandImage, sigs: Sequence[ClassSignature], config: Optional[ClassifierConfig] = None
) -> LabelRaster:
    """Assign each pixel to the class whose mean is nearest in Euclidean distance."""
    config = config or ClassifierConfig(MINIMUM_DISTANCE)
    sigs, pixels, valid, means, labels = _prepare(image, sigs)
    index, dist2 = kernels.nearest_mean(pixels, means, valid)
    if config.max_distance is not None:
        with np.errstate(invalid="ignore"):
            index[np.sqrt(dist2) > config.max_distance] = -1
    return _to_map(index, labels, image)


def class_boxes(sigs: Sequence[ClassSignature], box_rule: BoxRule):
    """(lows, highs) arrays of shape (n_classes, n_bands) in the given signature order."""
    if isinstance(box_rule, MeanSigma):
        lows = np.stack([s.mean - box_rule.k * s.stddev for s in sigs])
        highs = np.stack([s.mean + box_rule.k * s.stddev for s in sigs])
    else:
        lows = np.stack([s.min for s in sigs])
        highs = np.stack([s.max for s in sigs])
    return np.ascontiguousarray(lows, dtype=np.float64), np.ascontiguousarray(highs, dtype=np.float64)


def classify_parallelepiped(
    image: MultibandImage, sigs: Sequence[ClassSignature], config: Optional[ClassifierConfig] = None
) -> LabelRaster:
    """Assign each pixel to the class whose per-band box contains it.

    Pixels outside every box are unclassified (0). Pixels inside several
    boxes are resolved by ``config.overlap``: ``nearest`` picks the nearest
    mean among the containing classes, ``first`` the lowest label, ``none``
    leaves them unclassified.
    """
    config = config or ClassifierConfig(PARALLELEPIPED)
    sigs, pixels, valid, means, labels = _prepare(image, sigs)
    lows, highs = class_boxes(sigs, config.box_rule)
    index = kernels.box_classify(pixels, lows, highs, means, valid, OVERLAP_RULES[config.overlap])
    return _to_map(index, labels, image)


def classify(image: MultibandImage, sigs: Sequence[ClassSignature], config: ClassifierConfig) -> LabelRaster:
    if config.method == PARALLELEPIPED:
        return classify_parallelepiped(image, sigs, config)
    return classify_minimum_distance(image, sigs, config)


def classification_map_stats(labels: LabelRaster) -> dict[int, int]:
    """Pixel count per label; label 0 is always reported."""
    counts = Counter({0: 0})
    values, n = np.unique(labels.labels, return_counts=True)
    counts.update(dict(zip(values.tolist(), n.tolist())))
    return dict(sorted(counts.items()))
