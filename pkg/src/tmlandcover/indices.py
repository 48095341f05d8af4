"""Band-ratio and vegetation/water/snow/soil indices for Landsat 5 TM bands.

All formulas are written once, over numpy arrays, and shared by the per-pixel
evaluator and the whole-raster map so the two can never disagree. Band
arguments use 1-based TM band numbers.

Zero denominators, degenerate min/max statistics and nodata inputs yield
nodata (``None`` per pixel, a masked pixel per raster) instead of inf/nan.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import LandcoverError, MissingBandError
from .raster import LabelRaster, MultibandImage, write_raster

DEFAULT_SAVI_L = 0.5
INDEX_NODATA = -9999.0


class IndexKind(enum.Enum):
    WATER_RATIO_25 = "water_ratio25"
    WATER_RATIO_42 = "water_ratio42"
    WATER_INDEX = "water_index"
    NDVI = "ndvi"
    CORRECTED_NDVI = "corrected_ndvi"
    PERCENT_VEG_COVER = "percent_veg_cover"
    SIMPLE_RATIO = "simple_ratio"
    REDUCED_SIMPLE_RATIO = "reduced_simple_ratio"
    SAVI = "savi"
    ICE_RATIO_45 = "ice_ratio45"
    ICE_RATIO_35 = "ice_ratio35"
    SOIL_EC_RATIO = "soil_ec_ratio"

    @property
    def bands(self) -> tuple[int, ...]:
        """TM band numbers the formula reads."""
        return _BANDS[self]

    @property
    def needs_aux(self) -> bool:
        return self in _AUX_KINDS


_BANDS = {
    IndexKind.WATER_RATIO_25: (2, 5),
    IndexKind.WATER_RATIO_42: (2, 4),
    IndexKind.WATER_INDEX: (1, 2, 3, 4, 5, 7),
    IndexKind.NDVI: (3, 4),
    IndexKind.CORRECTED_NDVI: (3, 4, 5),
    IndexKind.PERCENT_VEG_COVER: (3, 4),
    IndexKind.SIMPLE_RATIO: (3, 4),
    IndexKind.REDUCED_SIMPLE_RATIO: (3, 4, 5),
    IndexKind.SAVI: (3, 4),
    IndexKind.ICE_RATIO_45: (4, 5),
    IndexKind.ICE_RATIO_35: (3, 5),
    IndexKind.SOIL_EC_RATIO: (2, 3, 4),
}
_AUX_KINDS = {
    IndexKind.CORRECTED_NDVI,
    IndexKind.REDUCED_SIMPLE_RATIO,
    IndexKind.PERCENT_VEG_COVER,
}


@dataclass(frozen=True)
class BandRangeStats:
    """Min/max of one quantity over valid pixels.

    For CORRECTED_NDVI and REDUCED_SIMPLE_RATIO this is band 5. For
    PERCENT_VEG_COVER it is the NDVI itself, and ``band`` is None.
    """

    band: Optional[int]
    min: float
    max: float

    def __post_init__(self):
        if self.min > self.max:
            raise ValueError("min must not exceed max")


@dataclass(frozen=True, eq=False)
class IndexRaster:
    kind: IndexKind
    values: np.ndarray
    mask: np.ndarray  # True where nodata
    savi_l: Optional[float] = None

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def filled(self, fill: float = INDEX_NODATA) -> np.ndarray:
        return np.where(self.mask, fill, self.values)

    def to_image(self, nodata: float = INDEX_NODATA) -> MultibandImage:
        return MultibandImage(self.filled(nodata)[None], nodata=nodata)

    def write(self, header_path, nodata: float = INDEX_NODATA) -> None:
        comments = [f"kind={self.kind.value}"]
        if self.savi_l is not None:
            comments.append(f"savi_l={self.savi_l!r}")
        write_raster(self.to_image(nodata), header_path, comments=comments)


def _ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return out, den == 0


def _stretch_factor(b5, aux):
    """1 - (b5 - min) / (max - min), shared by the two band-5 corrected forms."""
    span = aux.max - aux.min
    if span == 0:
        return np.zeros_like(b5), np.ones(b5.shape, dtype=bool)
    return 1.0 - (b5 - aux.min) / span, np.zeros(b5.shape, dtype=bool)


def _formula(kind: IndexKind, b: Mapping[int, np.ndarray], aux, savi_l):
    """Return (values, invalid) for ``kind`` given band arrays keyed by TM number."""
    K = IndexKind
    if kind is K.WATER_RATIO_25:
        return _ratio(b[2], b[5])
    if kind is K.WATER_RATIO_42:
        return _ratio(b[4], b[2])
    if kind is K.WATER_INDEX:
        return _ratio(b[1] + b[2] + b[3], b[4] + b[5] + b[7])
    if kind in (K.NDVI, K.CORRECTED_NDVI, K.PERCENT_VEG_COVER):
        ndvi, bad = _ratio(b[4] - b[3], b[4] + b[3])
        if kind is K.NDVI:
            return ndvi, bad
        if kind is K.CORRECTED_NDVI:
            factor, bad_aux = _stretch_factor(b[5], aux)
            return ndvi * factor, bad | bad_aux
        span = aux.max - aux.min
        if span == 0:
            return ndvi, np.ones(ndvi.shape, dtype=bool)
        standardized = (ndvi - aux.min) / span
        return standardized * standardized, bad
    if kind is K.SIMPLE_RATIO:
        return _ratio(b[4], b[3])
    if kind is K.REDUCED_SIMPLE_RATIO:
        sr, bad = _ratio(b[4], b[3])
        factor, bad_aux = _stretch_factor(b[5], aux)
        return sr * factor, bad | bad_aux
    if kind is K.SAVI:
        ndvi1, bad = _ratio(b[4] - b[3], b[4] + b[3] + 1.0)
        return ndvi1 * (1.0 + savi_l), bad
    if kind is K.ICE_RATIO_45:
        return _ratio(b[4], b[5])
    if kind is K.ICE_RATIO_35:
        return _ratio(b[3], b[5])
    if kind is K.SOIL_EC_RATIO:
        return _ratio(b[3] - b[4], b[2] - b[4])
    raise ValueError(f"unhandled index kind {kind!r}")


def _check_savi_l(kind, savi_l):
    if kind is IndexKind.SAVI and not savi_l >= 0:
        raise ValueError("SAVI soil factor L must be >= 0")


def evaluate_index_pixel(
    kind: IndexKind,
    bands: Sequence[float],
    aux: Optional[BandRangeStats] = None,
    savi_l: float = DEFAULT_SAVI_L,
    nodata: Optional[float] = None,
) -> Optional[float]:
    """Evaluate ``kind`` for one pixel.

    ``bands[k - 1]`` is the value of TM band ``k``. Returns None where the
    index is undefined at this pixel.
    """
    _check_savi_l(kind, savi_l)
    if len(bands) < max(kind.bands):
        raise MissingBandError(max(kind.bands), len(bands))
    if kind.needs_aux and aux is None:
        raise LandcoverError(f"{kind.value} needs min/max statistics (aux)")
    arrays = {}
    for k in kind.bands:
        v = float(bands[k - 1])
        if np.isnan(v) or (nodata is not None and v == nodata):
            return None
        arrays[k] = np.array([v])
    values, bad = _formula(kind, arrays, aux, savi_l)
    if bad[0] or not np.isfinite(values[0]):
        return None
    return float(values[0])


def band_range(image: MultibandImage, band: int) -> Optional[BandRangeStats]:
    """Min/max of ``band`` over its valid pixels, None when it has none."""
    plane = image.band(band)
    vals = plane[image.valid_mask(band)]
    if vals.size == 0:
        return None
    return BandRangeStats(band, float(vals.min()), float(vals.max()))


def _aux_for(image: MultibandImage, kind: IndexKind, planes, valid):
    if kind in (IndexKind.CORRECTED_NDVI, IndexKind.REDUCED_SIMPLE_RATIO):
        return band_range(image, 5)
    if kind is IndexKind.PERCENT_VEG_COVER:
        ndvi, bad = _formula(IndexKind.NDVI, planes, None, None)
        ok = valid & ~bad & np.isfinite(ndvi)
        if not ok.any():
            return None
        return BandRangeStats(None, float(ndvi[ok].min()), float(ndvi[ok].max()))
    return None


def compute_index_raster(
    image: MultibandImage, kind: IndexKind, savi_l: float = DEFAULT_SAVI_L
) -> IndexRaster:
    """Apply ``kind`` to every pixel of ``image``.

    Min/max statistics needed by the band-5 corrected forms and by percent
    vegetation cover are gathered over the whole image before the pixel pass.
    """
    _check_savi_l(kind, savi_l)
    for k in kind.bands:
        if k > image.n_bands:
            raise MissingBandError(k, image.n_bands)
    planes = {k: image.band(k) for k in kind.bands}
    # only the bands this index reads decide validity
    valid = np.ones(image.data.shape[1:], dtype=bool)
    for k in kind.bands:
        valid &= image.valid_mask(k)
    aux = None
    if kind.needs_aux:
        aux = _aux_for(image, kind, planes, valid)
        if aux is None:
            shape = image.data.shape[1:]
            return IndexRaster(kind, np.zeros(shape), np.ones(shape, dtype=bool),
                               savi_l if kind is IndexKind.SAVI else None)
    values, bad = _formula(kind, planes, aux, savi_l)
    mask = bad | ~valid | ~np.isfinite(values)
    values = np.where(mask, 0.0, values)
    return IndexRaster(kind, values, mask, savi_l if kind is IndexKind.SAVI else None)


WATER = 1
LAND = 2
VEGETATED = 1
NON_VEGETATED = 2


def water_mask(image: MultibandImage, rule: str = "ratio25", threshold: float = 1.0) -> LabelRaster:
    """Label water (1) and land (2) pixels; 0 on the threshold or where undefined.

    ``rule="ratio25"`` thresholds band2/band5, ``rule="index"`` thresholds the
    visible/infrared water index. Both use strict inequalities either side of
    ``threshold`` (default 1).
    """
    if rule == "ratio25":
        idx = compute_index_raster(image, IndexKind.WATER_RATIO_25)
    elif rule == "index":
        idx = compute_index_raster(image, IndexKind.WATER_INDEX)
    else:
        raise ValueError(f"unknown water rule {rule!r} (expected 'ratio25' or 'index')")
    labels = np.zeros(idx.values.shape, dtype=np.uint16)
    labels[~idx.mask & (idx.values > threshold)] = WATER
    labels[~idx.mask & (idx.values < threshold)] = LAND
    return LabelRaster(labels)


def vegetation_mask(image: MultibandImage) -> LabelRaster:
    """Label vegetated (NDVI > 0 -> 1) and other (NDVI <= 0 -> 2) pixels; 0 where NDVI is undefined."""
    idx = compute_index_raster(image, IndexKind.NDVI)
    labels = np.where(idx.values > 0, VEGETATED, NON_VEGETATED).astype(np.uint16)
    labels[idx.mask] = 0
    return LabelRaster(labels)
