"""Raster data model, on-disk format, Landsat 5 TM band table and scene synthesis.

Rasters are stored as a plain-text header (``key=value`` per line) next to a
raw band-sequential little-endian data file with the same stem and a ``.bin``
extension::

    samples=<width>
    lines=<height>
    bands=<count>
    dtype=f32            (u16 for label rasters)
    interleave=bsq
    byteorder=little
    nodata=<decimal>     (optional)

Lines starting with ``#`` are comments and are carried through as metadata.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import HeaderError, LandcoverError, MissingBandError, SizeMismatchError

__all__ = [
    "BandInfo",
    "MultibandImage",
    "LabelRaster",
    "SceneClass",
    "SceneSpec",
    "landsat5_band_table",
    "read_raster",
    "write_raster",
    "read_labels",
    "write_labels",
    "generate_scene",
]


@dataclass(frozen=True)
class BandInfo:
    index: int
    wavelength_low: float
    wavelength_high: float
    spectral_name: str
    resolution: float

    def __post_init__(self):
        if not self.wavelength_low < self.wavelength_high:
            raise ValueError("wavelength_low must be below wavelength_high")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")


_LANDSAT5_TM = (
    BandInfo(1, 0.45, 0.52, "Blue-Green", 30),
    BandInfo(2, 0.52, 0.60, "Green", 30),
    BandInfo(3, 0.63, 0.69, "Red", 30),
    BandInfo(4, 0.76, 0.90, "Near IR", 30),
    BandInfo(5, 1.55, 1.75, "Mid-IR", 30),
    BandInfo(6, 10.40, 12.50, "Thermal IR", 120),
    BandInfo(7, 2.08, 2.35, "Mid-IR", 30),
)


def landsat5_band_table() -> list[BandInfo]:
    """The seven Landsat 5 TM bands: wavelength range (um), name, resolution (m)."""
    return list(_LANDSAT5_TM)


@dataclass(frozen=True, eq=False)
class MultibandImage:
    """Stack of co-registered bands, shape ``(n_bands, height, width)``.

    Pixel values are held as float64. Band numbers used throughout the
    package are 1-based, so band ``k`` is ``data[k - 1]``.
    """

    data: np.ndarray
    band_info: Optional[tuple[BandInfo, ...]] = None
    nodata: Optional[float] = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] < 1:
            raise ValueError("image data must have shape (bands, height, width)")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.band_info is not None:
            info = tuple(self.band_info)
            if len(info) != arr.shape[0]:
                raise ValueError("band_info length must equal band count")
            object.__setattr__(self, "band_info", info)
        if self.nodata is not None:
            object.__setattr__(self, "nodata", float(self.nodata))

    @classmethod
    def from_bands(cls, bands: Sequence[np.ndarray], **kwargs) -> "MultibandImage":
        return cls(np.stack([np.asarray(b, dtype=np.float64) for b in bands]), **kwargs)

    @property
    def n_bands(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def band(self, k: int) -> np.ndarray:
        """Plane for 1-based band number ``k``."""
        if not 1 <= k <= self.n_bands:
            raise MissingBandError(k, self.n_bands)
        return self.data[k - 1]

    def valid_mask(self, k: Optional[int] = None) -> np.ndarray:
        """Boolean mask of usable pixels, for one band or for all bands jointly.

        A pixel is unusable when it equals the nodata sentinel or is NaN.
        """
        planes = self.data if k is None else self.band(k)[None]
        ok = ~np.isnan(planes)
        if self.nodata is not None and not math.isnan(self.nodata):
            ok &= planes != self.nodata
        return ok.all(axis=0)

    def __eq__(self, other):
        if not isinstance(other, MultibandImage):
            return NotImplemented
        same_nodata = self.nodata == other.nodata or (
            self.nodata is not None
            and other.nodata is not None
            and math.isnan(self.nodata)
            and math.isnan(other.nodata)
        )
        return (
            self.data.shape == other.data.shape
            and self.data.tobytes() == other.data.tobytes()
            and self.band_info == other.band_info
            and same_nodata
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LabelRaster:
    """Single-band integer label plane; label 0 means unclassified."""

    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ValueError("labels must be a 2-D array")
        if arr.size and (arr.min() < 0 or arr.max() > 0xFFFF):
            raise ValueError("labels must fit in an unsigned 16-bit integer")
        arr = arr.astype(np.uint16)
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def __eq__(self, other):
        if not isinstance(other, LabelRaster):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None


# --------------------------------------------------------------------------- I/O

_KEY_ORDER = ("samples", "lines", "bands", "dtype", "interleave", "byteorder")
_DTYPES = {"f32": np.dtype("<f4"), "u16": np.dtype("<u2")}


def data_path(header_path) -> Path:
    header_path = Path(header_path)
    if header_path.suffix == ".bin":
        raise ValueError("header path must not use the .bin extension")
    return header_path.with_suffix(".bin")


def _format_number(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def _write(header_path, planes: np.ndarray, dtype: str, nodata=None, comments=()):
    header_path = Path(header_path)
    bands, lines, samples = planes.shape
    header = [
        f"samples={samples}",
        f"lines={lines}",
        f"bands={bands}",
        f"dtype={dtype}",
        "interleave=bsq",
        "byteorder=little",
    ]
    if nodata is not None:
        header.append(f"nodata={_format_number(nodata)}")
    header.extend(f"# {c}" for c in comments)
    raw = np.ascontiguousarray(planes, dtype=_DTYPES[dtype]).tobytes()
    header_path.write_text("\n".join(header) + "\n")
    data_path(header_path).write_bytes(raw)


def read_header(header_path) -> dict:
    """Parse a header file into a dict; comment lines land in ``"comments"``."""
    header_path = Path(header_path)
    if not header_path.is_file():
        raise FileNotFoundError(f"raster header not found: {header_path}")
    fields: dict = {"comments": []}
    for lineno, line in enumerate(header_path.read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields["comments"].append(line[1:].strip())
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KEY_ORDER + ("nodata",):
            raise HeaderError(f"{header_path}:{lineno}: malformed header key {key!r}")
        if key in fields:
            raise HeaderError(f"{header_path}:{lineno}: duplicate header key {key!r}")
        fields[key] = value
    missing = [k for k in _KEY_ORDER if k not in fields]
    if missing:
        raise HeaderError(f"{header_path}: missing header key(s) {', '.join(missing)}")
    try:
        for k in ("samples", "lines", "bands"):
            fields[k] = int(fields[k])
            if fields[k] < 1:
                raise ValueError
    except ValueError:
        raise HeaderError(f"{header_path}: samples/lines/bands must be positive integers")
    if fields["dtype"] not in _DTYPES:
        raise HeaderError(f"{header_path}: unsupported dtype {fields['dtype']!r}")
    if fields["interleave"] != "bsq":
        raise HeaderError(f"{header_path}: unsupported interleave {fields['interleave']!r}")
    if fields["byteorder"] != "little":
        raise HeaderError(f"{header_path}: unsupported byteorder {fields['byteorder']!r}")
    if "nodata" in fields:
        try:
            fields["nodata"] = float(fields["nodata"])
        except ValueError:
            raise HeaderError(f"{header_path}: nodata is not a number")
    return fields


def _read(header_path, dtype: str):
    fields = read_header(header_path)
    if fields["dtype"] != dtype:
        raise HeaderError(f"{header_path}: expected dtype={dtype}, found {fields['dtype']}")
    path = data_path(header_path)
    if not path.is_file():
        raise FileNotFoundError(f"raster data file not found: {path}")
    shape = (fields["bands"], fields["lines"], fields["samples"])
    expected = int(np.prod(shape)) * _DTYPES[dtype].itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise SizeMismatchError(
            f"{path}: header declares {shape[0]}x{shape[1]}x{shape[2]} {dtype} "
            f"({expected} bytes) but file has {actual} bytes"
        )
    planes = np.fromfile(path, dtype=_DTYPES[dtype]).reshape(shape)
    return planes, fields


def read_raster(header_path) -> MultibandImage:
    planes, fields = _read(header_path, "f32")
    return MultibandImage(planes.astype(np.float64), nodata=fields.get("nodata"))


def write_raster(image: MultibandImage, header_path, comments: Sequence[str] = ()) -> None:
    """Write ``image`` as float32 BSQ. Values are rounded to float32."""
    _write(header_path, image.data, "f32", image.nodata, comments)


def read_labels(header_path) -> LabelRaster:
    planes, fields = _read(header_path, "u16")
    if planes.shape[0] != 1:
        raise HeaderError(f"{header_path}: label rasters must have exactly one band")
    return LabelRaster(planes[0])


def write_labels(labels: LabelRaster, header_path) -> None:
    _write(header_path, labels.labels[None], "u16")


# ------------------------------------------------------------------- synthesis


@dataclass(frozen=True)
class SceneClass:
    label: int
    mean: tuple[float, ...]
    sigma: tuple[float, ...]
    fraction: float


@dataclass(frozen=True)
class SceneSpec:
    classes: tuple[SceneClass, ...]
    width: int
    height: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes:
            raise LandcoverError("scene needs at least one class")
        labels = [c.label for c in self.classes]
        if len(set(labels)) != len(labels) or min(labels) < 1:
            raise LandcoverError("class labels must be unique positive integers")
        n = len(self.classes[0].mean)
        for c in self.classes:
            if len(c.mean) != n or len(c.sigma) != n:
                raise LandcoverError(
                    f"class {c.label}: mean/sigma length differs from band count {n}"
                )
            if any(s < 0 for s in c.sigma):
                raise LandcoverError(f"class {c.label}: negative sigma")
            if not 0 < c.fraction <= 1:
                raise LandcoverError(f"class {c.label}: fraction must be in (0, 1]")
        if abs(sum(c.fraction for c in self.classes) - 1.0) > 1e-9:
            raise LandcoverError("class fractions must sum to 1")
        if self.width < 1 or self.height < 1:
            raise LandcoverError("scene dimensions must be positive")
        if not 0 <= self.seed < 2**64:
            raise LandcoverError("seed must be an unsigned 64-bit integer")

    @property
    def n_bands(self) -> int:
        return len(self.classes[0].mean)


def block_boundaries(fractions: Sequence[float], n_pixels: int) -> list[int]:
    """Start offsets of each class block plus the total, rounding cumulative shares."""
    bounds = [0]
    acc = 0.0
    for f in fractions[:-1]:
        acc += f
        bounds.append(min(n_pixels, int(math.floor(acc * n_pixels + 0.5))))
    bounds.append(n_pixels)
    return bounds


def standard_normals(seed: int, pixel_start: int, pixel_stop: int, n_bands: int) -> np.ndarray:
    """Box-Muller normals keyed on (seed, pixel, band); shape (n_bands, n_pixels)."""
    u1, u2 = kernels.hash_uniforms(seed, pixel_start, pixel_stop, n_bands)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def generate_scene(spec: SceneSpec) -> tuple[MultibandImage, LabelRaster]:
    """Synthesize a scene and its ground-truth labels.

    Classes occupy contiguous row-major blocks sized by their fractions, in
    the order they are listed. Each pixel value is ``mean + sigma * z`` with
    ``z`` a standard normal that depends only on (seed, pixel index, band).
    """
    n_pixels = spec.width * spec.height
    n_bands = spec.n_bands
    bounds = block_boundaries([c.fraction for c in spec.classes], n_pixels)
    values = np.empty((n_bands, n_pixels))
    labels = np.zeros(n_pixels, dtype=np.uint16)
    for cls, start, stop in zip(spec.classes, bounds[:-1], bounds[1:]):
        if stop <= start:
            continue
        z = standard_normals(spec.seed, start, stop, n_bands)
        mean = np.asarray(cls.mean, dtype=np.float64)[:, None]
        sigma = np.asarray(cls.sigma, dtype=np.float64)[:, None]
        values[:, start:stop] = mean + sigma * z
        labels[start:stop] = cls.label
    image = MultibandImage(values.reshape(n_bands, spec.height, spec.width))
    return image, LabelRaster(labels.reshape(spec.height, spec.width))
