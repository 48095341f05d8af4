"""Landsat 5 TM land-cover toolkit.

Spectral indices, optimum-index-factor band ranking, parallelepiped and
minimum-distance classifiers, accuracy assessment and a landcover band
recommender, over a simple BSQ raster format.
"""
__version__ = "0.1.0"

from .kernels import BACKEND
from .raster import (
    BandInfo,
    LabelRaster,
    MultibandImage,
    SceneClass,
    SceneSpec,
    generate_scene,
    landsat5_band_table,
    read_labels,
    read_raster,
    write_labels,
    write_raster,
)

__all__ = [
    "BACKEND",
    "BandInfo",
    "LabelRaster",
    "MultibandImage",
    "SceneClass",
    "SceneSpec",
    "generate_scene",
    "landsat5_band_table",
    "read_labels",
    "read_raster",
    "write_labels",
    "write_raster",
]
