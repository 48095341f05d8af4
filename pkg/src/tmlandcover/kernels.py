"""Kernel backend selection.

The compiled Cython kernels are used when importable; otherwise the numpy
fallback is used. Set ``TMLANDCOVER_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

OVERLAP_NEAREST = _pykernels.OVERLAP_NEAREST
OVERLAP_FIRST = _pykernels.OVERLAP_FIRST
OVERLAP_NONE = _pykernels.OVERLAP_NONE

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("TMLANDCOVER_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for active)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def hash_uniforms(seed, pixel_start, pixel_stop, n_bands):
    return _impl.hash_uniforms(seed, pixel_start, pixel_stop, n_bands)


def nearest_mean(pixels, means, valid):
    return _impl.nearest_mean(pixels, means, valid)


def box_classify(pixels, lows, highs, means, valid, overlap):
    return _impl.box_classify(pixels, lows, highs, means, valid, overlap)
