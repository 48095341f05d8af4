"""The compiled kernels and the numpy fallback must agree bit-for-bit."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import HAVE_CYTHON
from tmlandcover import kernels

pytestmark = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernels not built")

py = kernels.get_backend("python")


def cy():
    return kernels.get_backend("cython")


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), start=st.integers(0, 10**9), n=st.integers(0, 300),
       bands=st.integers(1, 9))
def test_hash_uniforms_match(seed, start, n, bands):
    a = py.hash_uniforms(seed, start, start + n, bands)
    b = cy().hash_uniforms(seed, start, start + n, bands)
    for x, y in zip(a, b):
        assert x.shape == (bands, n)
        assert np.array_equal(x, y)
        assert np.all((x > 0) & (x <= 1))


def test_hash_uniforms_partition_independent():
    whole = py.hash_uniforms(3, 0, 100, 4)
    left = py.hash_uniforms(3, 0, 37, 4)
    right = py.hash_uniforms(3, 37, 100, 4)
    for w, l, r in zip(whole, left, right):
        assert np.array_equal(w, np.concatenate([l, r], axis=1))
    # a band's values do not depend on how many bands are drawn
    assert np.array_equal(py.hash_uniforms(3, 0, 10, 2)[0], py.hash_uniforms(3, 0, 10, 5)[0][:2])


def _arrays(seed, n_bands, n_pixels, n_classes, ties):
    rng = np.random.default_rng(seed)
    if ties:
        pixels = rng.integers(0, 4, (n_bands, n_pixels)).astype(float)
        means = rng.integers(0, 4, (n_classes, n_bands)).astype(float)
    else:
        pixels = rng.normal(size=(n_bands, n_pixels))
        means = rng.normal(size=(n_classes, n_bands))
    pixels[0, :: 7] = np.nan
    valid = (rng.random(n_pixels) > 0.1).astype(np.uint8)
    return np.ascontiguousarray(pixels), np.ascontiguousarray(means), valid


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_bands=st.integers(1, 7), n_pixels=st.integers(0, 200),
       n_classes=st.integers(1, 6), ties=st.booleans())
def test_nearest_mean_match(seed, n_bands, n_pixels, n_classes, ties):
    p, m, v = _arrays(seed, n_bands, n_pixels, n_classes, ties)
    i1, d1 = py.nearest_mean(p, m, v)
    i2, d2 = cy().nearest_mean(p, m, v)
    assert np.array_equal(i1, i2)
    assert np.array_equal(d1, d2, equal_nan=True)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_bands=st.integers(1, 7), n_pixels=st.integers(0, 200),
       n_classes=st.integers(1, 6), ties=st.booleans(), overlap=st.sampled_from([0, 1, 2]))
def test_box_classify_match(seed, n_bands, n_pixels, n_classes, ties, overlap):
    p, m, v = _arrays(seed, n_bands, n_pixels, n_classes, ties)
    lo = np.ascontiguousarray(m - 1.0)
    hi = np.ascontiguousarray(m + 1.0)
    assert np.array_equal(py.box_classify(p, lo, hi, m, v, overlap),
                          cy().box_classify(p, lo, hi, m, v, overlap))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
