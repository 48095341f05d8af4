"""Pure numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx``; the two must agree
bit-for-bit, so floating-point operations are performed in the same order
(sequential per-band accumulation, strict ``<`` for minimum search).
"""
import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_BAND_MULT = np.uint64(0xD1B54A32D192ED03)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


def _splitmix64(z):
    z = z + _GAMMA
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _to_unit(z):
    # top 53 bits -> (0, 1]
    return ((z >> _S11) + _ONE).astype(np.float64) * _INV53


def hash_uniforms(seed, pixel_start, pixel_stop, n_bands):
    """Counter-based uniform pairs for pixels ``[pixel_start, pixel_stop)``.

    Returns two float64 arrays of shape ``(n_bands, pixel_stop - pixel_start)``
    with values in (0, 1]. The value at (band, pixel) depends only on
    ``(seed, pixel, band)``.
    """
    with np.errstate(over="ignore"):
        base = _splitmix64(np.uint64(seed))
        pix = np.arange(pixel_start, pixel_stop, dtype=np.uint64)
        hp = _splitmix64(base ^ pix)
        bands = (np.arange(n_bands, dtype=np.uint64) + _ONE) * _BAND_MULT
        hb = _splitmix64(hp[None, :] ^ bands[:, None])
        z1 = _splitmix64(hb)
        z2 = _splitmix64(z1)
    return _to_unit(z1), _to_unit(z2)


def nearest_mean(pixels, means, valid):
    """Index of the nearest class mean for every pixel.

    Parameters
    ----------
    pixels : (n_bands, n_pixels) float64
    means : (n_classes, n_bands) float64
    valid : (n_pixels,) uint8, 0 marks pixels to skip

    Returns
    -------
    index : (n_pixels,) int64, -1 for skipped pixels
    dist2 : (n_pixels,) float64 squared Euclidean distance to the winner
    """
    n_bands, n_pixels = pixels.shape
    best = np.full(n_pixels, np.inf)
    index = np.full(n_pixels, -1, dtype=np.int64)
    for c in range(means.shape[0]):
        d = np.zeros(n_pixels)
        for b in range(n_bands):
            t = pixels[b] - means[c, b]
            d += t * t
        better = d < best
        best[better] = d[better]
        index[better] = c
    ok = valid.astype(bool)
    index[~ok] = -1
    best[~ok] = np.nan
    return index, best


OVERLAP_NEAREST = 0
OVERLAP_FIRST = 1
OVERLAP_NONE = 2


def box_classify(pixels, lows, highs, means, valid, overlap):
    """Parallelepiped assignment against per-class interval boxes.

    Returns an int64 class index per pixel, -1 where the pixel lies in no
    box, is invalid, or (with ``OVERLAP_NONE``) lies in more than one box.
    """
    n_bands, n_pixels = pixels.shape
    n_classes = lows.shape[0]
    index = np.full(n_pixels, -1, dtype=np.int64)
    hits = np.zeros(n_pixels, dtype=np.int64)
    best = np.full(n_pixels, np.inf)
    for c in range(n_classes):
        inside = np.ones(n_pixels, dtype=bool)
        for b in range(n_bands):
            inside &= (pixels[b] >= lows[c, b]) & (pixels[b] <= highs[c, b])
        if overlap == OVERLAP_NEAREST:
            d = np.zeros(n_pixels)
            for b in range(n_bands):
                t = pixels[b] - means[c, b]
                d += t * t
            take = inside & (d < best)
            best[take] = d[take]
        else:
            take = inside & (hits == 0)
        index[take] = c
        hits += inside
    if overlap == OVERLAP_NONE:
        index[hits > 1] = -1
    index[~valid.astype(bool)] = -1
    return index
