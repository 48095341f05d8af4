# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``. Results must match bit-for-bit."""
import numpy as np

from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.math cimport INFINITY, NAN

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t _M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _M2 = 0x94D049BB133111EBULL
cdef uint64_t _BAND_MULT = 0xD1B54A32D192ED03ULL
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _splitmix64(uint64_t z) nogil:
    z = z + _GAMMA
    z = (z ^ (z >> 30)) * _M1
    z = (z ^ (z >> 27)) * _M2
    return z ^ (z >> 31)


cdef inline double _to_unit(uint64_t z) nogil:
    return <double>((z >> 11) + 1) * _INV53


def hash_uniforms(uint64_t seed, Py_ssize_t pixel_start, Py_ssize_t pixel_stop,
                  Py_ssize_t n_bands):
    cdef Py_ssize_t n = pixel_stop - pixel_start
    u1 = np.empty((n_bands, n), dtype=np.float64)
    u2 = np.empty((n_bands, n), dtype=np.float64)
    cdef double[:, ::1] a = u1
    cdef double[:, ::1] c = u2
    cdef uint64_t base = _splitmix64(seed)
    cdef uint64_t hp, hb, z1
    cdef Py_ssize_t i, b
    with nogil:
        for i in range(n):
            hp = _splitmix64(base ^ <uint64_t>(pixel_start + i))
            for b in range(n_bands):
                hb = _splitmix64(hp ^ ((<uint64_t>b + 1) * _BAND_MULT))
                z1 = _splitmix64(hb)
                a[b, i] = _to_unit(z1)
                c[b, i] = _to_unit(_splitmix64(z1))
    return u1, u2


def nearest_mean(const double[:, :] pixels, const double[:, ::1] means,
                 const uint8_t[::1] valid):
    cdef Py_ssize_t n_bands = pixels.shape[0]
    cdef Py_ssize_t n_pixels = pixels.shape[1]
    cdef Py_ssize_t n_classes = means.shape[0]
    index_arr = np.empty(n_pixels, dtype=np.int64)
    dist_arr = np.empty(n_pixels, dtype=np.float64)
    cdef int64_t[::1] index = index_arr
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t i, c, b
    cdef double d, t, best
    cdef int64_t win
    with nogil:
        for i in range(n_pixels):
            if not valid[i]:
                index[i] = -1
                dist[i] = NAN
                continue
            best = INFINITY
            win = -1
            for c in range(n_classes):
                d = 0.0
                for b in range(n_bands):
                    t = pixels[b, i] - means[c, b]
                    d = d + t * t
                if d < best:
                    best = d
                    win = c
            index[i] = win
            dist[i] = best
    return index_arr, dist_arr


def box_classify(const double[:, :] pixels, const double[:, ::1] lows,
                 const double[:, ::1] highs, const double[:, ::1] means,
                 const uint8_t[::1] valid, int overlap):
    cdef Py_ssize_t n_bands = pixels.shape[0]
    cdef Py_ssize_t n_pixels = pixels.shape[1]
    cdef Py_ssize_t n_classes = lows.shape[0]
    index_arr = np.empty(n_pixels, dtype=np.int64)
    cdef int64_t[::1] index = index_arr
    cdef Py_ssize_t i, c, b, hits
    cdef double d, t, best, x
    cdef int64_t win
    cdef bint inside
    with nogil:
        for i in range(n_pixels):
            win = -1
            if valid[i]:
                hits = 0
                best = INFINITY
                for c in range(n_classes):
                    inside = True
                    for b in range(n_bands):
                        x = pixels[b, i]
                        if not (x >= lows[c, b] and x <= highs[c, b]):
                            inside = False
                            break
                    if not inside:
                        continue
                    if overlap == 0:
                        d = 0.0
                        for b in range(n_bands):
                            t = pixels[b, i] - means[c, b]
                            d = d + t * t
                        if d < best:
                            best = d
                            win = c
                    elif hits == 0:
                        win = c
                    hits += 1
                if overlap == 2 and hits > 1:
                    win = -1
            index[i] = win
    return index_arr
