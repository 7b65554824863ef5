# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Montgomery kernels over 64-bit limbs.

Same call signatures as :mod:`pmkrsa._pykernels`; the GIL is released while
the limb loops run so a thread pool gets real parallelism.
"""
import sys

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

if sys.byteorder != "little":
    raise ImportError("limb packing assumes a little-endian host")

LIMB_BITS = 64

cdef extern from "mont.h":
    void pmk_mont_mul(uint64_t *out, const uint64_t *a, const uint64_t *b,
                      const uint64_t *n, uint64_t n0, size_t s,
                      uint64_t *t) nogil
    void pmk_mont_pow(uint64_t *out, const uint64_t *x, const uint64_t *e,
                      size_t ebits, const uint64_t *n, const uint64_t *r2,
                      uint64_t n0, size_t s, uint64_t *work) nogil


cdef inline void _load(object x, uint64_t *dst, Py_ssize_t s) except *:
    cdef bytes raw = x.to_bytes(8 * s, "little")
    memcpy(dst, <const char *>raw, 8 * s)


cdef inline object _store(uint64_t *src, Py_ssize_t s):
    return int.from_bytes((<char *>src)[:8 * s], "little")


def mont_mul(a, b, N, n_prime, Py_ssize_t k):
    """REDC(a * b) for a, b < N with R = 2**k, k a multiple of 64."""
    cdef Py_ssize_t s = k // 64
    cdef uint64_t n0 = n_prime & 0xFFFFFFFFFFFFFFFF
    cdef uint64_t *buf = <uint64_t *>malloc((5 * s + 2) * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef uint64_t *pa = buf
    cdef uint64_t *pb = buf + s
    cdef uint64_t *pn = buf + 2 * s
    cdef uint64_t *out = buf + 3 * s
    cdef uint64_t *t = buf + 4 * s
    try:
        _load(a, pa, s)
        _load(b, pb, s)
        _load(N, pn, s)
        with nogil:
            pmk_mont_mul(out, pa, pb, pn, n0, s, t)
        return _store(out, s)
    finally:
        free(buf)


def mont_pow(x, e, N, n_prime, r2, Py_ssize_t k):
    """x**e mod N through the Montgomery domain; x < N, N odd."""
    cdef Py_ssize_t s = k // 64
    cdef size_t ebits = e.bit_length()
    cdef Py_ssize_t es = (ebits + 63) // 64
    if es == 0:
        es = 1
    cdef uint64_t n0 = n_prime & 0xFFFFFFFFFFFFFFFF
    cdef uint64_t *buf = <uint64_t *>malloc(
        (4 * s + es + 5 * s + 2) * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef uint64_t *px = buf
    cdef uint64_t *pn = buf + s
    cdef uint64_t *pr2 = buf + 2 * s
    cdef uint64_t *out = buf + 3 * s
    cdef uint64_t *pe = buf + 4 * s
    cdef uint64_t *work = buf + 4 * s + es
    try:
        _load(x, px, s)
        _load(N, pn, s)
        _load(r2, pr2, s)
        _load(e, pe, es)
        with nogil:
            pmk_mont_pow(out, px, pe, ebits, pn, pr2, n0, s, work)
        return _store(out, s)
    finally:
        free(buf)
