# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see _pykernels for the contracts."""

import numpy as np

from libc.stdint cimport uint64_t, int64_t, uint8_t

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil

NAME = "cython"


cdef inline uint64_t _rotl(uint64_t x, int k, int n, uint64_t mask) noexcept nogil:
    if k == 0:
        return x
    return ((x << k) | (x >> (n - k))) & mask


cdef inline uint64_t _cmul(uint64_t x, const int64_t[::1] supp, Py_ssize_t lo,
                           Py_ssize_t hi, int n, uint64_t mask) noexcept nogil:
    cdef uint64_t acc = 0
    cdef Py_ssize_t j
    for j in range(lo, hi):
        acc ^= _rotl(x, <int>supp[j], n, mask)
    return acc


def fwht(double[::1] a):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double lo, hi
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    lo = a[j]
                    hi = a[j + h]
                    a[j] = lo + hi
                    a[j + h] = lo - hi
                i += 2 * h
            h *= 2
    return np.asarray(a)


def pushforward(int n, inv_supp, const double[::1] pmf_w):
    cdef const int64_t[::1] supp = np.ascontiguousarray(inv_supp, dtype=np.int64)
    cdef uint64_t size = (<uint64_t>1) << n
    cdef uint64_t mask = size - 1
    cdef uint64_t x
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] probs = out
    cdef Py_ssize_t k = supp.shape[0]
    with nogil:
        for x in range(size):
            probs[x] = pmf_w[popcount64(_cmul(x, supp, 0, k, n, mask))]
    return out


def enumerate_image(int n, t_supp, const double[::1] pmf_w):
    cdef const int64_t[::1] supp = np.ascontiguousarray(t_supp, dtype=np.int64)
    cdef uint64_t size = (<uint64_t>1) << n
    cdef uint64_t mask = size - 1
    cdef uint64_t r
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] probs = out
    cdef Py_ssize_t k = supp.shape[0]
    with nogil:
        for r in range(size):
            probs[_cmul(r, supp, 0, k, n, mask)] += pmf_w[popcount64(r)]
    return out


def enumerate_sum(int n, supps, offs, const double[::1] pmf_w):
    cdef const int64_t[::1] supp = np.ascontiguousarray(supps, dtype=np.int64)
    cdef const int64_t[::1] offsets = np.ascontiguousarray(offs, dtype=np.int64)
    cdef int s = offsets.shape[0] - 1
    cdef uint64_t size = (<uint64_t>1) << n
    cdef uint64_t mask = size - 1
    cdef uint64_t total = (<uint64_t>1) << (s * n)
    cdef uint64_t r, x
    cdef int i
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] probs = out
    with nogil:
        for r in range(total):
            x = 0
            for i in range(s):
                x ^= _cmul((r >> (i * n)) & mask, supp, offsets[i], offsets[i + 1], n, mask)
            probs[x] += pmf_w[popcount64(r)]
    return out


def noise_bits(const uint8_t[:, :, ::1] R, supps, offs):
    cdef const int64_t[::1] supp = np.ascontiguousarray(supps, dtype=np.int64)
    cdef const int64_t[::1] offsets = np.ascontiguousarray(offs, dtype=np.int64)
    cdef Py_ssize_t s = R.shape[0], batch = R.shape[1], n = R.shape[2]
    cdef Py_ssize_t b, i, jj, k, shift
    cdef uint8_t* dst
    cdef const uint8_t* src
    out = np.zeros((batch, n), dtype=np.uint8)
    cdef uint8_t[:, ::1] acc = out
    if batch == 0 or n == 0:
        return out
    with nogil:
        for b in range(batch):
            dst = &acc[b, 0]
            for i in range(s):
                src = &R[i, b, 0]
                for jj in range(offsets[i], offsets[i + 1]):
                    # rotation by shift as two contiguous runs (vectorisable)
                    shift = supp[jj]
                    for k in range(n - shift):
                        dst[k + shift] ^= src[k]
                    for k in range(shift):
                        dst[k] ^= src[n - shift + k]
    return out
