# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled popcount kernels.

Every function here has a numpy twin in ``_fallback`` with the same
signature and bit-identical results.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

MAX_UNITS = 64


cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define BINAE_POPCOUNT(x) __builtin_popcountll(x)
    #else
    static inline int BINAE_POPCOUNT(unsigned long long x) {
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
        return (int)((x * 0x0101010101010101ULL) >> 56);
    }
    #endif
    #if defined(__GNUC__) || defined(__clang__)
    #define BINAE_CTZ(x) __builtin_ctzll(x)
    #else
    static inline int BINAE_CTZ(unsigned long long x) {
        int n = 0;
        while (!(x & 1ULL)) { x >>= 1; n++; }
        return n;
    }
    #endif
    """
    int BINAE_POPCOUNT(unsigned long long x) nogil
    int BINAE_CTZ(unsigned long long x) nogil


def and_popcount_rows(const uint64_t[:, ::1] rows, const uint64_t[::1] x):
    """popcount(row AND x) for every row."""
    cdef Py_ssize_t n = rows.shape[0], m = rows.shape[1], i, j
    if x.shape[0] != m:
        raise ValueError("word count mismatch")
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t acc
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(m):
                acc += BINAE_POPCOUNT(rows[i, j] & x[j])
            o[i] = acc
    return out


def xor_popcount_rows(const uint64_t[:, ::1] rows, const uint64_t[::1] x):
    """popcount(row XOR x) for every row, i.e. Hamming distances to x."""
    cdef Py_ssize_t n = rows.shape[0], m = rows.shape[1], i, j
    if x.shape[0] != m:
        raise ValueError("word count mismatch")
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t acc
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(m):
                acc += BINAE_POPCOUNT(rows[i, j] ^ x[j])
            o[i] = acc
    return out


cdef inline uint64_t _select(const int64_t* v, int n, int kind, int64_t control,
                             int64_t* hist) noexcept nogil:
    # kind 0: v >= control; kind 1: control winners, ties to the lowest index
    cdef uint64_t out = 0
    cdef int i
    cdef int64_t maxv, t, cum, need
    if kind == 0:
        for i in range(n):
            if v[i] >= control:
                out |= (<uint64_t>1) << i
        return out
    if control <= 0:
        return 0
    if control >= n:
        for i in range(n):
            out |= (<uint64_t>1) << i
        return out
    maxv = 0
    for i in range(n):
        if v[i] > maxv:
            maxv = v[i]
    for i in range(maxv + 1):
        hist[i] = 0
    for i in range(n):
        hist[v[i]] += 1
    cum = 0
    t = maxv
    while cum + hist[t] < control:
        cum += hist[t]
        t -= 1
    need = control - cum
    for i in range(n):
        if v[i] > t:
            out |= (<uint64_t>1) << i
        elif v[i] == t and need > 0:
            out |= (<uint64_t>1) << i
            need -= 1
    return out


def project_codes(const uint64_t[::1] masks, const uint64_t[::1] codes,
                  int kind, int64_t control):
    """Map packed inputs through a binary layer.

    ``masks[i]`` holds the incoming weights of output unit ``i`` as a bit
    mask over input positions; each entry of ``codes`` is one input vector.
    The pre-activation of unit ``i`` is ``popcount(masks[i] & code)``.
    ``kind`` 0 applies a shared threshold, 1 keeps the ``control`` largest
    pre-activations (first occurrence wins ties).
    """
    cdef Py_ssize_t n_out = masks.shape[0], n = codes.shape[0], r
    cdef int i
    if n_out > MAX_UNITS:
        raise ValueError("at most 64 output units fit a packed code")
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef int64_t v[64]
    cdef int64_t hist[65]
    cdef uint64_t c
    with nogil:
        for r in range(n):
            c = codes[r]
            for i in range(n_out):
                v[i] = BINAE_POPCOUNT(masks[i] & c)
            o[r] = _select(v, <int>n_out, kind, control, hist)
    return out


def project_codes_pairwise(const uint64_t[:, ::1] upper, const uint64_t[::1] codes,
                           int kind, int64_t control):
    """Sigma-pi layer over input pairs.

    ``upper[j, k]`` is the mask of partners ``l > k`` whose pair ``(k, l)``
    feeds output unit ``j``. The pre-activation of unit ``j`` counts active
    pairs, ``sum_{k in code} popcount(upper[j, k] & code)``.
    """
    cdef Py_ssize_t n_out = upper.shape[0], n_in = upper.shape[1], n = codes.shape[0], r
    cdef int j, k
    if n_out > MAX_UNITS or n_in > MAX_UNITS:
        raise ValueError("at most 64 units per layer fit a packed code")
    cdef int64_t hmax = n_in * (n_in - 1) // 2 + 1
    cdef int64_t* hist = <int64_t*> malloc(hmax * sizeof(int64_t))
    if hist == NULL:
        raise MemoryError()
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef int64_t v[64]
    cdef uint64_t c, rest
    try:
        with nogil:
            for r in range(n):
                c = codes[r]
                for j in range(n_out):
                    v[j] = 0
                    rest = c
                    while rest:
                        k = BINAE_CTZ(rest)
                        rest &= rest - 1
                        v[j] += BINAE_POPCOUNT(upper[j, k] & c)
                o[r] = _select(v, <int>n_out, kind, control, hist)
    finally:
        free(hist)
    return out
