# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise scalar lifting and Rice bit coding.

Semantics match ``cfwb._fallback`` exactly. Floors are taken on IEEE-754
binary64 products and quotients, so both paths agree bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor
from libc.stdint cimport int64_t, uint64_t, uint8_t

cnp.import_array()

cdef enum:
    ESCAPE_RUN = 48
    ESCAPE_BITS = 32

cdef uint64_t LOW32 = ((<uint64_t>1) << 32) - 1


def lift_forward(x1, x2, double q):
    cdef cnp.ndarray[int64_t, ndim=1] a1 = np.ascontiguousarray(x1, dtype=np.int64).ravel()
    cdef cnp.ndarray[int64_t, ndim=1] a2 = np.ascontiguousarray(x2, dtype=np.int64).ravel()
    cdef Py_ssize_t n = a1.shape[0], i
    cdef cnp.ndarray[int64_t, ndim=1] o1 = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] o2 = np.empty(n, dtype=np.int64)
    cdef int64_t a, b
    with nogil:
        for i in range(n):
            a = a2[i] - <int64_t>floor(q * <double>a1[i])
            b = a1[i] + <int64_t>floor(<double>a / q)
            a = a - <int64_t>floor(q * <double>b)
            o1[i] = -a
            o2[i] = b
    shape = np.shape(x1)
    return o1.reshape(shape), o2.reshape(shape)


def lift_inverse(x1p, x2p, double q):
    cdef cnp.ndarray[int64_t, ndim=1] a1 = np.ascontiguousarray(x1p, dtype=np.int64).ravel()
    cdef cnp.ndarray[int64_t, ndim=1] a2 = np.ascontiguousarray(x2p, dtype=np.int64).ravel()
    cdef Py_ssize_t n = a1.shape[0], i
    cdef cnp.ndarray[int64_t, ndim=1] o1 = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] o2 = np.empty(n, dtype=np.int64)
    cdef int64_t a, b
    with nogil:
        for i in range(n):
            b = a2[i]
            a = -a1[i]
            a = a + <int64_t>floor(q * <double>b)
            b = b - <int64_t>floor(<double>a / q)
            a = a + <int64_t>floor(q * <double>b)
            o1[i] = b
            o2[i] = a
    shape = np.shape(x1p)
    return o1.reshape(shape), o2.reshape(shape)


cdef struct BitWriter:
    uint8_t *out
    Py_ssize_t pos
    uint64_t acc
    int nacc


cdef inline void put_bits(BitWriter *w, uint64_t val, int nb) noexcept nogil:
    # nb <= 32; at most 7 bits are pending on entry so acc never overflows
    w.acc = (w.acc << nb) | val
    w.nacc += nb
    while w.nacc >= 8:
        w.nacc -= 8
        w.out[w.pos] = <uint8_t>((w.acc >> w.nacc) & 0xFF)
        w.pos += 1


cdef inline void put_ones(BitWriter *w, uint64_t n) noexcept nogil:
    while n > 32:
        put_bits(w, LOW32, 32)
        n -= 32
    if n:
        put_bits(w, ((<uint64_t>1) << n) - 1, <int>n)


def rice_encode(values, int k):
    cdef cnp.ndarray[uint64_t, ndim=1] v = np.ascontiguousarray(values, dtype=np.uint64).ravel()
    cdef Py_ssize_t n = v.shape[0], i
    cdef uint64_t total = 0, quot, x
    cdef uint64_t mask = ((<uint64_t>1) << k) - 1
    cdef BitWriter w
    with nogil:
        for i in range(n):
            quot = v[i] >> k
            if quot >= ESCAPE_RUN:
                total += ESCAPE_RUN + ESCAPE_BITS
            else:
                total += quot + 1 + k
    cdef cnp.ndarray[uint8_t, ndim=1] out = np.zeros((total + 7) // 8, dtype=np.uint8)
    w.out = <uint8_t *>out.data
    w.pos = 0
    w.acc = 0
    w.nacc = 0
    with nogil:
        for i in range(n):
            x = v[i]
            quot = x >> k
            if quot >= ESCAPE_RUN:
                put_ones(&w, ESCAPE_RUN)
                put_bits(&w, x & LOW32, ESCAPE_BITS)
            else:
                put_ones(&w, quot)
                put_bits(&w, x & mask, k + 1)
        if w.nacc:
            put_bits(&w, 0, 8 - w.nacc)
    return out.tobytes()


def rice_decode(buf, Py_ssize_t count, int k):
    cdef const uint8_t[:] data = memoryview(buf).cast("B") if len(buf) else np.zeros(0, np.uint8)
    cdef uint64_t nbits = <uint64_t>data.shape[0] * 8
    cdef cnp.ndarray[uint64_t, ndim=1] out = np.zeros(count, dtype=np.uint64)
    cdef uint64_t bitpos = 0, quot, x
    cdef Py_ssize_t i
    cdef int b, bit, err = 0
    if count == 0:
        if data.shape[0]:
            raise ValueError("trailing bytes after empty stream")
        return out
    with nogil:
        for i in range(count):
            quot = 0
            while True:
                if bitpos >= nbits:
                    err = 1
                    break
                bit = (data[bitpos >> 3] >> (7 - (bitpos & 7))) & 1
                bitpos += 1
                if bit == 0:
                    break
                quot += 1
                if quot == ESCAPE_RUN:
                    break
            if err:
                break
            if quot == ESCAPE_RUN:
                if bitpos + ESCAPE_BITS > nbits:
                    err = 1
                    break
                x = 0
                for b in range(ESCAPE_BITS):
                    x = (x << 1) | ((data[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
                    bitpos += 1
                if (x >> k) < ESCAPE_RUN:
                    err = 2
                    break
            else:
                if bitpos + k > nbits:
                    err = 1
                    break
                x = quot
                for b in range(k):
                    x = (x << 1) | ((data[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
                    bitpos += 1
            out[i] = x
        if err == 0 and nbits - bitpos >= 8:
            err = 3
        if err == 0:
            while bitpos < nbits:
                if (data[bitpos >> 3] >> (7 - (bitpos & 7))) & 1:
                    err = 3
                    break
                bitpos += 1
    if err == 1:
        raise ValueError("truncated rice stream")
    if err == 2:
        raise ValueError("malformed rice escape")
    if err == 3:
        raise ValueError("bad padding after rice stream")
    return out
