# Compiled gate kernels for the dense state-vector backend.
#
# Same contracts as _numpy_kernels: in-place complex128 updates, qubit 0 is
# the least-significant basis bit, two-qubit gate rows indexed by
# (bit q0, bit q1) with q0 the more significant gate-local bit.

import numpy as np

cimport cython

ctypedef double complex cplx

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

IMPLEMENTATION = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_1q(cplx[::1] state, cplx[:, ::1] matrix, int qubit):
    cdef Py_ssize_t dim = state.shape[0]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t blk, base, low, i0, i1
    cdef cplx a, b
    cdef cplx m00 = matrix[0, 0], m01 = matrix[0, 1]
    cdef cplx m10 = matrix[1, 0], m11 = matrix[1, 1]
    with nogil:
        for blk in range(n_blocks):
            base = blk * (stride << 1)
            for low in range(stride):
                i0 = base + low
                i1 = i0 + stride
                a = state[i0]
                b = state[i1]
                state[i0] = m00 * a + m01 * b
                state[i1] = m10 * a + m11 * b


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_2q(cplx[::1] state, cplx[:, ::1] matrix, int q0, int q1):
    cdef Py_ssize_t dim = state.shape[0]
    cdef int lo = q0 if q0 < q1 else q1
    cdef int hi = q0 if q0 > q1 else q1
    cdef Py_ssize_t mask_lo = ((<Py_ssize_t>1) << lo) - 1
    cdef Py_ssize_t mask_hi = ((<Py_ssize_t>1) << hi) - 1
    cdef Py_ssize_t bit0 = (<Py_ssize_t>1) << q0
    cdef Py_ssize_t bit1 = (<Py_ssize_t>1) << q1
    cdef Py_ssize_t k, i, i00, i01, i10, i11
    cdef cplx a0, a1, a2, a3
    cdef cplx m[4][4]
    cdef int r, c
    for r in range(4):
        for c in range(4):
            m[r][c] = matrix[r, c]
    with nogil:
        for k in range(dim >> 2):
            i = ((k >> lo) << (lo + 1)) | (k & mask_lo)
            i = ((i >> hi) << (hi + 1)) | (i & mask_hi)
            i00 = i
            i01 = i | bit1
            i10 = i | bit0
            i11 = i | bit0 | bit1
            a0 = state[i00]
            a1 = state[i01]
            a2 = state[i10]
            a3 = state[i11]
            state[i00] = m[0][0] * a0 + m[0][1] * a1 + m[0][2] * a2 + m[0][3] * a3
            state[i01] = m[1][0] * a0 + m[1][1] * a1 + m[1][2] * a2 + m[1][3] * a3
            state[i10] = m[2][0] * a0 + m[2][1] * a1 + m[2][2] * a2 + m[2][3] * a3
            state[i11] = m[3][0] * a0 + m[3][1] * a1 + m[3][2] * a2 + m[3][3] * a3


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_pauli(cplx[::1] state, unsigned long long x_mask,
                unsigned long long y_mask, unsigned long long z_mask,
                cplx[::1] out):
    cdef Py_ssize_t dim = state.shape[0]
    cdef unsigned long long flip = x_mask | y_mask
    cdef unsigned long long sign_mask = y_mask | z_mask
    cdef int wy = __builtin_popcountll(y_mask) & 3
    cdef cplx phase
    if wy == 0:
        phase = 1
    elif wy == 1:
        phase = 1j
    elif wy == 2:
        phase = -1
    else:
        phase = -1j
    cdef Py_ssize_t j
    cdef unsigned long long i
    with nogil:
        for j in range(dim):
            i = (<unsigned long long>j) ^ flip
            if __builtin_popcountll(i & sign_mask) & 1:
                out[j] = -phase * state[i]
            else:
                out[j] = phase * state[i]
