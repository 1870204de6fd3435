"""Pure-NumPy gate kernels; fallback when the compiled extension is absent.

All kernels mutate (or fill) preallocated complex128 arrays in place and
assume qubit 0 is the least-significant bit of the basis index. Gate matrices
for a pair (q0, q1) are indexed with the bit of q0 as the more significant
bit of the 2-bit gate-local index.
"""

import numpy as np

IMPLEMENTATION = "numpy"


def apply_1q(state, matrix, qubit):
    """In-place single-qubit gate on a 2^n amplitude vector."""
    stride = 1 << qubit
    view = state.reshape(-1, 2, stride)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = matrix[0, 0] * a + matrix[0, 1] * b
    view[:, 1, :] = matrix[1, 0] * a + matrix[1, 1] * b


def apply_2q(state, matrix, q0, q1):
    """In-place two-qubit gate; matrix rows indexed by (bit q0, bit q1)."""
    hi, lo = (q0, q1) if q0 > q1 else (q1, q0)
    view = state.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    slices = []
    for c in range(4):
        b0, b1 = (c >> 1) & 1, c & 1
        bh, bl = (b0, b1) if q0 == hi else (b1, b0)
        slices.append(view[:, bh, :, bl, :])
    olds = [s.copy() for s in slices]
    for r in range(4):
        slices[r][...] = (
            matrix[r, 0] * olds[0]
            + matrix[r, 1] * olds[1]
            + matrix[r, 2] * olds[2]
            + matrix[r, 3] * olds[3]
        )


def apply_pauli(state, x_mask, y_mask, z_mask, out):
    """Fill ``out`` with P|state> for the Pauli string given by axis bit masks."""
    dim = state.shape[0]
    flip = x_mask | y_mask
    sign_mask = y_mask | z_mask
    src = np.arange(dim, dtype=np.uint64) ^ np.uint64(flip)
    if sign_mask:
        parity = (np.bitwise_count(src & np.uint64(sign_mask)) & 1).astype(np.float64)
        signs = 1.0 - 2.0 * parity
    else:
        signs = 1.0
    global_phase = 1j ** (int(y_mask).bit_count() % 4)
    np.multiply(state[src], signs, out=out)
    if global_phase != 1:
        out *= global_phase
