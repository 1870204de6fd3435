"""Matrix-product-state circuit simulation with truncated bond dimension.

The state is kept in Vidal canonical form: one rank-3 site tensor
``T[left_bond, physical, right_bond]`` per qubit plus a positive singular
value vector on every internal bond. Amplitudes are

    <i_0 i_1 ... | psi> = T_0[i_0] diag(w_0) T_1[i_1] diag(w_1) ... T_{n-1}[i_{n-1}]

with site k carrying qubit k. Two-qubit gates on neighbours absorb the
surrounding bond weights, contract with the gate, and SVD back into the chain;
singular values below ``svd_threshold`` times the largest (and beyond
``max_bond``) are dropped, the rest renormalized to unit 2-norm. Non-adjacent
pairs are routed with SWAPs, the lower qubit moving up. The squared weight
discarded by each SVD is appended to ``truncation_log``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, gate_matrix
from .errors import ResourceLimitError
from .pauli import PauliSum, pauli_matrix
from .statevector import StateVector

# Bond weights below this are floored before dividing them back out of a
# two-site block; smaller values are numerically zero and would amplify noise.
WEIGHT_FLOOR = 1e-14

_SWAP4 = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(eq=False)
class MPSState:
    """Vidal-form MPS. Treat instances as immutable once evolution finishes;
    the apply_* functions return new states sharing untouched tensors."""

    n_qubits: int
    site_tensors: list[np.ndarray]
    bond_weights: list[np.ndarray]
    max_bond: int
    svd_threshold: float
    truncation_log: list[float] = field(default_factory=list)

    def bond_dims(self) -> list[int]:
        return [w.size for w in self.bond_weights]

    def clone(self) -> "MPSState":
        return MPSState(
            self.n_qubits,
            list(self.site_tensors),
            list(self.bond_weights),
            self.max_bond,
            self.svd_threshold,
            list(self.truncation_log),
        )

    def _site_matrices(self) -> list[np.ndarray]:
        """Site tensors with the left bond weight absorbed (site 0 bare)."""
        out = [self.site_tensors[0]]
        for k in range(1, self.n_qubits):
            out.append(self.bond_weights[k - 1][:, None, None] * self.site_tensors[k])
        return out


def init(bitstring: str, max_bond: int, svd_threshold: float = 1e-12) -> MPSState:
    """Product state with all bond dimensions 1."""
    if max_bond < 1:
        raise ValueError("max_bond must be >= 1")
    if svd_threshold < 0:
        raise ValueError("svd_threshold must be >= 0")
    n = len(bitstring)
    if n == 0 or any(c not in "01" for c in bitstring):
        raise ValueError(f"invalid bitstring {bitstring!r}")
    tensors = []
    for c in bitstring:
        t = np.zeros((1, 2, 1), dtype=np.complex128)
        t[0, int(c), 0] = 1.0
        tensors.append(t)
    weights = [np.ones(1) for _ in range(n - 1)]
    return MPSState(n, tensors, weights, max_bond, svd_threshold)


def apply_1q(s: MPSState, gate: np.ndarray, qubit: int) -> MPSState:
    """Contract a 2x2 gate into one site tensor; exact, bonds unchanged."""
    if not (0 <= qubit < s.n_qubits):
        raise ValueError(f"qubit {qubit} out of range")
    out = s.clone()
    _apply_1q_inplace(out, gate, qubit)
    return out


def _apply_1q_inplace(s: MPSState, gate: np.ndarray, qubit: int) -> None:
    t = s.site_tensors[qubit]
    s.site_tensors[qubit] = np.einsum("ij,ajb->aib", gate, t)


def apply_2q(s: MPSState, gate: np.ndarray, qubit_a: int, qubit_b: int) -> MPSState:
    """Apply a 4x4 gate (rows indexed by (bit a, bit b)); non-adjacent pairs
    are SWAP-routed."""
    out = s.clone()
    _apply_2q_routed(out, gate, qubit_a, qubit_b)
    return out


def _apply_2q_routed(s: MPSState, gate: np.ndarray, qubit_a: int, qubit_b: int) -> None:
    if qubit_a == qubit_b:
        raise ValueError("two-qubit gate needs distinct qubits")
    for q in (qubit_a, qubit_b):
        if not (0 <= q < s.n_qubits):
            raise ValueError(f"qubit {q} out of range")
    lo, hi = min(qubit_a, qubit_b), max(qubit_a, qubit_b)
    if qubit_a > qubit_b:
        gate = _SWAP4 @ gate @ _SWAP4
    # Move the lower qubit up until adjacent, apply, move it back.
    for k in range(lo, hi - 1):
        _apply_2q_adjacent(s, _SWAP4, k)
    _apply_2q_adjacent(s, gate, hi - 1)
    for k in range(hi - 2, lo - 1, -1):
        _apply_2q_adjacent(s, _SWAP4, k)


def _apply_2q_adjacent(s: MPSState, gate: np.ndarray, k: int) -> None:
    """Gate on sites (k, k+1); gate rows indexed by (bit k, bit k+1)."""
    left = s.bond_weights[k - 1] if k > 0 else np.ones(1)
    mid = s.bond_weights[k]
    right = s.bond_weights[k + 1] if k + 1 < s.n_qubits - 1 else np.ones(1)

    a = left[:, None, None] * s.site_tensors[k] * mid[None, None, :]
    b = s.site_tensors[k + 1] * right[None, None, :]
    theta = np.tensordot(a, b, axes=([2], [0]))  # [l, i, j, r]
    dl, _, _, dr = theta.shape
    g = gate.reshape(2, 2, 2, 2)  # [i', j', i, j]
    theta = np.einsum("xyij,lijr->lxyr", g, theta)

    m = theta.reshape(dl * 2, 2 * dr)
    u, sv, vh = np.linalg.svd(m, full_matrices=False)

    # Drop values below the relative threshold (exact zeros always go, so the
    # kept weights stay strictly positive) and cap the rank at max_bond.
    keep = int(np.sum((sv >= s.svd_threshold * sv[0]) & (sv > 0.0)))
    keep = max(1, min(keep, s.max_bond))
    discarded = float(np.sum(sv[keep:] ** 2))
    s.truncation_log.append(discarded)

    sv = sv[:keep]
    norm = np.linalg.norm(sv)
    sv = sv / norm

    left_safe = np.where(left > WEIGHT_FLOOR, left, WEIGHT_FLOOR)
    right_safe = np.where(right > WEIGHT_FLOOR, right, WEIGHT_FLOOR)
    new_a = u[:, :keep].reshape(dl, 2, keep) / left_safe[:, None, None]
    new_b = vh[:keep, :].reshape(keep, 2, dr) / right_safe[None, None, :]

    s.site_tensors[k] = new_a
    s.site_tensors[k + 1] = new_b
    s.bond_weights[k] = sv

    # Keep the global norm at exactly 1; truncation makes evolution slightly
    # non-unitary and the defect would otherwise accumulate.
    nrm = norm_of(s)
    if abs(nrm - 1.0) > 1e-15:
        s.site_tensors[k] = s.site_tensors[k] / nrm


def evolve(s: MPSState, c: Circuit) -> MPSState:
    """Dispatch a bound circuit's gates; final state renormalized to 1."""
    if c.n_qubits != s.n_qubits:
        raise ValueError("circuit and state qubit counts differ")
    if not c.is_bound():
        raise RuntimeError("circuit must be bound before evolution")
    out = s.clone()
    for gate in c.gates:
        matrix = gate_matrix(gate.kind, gate.bound_values())
        if len(gate.qubits) == 1:
            _apply_1q_inplace(out, matrix, gate.qubits[0])
        else:
            _apply_2q_routed(out, matrix, gate.qubits[0], gate.qubits[1])
    nrm = norm_of(out)
    if abs(nrm - 1.0) > 1e-15:
        out.site_tensors[0] = out.site_tensors[0] / nrm
    return out


def norm_of(s: MPSState) -> float:
    """2-norm via the transfer contraction; never forms the dense state."""
    env = np.ones((1, 1), dtype=np.complex128)
    for m in s._site_matrices():
        t = np.tensordot(env, m, axes=([1], [0]))  # [bra_l, i, r]
        env = np.tensordot(m.conj(), t, axes=([0, 1], [0, 1]))
    return float(np.sqrt(abs(env[0, 0].real)))


def expectation(s: MPSState, h: PauliSum) -> float:
    """Term-wise transfer contraction, O(n D^3) per Pauli string."""
    if not h.is_hermitian():
        raise ValueError("expectation requires a Hermitian operator (real coefficients)")
    mats = s._site_matrices()
    acc = 0.0 + 0.0j
    for term in h.terms:
        acc += complex(term.coefficient) * _string_expectation(s, mats, term.string)
    if abs(acc.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {acc.imag:.3e}")
    return float(acc.real)


def _string_expectation(s: MPSState, mats: list[np.ndarray], string) -> complex:
    ops = {q: pauli_matrix(axis) for q, axis in string.factors}
    if any(q >= s.n_qubits for q in ops):
        raise ValueError("string support exceeds qubit count")
    env = np.ones((1, 1), dtype=np.complex128)
    for k, m in enumerate(mats):
        op = ops.get(k)
        w = m if op is None else np.einsum("ij,ajb->aib", op, m)
        t = np.tensordot(env, w, axes=([1], [0]))
        env = np.tensordot(m.conj(), t, axes=([0, 1], [0, 1]))
    return complex(env[0, 0])


def overlap(a: MPSState, b: MPSState) -> complex:
    """<a|b> by transfer contraction."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    env = np.ones((1, 1), dtype=np.complex128)
    for ma, mb in zip(a._site_matrices(), b._site_matrices()):
        t = np.tensordot(env, mb, axes=([1], [0]))
        env = np.tensordot(ma.conj(), t, axes=([0, 1], [0, 1]))
    return complex(env[0, 0])


def amplitude(s: MPSState, bitstring: str) -> complex:
    """Single amplitude as a chain of matrix-vector products, O(n D^2)."""
    if len(bitstring) != s.n_qubits or any(c not in "01" for c in bitstring):
        raise ValueError(f"invalid bitstring {bitstring!r}")
    vec = np.ones((1,), dtype=np.complex128)
    for k, m in enumerate(s._site_matrices()):
        vec = vec @ m[:, int(bitstring[k]), :]
    return complex(vec[0])


def to_state_vector(s: MPSState) -> StateVector:
    """Full contraction into a dense state (test oracle and CLI exact path)."""
    if s.n_qubits > 16:
        raise ResourceLimitError(
            f"dense conversion capped at 16 qubits, state has {s.n_qubits}"
        )
    acc = np.ones((1, 1), dtype=np.complex128)  # [phys..., bond]
    for m in s._site_matrices():
        acc = np.tensordot(acc, m, axes=([-1], [0]))
    acc = acc.reshape(acc.shape[1:-1])  # drop the trivial boundary bonds
    # Axis k is qubit k; flatten with qubit 0 as the least-significant bit.
    amps = acc.transpose(tuple(range(acc.ndim - 1, -1, -1))).reshape(-1)
    return StateVector(s.n_qubits, amps.copy())


def canonical_defect(s: MPSState) -> float:
    """Largest deviation from Vidal canonical form.

    Checks left isometry of (left weight * T), right isometry of
    (T * right weight), unit 2-norm and descending order of every weight
    vector. Returns the max absolute defect.
    """
    worst = 0.0
    for k in range(s.n_qubits):
        left = s.bond_weights[k - 1] if k > 0 else np.ones(1)
        right = s.bond_weights[k] if k < s.n_qubits - 1 else np.ones(1)
        t = s.site_tensors[k]
        a = left[:, None, None] * t
        a2 = a.reshape(-1, a.shape[2])
        worst = max(worst, float(np.max(np.abs(a2.conj().T @ a2 - np.eye(a.shape[2])))))
        b = t * right[None, None, :]
        b2 = b.reshape(b.shape[0], -1)
        worst = max(worst, float(np.max(np.abs(b2 @ b2.conj().T - np.eye(b.shape[0])))))
    for w in s.bond_weights:
        worst = max(worst, abs(float(np.linalg.norm(w)) - 1.0))
        if np.any(np.diff(w) > 0) or np.any(w <= 0):
            worst = max(worst, 1.0)
    return worst


def bond_profile(s: MPSState) -> dict:
    """Diagnostics for the CLI: bond dimensions and cumulative truncation."""
    return {
        "bond_dims": s.bond_dims(),
        "max_bond": s.max_bond,
        "svd_threshold": s.svd_threshold,
        "truncation_log": list(s.truncation_log),
        "discarded_weight_total": float(sum(s.truncation_log)),
    }
