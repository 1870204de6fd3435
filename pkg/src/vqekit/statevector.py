"""Dense state-vector simulation: evolution, expectations, sampling, and
reverse-mode gradients.

Amplitude layout: basis index bit k is the state of qubit k (qubit 0 least
significant). Gates are applied through stride-wise kernels; no 2^n x 2^n
matrix is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .circuit import Affine, Circuit, bind, gate_derivative, gate_matrix
from .errors import ResourceLimitError
from .pauli import PauliString, PauliSum

# 26 qubits is ~1 GiB of complex128 amplitudes; larger systems belong on the
# MPS backend.
QUBIT_CAP = 26


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude vector length must be 2^n_qubits")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def init_state(bitstring: str) -> StateVector:
    """Computational basis state; character k of the bitstring is qubit k."""
    n = len(bitstring)
    if n == 0 or any(c not in "01" for c in bitstring):
        raise ValueError(f"invalid bitstring {bitstring!r}")
    if n > QUBIT_CAP:
        raise ResourceLimitError(
            f"{n} qubits exceeds the dense backend cap of {QUBIT_CAP}; use the MPS backend"
        )
    index = sum(1 << k for k, c in enumerate(bitstring) if c == "1")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


def _apply_gate(amps: np.ndarray, kind: str, qubits: tuple[int, ...], values) -> None:
    matrix = np.ascontiguousarray(gate_matrix(kind, values))
    if len(qubits) == 1:
        kernels.apply_1q(amps, matrix, qubits[0])
    else:
        kernels.apply_2q(amps, matrix, qubits[0], qubits[1])


def evolve(s: StateVector, c: Circuit) -> StateVector:
    """Apply a bound circuit gate by gate; returns a new state."""
    if c.n_qubits != s.n_qubits:
        raise ValueError("circuit and state qubit counts differ")
    if not c.is_bound():
        raise RuntimeError("circuit must be bound before evolution")
    amps = s.amplitudes.copy()
    for gate in c.gates:
        _apply_gate(amps, gate.kind, gate.qubits, gate.bound_values())
    return StateVector(s.n_qubits, amps)


def _string_masks(p: PauliString, n_qubits: int) -> tuple[int, int, int]:
    xm = ym = zm = 0
    for q, axis in p.factors:
        if q >= n_qubits:
            raise ValueError(f"string index {q} out of range for {n_qubits} qubits")
        if axis == "X":
            xm |= 1 << q
        elif axis == "Y":
            ym |= 1 << q
        else:
            zm |= 1 << q
    return xm, ym, zm


def apply_pauli_string(s: StateVector, p: PauliString) -> StateVector:
    out = np.empty_like(s.amplitudes)
    xm, ym, zm = _string_masks(p, s.n_qubits)
    kernels.apply_pauli(s.amplitudes, xm, ym, zm, out)
    return StateVector(s.n_qubits, out)


def expectation(s: StateVector, h: PauliSum) -> float:
    """<s|H|s> accumulated term by term on a scratch buffer."""
    if not h.is_hermitian():
        raise ValueError("expectation requires a Hermitian operator (real coefficients)")
    scratch = np.empty_like(s.amplitudes)
    acc = 0.0 + 0.0j
    for term in h.terms:
        xm, ym, zm = _string_masks(term.string, s.n_qubits)
        kernels.apply_pauli(s.amplitudes, xm, ym, zm, scratch)
        acc += complex(term.coefficient) * np.vdot(s.amplitudes, scratch)
    if abs(acc.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {acc.imag:.3e}")
    return float(acc.real)


def apply_operator(s: StateVector, h: PauliSum) -> StateVector:
    """H|s> as a dense vector (not normalized)."""
    out = np.zeros_like(s.amplitudes)
    scratch = np.empty_like(s.amplitudes)
    for term in h.terms:
        xm, ym, zm = _string_masks(term.string, s.n_qubits)
        kernels.apply_pauli(s.amplitudes, xm, ym, zm, scratch)
        out += complex(term.coefficient) * scratch
    return StateVector(s.n_qubits, out)


def sample(s: StateVector, p: PauliString, shots: int, seed: int) -> float:
    """Shot-based estimate of <P> by basis rotation and bitstring sampling.

    The support qubits are rotated into the Z basis (H for X, HY for Y; both
    self-adjoint), bitstrings are drawn from |amplitude|^2 with a seeded
    counter-based generator, and the mean support parity (+-1) is returned.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    amps = s.amplitudes.copy()
    for q, axis in p.factors:
        if axis == "X":
            kernels.apply_1q(amps, gate_matrix("H"), q)
        elif axis == "Y":
            kernels.apply_1q(amps, gate_matrix("HY"), q)
    probs = np.abs(amps) ** 2
    probs /= probs.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    support_mask = 0
    for q, _ in p.factors:
        support_mask |= 1 << q
    parities = np.bitwise_count(outcomes.astype(np.uint64) & np.uint64(support_mask)) & 1
    return float(np.mean(1.0 - 2.0 * parities.astype(np.float64)))


ApplyOperator = Callable[[StateVector], StateVector]


def reverse_gradient(
    c: Circuit,
    theta: Sequence[float],
    h: PauliSum,
    s0: StateVector,
) -> np.ndarray:
    """Gradient of <psi(theta)|H|psi(theta)> over all parameters in one
    backward sweep, with a single application of H."""
    if not h.is_hermitian():
        raise ValueError("reverse-mode gradient requires a Hermitian operator")
    return reverse_gradient_general(c, theta, lambda s: apply_operator(s, h), s0)


def reverse_gradient_general(
    c: Circuit,
    theta: Sequence[float],
    apply_h: ApplyOperator,
    s0: StateVector,
) -> np.ndarray:
    """Reverse-mode sweep for a generic linear Hermitian operator.

    Forward pass to |psi>, then |psi_l> = H|psi| and |psi_r> = |psi> are both
    unwound gate by gate; each affine parameter slot contributes
    scale * 2 Re <psi_l| dU |psi_r>. |psi_l> is not a quantum state (the
    derivative gates are non-unitary) and is never renormalized.
    """
    theta = np.asarray(theta, dtype=float)
    for gate in c.gates:
        if gate.params and gate.kind not in ("RZ", "RY", "U3", "CU3"):
            raise ValueError(f"gate kind {gate.kind} is not differentiable")

    psi = evolve(s0, bind(c, theta))
    psi_l = apply_h(psi).amplitudes.copy()
    psi_r = psi.amplitudes
    grad = np.zeros(c.n_params)

    for gate in reversed(c.gates):
        values = tuple(p.evaluate(theta) for p in gate.params)
        matrix = gate_matrix(gate.kind, values)
        dagger = np.ascontiguousarray(matrix.conj().T)
        if len(gate.qubits) == 1:
            kernels.apply_1q(psi_r, dagger, gate.qubits[0])
        else:
            kernels.apply_2q(psi_r, dagger, gate.qubits[0], gate.qubits[1])
        for slot, expr in enumerate(gate.params):
            if not isinstance(expr, Affine):
                continue
            dmat = np.ascontiguousarray(gate_derivative(gate.kind, values, slot))
            work = psi_r.copy()
            if len(gate.qubits) == 1:
                kernels.apply_1q(work, dmat, gate.qubits[0])
            else:
                kernels.apply_2q(work, dmat, gate.qubits[0], gate.qubits[1])
            grad[expr.index] += expr.scale * 2.0 * np.real(np.vdot(psi_l, work))
        if len(gate.qubits) == 1:
            kernels.apply_1q(psi_l, dagger, gate.qubits[0])
        else:
            kernels.apply_2q(psi_l, dagger, gate.qubits[0], gate.qubits[1])
    return grad


def dump_state(s: StateVector) -> bytes:
    """Little-endian complex-double amplitude dump (debugging aid)."""
    return s.amplitudes.astype("<c16").tobytes()
