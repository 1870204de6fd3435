"""Backend-independent parametric circuits and ansatz generators.

Gate set: H, HY, X, CNOT, SWAP, RZ, RY, U3, CU3. HY is the Hadamard-Y
analogue (sqrt(2)/2)(Z + Y), which rotates the Y eigenbasis onto Z. For
two-qubit gates the first listed qubit is the control and indexes the more
significant bit of the 4x4 gate matrix.

Angles are radians. A parameter reference is affine, ``scale * theta[i] +
offset``, so several gates can share one variational amplitude with
per-gate weights (how a Trotterized excitation shares its amplitude across
its Pauli strings).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import fermion
from .fermion import FermionSum, jordan_wigner, spin_orbital
from .pauli import PauliString, PauliSum

GATE_QUBITS = {
    "H": 1, "HY": 1, "X": 1, "RZ": 1, "RY": 1, "U3": 1,
    "CNOT": 2, "SWAP": 2, "CU3": 2,
}
GATE_PARAMS = {
    "H": 0, "HY": 0, "X": 0, "CNOT": 0, "SWAP": 0,
    "RZ": 1, "RY": 1, "U3": 3, "CU3": 3,
}

_SQRT1_2 = math.sqrt(0.5)
_H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
_HY_MATRIX = np.array([[1, -1j], [1j, -1]], dtype=complex) * _SQRT1_2
_X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
_CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class Constant:
    value: float

    def evaluate(self, theta: Sequence[float]) -> float:
        return self.value


@dataclass(frozen=True)
class Affine:
    """scale * theta[index] + offset."""

    index: int
    scale: float
    offset: float = 0.0

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("negative parameter index")
        if not math.isfinite(self.scale) or self.scale == 0.0:
            raise ValueError("affine scale must be finite and non-zero")

    def evaluate(self, theta: Sequence[float]) -> float:
        return self.scale * theta[self.index] + self.offset


ParamExpr = Constant | Affine


def _scale_expr(expr: ParamExpr, factor: float) -> ParamExpr:
    if isinstance(expr, Constant):
        return Constant(expr.value * factor)
    return Affine(expr.index, expr.scale * factor, expr.offset * factor)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[ParamExpr, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_QUBITS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.qubits) != GATE_QUBITS[self.kind]:
            raise ValueError(f"{self.kind} expects {GATE_QUBITS[self.kind]} qubits")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubit indices must be distinct")
        if any(q < 0 for q in self.qubits):
            raise ValueError("negative qubit index")
        if len(self.params) != GATE_PARAMS[self.kind]:
            raise ValueError(f"{self.kind} expects {GATE_PARAMS[self.kind]} parameters")

    def is_bound(self) -> bool:
        return all(isinstance(p, Constant) for p in self.params)

    def bound_values(self) -> tuple[float, ...]:
        if not self.is_bound():
            raise RuntimeError(f"gate {self.kind} has unbound parameters")
        return tuple(p.value for p in self.params)  # type: ignore[union-attr]


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over ``n_qubits`` wires with ``n_params`` free angles.

    A fully bound circuit (all parameters Constant) plays the BoundCircuit
    role; ``bind`` produces one with ``n_params == 0``.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_params: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if any(q >= self.n_qubits for q in gate.qubits):
                raise ValueError(f"gate {gate.kind} addresses qubit outside 0..{self.n_qubits - 1}")
            for expr in gate.params:
                if isinstance(expr, Affine) and expr.index >= self.n_params:
                    raise ValueError(
                        f"parameter index {expr.index} out of range for {self.n_params} parameters"
                    )

    def is_bound(self) -> bool:
        return all(g.is_bound() for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def extended(self, gates: Iterable[Gate], extra_params: int = 0) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates), self.n_params + extra_params)


def bind(c: Circuit, theta: Sequence[float]) -> Circuit:
    """Evaluate every parameter expression; returns a circuit with n_params = 0."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.n_params,):
        raise ValueError(f"expected {c.n_params} parameter values, got {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameter values must be finite")
    gates = tuple(
        Gate(g.kind, g.qubits, tuple(Constant(p.evaluate(theta)) for p in g.params))
        for g in c.gates
    )
    return Circuit(c.n_qubits, gates, 0)


# ---------------------------------------------------------------------------
# Gate matrices and their parameter derivatives
# ---------------------------------------------------------------------------


def _u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


def _u3_derivative(theta: float, phi: float, lam: float, slot: int) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if slot == 0:
        return 0.5 * np.array(
            [
                [-s, -np.exp(1j * lam) * c],
                [np.exp(1j * phi) * c, -np.exp(1j * (phi + lam)) * s],
            ]
        )
    if slot == 1:
        return np.array(
            [
                [0, 0],
                [1j * np.exp(1j * phi) * s, 1j * np.exp(1j * (phi + lam)) * c],
            ]
        )
    return np.array(
        [
            [0, -1j * np.exp(1j * lam) * s],
            [0, 1j * np.exp(1j * (phi + lam)) * c],
        ]
    )


def gate_matrix(kind: str, values: Sequence[float] = ()) -> np.ndarray:
    """Dense matrix of a gate at bound angle values (2x2 or 4x4)."""
    if kind == "H":
        return _H_MATRIX
    if kind == "HY":
        return _HY_MATRIX
    if kind == "X":
        return _X_MATRIX
    if kind == "CNOT":
        return _CNOT_MATRIX
    if kind == "SWAP":
        return _SWAP_MATRIX
    if kind == "RZ":
        lam = values[0]
        return np.array([[np.exp(-0.5j * lam), 0], [0, np.exp(0.5j * lam)]])
    if kind == "RY":
        lam = values[0]
        c, s = math.cos(lam / 2), math.sin(lam / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "U3":
        return _u3_matrix(*values)
    if kind == "CU3":
        out = np.eye(4, dtype=complex)
        out[2:, 2:] = _u3_matrix(*values)
        return out
    raise ValueError(f"unknown gate kind {kind!r}")


def gate_derivative(kind: str, values: Sequence[float], slot: int) -> np.ndarray:
    """d(gate matrix)/d(angle in the given parameter slot); generally non-unitary."""
    if kind == "RZ":
        lam = values[0]
        return np.array(
            [[-0.5j * np.exp(-0.5j * lam), 0], [0, 0.5j * np.exp(0.5j * lam)]]
        )
    if kind == "RY":
        lam = values[0]
        c, s = math.cos(lam / 2), math.sin(lam / 2)
        return 0.5 * np.array([[-s, -c], [c, -s]], dtype=complex)
    if kind == "U3":
        return _u3_derivative(*values, slot)
    if kind == "CU3":
        out = np.zeros((4, 4), dtype=complex)
        out[2:, 2:] = _u3_derivative(*values, slot)
        return out
    raise ValueError(f"gate kind {kind!r} is not differentiable")


DIFFERENTIABLE_KINDS = ("RZ", "RY", "U3", "CU3")


# ---------------------------------------------------------------------------
# Pauli-exponential circuits
# ---------------------------------------------------------------------------


def pauli_evolution(p: PauliString, angle: ParamExpr | float, n_qubits: int) -> Circuit:
    """Circuit whose unitary is exp(i * angle * P).

    Basis changes (H for X, HY for Y) bracket a CNOT ladder running down the
    string's support qubits only; the accumulated parity feeds RZ(-2 * angle)
    on the last support qubit. A weight-w string costs 2(w - 1) CNOTs.
    """
    if p.is_identity():
        raise ValueError("cannot build an evolution circuit for the identity string")
    if p.max_index() >= n_qubits:
        raise ValueError("string support exceeds qubit count")
    if isinstance(angle, float | int):
        angle = Constant(float(angle))
    n_params = angle.index + 1 if isinstance(angle, Affine) else 0
    return Circuit(n_qubits, tuple(_evolution_gates(p, angle)), n_params)


def _evolution_gates(p: PauliString, angle: ParamExpr) -> list[Gate]:
    support = p.support
    basis = []
    for q, axis in p.factors:
        if axis == "X":
            basis.append(Gate("H", (q,)))
        elif axis == "Y":
            basis.append(Gate("HY", (q,)))
    ladder = [Gate("CNOT", (support[k], support[k + 1])) for k in range(len(support) - 1)]
    rz = Gate("RZ", (support[-1],), (_scale_expr(angle, -2.0),))
    return basis + ladder + [rz] + ladder[::-1] + basis


# ---------------------------------------------------------------------------
# Coupled-cluster excitation generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExcitationGenerator:
    """Anti-Hermitian generator T - T^dag for one shared amplitude."""

    label: str
    generator: FermionSum
    image: PauliSum  # Jordan-Wigner image; coefficients purely imaginary


def _mode_sz(mode: int) -> int:
    # alpha (even mode) = +1, beta = -1, in half units.
    return 1 if mode % 2 == 0 else -1


def _single_generator(p: int, q: int) -> FermionSum:
    terms = []
    for sigma in (0, 1):
        terms.append((1.0, ((spin_orbital(q, sigma), True), (spin_orbital(p, sigma), False))))
    t = FermionSum.from_terms(terms)
    return t - t.dagger()


def _double_class_generator(classes: list[tuple[tuple[int, int], tuple[int, int]]]) -> FermionSum:
    # One term per spin-orbital realization (an_pair -> cr_pair) of a shared
    # spatial amplitude: a+_{c1} a+_{c2} a_{n2} a_{n1}, minus the dagger.
    terms = []
    for (n1, n2), (c1, c2) in classes:
        terms.append((1.0, ((c1, True), (c2, True), (n2, False), (n1, False))))
    t = FermionSum.from_terms(terms)
    return t - t.dagger()


def uccsd_excitations(
    n_spatial: int, n_electrons: int, generalized: bool = False
) -> list[ExcitationGenerator]:
    """Spin-adapted singles and doubles, one entry per shared spatial amplitude.

    Restricted (generalized=False) excitations run occupied -> virtual under a
    closed-shell aufbau filling; generalized ones run over all orbital pairs.
    Spin-orbital realizations are Sz-conserving, deduplicated against their
    daggers, and grouped by spatial signature so a group shares one parameter.
    Order: singles ascending, then doubles ascending by spatial signature.
    """
    if n_electrons <= 0 or n_electrons > 2 * n_spatial:
        raise ValueError(f"invalid electron count {n_electrons} for {n_spatial} orbitals")
    if n_electrons % 2 != 0:
        raise ValueError("open-shell references are not supported; n_electrons must be even")
    n_occ = n_electrons // 2

    out: list[ExcitationGenerator] = []

    if generalized:
        single_moves = [(p, q) for p in range(n_spatial) for q in range(p + 1, n_spatial)]
    else:
        single_moves = [(i, a) for i in range(n_occ) for a in range(n_occ, n_spatial)]
    for p, q in single_moves:
        gen = _single_generator(p, q)
        image = jordan_wigner(gen)
        if len(image):
            out.append(ExcitationGenerator(f"s({p}->{q})", gen, image))

    n_modes = 2 * n_spatial
    if generalized:
        an_modes = cr_modes = range(n_modes)
    else:
        an_modes = range(n_electrons)
        cr_modes = range(n_electrons, n_modes)
    an_pairs = [(m, n) for m in an_modes for n in an_modes if m < n]
    cr_pairs = [(m, n) for m in cr_modes for n in cr_modes if m < n]

    def signature(an: tuple[int, int], cr: tuple[int, int]):
        return (
            tuple(sorted(m // 2 for m in an)),
            tuple(sorted(m // 2 for m in cr)),
        )

    groups: dict[tuple, list[tuple[tuple[int, int], tuple[int, int]]]] = {}
    seen: set[tuple] = set()
    for an in an_pairs:
        for cr in cr_pairs:
            if set(an) == set(cr):
                continue
            if _mode_sz(an[0]) + _mode_sz(an[1]) != _mode_sz(cr[0]) + _mode_sz(cr[1]):
                continue
            # Dagger of (an -> cr) is (cr -> an); keep one orientation per class.
            if (cr, an) in seen:
                continue
            seen.add((an, cr))
            sig = signature(an, cr)
            # Orient the whole class along the canonical signature direction.
            if sig[0] <= sig[1]:
                groups.setdefault(sig, []).append((an, cr))
            else:
                groups.setdefault((sig[1], sig[0]), []).append((cr, an))
    for sig in sorted(groups):
        classes = sorted(groups[sig])
        gen = _double_class_generator(classes)
        image = jordan_wigner(gen)
        if len(image):
            (i, j), (a, b) = sig
            out.append(ExcitationGenerator(f"d({i},{j}->{a},{b})", gen, image))
    return out


def generator_evolution_gates(
    image: PauliSum, param_index: int, n_qubits: int
) -> list[Gate]:
    """One first-order Trotter step of exp(theta * G) for an anti-Hermitian G.

    Each Pauli string i*c*P in the image contributes exp(i (c theta) P), an
    evolution block with affine angle scale c sharing ``param_index``.
    """
    gates: list[Gate] = []
    for term in image.terms:
        coef = complex(term.coefficient)
        if abs(coef.real) > 1e-12:
            raise ValueError("generator image is not anti-Hermitian")
        gates.extend(
            _evolution_gates(term.string, Affine(param_index, coef.imag))
        )
    return gates


def uccsd_ansatz(n_spatial: int, n_electrons: int, generalized: bool = False) -> Circuit:
    """Single-Trotter-step unitary coupled-cluster circuit (UCCSD / UCCGSD).

    At theta = 0 the circuit is the identity, so the prepared state is exactly
    the aufbau reference.
    """
    n_qubits = 2 * n_spatial
    excitations = uccsd_excitations(n_spatial, n_electrons, generalized)
    gates: list[Gate] = []
    for k, exc in enumerate(excitations):
        gates.extend(generator_evolution_gates(exc.image, k, n_qubits))
    return Circuit(n_qubits, tuple(gates), len(excitations))


def hardware_efficient_ansatz(n_qubits: int, layers: int, entangler: str = "CNOT") -> Circuit:
    """Kandala-Mezzacapo style circuit: U3 on every qubit, then per layer
    nearest-neighbour entanglers (ascending pairs) followed by a U3 column."""
    if n_qubits < 2:
        raise ValueError("hardware-efficient ansatz needs at least 2 qubits")
    if layers < 0:
        raise ValueError("layers must be >= 0")
    if entangler not in ("CNOT", "CU3"):
        raise ValueError("entangler must be CNOT or CU3")
    gates: list[Gate] = []
    counter = 0

    def fresh(n: int) -> tuple[Affine, ...]:
        nonlocal counter
        out = tuple(Affine(counter + k, 1.0) for k in range(n))
        counter += n
        return out

    for q in range(n_qubits):
        gates.append(Gate("U3", (q,), fresh(3)))
    for _ in range(layers):
        for q in range(n_qubits - 1):
            if entangler == "CNOT":
                gates.append(Gate("CNOT", (q, q + 1)))
            else:
                gates.append(Gate("CU3", (q, q + 1), fresh(3)))
        for q in range(n_qubits):
            gates.append(Gate("U3", (q,), fresh(3)))
    return Circuit(n_qubits, tuple(gates), counter)


# ---------------------------------------------------------------------------
# Resource counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResourceCount:
    n_qubits: int
    n_params: int
    n_cnot: int
    n_gates: int
    depth: int

    def __post_init__(self):
        if self.n_cnot > self.n_gates:
            raise ValueError("CNOT count cannot exceed gate count")


def count_resources(c: Circuit) -> ResourceCount:
    """Exact gate counts; depth by greedy per-qubit layering."""
    frontier = [0] * c.n_qubits
    n_cnot = 0
    for gate in c.gates:
        if gate.kind == "CNOT":
            n_cnot += 1
        layer = 1 + max((frontier[q] for q in gate.qubits), default=0)
        for q in gate.qubits:
            frontier[q] = layer
    return ResourceCount(
        n_qubits=c.n_qubits,
        n_params=c.n_params,
        n_cnot=n_cnot,
        n_gates=len(c.gates),
        depth=max(frontier, default=0),
    )


# ---------------------------------------------------------------------------
# OpenQASM 2.0 export and JSON interchange
# ---------------------------------------------------------------------------

_QASM_HY = "u3({t},{t},{t})".format(t=repr(math.pi / 2))


def to_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 program for a bound circuit.

    HY is emitted as its exact u3 decomposition u3(pi/2, pi/2, pi/2); SWAP as
    the native ``swap`` from qelib1.
    """
    if not c.is_bound():
        raise RuntimeError("circuit must be bound before QASM export")
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{c.n_qubits}];",
    ]
    for gate in c.gates:
        values = gate.bound_values()
        args = ",".join(repr(v) for v in values)
        qubits = ",".join(f"q[{q}]" for q in gate.qubits)
        if gate.kind == "H":
            lines.append(f"h {qubits};")
        elif gate.kind == "HY":
            lines.append(f"{_QASM_HY} {qubits};")
        elif gate.kind == "X":
            lines.append(f"x {qubits};")
        elif gate.kind == "CNOT":
            lines.append(f"cx {qubits};")
        elif gate.kind == "SWAP":
            lines.append(f"swap {qubits};")
        elif gate.kind == "RZ":
            lines.append(f"rz({args}) {qubits};")
        elif gate.kind == "RY":
            lines.append(f"ry({args}) {qubits};")
        elif gate.kind == "U3":
            lines.append(f"u3({args}) {qubits};")
        elif gate.kind == "CU3":
            lines.append(f"cu3({args}) {qubits};")
    return "\n".join(lines) + "\n"


def _expr_to_json(expr: ParamExpr) -> dict:
    if isinstance(expr, Constant):
        return {"type": "const", "value": expr.value}
    return {"type": "affine", "index": expr.index, "scale": expr.scale, "offset": expr.offset}


def _expr_from_json(obj: dict) -> ParamExpr:
    if obj["type"] == "const":
        return Constant(float(obj["value"]))
    if obj["type"] == "affine":
        return Affine(int(obj["index"]), float(obj["scale"]), float(obj.get("offset", 0.0)))
    raise ValueError(f"unknown parameter expression type {obj['type']!r}")


def circuit_to_json(c: Circuit) -> str:
    payload = {
        "n_qubits": c.n_qubits,
        "n_params": c.n_params,
        "gates": [
            {
                "kind": g.kind,
                "qubits": list(g.qubits),
                "params": [_expr_to_json(p) for p in g.params],
            }
            for g in c.gates
        ],
    }
    return json.dumps(payload, indent=None, separators=(",", ":"))


def circuit_from_json(text: str) -> Circuit:
    payload = json.loads(text)
    gates = tuple(
        Gate(
            g["kind"],
            tuple(g["qubits"]),
            tuple(_expr_from_json(p) for p in g["params"]),
        )
        for g in payload["gates"]
    )
    return Circuit(int(payload["n_qubits"]), gates, int(payload["n_params"]))
