"""Pauli-string algebra: weighted sums of Pauli operators and their products.

Conventions used throughout the package:

* qubit 0 is the least-significant tensor factor of every dense basis index;
* a Pauli string stores only its non-identity single-qubit factors, as a
  sparse map ``qubit index -> axis`` with axis one of ``X``, ``Y``, ``Z``;
* canonical term order is lexicographic by (sorted index list, axis labels),
  which makes serialization and test output deterministic.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np

from .errors import FormatError, ResourceLimitError

AXES = ("X", "Y", "Z")

# Hard cap for dense materialization; past this the memory cost is no longer
# a test-oracle convenience.
DENSE_QUBIT_CAP = 14

# Coefficients below this are double-precision accumulation noise for
# hartree-scale Hamiltonians.
DEFAULT_DROP_THRESHOLD = 1e-12

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit products: (a, b) -> (phase, result axis or None for identity).
_MULT_TABLE = {
    ("X", "X"): (1, None),
    ("Y", "Y"): (1, None),
    ("Z", "Z"): (1, None),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def pauli_matrix(axis: str) -> np.ndarray:
    """2x2 matrix of a single-qubit Pauli operator (``I``, ``X``, ``Y`` or ``Z``)."""
    return _PAULI_MATRICES[axis]


@dataclass(frozen=True)
class PauliString:
    """Tensor product of X/Y/Z factors on a sparse set of qubits.

    ``factors`` is stored sorted by qubit index; the identity is the empty
    string. Instances are immutable and hashable.
    """

    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        seen = set()
        for idx, axis in self.factors:
            if idx < 0:
                raise ValueError(f"negative qubit index {idx}")
            if axis not in AXES:
                raise ValueError(f"invalid Pauli axis {axis!r}")
            if idx in seen:
                raise ValueError(f"duplicate qubit index {idx}")
            seen.add(idx)
        ordered = tuple(sorted(self.factors))
        if ordered != self.factors:
            object.__setattr__(self, "factors", ordered)

    @classmethod
    def from_map(cls, support: Mapping[int, str]) -> "PauliString":
        return cls(tuple(sorted(support.items())))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. ``"X0 Z3"``; the empty label is the identity."""
        support: dict[int, str] = {}
        for token in label.split():
            axis, idx_text = token[0].upper(), token[1:]
            if axis not in AXES or not idx_text.isdigit():
                raise FormatError(f"bad Pauli factor {token!r}")
            idx = int(idx_text)
            if idx in support:
                raise FormatError(f"duplicate qubit index in {label!r}")
            support[idx] = axis
        return cls.from_map(support)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(idx for idx, _ in self.factors)

    @property
    def weight(self) -> int:
        return len(self.factors)

    def is_identity(self) -> bool:
        return not self.factors

    def axis_on(self, qubit: int) -> str:
        for idx, axis in self.factors:
            if idx == qubit:
                return axis
        return "I"

    def max_index(self) -> int:
        return self.factors[-1][0] if self.factors else -1

    def sort_key(self):
        return self.factors

    def __str__(self) -> str:
        return " ".join(f"{axis}{idx}" for idx, axis in self.factors) or "I"

    def __iter__(self) -> Iterator[tuple[int, str]]:
        return iter(self.factors)


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Operator product ``a @ b`` as (phase, string) with phase in {1,-1,1j,-1j}."""
    phase: complex = 1
    out: dict[int, str] = dict(a.factors)
    for idx, axis_b in b.factors:
        axis_a = out.pop(idx, None)
        if axis_a is None:
            out[idx] = axis_b
            continue
        local_phase, product_axis = _MULT_TABLE[(axis_a, axis_b)]
        phase *= local_phase
        if product_axis is not None:
            out[idx] = product_axis
    return phase, PauliString.from_map(out)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the strings commute (even number of anticommuting sites)."""
    b_map = dict(b.factors)
    clashes = 0
    for idx, axis_a in a.factors:
        axis_b = b_map.get(idx)
        if axis_b is not None and axis_b != axis_a:
            clashes += 1
    return clashes % 2 == 0


@dataclass(frozen=True)
class PauliTerm:
    """A Pauli string scaled by a complex coefficient (hartree for Hamiltonians)."""

    coefficient: complex
    string: PauliString

    def __post_init__(self):
        if not cmath.isfinite(complex(self.coefficient)):
            raise ValueError("non-finite Pauli term coefficient")


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli strings; the qubit-space form of every observable."""

    terms: tuple[PauliTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, PauliString]]) -> "PauliSum":
        return cls(tuple(PauliTerm(coef, s) for coef, s in terms))

    @classmethod
    def identity(cls, coefficient: complex = 1.0) -> "PauliSum":
        return cls((PauliTerm(coefficient, PauliString()),))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return PauliSum(self.terms + other.terms)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(tuple(PauliTerm(t.coefficient * scalar, t.string) for t in self.terms))

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, term by term; not simplified."""
        out = []
        for ta in self.terms:
            for tb in other.terms:
                phase, string = multiply(ta.string, tb.string)
                out.append(PauliTerm(ta.coefficient * tb.coefficient * phase, string))
        return PauliSum(tuple(out))

    def max_index(self) -> int:
        return max((t.string.max_index() for t in self.terms), default=-1)

    def n_qubits(self) -> int:
        return self.max_index() + 1

    def simplify(self, drop_threshold: float = DEFAULT_DROP_THRESHOLD) -> "PauliSum":
        """Combine like strings, drop tiny coefficients, order canonically."""
        if drop_threshold < 0:
            raise ValueError("drop_threshold must be >= 0")
        acc: dict[PauliString, complex] = {}
        for term in self.terms:
            acc[term.string] = acc.get(term.string, 0) + complex(term.coefficient)
        kept = [
            PauliTerm(coef, s)
            for s, coef in acc.items()
            if abs(coef) >= drop_threshold and coef != 0
        ]
        kept.sort(key=lambda t: t.string.sort_key())
        return PauliSum(tuple(kept))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Pauli strings are Hermitian, so Hermiticity means real coefficients.

        Assumes the sum is simplified; unresolved cancellations between like
        terms are not detected.
        """
        return all(abs(complex(t.coefficient).imag) <= tol for t in self.terms)

    def to_dense_matrix(self, n_qubits: int) -> np.ndarray:
        """Dense 2^n x 2^n matrix with qubit 0 as the least-significant factor."""
        if n_qubits > DENSE_QUBIT_CAP:
            raise ResourceLimitError(
                f"dense matrix request for {n_qubits} qubits exceeds cap {DENSE_QUBIT_CAP}"
            )
        if self.max_index() >= n_qubits:
            raise ValueError(
                f"string index {self.max_index()} out of range for {n_qubits} qubits"
            )
        dim = 1 << n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            block = np.eye(1, dtype=complex)
            # kron(A, B) puts A on the most-significant index, so walk qubits
            # from the top down to keep qubit 0 least significant.
            for q in range(n_qubits - 1, -1, -1):
                block = np.kron(block, _PAULI_MATRICES[term.string.axis_on(q)])
            out += complex(term.coefficient) * block
        return out


# ---------------------------------------------------------------------------
# Pauli-sum text format: one term per line,
#   <real> [<imag>] <AXIS><index> <AXIS><index> ...
# An empty operator list denotes the identity; '#' starts a comment.
# ---------------------------------------------------------------------------


def _parse_term_line(line: str, lineno: int) -> PauliTerm:
    tokens = line.split()
    try:
        real = float(tokens[0])
    except ValueError:
        raise FormatError(f"line {lineno}: expected a real coefficient, got {tokens[0]!r}")
    imag = 0.0
    rest = tokens[1:]
    if rest:
        try:
            imag = float(rest[0])
        except ValueError:
            pass
        else:
            rest = rest[1:]
    support: dict[int, str] = {}
    for token in rest:
        axis, idx_text = token[:1].upper(), token[1:]
        if axis not in AXES or not idx_text.isdigit():
            raise FormatError(f"line {lineno}: bad Pauli factor {token!r}")
        idx = int(idx_text)
        if idx in support:
            raise FormatError(f"line {lineno}: duplicate qubit index {idx}")
        support[idx] = axis
    return PauliTerm(complex(real, imag), PauliString.from_map(support))


def read_pauli_sum(stream: TextIO) -> PauliSum:
    """Parse the Pauli-sum text format; rejects duplicate indices per line."""
    terms = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        terms.append(_parse_term_line(line, lineno))
    return PauliSum(tuple(terms))


def write_pauli_sum(s: PauliSum, stream: TextIO) -> None:
    """Write the text format; the imaginary field is emitted only when nonzero."""
    for term in s.terms:
        coef = complex(term.coefficient)
        ops = str(term.string) if not term.string.is_identity() else ""
        if coef.imag == 0.0:
            head = repr(coef.real)
        else:
            head = f"{coef.real!r} {coef.imag!r}"
        stream.write(f"{head} {ops}".rstrip() + "\n")
