"""Second-quantized electronic Hamiltonians and the Jordan-Wigner mapping.

Spin-orbital convention: spatial orbital ``p`` maps to spin orbitals ``2p``
(alpha) and ``2p + 1`` (beta). Two-electron integrals are stored in physicist
ordering ``<pq|rs>``; FCIDUMP input in chemist ordering ``(ij|kl)`` is
converted once at parse time.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import ConsistencyError, FormatError
from .pauli import PauliString, PauliSum, PauliTerm, multiply

# Physicist-ordering transposes under which real two-electron integrals are
# invariant (8-fold symmetry including the identity).
_G_SYMMETRY_TRANSPOSES = (
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
    (2, 1, 0, 3),
    (0, 3, 2, 1),
    (3, 0, 1, 2),
    (1, 2, 3, 0),
)


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """One-/two-electron integrals (hartree) plus system counts.

    ``h`` is [n_spatial, n_spatial]; ``g`` is [n_spatial]^4 in physicist
    ordering <pq|rs>.
    """

    n_spatial: int
    n_electrons: int
    ms2: int
    e_nuclear: float
    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        if self.h.shape != (n, n) or self.g.shape != (n, n, n, n):
            raise ValueError("integral tensor shape does not match n_spatial")
        if not (0 < self.n_electrons <= 2 * n):
            raise ValueError(f"electron count {self.n_electrons} out of range for {n} orbitals")
        if not np.allclose(self.h, self.h.T, atol=1e-10):
            raise ConsistencyError("one-electron integrals are not symmetric")
        for perm in _G_SYMMETRY_TRANSPOSES:
            if not np.allclose(self.g, self.g.transpose(perm), atol=1e-10):
                raise ConsistencyError("two-electron integrals violate permutational symmetry")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial


@dataclass(frozen=True)
class OrbitalRotation:
    """Real orthogonal rotation of the spatial-orbital basis."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "u", u)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("rotation must be a square matrix")
        if not np.allclose(u.T @ u, np.eye(u.shape[0]), atol=1e-10):
            raise ValueError("rotation matrix is not orthogonal")


@dataclass(frozen=True)
class LadderOp:
    """Creation (a^dag) or annihilation (a) operator on one spin orbital."""

    mode: int
    creation: bool

    def __post_init__(self):
        if self.mode < 0:
            raise ValueError("negative mode index")

    def dagger(self) -> "LadderOp":
        return LadderOp(self.mode, not self.creation)

    def __str__(self) -> str:
        return f"{self.mode}^" if self.creation else f"{self.mode}"


@dataclass(frozen=True)
class FermionTerm:
    coefficient: complex
    ops: tuple[LadderOp, ...]

    def __post_init__(self):
        if not cmath.isfinite(complex(self.coefficient)):
            raise ValueError("non-finite fermion term coefficient")
        object.__setattr__(self, "ops", tuple(self.ops))

    def dagger(self) -> "FermionTerm":
        return FermionTerm(
            complex(self.coefficient).conjugate(),
            tuple(op.dagger() for op in reversed(self.ops)),
        )

    def max_mode(self) -> int:
        return max((op.mode for op in self.ops), default=-1)


@dataclass(frozen=True)
class FermionSum:
    """Sum of ladder-operator products plus a scalar constant (hartree)."""

    terms: tuple[FermionTerm, ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def from_terms(
        cls, terms: Iterable[tuple[complex, Iterable[tuple[int, bool]]]], constant: float = 0.0
    ) -> "FermionSum":
        return cls(
            tuple(
                FermionTerm(coef, tuple(LadderOp(m, cr) for m, cr in ops))
                for coef, ops in terms
            ),
            constant,
        )

    def dagger(self) -> "FermionSum":
        return FermionSum(tuple(t.dagger() for t in self.terms), self.constant)

    def __sub__(self, other: "FermionSum") -> "FermionSum":
        negated = tuple(FermionTerm(-t.coefficient, t.ops) for t in other.terms)
        return FermionSum(self.terms + negated, self.constant - other.constant)

    def max_mode(self) -> int:
        return max((t.max_mode() for t in self.terms), default=-1)


def spin_orbital(spatial: int, spin: int) -> int:
    """Interleaved mapping: spin 0 (alpha) -> 2p, spin 1 (beta) -> 2p + 1."""
    return 2 * spatial + spin


# ---------------------------------------------------------------------------
# FCIDUMP reader
# ---------------------------------------------------------------------------

_NAMELIST_KV = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*([^=]*?)(?=(?:[,\s][A-Za-z][A-Za-z0-9_]*\s*=)|$)")


def _parse_header(lines: list[str]) -> dict[str, str]:
    text = " ".join(lines)
    text = re.sub(r"^\s*&[A-Za-z]+", "", text)
    text = re.sub(r"(&END|/)\s*$", "", text, flags=re.IGNORECASE)
    out = {}
    for match in _NAMELIST_KV.finditer(text):
        out[match.group(1).upper()] = match.group(2).strip().rstrip(",")
    return out


def load_fcidump(source: TextIO) -> MolecularIntegrals:
    """Parse an FCIDUMP stream into physicist-ordered integrals.

    Accepts Fortran-style ``&FCI ... &END`` or ``/`` namelist terminators and
    case-insensitive keys. ORBSYM/ISYM are parsed but ignored. Duplicate
    entries that disagree beyond 1e-8 raise ``ConsistencyError``.
    """
    lines = source.read().splitlines()
    header_lines: list[str] = []
    body_start = 0
    for i, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip()
        if stripped.endswith("/") or stripped.upper().endswith("&END"):
            body_start = i + 1
            break
    else:
        raise FormatError("FCIDUMP header namelist has no terminator ('/' or '&END')")

    header = _parse_header(header_lines)
    try:
        norb = int(header["NORB"])
        nelec = int(header["NELEC"])
    except KeyError as exc:
        raise FormatError(f"FCIDUMP header missing key {exc.args[0]}") from None
    ms2 = int(header.get("MS2", "0"))

    h = np.zeros((norb, norb))
    g_chem = np.zeros((norb, norb, norb, norb))
    h_set = np.zeros((norb, norb), dtype=bool)
    g_set = np.zeros((norb, norb, norb, norb), dtype=bool)
    e_nuclear = 0.0

    def check_index(idx: int, lineno: int) -> None:
        if idx > norb:
            raise ValueError(f"FCIDUMP line {lineno}: orbital index {idx} exceeds NORB={norb}")

    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FormatError(f"FCIDUMP line {lineno}: expected 'value i j k l'")
        try:
            value = float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FormatError(f"FCIDUMP line {lineno}: unparsable entry") from None
        for idx in (i, j, k, l):
            check_index(idx, lineno)
        if i == j == k == l == 0:
            e_nuclear = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FormatError(f"FCIDUMP line {lineno}: bad one-electron index pattern")
            for a, b in ((i - 1, j - 1), (j - 1, i - 1)):
                if h_set[a, b] and abs(h[a, b] - value) > 1e-8:
                    raise ConsistencyError(
                        f"FCIDUMP line {lineno}: h[{a},{b}] duplicate disagrees"
                    )
                h[a, b] = value
                h_set[a, b] = True
        elif 0 in (i, j, k, l):
            raise FormatError(f"FCIDUMP line {lineno}: bad index pattern {i} {j} {k} {l}")
        else:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            # Chemist-notation 8-fold symmetry of (ij|kl).
            for p, q, r, s in (
                (a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a),
            ):
                if g_set[p, q, r, s] and abs(g_chem[p, q, r, s] - value) > 1e-8:
                    raise ConsistencyError(
                        f"FCIDUMP line {lineno}: g[{p},{q},{r},{s}] duplicate disagrees"
                    )
                g_chem[p, q, r, s] = value
                g_set[p, q, r, s] = True

    # (ij|kl) -> <ik|jl>
    g_phys = g_chem.transpose(0, 2, 1, 3).copy()
    return MolecularIntegrals(
        n_spatial=norb,
        n_electrons=nelec,
        ms2=ms2,
        e_nuclear=e_nuclear,
        h=h,
        g=g_phys,
    )


def rotate_orbitals(m: MolecularIntegrals, r: OrbitalRotation) -> MolecularIntegrals:
    """Transform the integrals into the rotated orbital basis.

    The four-index transform runs as four staged single-index contractions,
    O(n^5) instead of the naive O(n^8).
    """
    u = r.u
    if u.shape[0] != m.n_spatial:
        raise ValueError("rotation dimension does not match n_spatial")
    h_new = u.T @ m.h @ u
    g = m.g
    # Contract one index at a time; tensordot appends the transformed axis,
    # so after four rounds the original axis order is restored.
    for _ in range(4):
        g = np.tensordot(g, u, axes=([0], [0]))
    return MolecularIntegrals(
        n_spatial=m.n_spatial,
        n_electrons=m.n_electrons,
        ms2=m.ms2,
        e_nuclear=m.e_nuclear,
        h=h_new,
        g=g,
    )


def build_hamiltonian(m: MolecularIntegrals) -> FermionSum:
    """Spin-orbital Hamiltonian: h_pq a+_ps a_qs + (1/2)<pq|rs> a+_ps a+_qt a_st a_rs."""
    terms: list[FermionTerm] = []
    n = m.n_spatial
    for p in range(n):
        for q in range(n):
            coef = m.h[p, q]
            if coef == 0.0:
                continue
            for sigma in (0, 1):
                terms.append(
                    FermionTerm(
                        coef,
                        (
                            LadderOp(spin_orbital(p, sigma), True),
                            LadderOp(spin_orbital(q, sigma), False),
                        ),
                    )
                )
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    coef = 0.5 * m.g[p, q, r, s]
                    if coef == 0.0:
                        continue
                    for sigma in (0, 1):
                        for tau in (0, 1):
                            ops = (
                                LadderOp(spin_orbital(p, sigma), True),
                                LadderOp(spin_orbital(q, tau), True),
                                LadderOp(spin_orbital(s, tau), False),
                                LadderOp(spin_orbital(r, sigma), False),
                            )
                            modes_cr = (ops[0].mode, ops[1].mode)
                            modes_an = (ops[2].mode, ops[3].mode)
                            if modes_cr[0] == modes_cr[1] or modes_an[0] == modes_an[1]:
                                continue
                            terms.append(FermionTerm(coef, ops))
    return FermionSum(tuple(terms), constant=m.e_nuclear)


# ---------------------------------------------------------------------------
# Jordan-Wigner transformation
# ---------------------------------------------------------------------------


def _ladder_image(op: LadderOp) -> PauliSum:
    """a+_p -> (X_p - iY_p)/2 * Z_0..Z_{p-1}; a_p flips the sign of the Y part."""
    chain = tuple((k, "Z") for k in range(op.mode))
    x_string = PauliString(chain + ((op.mode, "X"),))
    y_string = PauliString(chain + ((op.mode, "Y"),))
    y_coef = -0.5j if op.creation else 0.5j
    return PauliSum((PauliTerm(0.5, x_string), PauliTerm(y_coef, y_string)))


def jordan_wigner(f: FermionSum | FermionTerm, drop_threshold: float = 1e-12) -> PauliSum:
    """Map a fermion operator to its qubit form; output is simplified."""
    if isinstance(f, FermionTerm):
        f = FermionSum((f,))
    out: list[PauliTerm] = []
    if f.constant != 0.0:
        out.append(PauliTerm(f.constant, PauliString()))
    for term in f.terms:
        partial = [(complex(term.coefficient), PauliString())]
        for op in term.ops:
            image = _ladder_image(op)
            nxt = []
            for coef, string in partial:
                for factor in image.terms:
                    phase, product = multiply(string, factor.string)
                    nxt.append((coef * factor.coefficient * phase, product))
            partial = nxt
        out.extend(PauliTerm(coef, string) for coef, string in partial)
    return PauliSum(tuple(out)).simplify(drop_threshold)


def hf_reference(n_electrons: int, n_qubits: int) -> str:
    """Aufbau occupation bitstring; character k is the occupation of qubit k."""
    if n_electrons > n_qubits:
        raise ValueError(f"{n_electrons} electrons do not fit in {n_qubits} spin orbitals")
    if n_electrons < 0:
        raise ValueError("negative electron count")
    return "1" * n_electrons + "0" * (n_qubits - n_electrons)
