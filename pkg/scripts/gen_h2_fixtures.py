#!/usr/bin/env python3
"""Generate the frozen H2/STO-3G FCIDUMP fixtures under tests/fixtures/.

Standalone developer tool; the package itself never computes integrals. H2 in
a minimal s-Gaussian basis has closed-form integrals (overlap, kinetic,
nuclear attraction, and (ss|ss) repulsion via the Boys F0 function). The two
symmetry-adapted RHF orbitals are fixed by symmetry, so no SCF loop is
needed. Reference HF/FCI energies are computed in the 2-electron determinant
basis and written to reference.json next to the dumps.

Sanity anchors (R = 1.4 bohr, zeta = 1.24): S12 ~ 0.6593, T11 ~ 0.7600,
(11|11) ~ 0.7746, E_HF ~ -1.1167 hartree. The script aborts if it disagrees.
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903

# STO-3G hydrogen 1s: exponents already carry the zeta = 1.24 scaling.
EXPONENTS = np.array([3.42525091, 0.62391373, 0.16885540])
COEFFS = np.array([0.15432897, 0.53532814, 0.44463454])

BOND_LENGTHS_ANGSTROM = [0.50, 0.735, 1.00, 1.50, 2.00]


def boys_f0(t: float) -> float:
    if t < 1e-12:
        return 1.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


def primitive_norm(alpha: float) -> float:
    return (2.0 * alpha / math.pi) ** 0.75


def ao_integrals(r_bohr: float):
    """AO-basis S, T, V (both nuclei), and chemist-ordered ERIs for H2."""
    centers = [0.0, r_bohr]
    nprim = len(EXPONENTS)
    prims = [
        (EXPONENTS[i], COEFFS[i] * primitive_norm(EXPONENTS[i]), c)
        for c in centers
        for i in range(nprim)
    ]
    # Basis function b owns primitives [b*nprim, (b+1)*nprim).
    def bf(b):
        return prims[b * nprim : (b + 1) * nprim]

    S = np.zeros((2, 2))
    T = np.zeros((2, 2))
    V = np.zeros((2, 2))
    for a in range(2):
        for b in range(2):
            for alpha, da, ca in bf(a):
                for beta, db, cb in bf(b):
                    p = alpha + beta
                    mu = alpha * beta / p
                    ab2 = (ca - cb) ** 2
                    k = math.exp(-mu * ab2)
                    s = (math.pi / p) ** 1.5 * k
                    S[a, b] += da * db * s
                    T[a, b] += da * db * mu * (3.0 - 2.0 * mu * ab2) * s
                    pc = (alpha * ca + beta * cb) / p
                    for nucleus in centers:
                        V[a, b] += (
                            da
                            * db
                            * (-2.0 * math.pi / p)
                            * k
                            * boys_f0(p * (pc - nucleus) ** 2)
                        )
    eri = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    total = 0.0
                    for alpha, da, ca_ in bf(a):
                        for beta, db, cb_ in bf(b):
                            p = alpha + beta
                            kp = math.exp(-alpha * beta / p * (ca_ - cb_) ** 2)
                            pp = (alpha * ca_ + beta * cb_) / p
                            for gamma, dc, cc_ in bf(c):
                                for delta, dd, cd_ in bf(d):
                                    q = gamma + delta
                                    kq = math.exp(
                                        -gamma * delta / q * (cc_ - cd_) ** 2
                                    )
                                    qq = (gamma * cc_ + delta * cd_) / q
                                    t = p * q / (p + q) * (pp - qq) ** 2
                                    total += (
                                        da
                                        * db
                                        * dc
                                        * dd
                                        * 2.0
                                        * math.pi**2.5
                                        / (p * q * math.sqrt(p + q))
                                        * kp
                                        * kq
                                        * boys_f0(t)
                                    )
                    eri[a, b, c, d] = total
    return S, T + V, eri


def mo_integrals(r_bohr: float):
    """Symmetry-determined RHF MOs for H2 and the MO-basis integrals."""
    S, hcore, eri = ao_integrals(r_bohr)
    s12 = S[0, 1]
    # Gerade/ungerade combinations are the canonical RHF orbitals here.
    c_g = np.array([1.0, 1.0]) / math.sqrt(2.0 * (1.0 + s12))
    c_u = np.array([1.0, -1.0]) / math.sqrt(2.0 * (1.0 - s12))
    C = np.column_stack([c_g, c_u])
    h_mo = C.T @ hcore @ C
    eri_mo = np.einsum("abcd,ap,bq,cr,ds->pqrs", eri, C, C, C, C)
    e_nuc = 1.0 / r_bohr
    return h_mo, eri_mo, e_nuc


def reference_energies(h_mo, eri_mo, e_nuc):
    """HF and FCI energies from the explicit 2-electron determinant basis.

    Spin orbitals 0..3 = (0a, 0b, 1a, 1b); determinant |pq> = a+_p a+_q |vac>
    with p < q. Slater-Condon rules for 2-electron systems reduce to direct
    integral lookups.
    """
    e_hf = 2.0 * h_mo[0, 0] + eri_mo[0, 0, 0, 0] + e_nuc

    def spatial(p):
        return p // 2

    def spin(p):
        return p % 2

    dets = [(p, q) for p in range(4) for q in range(p + 1, 4)]

    def one_body(p, q):
        return h_mo[spatial(p), spatial(q)] if spin(p) == spin(q) else 0.0

    def two_body(p, q, r, s):
        # <pq||rs> = <pq|rs> - <pq|sr> over spin orbitals, chemist input.
        def phys(a, b, c, d):
            if spin(a) == spin(c) and spin(b) == spin(d):
                return eri_mo[spatial(a), spatial(c), spatial(b), spatial(d)]
            return 0.0

        return phys(p, q, r, s) - phys(p, q, s, r)

    dim = len(dets)
    H = np.zeros((dim, dim))
    for i, (p, q) in enumerate(dets):
        for j, (r, s) in enumerate(dets):
            if (p, q) == (r, s):
                H[i, j] = one_body(p, p) + one_body(q, q) + two_body(p, q, p, q)
            elif p == r:
                H[i, j] = one_body(q, s) + two_body(p, q, p, s)
            elif q == s:
                H[i, j] = one_body(p, r) + two_body(p, q, r, q)
            elif q == r:
                H[i, j] = -(one_body(p, s) + two_body(p, q, s, q))
            elif p == s:
                H[i, j] = -(one_body(q, r) + two_body(p, q, q, r))
            else:
                H[i, j] = two_body(p, q, r, s)
    e_fci = float(np.linalg.eigvalsh(H)[0]) + e_nuc
    return float(e_hf), e_fci


def write_fcidump(path: Path, h_mo, eri_mo, e_nuc):
    lines = ["&FCI NORB=2,NELEC=2,MS2=0,", " ORBSYM=1,1,", " ISYM=1,", "&END"]
    for i in range(2):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j + 1 if k == i else k + 1
                for l in range(lmax):
                    value = eri_mo[i, j, k, l]
                    if abs(value) > 1e-14:
                        lines.append(f"{value:.16e} {i+1} {j+1} {k+1} {l+1}")
    for i in range(2):
        for j in range(i + 1):
            value = h_mo[i, j]
            if abs(value) > 1e-14:
                lines.append(f"{value:.16e} {i+1} {j+1} 0 0")
    lines.append(f"{e_nuc:.16e} 0 0 0 0")
    path.write_text("\n".join(lines) + "\n")


def sanity_check():
    r = 1.4
    S, hcore, eri = ao_integrals(r)
    h_mo, eri_mo, e_nuc = mo_integrals(r)
    e_hf, e_fci = reference_energies(h_mo, eri_mo, e_nuc)
    checks = [
        ("S12", S[0, 1], 0.6593, 2e-4),
        ("T+V 11", hcore[0, 0], -1.1204, 2e-3),
        ("(11|11)", eri[0, 0, 0, 0], 0.7746, 2e-4),
        ("E_HF", e_hf, -1.1167, 2e-4),
    ]
    for name, got, want, tol in checks:
        if abs(got - want) > tol:
            sys.exit(f"sanity check failed: {name} = {got:.6f}, expected ~{want}")
    print(f"sanity OK at R=1.4 bohr: E_HF={e_hf:.6f}, E_FCI={e_fci:.6f}")


def main():
    sanity_check()
    out_dir = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {}
    for d_angstrom in BOND_LENGTHS_ANGSTROM:
        r_bohr = d_angstrom * BOHR_PER_ANGSTROM
        h_mo, eri_mo, e_nuc = mo_integrals(r_bohr)
        e_hf, e_fci = reference_energies(h_mo, eri_mo, e_nuc)
        name = f"h2_sto3g_d{int(round(d_angstrom * 1000)):04d}.fcidump"
        write_fcidump(out_dir / name, h_mo, eri_mo, e_nuc)
        meta[name] = {
            "molecule": "H2",
            "basis": "STO-3G",
            "bond_length_angstrom": d_angstrom,
            "e_nuclear": e_nuc,
            "hf_energy": e_hf,
            "fci_energy": e_fci,
        }
        print(f"{name}: HF={e_hf:.8f}  FCI={e_fci:.8f}")
    (out_dir / "reference.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
