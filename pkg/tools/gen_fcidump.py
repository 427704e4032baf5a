#!/usr/bin/env python3
"""Generate the bundled FCIDUMP corpus from scratch.

Self-contained restricted Hartree-Fock over STO-3G, with s/p Gaussian
integrals evaluated by the McMurchie-Davidson Hermite expansion (Boys
function via scipy's confluent hypergeometric).  Molecular-orbital
integrals are dumped in FCIDUMP form with 8-fold symmetry.

Usage:  python3 tools/gen_fcidump.py [outdir]   (default src/qsci/data)

This is corpus tooling, not part of the installed package; the package
itself never generates integrals.
"""

from __future__ import annotations

import math
import os
import sys

import numpy as np
from scipy.special import hyp1f1

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from qsci.integrals import IntegralStore, dump_fcidump  # noqa: E402

ANGSTROM = 1.8897259886  # bohr per angstrom

STO3G = {
    "H": [
        ("s", [3.425250914, 0.6239137298, 0.1688554040],
         [0.1543289673, 0.5353281423, 0.4446345422]),
    ],
    "Li": [
        ("s", [16.11957475, 2.936200663, 0.794650487],
         [0.1543289673, 0.5353281423, 0.4446345422]),
        ("s", [0.6362897469, 0.1478600533, 0.0480886784],
         [-0.09996722919, 0.3995128261, 0.7001154689]),
        ("p", [0.6362897469, 0.1478600533, 0.0480886784],
         [0.1559162750, 0.6076837186, 0.3919573931]),
    ],
    "Be": [
        ("s", [30.16787069, 5.495115306, 1.487192653],
         [0.1543289673, 0.5353281423, 0.4446345422]),
        ("s", [1.314833110, 0.3055389383, 0.0993707456],
         [-0.09996722919, 0.3995128261, 0.7001154689]),
        ("p", [1.314833110, 0.3055389383, 0.0993707456],
         [0.1559162750, 0.6076837186, 0.3919573931]),
    ],
}

CHARGES = {"H": 1, "Li": 3, "Be": 4}


def double_factorial(n: int) -> int:
    return 1 if n <= 0 else n * double_factorial(n - 2)


class Primitive:
    def __init__(self, exponent, lmn, center):
        self.exponent = exponent
        self.lmn = lmn
        self.center = np.asarray(center, dtype=float)
        l, m, n = lmn
        self.norm = (
            (2 * exponent / math.pi) ** 0.75
            * (4 * exponent) ** ((l + m + n) / 2.0)
            / math.sqrt(
                double_factorial(2 * l - 1)
                * double_factorial(2 * m - 1)
                * double_factorial(2 * n - 1)
            )
        )


class Contracted:
    def __init__(self, exponents, coefficients, lmn, center):
        self.primitives = [Primitive(a, lmn, center) for a in exponents]
        self.coefficients = list(coefficients)
        self.lmn = lmn
        self.center = np.asarray(center, dtype=float)
        # Scale so the contracted self-overlap is exactly one.
        self_overlap = 0.0
        for ca, pa in zip(self.coefficients, self.primitives):
            for cb, pb in zip(self.coefficients, self.primitives):
                self_overlap += ca * cb * pa.norm * pb.norm * _overlap_prim(pa, pb)
        self.scale = 1.0 / math.sqrt(self_overlap)


def hermite_e(i, j, t, qx, a, b):
    """McMurchie-Davidson expansion coefficient E_t^{ij}."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * qx * qx)
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - q * qx / a * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + q * qx / b * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def _overlap_lmn(a, lmn1, ca, b, lmn2, cb):
    s = 1.0
    for d in range(3):
        s *= hermite_e(lmn1[d], lmn2[d], 0, ca[d] - cb[d], a, b)
    return s * (math.pi / (a + b)) ** 1.5


def _overlap_prim(pa: Primitive, pb: Primitive) -> float:
    return _overlap_lmn(pa.exponent, pa.lmn, pa.center, pb.exponent, pb.lmn, pb.center)


def _kinetic_prim(pa: Primitive, pb: Primitive) -> float:
    a, b = pa.exponent, pb.exponent
    l2, m2, n2 = pb.lmn

    def ov(dl, dm, dn):
        lmn = (l2 + dl, m2 + dm, n2 + dn)
        if min(lmn) < 0:
            return 0.0
        return _overlap_lmn(a, pa.lmn, pa.center, b, lmn, pb.center)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * ov(0, 0, 0)
    term1 = -2 * b * b * (ov(2, 0, 0) + ov(0, 2, 0) + ov(0, 0, 2))
    term2 = -0.5 * (
        l2 * (l2 - 1) * ov(-2, 0, 0)
        + m2 * (m2 - 1) * ov(0, -2, 0)
        + n2 * (n2 - 1) * ov(0, 0, -2)
    )
    return term0 + term1 + term2


def boys(n, x):
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_coulomb(t, u, v, n, p, pc):
    x, y, z = pc
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * (x * x + y * y + z * z))
    if t > 0:
        val = x * hermite_coulomb(t - 1, u, v, n + 1, p, pc)
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc)
        return val
    if u > 0:
        val = y * hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        return val
    val = z * hermite_coulomb(t, u, v - 1, n + 1, p, pc)
    if v > 1:
        val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc)
    return val


def _nuclear_prim(pa: Primitive, pb: Primitive, nucleus) -> float:
    a, b = pa.exponent, pb.exponent
    p = a + b
    center = (a * pa.center + b * pb.center) / p
    pc = center - np.asarray(nucleus)
    (l1, m1, n1), (l2, m2, n2) = pa.lmn, pb.lmn
    total = 0.0
    for t in range(l1 + l2 + 1):
        et = hermite_e(l1, l2, t, pa.center[0] - pb.center[0], a, b)
        for u in range(m1 + m2 + 1):
            eu = hermite_e(m1, m2, u, pa.center[1] - pb.center[1], a, b)
            for v in range(n1 + n2 + 1):
                ev = hermite_e(n1, n2, v, pa.center[2] - pb.center[2], a, b)
                total += et * eu * ev * hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * math.pi / p * total


def _eri_prim(pa, pb, pc, pd) -> float:
    a, b, c, d = (x.exponent for x in (pa, pb, pc, pd))
    p, q = a + b, c + d
    alpha = p * q / (p + q)
    p_center = (a * pa.center + b * pb.center) / p
    q_center = (c * pc.center + d * pd.center) / q
    pq = p_center - q_center
    (l1, m1, n1), (l2, m2, n2) = pa.lmn, pb.lmn
    (l3, m3, n3), (l4, m4, n4) = pc.lmn, pd.lmn
    ab, cd = pa.center - pb.center, pc.center - pd.center

    total = 0.0
    for t in range(l1 + l2 + 1):
        e1 = hermite_e(l1, l2, t, ab[0], a, b)
        for u in range(m1 + m2 + 1):
            e2 = hermite_e(m1, m2, u, ab[1], a, b)
            for v in range(n1 + n2 + 1):
                e3 = hermite_e(n1, n2, v, ab[2], a, b)
                for tt in range(l3 + l4 + 1):
                    e4 = hermite_e(l3, l4, tt, cd[0], c, d)
                    for uu in range(m3 + m4 + 1):
                        e5 = hermite_e(m3, m4, uu, cd[1], c, d)
                        for vv in range(n3 + n4 + 1):
                            e6 = hermite_e(n3, n4, vv, cd[2], c, d)
                            total += (
                                e1 * e2 * e3 * e4 * e5 * e6
                                * (-1.0) ** (tt + uu + vv)
                                * hermite_coulomb(t + tt, u + uu, v + vv, 0, alpha, pq)
                            )
    return total * 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))


def _contracted(fn, *functions):
    total = 0.0
    for combo in _prim_combos(functions):
        coeff = 1.0
        prims = []
        for (c, prim, scale) in combo:
            coeff *= c * prim.norm * scale
            prims.append(prim)
        total += coeff * fn(*prims)
    return total


def _prim_combos(functions):
    if len(functions) == 1:
        f = functions[0]
        return [[(c, p, f.scale)] for c, p in zip(f.coefficients, f.primitives)]
    rest = _prim_combos(functions[1:])
    f = functions[0]
    return [
        [(c, p, f.scale)] + tail
        for c, p in zip(f.coefficients, f.primitives)
        for tail in rest
    ]


def build_basis(atoms):
    basis = []
    for symbol, center in atoms:
        for kind, exps, coefs in STO3G[symbol]:
            if kind == "s":
                basis.append(Contracted(exps, coefs, (0, 0, 0), center))
            else:
                for lmn in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    basis.append(Contracted(exps, coefs, lmn, center))
    return basis


def integrals(atoms):
    basis = build_basis(atoms)
    n = len(basis)
    s_mat = np.zeros((n, n))
    t_mat = np.zeros((n, n))
    v_mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s_mat[i, j] = s_mat[j, i] = _contracted(_overlap_prim, basis[i], basis[j])
            t_mat[i, j] = t_mat[j, i] = _contracted(_kinetic_prim, basis[i], basis[j])
            v_ij = 0.0
            for symbol, center in atoms:
                v_ij -= CHARGES[symbol] * _contracted(
                    lambda pa, pb: _nuclear_prim(pa, pb, center), basis[i], basis[j]
                )
            v_mat[i, j] = v_mat[j, i] = v_ij
    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs[: a + 1]:
            val = _contracted(_eri_prim, basis[i], basis[j], basis[k], basis[l])
            for (x, y), (z, w) in (((i, j), (k, l)), ((k, l), (i, j))):
                eri[x, y, z, w] = eri[y, x, z, w] = eri[x, y, w, z] = eri[y, x, w, z] = val
    return s_mat, t_mat, v_mat, eri


def nuclear_repulsion(atoms):
    e = 0.0
    for i, (sym_i, ri) in enumerate(atoms):
        for sym_j, rj in atoms[i + 1 :]:
            e += CHARGES[sym_i] * CHARGES[sym_j] / np.linalg.norm(np.asarray(ri) - np.asarray(rj))
    return e


def rhf(atoms, n_elec, max_iter=300, tol=1e-12):
    s_mat, t_mat, v_mat, eri = integrals(atoms)
    h_core = t_mat + v_mat
    e_nuc = nuclear_repulsion(atoms)
    vals, vecs = np.linalg.eigh(s_mat)
    x = vecs @ np.diag(vals**-0.5) @ vecs.T
    n_occ = n_elec // 2
    density = np.zeros_like(s_mat)
    energy = 0.0
    coeffs = None
    for iteration in range(max_iter):
        coulomb = np.einsum("pqrs,rs->pq", eri, density)
        exchange = np.einsum("prqs,rs->pq", eri, density)
        fock = h_core + coulomb - 0.5 * exchange
        f_prime = x.T @ fock @ x
        _, c_prime = np.linalg.eigh(f_prime)
        coeffs = x @ c_prime
        new_density = 2.0 * coeffs[:, :n_occ] @ coeffs[:, :n_occ].T
        new_energy = 0.5 * np.sum(new_density * (h_core + fock)) + e_nuc
        if iteration > 0 and abs(new_energy - energy) < tol and np.max(np.abs(new_density - density)) < 1e-10:
            density, energy = new_density, new_energy
            break
        density = 0.5 * (new_density + density) if iteration > 5 else new_density
        energy = new_energy
    else:
        raise RuntimeError("SCF did not converge")
    return energy, coeffs, h_core, eri, e_nuc


def to_store(atoms, n_elec) -> tuple[IntegralStore, float]:
    e_scf, coeffs, h_core, eri, e_nuc = rhf(atoms, n_elec)
    h_mo = coeffs.T @ h_core @ coeffs
    g_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", coeffs, coeffs, coeffs, coeffs, eri, optimize=True)
    n = h_mo.shape[0]
    store = IntegralStore(norb=n, n_elec=n_elec, ms2=0, core_energy=e_nuc)
    for p in range(n):
        for q in range(p + 1):
            if abs(h_mo[p, q]) > 1e-14:
                store.set_one_body(p, q, float(h_mo[p, q]))
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                s_max = q if r == p else r
                for s in range(s_max + 1):
                    val = g_mo[p, q, r, s]
                    if abs(val) > 1e-14:
                        store.set_two_body(p, q, r, s, float(val))
    return store, e_scf


def h_chain(n, spacing_angstrom):
    return [("H", (0.0, 0.0, k * spacing_angstrom * ANGSTROM)) for k in range(n)]


SYSTEMS = {
    "h2_sto3g": (lambda: h_chain(2, 0.7354), 2, "H2, r(H-H) = 0.7354 A"),
    "h4_r0.90": (lambda: h_chain(4, 0.90), 4, "linear H4 chain, spacing 0.90 A (equilibrium reference)"),
    "h4_r1.20": (lambda: h_chain(4, 1.20), 4, "linear H4 chain, spacing 1.20 A"),
    "h4_r1.50": (lambda: h_chain(4, 1.50), 4, "linear H4 chain, spacing 1.50 A"),
    "h4_r1.80": (lambda: h_chain(4, 1.80), 4, "linear H4 chain, spacing 1.80 A (2x equilibrium)"),
    "h4_r2.40": (lambda: h_chain(4, 2.40), 4, "linear H4 chain, spacing 2.40 A"),
    "lih_sto3g": (lambda: [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.5949 * ANGSTROM))], 4,
                  "LiH, r(Li-H) = 1.5949 A"),
    "beh2_sto3g": (lambda: [("Be", (0.0, 0.0, 0.0)),
                            ("H", (0.0, 0.0, 1.3264 * ANGSTROM)),
                            ("H", (0.0, 0.0, -1.3264 * ANGSTROM))], 6,
                   "linear BeH2, r(Be-H) = 1.3264 A"),
}


def main(outdir=None):
    outdir = outdir or os.path.join(os.path.dirname(__file__), "..", "src", "qsci", "data")
    os.makedirs(outdir, exist_ok=True)
    provenance = [
        "# Corpus provenance",
        "",
        "Every file below was generated by `tools/gen_fcidump.py`: restricted",
        "Hartree-Fock over the standard STO-3G basis, s/p Gaussian integrals via",
        "the McMurchie-Davidson Hermite expansion, molecular-orbital transform,",
        "chemists' (pq|rs) convention, 1-based FCIDUMP indices, MS2 = 0.",
        "Orbitals are canonical RHF orbitals ordered by energy, so the aufbau",
        "determinant is the Hartree-Fock reference.  Energies in Hartree.",
        "",
        "| file | system | SCF energy |",
        "|------|--------|-----------|",
    ]
    for name, (geometry, n_elec, description) in SYSTEMS.items():
        store, e_scf = to_store(geometry(), n_elec)
        path = os.path.join(outdir, f"{name}.fcidump")
        dump_fcidump(store, path)
        provenance.append(f"| {name}.fcidump | {description} | {e_scf:.10f} |")
        print(f"{name}: M={store.norb} E_SCF={e_scf:.10f} -> {path}")
    with open(os.path.join(outdir, "PROVENANCE.md"), "w", encoding="ascii") as handle:
        handle.write("\n".join(provenance) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
