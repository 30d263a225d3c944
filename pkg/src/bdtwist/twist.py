"""The 2-cocycle gamma on C_p[SL(n)] built from a disjoint triple, and the twist.

Matrix conventions on V tensor V: ``Gamma[(i,k),(j,l)] = gamma(t_ij, t_kl)``;
on V^{tensor 3} the legs are ``G12 = Gamma (x) 1``, ``G23 = 1 (x) Gamma`` and
``G13`` (Gamma on factors 1 and 3).  The degree-2 values are then

    gamma(t_aj t_bl, t_mn) = (G23 G13)[(a,b,m),(j,l,n)]
    gamma(t_ij, t_bl t_cn) = (G12 G13)[(i,b,c),(j,l,n)]

and the cocycle identity on generator triples reads
``G12 (G23 G13) = G23 (G12 G13)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from bdtwist import linalg
from bdtwist.bdstruct import BDTriple, CompatibleForm
from bdtwist.borel import Borel, Functional, psi, theta_invert
from bdtwist.qfa import (
    RMatrix,
    Representation,
    braid_relation_holds,
    braiding_R,
    qybe_witness,
    rho_restrict,
    rtt_check,
    support_outside_standard,
    vector_rep,
)
from bdtwist.rootdata import Lattice, RootDatum
from bdtwist.scalar import FONE, FZERO, Frac
from bdtwist.sparse import Mat, flat_index, flip, min_poly_degree, multi_index


class InverseCheckFailed(AssertionError):
    pass


class QYBEFailed(AssertionError):
    pass


class DegreeCapExceeded(ValueError):
    pass


@dataclass
class Check:
    name: str
    ok: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "pass": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class TwistReport:
    checks: list[Check] = field(default_factory=list)
    gamma_table: list | None = None
    r_prime: dict | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, witness: dict | None = None) -> Check:
        c = Check(name, bool(ok), None if ok else witness)
        self.checks.append(c)
        return c

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        out: dict = {"checks": [c.to_json() for c in self.checks]}
        if self.gamma_table is not None:
            out["gamma_table"] = self.gamma_table
        if self.r_prime is not None:
            out["r_prime"] = self.r_prime
        return out


def _diff_witness(A: Mat, B: Mat, n: int, d: int) -> dict | None:
    diff = A.first_difference(B)
    if diff is None:
        return None
    i, j, x, y = diff
    return {"row": [a + 1 for a in multi_index(i, n, d)], "col": [a + 1 for a in multi_index(j, n, d)],
            "lhs": str(x), "rhs": str(y)}


class Cocycle:
    """gamma(x, y) = sigma_0(rho_1^-(x), rho_2^+(y)) on matrix coefficients of V.

    sigma_0(c, b) = < theta^{-1}(c) | psi^-^{-1}(theta^{-1}(b)) > pairs the
    E-side preimage over Pi_1 with the F-side preimage over Pi_2 pulled back
    to Pi_1.
    """

    def __init__(self, rd: RootDatum, cf: CompatibleForm, triple: BDTriple,
                 height_cap: int = 6, omega: Lattice | None = None,
                 rep: Representation | None = None, borel: Borel | None = None):
        self.rd = rd
        self.cf = cf
        self.triple = triple
        self.rep = rep or vector_rep(rd, cf)
        self.bo = borel or Borel(rd, cf, height_cap)
        self.n = self.rep.n
        self.omega = omega if omega is not None else rd.weight_lattice()
        self.pi1 = triple.pi1
        self.pi2 = triple.pi2
        # toral labels of the restricted coefficients live in these lattices
        self.lattice_minus = cf.projected_lattice(self.pi1, "+", self.omega)
        self.lattice_plus = cf.projected_lattice(self.pi2, "-", self.omega)
        self._x: dict = {}
        self._y: dict = {}
        self._g: dict = {}
        self._ginv: dict = {}

    # restricted coefficients and their preimages -------------------------------
    def rho_minus(self, I: Sequence[int], J: Sequence[int], antipode: bool = False) -> Functional:
        return rho_restrict(self.rep, I, J, self.pi1, "-", antipode)

    def rho_plus(self, I: Sequence[int], J: Sequence[int], antipode: bool = False) -> Functional:
        return rho_restrict(self.rep, I, J, self.pi2, "+", antipode)

    def x_of(self, I, J):
        key = (tuple(I), tuple(J))
        if key not in self._x:
            self._x[key] = theta_invert(self.bo, self.rho_minus(I, J), self.lattice_minus)
        return self._x[key]

    def y_of(self, I, J, antipode: bool = False):
        key = (tuple(I), tuple(J), antipode)
        if key not in self._y:
            Y = theta_invert(self.bo, self.rho_plus(I, J, antipode), self.lattice_plus)
            self._y[key] = psi(self.triple, Y, inverse=True)
        return self._y[key]

    def sigma0(self, c: Functional, b: Functional) -> Frac:
        X = theta_invert(self.bo, c, self.lattice_minus)
        Y = psi(self.triple, theta_invert(self.bo, b, self.lattice_plus), inverse=True)
        return self.bo.pairing(X, Y)

    # gamma ----------------------------------------------------------------------
    def gamma_collapsed(self, I, J, K, L) -> Frac:
        """sigma_0(rho_1^-(t_IJ), rho_2^+(t_KL)) for multi-indices of any degree."""
        return self.bo.pairing(self.x_of(I, J), self.y_of(K, L))

    def gamma_via_gamma0(self, i: int, j: int, k: int, l: int) -> Frac:
        """gamma_0 applied to phi^*(t_ij) (x) phi^*(t_kl).

        phi^*(t) = sum_a rho_2^+(t_ia) (x) rho_1^-(t_aj) in C[B_2^+] (x) C[B_1^-], and
        gamma_0(b (x) a, b' (x) a') = eps(b) sigma_0(a, b') eps(a').
        """
        total = FZERO
        for a in range(self.n):
            ea = self.rho_plus((i,), (a,)).counit_value()
            if not ea:
                continue
            for b in range(self.n):
                eb = self.rho_minus((b,), (l,)).counit_value()
                if not eb:
                    continue
                s = self.bo.pairing(self.x_of((a,), (j,)), self.y_of((k,), (b,)))
                if s:
                    total = total + ea * s * eb
        return total

    def gamma1(self, i: int, j: int, k: int, l: int) -> Frac:
        key = (i, j, k, l)
        if key not in self._g:
            self._g[key] = self.gamma_collapsed((i,), (j,), (k,), (l,))
        return self._g[key]

    def gamma_inverse1(self, i: int, j: int, k: int, l: int) -> Frac:
        """gamma^{-1}(t_ij, t_kl) = gamma(t_ij, S t_kl)."""
        key = (i, j, k, l)
        if key not in self._ginv:
            self._ginv[key] = self.bo.pairing(self.x_of((i,), (j,)), self.y_of((k,), (l,), antipode=True))
        return self._ginv[key]

    def gamma(self, x: Sequence[tuple[int, int]], y: Sequence[tuple[int, int]]) -> Frac:
        """gamma on products of generators: x, y are lists of (row, col), total degree <= 3.

        An empty list is the unit 1.
        """
        x, y = list(x), list(y)
        if len(x) + len(y) > 3 or len(x) > 2 or len(y) > 2:
            raise DegreeCapExceeded("gamma is implemented for degree <= 2 per argument, 3 in total")
        if not x:
            return FONE if all(i == j for i, j in y) else FZERO
        if not y:
            return FONE if all(i == j for i, j in x) else FZERO
        if len(x) == 1 and len(y) == 1:
            return self.gamma1(*x[0], *y[0])
        if len(x) == 2:
            (i, j), (k, l) = x
            (m, nn), = y
            # gamma(xy, z) = sum gamma(y, z_1) gamma(x, z_2)
            return sum((self.gamma1(k, l, m, c) * self.gamma1(i, j, c, nn) for c in range(self.n)), FZERO)
        (i, j), = x
        (k, l), (m, nn) = y
        # gamma(x, yz) = sum gamma(x_1, y) gamma(x_2, z)
        return sum((self.gamma1(i, a, k, l) * self.gamma1(a, j, m, nn) for a in range(self.n)), FZERO)

    def gamma_direct(self, x: Sequence[tuple[int, int]], y: Sequence[tuple[int, int]]) -> Frac:
        """gamma by theta-inversion of the product coefficients themselves."""
        I = tuple(i for i, _ in x)
        J = tuple(j for _, j in x)
        K = tuple(k for k, _ in y)
        L = tuple(l for _, l in y)
        return self.gamma_collapsed(I, J, K, L)

    # matrices -----------------------------------------------------------------
    def _matrix(self, f) -> Mat:
        n = self.n
        ents = {}
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        v = f(i, j, k, l)
                        if v:
                            ents[i * n + k, j * n + l] = v
        return Mat(n * n, ents)

    @property
    def Gamma(self) -> Mat:
        if not hasattr(self, "_Gamma"):
            self._Gamma = self._matrix(self.gamma1)
        return self._Gamma

    @property
    def Gamma_inv(self) -> Mat:
        if not hasattr(self, "_Gamma_inv"):
            self._Gamma_inv = self._matrix(self.gamma_inverse1)
        return self._Gamma_inv

    def legs(self, G: Mat) -> tuple[Mat, Mat, Mat]:
        n = self.n
        one = Mat.identity(n)
        G12 = G.kron(one)
        G23 = one.kron(G)
        P23 = flip(n, 3, 1)
        G13 = P23 @ G12 @ P23
        return G12, G23, G13

    def gamma_table(self) -> list:
        G = self.Gamma
        n = self.n
        out = []
        for (r, c) in sorted(G.e):
            i, k = divmod(r, n)
            j, l = divmod(c, n)
            v = G.e[r, c]
            out.append([i + 1, j + 1, k + 1, l + 1, v.to_json()])
        return out


# operations ---------------------------------------------------------------------

def cocycle_check(cc: Cocycle, report: TwistReport | None = None) -> TwistReport:
    """2-cocycle identity on all generator triples, plus unitality and sigma(1,1) = 1."""
    rep = report or TwistReport()
    n = cc.n
    G12, G23, G13 = cc.legs(cc.Gamma)
    lhs = G12 @ (G23 @ G13)
    rhs = G23 @ (G12 @ G13)
    rep.add("cocycle_identity", lhs == rhs, _diff_witness(lhs, rhs, n, 3))
    unit = all(cc.gamma([], [(k, l)]) == (FONE if k == l else FZERO) for k in range(n) for l in range(n))
    unit = unit and all(cc.gamma([(k, l)], []) == (FONE if k == l else FZERO) for k in range(n) for l in range(n))
    # gamma(1, x) through the theta path: 1 is the coefficient of the trivial module
    for k in range(n):
        for l in range(n):
            v = cc.gamma_collapsed((), (), (k,), (l,))
            w = cc.gamma_collapsed((k,), (l,), (), ())
            if v != (FONE if k == l else FZERO) or w != (FONE if k == l else FZERO):
                unit = False
    rep.add("unitality", unit)
    rep.add("sigma_one_one", cc.bo.pairing(cc.x_of((), ()), cc.y_of((), ())) == FONE)
    return rep


def inverse_check(cc: Cocycle, report: TwistReport | None = None, strict: bool = False) -> TwistReport:
    rep = report or TwistReport()
    I = Mat.identity(cc.n ** 2)
    prod = cc.Gamma @ cc.Gamma_inv
    ok = prod == I
    rep.add("convolution_inverse", ok, _diff_witness(prod, I, cc.n, 2))
    if strict and not ok:
        raise InverseCheckFailed("gamma * gamma^-1 != eps (x) eps")
    return rep


def gamma_inverse(cc: Cocycle, x: tuple[int, int], y: tuple[int, int]) -> Frac:
    """Convolution inverse on a degree-1 pair, verified once per cocycle."""
    if not getattr(cc, "_inverse_verified", False):
        inverse_check(cc, strict=True)
        cc._inverse_verified = True
    return cc.gamma_inverse1(*x, *y)


def two_path_check(cc: Cocycle, report: TwistReport | None = None) -> TwistReport:
    rep = report or TwistReport()
    n = cc.n
    bad = None
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    a, b = cc.gamma_via_gamma0(i, j, k, l), cc.gamma1(i, j, k, l)
                    if a != b and bad is None:
                        bad = {"pair": [[i + 1, j + 1], [k + 1, l + 1]], "gamma0_path": str(a), "collapsed": str(b)}
    rep.add("two_path_gamma", bad is None, bad)
    return rep


def degree2_check(cc: Cocycle, pairs: Sequence | None = None, report: TwistReport | None = None) -> TwistReport:
    """Multiplicativity values of gamma on degree 2 against direct theta-inversion."""
    rep = report or TwistReport()
    n = cc.n
    if pairs is None:
        idx = [(i, j) for i in range(n) for j in range(n)]
        pairs = [([x, y], [z]) for x in idx for y in idx for z in idx]
        pairs += [([x], [y, z]) for x in idx for y in idx for z in idx]
    bad = None
    for x, y in pairs:
        a, b = cc.gamma(x, y), cc.gamma_direct(x, y)
        if a != b:
            bad = {"x": [list(map(lambda v: v + 1, p)) for p in x], "y": [list(map(lambda v: v + 1, p)) for p in y],
                   "multiplicative": str(a), "direct": str(b)}
            break
    rep.add("degree2_two_path", bad is None, bad)
    return rep


def twisted_product(cc: Cocycle, x: tuple[int, int], y: tuple[int, int]) -> dict:
    """x . y = sum gamma(t_ia, t_kb) t_ac t_bd gamma^{-1}(t_cj, t_dl) as {((a,c),(b,d)): coeff}."""
    n = cc.n
    (i, j), (k, l) = x, y
    G, Gi = cc.Gamma, cc.Gamma_inv
    out = {}
    for (r, s), g in G.e.items():
        if r != i * n + k:
            continue
        a, b = divmod(s, n)
        for (r2, s2), h in Gi.e.items():
            if s2 != j * n + l:
                continue
            c, d = divmod(r2, n)
            key = ((a, c), (b, d))
            out[key] = out.get(key, FZERO) + g * h
    return {k: v for k, v in out.items() if v}


def associativity_check(cc: Cocycle, report: TwistReport | None = None) -> TwistReport:
    """(x.y).z == x.(y.z) as coefficient tables on degree-3 monomials, all generator triples."""
    rep = report or TwistReport()
    n = cc.n
    G12, G23, G13 = cc.legs(cc.Gamma)
    H12, H23, H13 = cc.legs(cc.Gamma_inv)
    left, left_inv = G12 @ G23 @ G13, H13 @ H23 @ H12
    right, right_inv = G23 @ G12 @ G13, H13 @ H12 @ H23
    # the inverse tables must really be inverse to the forward ones
    I3 = Mat.identity(n ** 3)
    ok = left @ left_inv == I3 and right @ right_inv == I3
    rows_l, rows_r, cols_l, cols_r = {}, {}, {}, {}
    for src, dst in ((left, rows_l), (right, rows_r)):
        for (r, c), v in src.e.items():
            dst.setdefault(r, {})[c] = v
    for src, dst in ((left_inv, cols_l), (right_inv, cols_r)):
        for (r, c), v in src.e.items():
            dst.setdefault(c, {})[r] = v
    bad = None
    N = n ** 3
    for r in range(N):
        for c in range(N):
            tl = {(A, B): a * b for A, a in rows_l.get(r, {}).items() for B, b in cols_l.get(c, {}).items()}
            tr = {(A, B): a * b for A, a in rows_r.get(r, {}).items() for B, b in cols_r.get(c, {}).items()}
            tl = {k: v for k, v in tl.items() if v}
            tr = {k: v for k, v in tr.items() if v}
            if tl != tr:
                bad = {"row": [a + 1 for a in multi_index(r, n, 3)], "col": [a + 1 for a in multi_index(c, n, 3)]}
                break
        if bad:
            break
    rep.add("associativity", ok and bad is None, bad or ({"detail": "inverse tables"} if not ok else None))
    return rep


def twisted_R(R: RMatrix, cc: Cocycle, strict: bool = True) -> RMatrix:
    """R' = Gamma_21 R Gamma^{-1} (convolution gamma_21 * r * gamma^{-1})."""
    n = cc.n
    P = flip(n)
    Rp = (P @ cc.Gamma @ P) @ R.R @ cc.Gamma_inv
    out = RMatrix(n, Rp, R.kappa, R.placement)
    if strict and qybe_witness(Rp, n) is not None:
        raise QYBEFailed("twisted R fails the Yang-Baxter equation")
    return out


def completely_disjoint(rd: RootDatum, t: BDTriple) -> bool:
    return all(rd.gram[a][b] == 0 for a in t.pi1 for b in t.pi2)


def nondegeneracy_witness(cc: Cocycle) -> dict:
    """Rank of phi^*(t_ij) on the degree <= 1 word shapes of U(b_2^+) (x) U(b_1^-).

    Shapes: (1, 1), (E_b, 1) for b in Pi_2, (1, F_a) for a in Pi_1; toral
    parts trivial.  Passing means full rank 1 + |Pi_1| + |Pi_2|.
    """
    rd, t = cc.rd, cc.triple
    if not completely_disjoint(rd, t):
        raise ValueError("triple is not completely disjoint")
    if not cc.cf.is_zero():
        raise ValueError("nondegeneracy witness needs u = 0")
    n = cc.n
    shapes = [((), ())] + [((b,), ()) for b in t.pi2] + [((), (a,)) for a in t.pi1]
    rows = []
    for i in range(n):
        for j in range(n):
            row = []
            for w2, w1 in shapes:
                v = FZERO
                for a in range(n):
                    x = cc.rho_plus((i,), (a,)).shape_value(w2)
                    if x:
                        v = v + x * cc.rho_minus((a,), (j,)).shape_value(w1)
                row.append(v)
            rows.append(row)
    rk = linalg.rank(rows)
    return {"rank": rk, "target_dim": len(shapes), "pass": rk == len(shapes)}


def run_twist(rd: RootDatum, cf: CompatibleForm, t: BDTriple, height_cap: int = 6,
              omega: Lattice | None = None, full: bool = True) -> tuple[TwistReport, RMatrix, RMatrix, Cocycle]:
    """Whole pipeline: gamma, checks, braiding, twisted braiding."""
    cc = Cocycle(rd, cf, t, height_cap, omega)
    rep = TwistReport()
    cocycle_check(cc, rep)
    inverse_check(cc, rep)
    two_path_check(cc, rep)
    if full:
        associativity_check(cc, rep)
    R = braiding_R(cc.rep, cc.bo)
    rep.add("rtt_untwisted", rtt_check(R, cc.rep).ok)
    Rp = twisted_R(R, cc, strict=False)
    n = cc.n
    w = qybe_witness(Rp.R, n)
    rep.add("qybe_twisted", w is None, None if w is None else {"row": w[0], "col": w[1]})
    rep.add("braid_twisted", braid_relation_holds(Rp.braid, n))
    deg = min_poly_degree(Rp.braid)
    rep.add("min_poly_degree_twisted", deg == 2, {"degree": deg})
    tw = rtt_check(Rp, cc.rep, conj=(cc.Gamma, cc.Gamma_inv))
    rep.add("rtt_twisted", tw.ok, tw.failures[0] if tw.failures else None)
    outside = support_outside_standard(Rp.R, n)
    if t.is_empty():
        rep.add("trivial_triple_R_unchanged", Rp.R == R.R)
    else:
        rep.add("nonstandard_support", bool(outside), {"outside": outside[:5]})
    if completely_disjoint(rd, t) and cf.is_zero() and not t.is_empty():
        nd = nondegeneracy_witness(cc)
        rep.add("nondegeneracy_witness", nd["pass"], nd)
    rep.gamma_table = cc.gamma_table()
    rep.r_prime = Rp.to_json()
    return rep, R, Rp, cc


def dumps_report(rep: TwistReport) -> str:
    return json.dumps(rep.to_json(), sort_keys=True)
