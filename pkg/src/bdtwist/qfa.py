"""Vector representation of U_p(sl(n)), matrix coefficients and the braiding.

Basis vectors ``v_0, ..., v_{n-1}`` have weights ``wt_0 = varpi_1`` and
``wt_{i+1} = wt_i - alpha_i``; tensor powers use row-major multi-indices
(first factor most significant).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from bdtwist import linalg
from bdtwist.bdstruct import CompatibleForm
from bdtwist.borel import Borel, CalibrationFailed, Functional, words_of_weight
from bdtwist.rootdata import RootDatum, Weight
from bdtwist.scalar import FONE, FZERO, Frac, Scalar, qbinom, qpow
from bdtwist.sparse import Mat, flat_index, flip, min_poly_degree, multi_index


class RelationViolation(AssertionError):
    pass


class BraidCheckFailed(AssertionError):
    pass


def _is_type_a_chain(rd: RootDatum) -> bool:
    r = rd.rank
    for i in range(r):
        for j in range(r):
            want = 2 if i == j else (-1 if abs(i - j) == 1 else 0)
            if rd.cartan[i][j] != want:
                return False
    return True


class TensorPower:
    """Action of the generators on V^{tensor d} through the iterated coproduct."""

    def __init__(self, rep: "Representation", d: int):
        self.rep = rep
        self.d = d
        self.dim = rep.n ** d
        self._words: dict = {}

    def _kron_all(self, mats: Sequence[Mat]) -> Mat:
        out = mats[0]
        for m in mats[1:]:
            out = out.kron(m)
        return out

    @cached_property
    def E(self) -> list[Mat]:
        rep, d = self.rep, self.d
        out = []
        for a in range(rep.rank):
            kt = rep.Ktilde(rep.rd.simple_root(a))
            one = Mat.identity(rep.n)
            total = Mat(self.dim)
            for k in range(d):
                total = total + self._kron_all([kt] * k + [rep.E[a]] + [one] * (d - k - 1))
            out.append(total)
        return out

    @cached_property
    def F(self) -> list[Mat]:
        rep, d = self.rep, self.d
        out = []
        for a in range(rep.rank):
            km = rep.K(-rep.rd.simple_root(a))
            one = Mat.identity(rep.n)
            total = Mat(self.dim)
            for k in range(d):
                total = total + self._kron_all([one] * k + [rep.F[a]] + [km] * (d - k - 1))
            out.append(total)
        return out

    def weight(self, idx: Sequence[int]) -> Weight:
        w = Weight.zero(self.rep.rank)
        for i in idx:
            w = w + self.rep.weights[i]
        return w

    def K(self, lam) -> Mat:
        return Mat.diagonal(qpow(self.rep.cf.uplus(lam, self.weight(multi_index(i, self.rep.n, self.d))))
                            for i in range(self.dim))

    def Ktilde(self, lam) -> Mat:
        """K_{lam~}; acts on weight wt by q^{-u_-(lam, wt)}."""
        return Mat.diagonal(qpow(-self.rep.cf.uminus(lam, self.weight(multi_index(i, self.rep.n, self.d))))
                            for i in range(self.dim))

    def generator(self, side: str, a: int) -> Mat:
        return self.E[a] if side == "+" else self.F[a]

    def antipode_generator(self, side: str, a: int) -> Mat:
        al = self.rep.rd.simple_root(a)
        if side == "+":
            return -(self.Ktilde(-al) @ self.E[a])
        return -(self.F[a] @ self.K(al))

    def word_entry(self, side: str, word: Sequence[int], I: Sequence[int], J: Sequence[int],
                   antipode: bool = False) -> Frac:
        """(X_w)_{IJ}, or (S(X_w))_{IJ} with S(X_w) = S(X_{w_m}) ... S(X_{w_1})."""
        n = self.rep.n
        vec = {flat_index(J, n): FONE}
        letters = list(word) if antipode else list(reversed(word))
        for a in letters:
            g = self.antipode_generator(side, a) if antipode else self.generator(side, a)
            vec = g.apply(vec)
            if not vec:
                return FZERO
        return vec.get(flat_index(I, n), FZERO)

    def word_matrix(self, side: str, word: Sequence[int]) -> Mat:
        key = (side, tuple(word))
        hit = self._words.get(key)
        if hit is None:
            hit = Mat.identity(self.dim)
            for a in word:
                hit = hit @ self.generator(side, a)
            self._words[key] = hit
        return hit


class Representation:
    """The n-dimensional vector representation of U_p(sl(n))."""

    def __init__(self, rd: RootDatum, cf: CompatibleForm):
        if not _is_type_a_chain(rd):
            raise ValueError("vector representation is implemented for type A only")
        self.rd = rd
        self.cf = cf
        self.rank = rd.rank
        self.n = rd.rank + 1
        ws = [rd.fundamental_weights()[0]]
        for i in range(self.rank):
            ws.append(ws[-1] - rd.simple_root(i))
        self.weights = ws
        self.E = [Mat(self.n, {(a, a + 1): FONE}) for a in range(self.rank)]
        self.F = [Mat(self.n, {(a + 1, a): qpow(-cf.u(rd.simple_root(a), ws[a]))}) for a in range(self.rank)]
        self._tensor: dict[int, TensorPower] = {}

    def K(self, lam) -> Mat:
        return Mat.diagonal(qpow(self.cf.uplus(lam, w)) for w in self.weights)

    def Ktilde(self, lam) -> Mat:
        return Mat.diagonal(qpow(-self.cf.uminus(lam, w)) for w in self.weights)

    def tensor(self, d: int) -> TensorPower:
        if d not in self._tensor:
            self._tensor[d] = TensorPower(self, d)
        return self._tensor[d]

    def check_relations(self, d: int = 1) -> None:
        """Raise RelationViolation unless every defining relation holds on V^{tensor d}."""
        T = self.tensor(d)
        rd, cf = self.rd, self.cf
        r = self.rank
        I = Mat.identity(T.dim)
        for a in range(r):
            la = rd.simple_root(a)
            for b in range(r):
                lb = rd.simple_root(b)
                for lam, name in ((la, "K"), (cf.tilde(la), "Ktilde")):
                    k, kinv = T.K(lam), T.K(-lam)
                    if k @ T.E[b] @ kinv != T.E[b].scale(qpow(cf.uplus(lam, lb))):
                        raise RelationViolation(f"{name}_{a + 1} E_{b + 1} conjugation")
                    if k @ T.F[b] @ kinv != T.F[b].scale(qpow(-cf.uplus(lam, lb))):
                        raise RelationViolation(f"{name}_{a + 1} F_{b + 1} conjugation")
                comm = T.E[a] @ T.F[b] - T.F[b] @ T.E[a]
                if a == b:
                    dq = rd.q_exponent(a)
                    want = (T.Ktilde(la) - T.K(-la)).scale(Frac(FONE.num, qpow(dq) - qpow(-dq)))
                else:
                    want = Mat(T.dim)
                if comm != want:
                    raise RelationViolation(f"[E_{a + 1}, F_{b + 1}]")
                if a != b:
                    m = 1 - rd.cartan[a][b]
                    dq = rd.q_exponent(a)
                    uab = cf.u(la, lb)
                    for side, sgn in (("+", -1), ("-", 1)):
                        total = Mat(T.dim)
                        for k in range(m + 1):
                            c = qbinom(m, k, dq) * qpow(sgn * k * uab)
                            if k % 2:
                                c = -c
                            word = (a,) * (m - k) + (b,) + (a,) * k
                            total = total + T.word_matrix(side, word).scale(c)
                        if not total.is_zero():
                            raise RelationViolation(f"Serre relation ({side}) for ({a + 1}, {b + 1})")
        if T.K(Weight.zero(r)) != I:
            raise RelationViolation("K_0 is not the identity")


def vector_rep(rd: RootDatum, cf: CompatibleForm, check: bool = True) -> Representation:
    rep = Representation(rd, cf)
    if check:
        rep.check_relations(1)
    return rep


@dataclass(frozen=True)
class MatrixCoefficient:
    """t_{IJ} on V^{tensor d} (d = len(I)); degree-1 coefficients are t_ij."""

    I: tuple[int, ...]
    J: tuple[int, ...]

    def coproduct(self, n: int) -> list[tuple["MatrixCoefficient", "MatrixCoefficient"]]:
        d = len(self.I)
        out = []
        for k in range(n ** d):
            A = multi_index(k, n, d)
            out.append((MatrixCoefficient(self.I, A), MatrixCoefficient(A, self.J)))
        return out

    def counit(self) -> int:
        return 1 if self.I == self.J else 0


def rho_restrict(rep: Representation, I: Sequence[int], J: Sequence[int], subset: Sequence[int],
                 side: str, antipode: bool = False) -> Functional:
    """Restriction of t_{IJ} (or t_{IJ} o S) to the Borel half on letters ``subset``.

    Toral parts are restricted to the span of ``subset``, so the label is a
    projection of a weight of V^{tensor d}.
    """
    I, J = tuple(I), tuple(J)
    d = len(I)
    if len(J) != d:
        raise ValueError("row and column multi-indices differ in length")
    T = rep.tensor(d)
    cf = rep.cf
    S = tuple(sorted(subset))
    wI, wJ = T.weight(I), T.weight(J)
    if side == "-":
        nu = wJ - wI
        lab = cf.project(S, "+", wI) if antipode else -cf.project(S, "+", wJ)
    elif side == "+":
        nu = wI - wJ
        lab = cf.project(S, "-", wI) if antipode else -cf.project(S, "-", wJ)
    else:
        raise ValueError("side must be '+' or '-'")
    vals: dict = {}
    if all(x >= 0 and Fraction(x).denominator == 1 for x in nu) and all(x == 0 or i in S for i, x in enumerate(nu)):
        for w in words_of_weight(nu):
            v = T.word_entry(side, w, I, J, antipode)
            if v:
                vals[w] = v
    data = {lab: vals} if vals else {}
    return Functional(side, data, cf, S)


# R-matrices ---------------------------------------------------------------------

@dataclass
class RMatrix:
    """Matrix R on V tensor V with R Delta(x) = Delta^op(x) R; ``braid`` is P R."""

    n: int
    R: Mat
    kappa: list[list[Fraction]] | None = None
    placement: str | None = None

    @property
    def braid(self) -> Mat:
        return flip(self.n) @ self.R

    def entry(self, i: int, k: int, j: int, l: int) -> Frac:
        """R_{(ik),(jl)}"""
        n = self.n
        return self.R[i * n + k, j * n + l]

    def to_json(self) -> dict:
        entries = []
        for (i, j) in sorted(self.R.e):
            v = self.R.e[i, j]
            entries.append([i, j, v.to_scalar().to_json()])
        return {"n": self.n, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "RMatrix":
        n = int(data["n"])
        ents = {}
        for row, col, val in data["entries"]:
            row, col = int(row), int(col)
            if not (0 <= row < n * n and 0 <= col < n * n):
                raise ValueError(f"entry ({row}, {col}) out of range")
            ents[row, col] = Frac(Scalar.from_json(val))
        return cls(n, Mat(n * n, ents))


def _theta_matrix(bo: Borel, rep: Representation) -> Mat:
    """Sum over weights of sum_i x_i (tensor) y^i on V tensor V (dual bases of the pairing)."""
    r = rep.rank
    T = rep.tensor(1)
    total = Mat.identity(rep.n ** 2)
    for mask in range(1, 1 << r):
        nu = Weight([(mask >> i) & 1 for i in range(r)])
        g = bo.gram(nu)
        if not g.plus_normal:
            continue
        Ginv = g.reduced_inverse
        for a, i in enumerate(g.plus_normal):
            Ex = T.word_matrix("+", g.words[i])
            if Ex.is_zero():
                continue
            acc = Mat(rep.n)
            for b, j in enumerate(g.minus_normal):
                c = Ginv[b][a]
                if c:
                    acc = acc + T.word_matrix("-", g.words[j]).scale(c)
            total = total + Ex.kron(acc)
    return total


def _kappa_matrix(rep: Representation, K: list[list[Fraction]]) -> Mat:
    n = rep.n
    vals = []
    for a in range(n):
        for b in range(n):
            wa, wb = rep.weights[a], rep.weights[b]
            e = sum((wa[i] * K[i][j] * wb[j] for i in range(rep.rank) for j in range(rep.rank)), Fraction(0))
            vals.append(qpow(e))
    return Mat.diagonal(vals)


def _solve_kappa(rep: Representation, A: Mat, B: Mat, gens: list[tuple[Mat, Mat]]):
    """Bilinear k with R = A kappa B intertwining every (Delta x, Delta^op x); None if none."""
    n, r = rep.n, rep.rank
    N = n * n
    pair_w = [(rep.weights[a], rep.weights[b]) for a in range(n) for b in range(n)]

    def expo_row(m: int) -> list[Fraction]:
        wa, wb = pair_w[m]
        return [wa[i] * wb[j] for i in range(r) for j in range(r)]

    rows, rhs = [], []
    for D, Dop in gens:
        left_B = B @ D
        right_A = Dop @ A
        # sum_m [A_{Pm} (B D)_{mQ} - (Dop A)_{Pm} B_{mQ}] z_m = 0
        eqs: dict[tuple[int, int], dict[int, Frac]] = {}
        Acols: dict[int, list] = {}
        for (p, m), v in A.e.items():
            Acols.setdefault(p, []).append((m, v))
        for p, lst in Acols.items():
            for m, v in lst:
                for (mm, q), w in left_B.e.items():
                    if mm == m:
                        eqs.setdefault((p, q), {})
                        eqs[p, q][m] = eqs[p, q].get(m, FZERO) + v * w
        RAr: dict[int, list] = {}
        for (p, m), v in right_A.e.items():
            RAr.setdefault(p, []).append((m, v))
        for p, lst in RAr.items():
            for m, v in lst:
                for (mm, q), w in B.e.items():
                    if mm == m:
                        eqs.setdefault((p, q), {})
                        eqs[p, q][m] = eqs[p, q].get(m, FZERO) - v * w
        for (p, q), coeffs in eqs.items():
            nz = {m: c for m, c in coeffs.items() if c}
            if not nz:
                continue
            if len(nz) == 1:
                return None
            if len(nz) == 2:
                (m1, c1), (m2, c2) = sorted(nz.items())
                ratio = -c2 / c1  # z_m1 / z_m2
                if not ratio.is_laurent():
                    return None
                s = ratio.to_scalar()
                if not s.is_monomial() or s.terms()[0][1] != 1:
                    return None
                e = s.min_exponent()
                r1, r2 = expo_row(m1), expo_row(m2)
                rows.append([x - y for x, y in zip(r1, r2)])
                rhs.append(e)
    if not rows:
        return None
    sol = linalg.solve(rows, rhs)
    if sol is None:
        return None
    return [[sol[i * r + j] for j in range(r)] for i in range(r)]


def _generator_pairs(rep: Representation) -> list[tuple[Mat, Mat]]:
    T = rep.tensor(2)
    P = flip(rep.n)
    out = []
    for a in range(rep.rank):
        for g in (T.E[a], T.F[a]):
            out.append((g, P @ g @ P))
    return out


def braiding_R(rep: Representation, bo: Borel | None = None) -> RMatrix:
    """Braiding of the vector representation from the truncated universal R.

    The Cartan factor is a bilinear q-power solved from equivariance.  The
    placement (kappa Theta, Theta kappa, kappa Theta_21, Theta_21 kappa) is
    the one that passes equivariance and the braid relation.
    """
    if bo is None:
        bo = Borel(rep.rd, rep.cf)
    theta = _theta_matrix(bo, rep)
    P = flip(rep.n)
    theta21 = P @ theta @ P
    one = Mat.identity(rep.n ** 2)
    gens = _generator_pairs(rep)
    found = False
    for name, A, B in (("kappa*Theta", one, theta), ("Theta*kappa", theta, one),
                       ("kappa*Theta21", one, theta21), ("Theta21*kappa", theta21, one)):
        K = _solve_kappa(rep, A, B, gens)
        if K is None:
            continue
        kap = _kappa_matrix(rep, K)
        R = A @ kap @ B
        if not all(R @ D == Dop @ R for D, Dop in gens):
            continue
        found = True
        rm = RMatrix(rep.n, R, K, name)
        if qybe_holds(rm.R, rep.n) and braid_relation_holds(rm.braid, rep.n):
            return rm
    if not found:
        raise CalibrationFailed("no Cartan factor makes the braiding equivariant")
    raise BraidCheckFailed("equivariant braiding fails the braid relation")


# checks -------------------------------------------------------------------------

def _legs(R: Mat, n: int) -> tuple[Mat, Mat, Mat]:
    I = Mat.identity(n)
    R12 = R.kron(I)
    R23 = I.kron(R)
    P23 = flip(n, 3, 1)
    R13 = P23 @ R12 @ P23
    return R12, R13, R23


def qybe_holds(R: Mat, n: int) -> bool:
    return qybe_witness(R, n) is None


def qybe_witness(R: Mat, n: int):
    R12, R13, R23 = _legs(R, n)
    return (R12 @ R13 @ R23).first_difference(R23 @ R13 @ R12)


def braid_relation_holds(Rh: Mat, n: int) -> bool:
    I = Mat.identity(n)
    B1, B2 = Rh.kron(I), I.kron(Rh)
    return B1 @ B2 @ B1 == B2 @ B1 @ B2


def standard_support(n: int) -> set[tuple[int, int]]:
    out = set()
    for i in range(n):
        for j in range(n):
            out.add((i * n + j, i * n + j))
            out.add((i * n + j, j * n + i))
    return out


def support_outside_standard(R: Mat, n: int) -> list[tuple[int, int]]:
    std = standard_support(n)
    return sorted(k for k in R.e if k not in std)


@dataclass
class RTTReport:
    ok: bool
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"pass": self.ok, "failures": self.failures}


def rtt_check(R: RMatrix | Mat, rep: Representation, conj: tuple[Mat, Mat] | None = None) -> RTTReport:
    """Check that P R commutes with the (optionally conjugated) coproduct action."""
    Rm = R.R if isinstance(R, RMatrix) else R
    P = flip(rep.n)
    Rh = P @ Rm
    fails = []
    T = rep.tensor(2)
    for a in range(rep.rank):
        for name, g in ((f"E{a + 1}", T.E[a]), (f"F{a + 1}", T.F[a])):
            if conj is not None:
                g = conj[0] @ g @ conj[1]
            diff = (Rh @ g).first_difference(g @ Rh)
            if diff is not None:
                i, j, x, y = diff
                fails.append({"generator": name, "row": i, "col": j, "lhs": str(x), "rhs": str(y)})
    return RTTReport(not fails, fails)


@dataclass
class BraidReport:
    qybe: bool
    braid: bool
    min_poly_degree: int
    standard_support: bool
    outside: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return self.qybe and self.braid and self.min_poly_degree == 2

    def to_json(self) -> dict:
        return {
            "qybe": self.qybe,
            "braid": self.braid,
            "min_poly_degree": self.min_poly_degree,
            "standard_support": self.standard_support,
            "outside_standard": [list(p) for p in self.outside],
        }


def verify_R(R: RMatrix) -> BraidReport:
    n = R.n
    outside = support_outside_standard(R.R, n)
    return BraidReport(
        qybe=qybe_holds(R.R, n),
        braid=braid_relation_holds(R.braid, n),
        min_poly_degree=min_poly_degree(R.braid),
        standard_support=not outside,
        outside=outside,
    )


def dumps_R(R: RMatrix) -> str:
    return json.dumps(R.to_json(), sort_keys=True)

