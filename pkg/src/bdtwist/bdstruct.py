"""Disjoint Belavin-Drinfeld triples and compatible alternating forms.

Simple roots are 0-based indices internally; the JSON forms use the 1-based
labels alpha_1, ..., alpha_r.

A :class:`CompatibleForm` stores the form as *presented* together with a
global sign ``s`` in {+1, -1}; every formula uses the effective form
``s * u``.  With ``s = +1`` the compatibility conditions are read literally;
``s = -1`` is the mirrored convention under which the SL(3) example reports
``u(alpha_1, alpha_2) = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Sequence

from bdtwist import linalg
from bdtwist.rootdata import Lattice, RootDatum, Weight


class DegenerateRestriction(ValueError):
    """u_- restricted to the span of a root subset is singular."""


class IncompatibleForm(ValueError):
    pass


@dataclass(frozen=True)
class BDTriple:
    """(tau, Pi_1, Pi_2): ``tau`` is stored as pairs sorted by source index."""

    tau: tuple[tuple[int, int], ...]

    @classmethod
    def from_map(cls, mapping: dict[int, int] | Iterable[tuple[int, int]]) -> "BDTriple":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple(sorted((int(a), int(b)) for a, b in items)))

    @classmethod
    def empty(cls) -> "BDTriple":
        return cls(())

    @property
    def pi1(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.tau)

    @property
    def pi2(self) -> tuple[int, ...]:
        return tuple(sorted(b for _, b in self.tau))

    @cached_property
    def _fwd(self) -> dict[int, int]:
        return dict(self.tau)

    @cached_property
    def _bwd(self) -> dict[int, int]:
        return {b: a for a, b in self.tau}

    def __call__(self, a: int) -> int:
        return self._fwd[a]

    def inverse(self, b: int) -> int:
        return self._bwd[b]

    def is_empty(self) -> bool:
        return not self.tau

    def map_weight(self, lam: Sequence, rank: int, inverse: bool = False) -> Weight:
        """Linear extension of tau (or tau^-1) on the span of Pi_1 (or Pi_2)."""
        m = self._bwd if inverse else self._fwd
        out = [Fraction(0)] * rank
        for i, c in enumerate(lam):
            if c:
                if i not in m:
                    raise ValueError(f"weight {lam} not supported on the domain of tau")
                out[m[i]] += c
        return Weight(out)

    def to_json(self) -> dict:
        return {
            "pi1": [a + 1 for a in self.pi1],
            "pi2": [b + 1 for b in self.pi2],
            "tau": {str(a + 1): b + 1 for a, b in self.tau},
        }

    @classmethod
    def from_json(cls, data: dict) -> "BDTriple":
        tau = {int(k) - 1: int(v) - 1 for k, v in data.get("tau", {}).items()}
        t = cls.from_map(tau)
        for key, got in (("pi1", t.pi1), ("pi2", t.pi2)):
            if key in data and sorted(int(x) - 1 for x in data[key]) != sorted(got):
                raise ValueError(f"{key} does not match tau")
        return t

    def __str__(self):
        if not self.tau:
            return "(empty triple)"
        return ", ".join(f"a{a + 1}->a{b + 1}" for a, b in self.tau)


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


def validate_triple(rd: RootDatum, t: BDTriple) -> ValidationReport:
    issues: list[str] = []
    r = rd.rank
    srcs = [a for a, _ in t.tau]
    tgts = [b for _, b in t.tau]
    for x in srcs + tgts:
        if not 0 <= x < r:
            issues.append(f"index out of range: {x + 1}")
    if len(set(tgts)) != len(tgts):
        issues.append("tau is not injective")
    overlap = sorted(set(srcs) & set(tgts))
    if overlap:
        issues.append("overlap: Pi_1 and Pi_2 share " + ", ".join(f"alpha_{i + 1}" for i in overlap))
    if not issues:
        for a in srcs:
            for b in srcs:
                if rd.inner(rd.simple_root(t(a)), rd.simple_root(t(b))) != rd.inner(rd.simple_root(a), rd.simple_root(b)):
                    issues.append(f"non-isometry at (alpha_{a + 1}, alpha_{b + 1})")
        # nilpotency: some power of tau leaves Pi_1
        for a in srcs:
            x, seen = a, set()
            while x in t._fwd and x not in seen:
                seen.add(x)
                x = t(x)
            if x in seen:
                issues.append(f"tau is not nilpotent on alpha_{a + 1}")
    return ValidationReport(not issues, issues)


def enumerate_disjoint(rd: RootDatum) -> list[BDTriple]:
    """All triples with disjoint nonempty Pi_1, Pi_2 and isometric tau.

    Order: by |Pi_1|, then Pi_1, then Pi_2, then the image tuple of tau.
    """
    r = rd.rank
    B = rd.gram
    out = []
    for k in range(1, r // 2 + 1):
        for p1 in combinations(range(r), k):
            rest = [i for i in range(r) if i not in p1]
            for p2 in combinations(rest, k):
                for img in permutations(p2):
                    # extend tau one root at a time, pruning on isometry
                    if all(B[img[i]][img[j]] == B[p1[i]][p1[j]] for i in range(k) for j in range(i, k)):
                        out.append(BDTriple(tuple(zip(p1, img))))
    return out


# compatible forms -------------------------------------------------------------

def _zero_matrix(r: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * r for _ in range(r)]


@dataclass
class CompatibleSpace:
    """Affine space ``particular + span(basis)`` of presented forms (antisymmetric matrices)."""

    particular: list[list[Fraction]]
    basis: list[list[list[Fraction]]]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def point(self, coeffs: Sequence = ()) -> list[list[Fraction]]:
        M = [row[:] for row in self.particular]
        for c, Bm in zip(coeffs, self.basis):
            c = Fraction(c)
            for i, row in enumerate(Bm):
                for j, x in enumerate(row):
                    M[i][j] += c * x
        return M

    def to_json(self) -> dict:
        enc = lambda M: [[str(x) for x in row] for row in M]  # noqa: E731
        return {"particular": enc(self.particular), "basis": [enc(b) for b in self.basis], "dim": self.dim}


def solve_compatible(rd: RootDatum, t: BDTriple, sign: int = 1) -> CompatibleSpace | None:
    """All presented u with ``sign * u`` compatible with ``t``; None if there are none.

    Unknowns are u(alpha_i, alpha_j) for i < j.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    r = rd.rank
    idx = {(i, j): k for k, (i, j) in enumerate((i, j) for i in range(r) for j in range(i + 1, r))}
    nvar = len(idx)

    def form(a: int, b: int) -> list[Fraction]:
        v = [Fraction(0)] * nvar
        if a < b:
            v[idx[a, b]] = Fraction(1)
        elif a > b:
            v[idx[b, a]] = Fraction(-1)
        return v

    rows, rhs = [], []
    for a in t.pi1:
        for b in t.pi1:
            # u(tau a, tau b) = u(a, b)
            rows.append([x - y for x, y in zip(form(t(a), t(b)), form(a, b))])
            rhs.append(Fraction(0))
            # u_+(a, tau b) = 0 for the effective form
            rows.append([sign * x for x in form(a, t(b))])
            rhs.append(-rd.inner(rd.simple_root(a), rd.simple_root(t(b))))

    def to_matrix(v: Sequence[Fraction]) -> list[list[Fraction]]:
        M = _zero_matrix(r)
        for (i, j), k in idx.items():
            M[i][j] = v[k]
            M[j][i] = -v[k]
        return M

    if nvar == 0:
        if any(rhs):
            return None
        return CompatibleSpace(_zero_matrix(r), [])
    if rows:
        x = linalg.solve(rows, rhs)
        if x is None:
            return None
        null = linalg.nullspace(rows)
    else:
        x = [Fraction(0)] * nvar
        null = linalg.nullspace([[Fraction(0)] * nvar])
    return CompatibleSpace(to_matrix(x), [to_matrix(v) for v in null])


class CompatibleForm:
    """An alternating form u on QPhi with its derived maps.

    ``u`` is the presented matrix ``u[i][j] = u(alpha_i, alpha_j)``; all
    formulas use ``sign * u``.
    """

    def __init__(self, rd: RootDatum, u: Sequence[Sequence] | None = None, sign: int = 1):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        r = rd.rank
        U = _zero_matrix(r) if u is None else [[Fraction(x) for x in row] for row in u]
        if len(U) != r or any(len(row) != r for row in U):
            raise ValueError("u has the wrong shape")
        for i in range(r):
            for j in range(r):
                if U[i][j] != -U[j][i]:
                    raise ValueError("u is not alternating")
        self.rd = rd
        self.sign = sign
        self.presented = tuple(tuple(row) for row in U)
        self.U = tuple(tuple(sign * x for x in row) for row in U)
        B = rd.gram
        self.Uplus = tuple(tuple(self.U[i][j] + B[i][j] for j in range(r)) for i in range(r))
        self.Uminus = tuple(tuple(self.U[i][j] - B[i][j] for j in range(r)) for i in range(r))

    @classmethod
    def zero(cls, rd: RootDatum) -> "CompatibleForm":
        return cls(rd, None, 1)

    @property
    def rank(self) -> int:
        return self.rd.rank

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.U)

    # forms -----------------------------------------------------------------
    @staticmethod
    def _bil(M, lam, mu) -> Fraction:
        s = Fraction(0)
        for i, a in enumerate(lam):
            if a:
                row = M[i]
                for j, b in enumerate(mu):
                    if b:
                        s += a * row[j] * b
        return s

    def u(self, lam, mu) -> Fraction:
        return self._bil(self.U, lam, mu)

    def uplus(self, lam, mu) -> Fraction:
        return self._bil(self.Uplus, lam, mu)

    def uminus(self, lam, mu) -> Fraction:
        return self._bil(self.Uminus, lam, mu)

    def u_forms(self, lam, mu) -> dict[str, Fraction]:
        return {"u": self.u(lam, mu), "u+": self.uplus(lam, mu), "u-": self.uminus(lam, mu)}

    def p_exponent(self, kind: str, lam, mu) -> Fraction:
        """q-exponent of p, p_+ or p_- at (lam, mu)."""
        if kind == "p":
            return self.u(lam, mu) / 2
        if kind in ("p+", "p_+", "plus"):
            return self.uplus(lam, mu)
        if kind in ("p-", "p_-", "minus"):
            return self.uminus(lam, mu)
        raise ValueError(f"unknown bicharacter {kind!r}")

    # phi and tilde -----------------------------------------------------------
    @cached_property
    def phi(self) -> list[list[Fraction]]:
        # u(lam, mu) = (phi lam, mu)  =>  B phi = U^T
        Binv = linalg.inverse([list(r) for r in self.rd.gram])
        Ut = linalg.transpose(self.U)
        return linalg.matmul(Binv, Ut)

    @cached_property
    def tilde_matrix(self) -> list[list[Fraction]]:
        r = self.rank
        phi = self.phi
        ph_plus = [[phi[i][j] + (1 if i == j else 0) for j in range(r)] for i in range(r)]
        ph_minus = [[phi[i][j] - (1 if i == j else 0) for j in range(r)] for i in range(r)]
        T = linalg.matmul(linalg.inverse(ph_plus), ph_minus)
        return [[-x for x in row] for row in T]

    @cached_property
    def tilde_inverse_matrix(self) -> list[list[Fraction]]:
        return linalg.inverse(self.tilde_matrix)

    def tilde(self, lam) -> Weight:
        return Weight(linalg.matvec(self.tilde_matrix, list(lam)))

    def tilde_inverse(self, lam) -> Weight:
        return Weight(linalg.matvec(self.tilde_inverse_matrix, list(lam)))

    # projections ------------------------------------------------------------
    def _restricted(self, subset: Sequence[int]):
        S = list(subset)
        M = [[self.Uminus[a][b] for b in S] for a in S]
        if S and linalg.det(M) == 0:
            raise DegenerateRestriction(f"u_- is degenerate on span{{alpha_{[a + 1 for a in S]}}}")
        return S, M

    def project(self, subset: Sequence[int], side: str, lam) -> Weight:
        """pi^+ (side '+') or pi^- (side '-') of lam onto the span of ``subset``.

        pi^+: u_-(pi^+ lam, mu) = u_-(lam, mu);  pi^-: u_-(mu, pi^- lam) = u_-(mu, lam)
        for all mu in the span.
        """
        S, M = self._restricted(subset)
        r = self.rank
        if not S:
            return Weight.zero(r)
        if side == "+":
            A = linalg.transpose(M)
            rhs = [self.uminus(lam, self.rd.simple_root(b)) for b in S]
        elif side == "-":
            A = M
            rhs = [self.uminus(self.rd.simple_root(b), lam) for b in S]
        else:
            raise ValueError("side must be '+' or '-'")
        t = linalg.solve(A, rhs)
        out = [Fraction(0)] * r
        for a, c in zip(S, t):
            out[a] = c
        return Weight(out)

    def projected_lattice(self, subset: Sequence[int], side: str, omega: Lattice) -> Lattice:
        return Lattice.from_generators([self.project(subset, side, b) for b in omega.basis], self.rank)

    # compatibility ----------------------------------------------------------
    def violations(self, t: BDTriple) -> list[str]:
        out = []
        rd = self.rd
        for a in t.pi1:
            for b in t.pi1:
                ea, eb = rd.simple_root(a), rd.simple_root(b)
                ta, tb = rd.simple_root(t(a)), rd.simple_root(t(b))
                if self.u(ta, tb) != self.u(ea, eb):
                    out.append(f"u(tau a{a + 1}, tau a{b + 1}) != u(a{a + 1}, a{b + 1})")
                if self.uplus(ea, tb) != 0:
                    out.append(f"u_+(a{a + 1}, tau a{b + 1}) = {self.uplus(ea, tb)} != 0")
        return out

    def is_compatible(self, t: BDTriple) -> bool:
        return not self.violations(t)

    def to_json(self) -> dict:
        return {"u": [[str(x) for x in row] for row in self.presented], "sign": self.sign}


def sublattice_L(cf: CompatibleForm, t: BDTriple, i: int, omega: Lattice) -> tuple[Lattice, Lattice]:
    """(L_i, pi_i^+(omega)) where L_i = pi_i^-(omega) and Pi_i is Pi_1 or Pi_2."""
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    S = t.pi1 if i == 1 else t.pi2
    return cf.projected_lattice(S, "-", omega), cf.projected_lattice(S, "+", omega)
