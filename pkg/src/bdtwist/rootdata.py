"""Finite root data, the invariant form, and rational lattices.

Weights are stored in simple-root coordinates throughout, so the invariant
form is ``lam^T B mu`` with ``B[i][j] = (alpha_i, alpha_j)`` and every
bilinear-form computation downstream is plain rational matrix arithmetic.
Short roots have squared length 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct
from math import gcd
from typing import Iterable, Sequence

from bdtwist import linalg


class RootDataError(ValueError):
    pass


class Weight(tuple):
    """Rational coordinate vector over the simple-root basis."""

    def __new__(cls, coords: Iterable = ()):
        return super().__new__(cls, (Fraction(c) for c in coords))

    @classmethod
    def zero(cls, rank: int) -> "Weight":
        return cls([0] * rank)

    @classmethod
    def unit(cls, rank: int, i: int) -> "Weight":
        return cls([1 if j == i else 0 for j in range(rank)])

    def __add__(self, other):
        return Weight(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return Weight(a - b for a, b in zip(self, other))

    def __neg__(self):
        return Weight(-a for a in self)

    def __mul__(self, k):
        k = Fraction(k)
        return Weight(a * k for a in self)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self) if c)

    def height(self) -> Fraction:
        return sum(self, Fraction(0))

    def __repr__(self):
        return "Weight(" + ", ".join(str(c) for c in self) + ")"


def _gram_for(kind: str, n: int) -> list[list[int]]:
    kind = kind.upper()
    B = [[0] * n for _ in range(n)]

    def link(i, j, v):
        B[i][j] = B[j][i] = v

    if kind == "A":
        if n < 1:
            raise RootDataError("A_n needs n >= 1")
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 1):
            link(i, i + 1, -1)
    elif kind == "B":
        if n < 2:
            raise RootDataError("B_n needs n >= 2")
        for i in range(n - 1):
            B[i][i] = 4
        B[n - 1][n - 1] = 2
        for i in range(n - 1):
            link(i, i + 1, -2)
    elif kind == "C":
        if n < 2:
            raise RootDataError("C_n needs n >= 2")
        for i in range(n - 1):
            B[i][i] = 2
        B[n - 1][n - 1] = 4
        for i in range(n - 2):
            link(i, i + 1, -1)
        link(n - 2, n - 1, -2)
    elif kind == "D":
        if n < 4:
            raise RootDataError("D_n needs n >= 4")
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 2):
            link(i, i + 1, -1)
        link(n - 3, n - 1, -1)
    elif kind == "E":
        if n not in (6, 7, 8):
            raise RootDataError("E_n needs n in {6, 7, 8}")
        for i in range(n):
            B[i][i] = 2
        # Bourbaki labelling: 1-3-4-5-6-7-8 with 2 attached to 4
        link(0, 2, -1)
        link(1, 3, -1)
        for i in range(2, n - 1):
            link(i, i + 1, -1)
    elif kind == "F":
        if n != 4:
            raise RootDataError("F_n needs n = 4")
        B[0][0] = B[1][1] = 4
        B[2][2] = B[3][3] = 2
        link(0, 1, -2)
        link(1, 2, -2)
        link(2, 3, -1)
    elif kind == "G":
        if n != 2:
            raise RootDataError("G_n needs n = 2")
        B[0][0], B[1][1] = 2, 6
        link(0, 1, -3)
    else:
        raise RootDataError(f"unknown Cartan type {kind!r}")
    return B


@dataclass(frozen=True)
class RootDatum:
    """Cartan data of a finite root system.

    ``gram[i][j] = (alpha_i, alpha_j) = d_i * a_ij`` is the symmetrised form.
    """

    label: str
    cartan: tuple[tuple[int, ...], ...]
    symmetrizers: tuple[Fraction, ...]
    gram: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @classmethod
    def from_gram(cls, B: Sequence[Sequence], label: str = "") -> "RootDatum":
        n = len(B)
        G = tuple(tuple(Fraction(x) for x in row) for row in B)
        cartan = []
        for i in range(n):
            row = []
            for j in range(n):
                a = 2 * G[i][j] / G[i][i]
                if a.denominator != 1:
                    raise RootDataError("form does not give an integral Cartan matrix")
                row.append(int(a))
            cartan.append(tuple(row))
        rd = cls(label, tuple(cartan), tuple(G[i][i] / 2 for i in range(n)), G)
        rd.validate()
        return rd

    @classmethod
    def from_cartan(cls, A: Sequence[Sequence[int]], label: str = "") -> "RootDatum":
        """Symmetrise a Cartan matrix; each component is scaled so its short roots have d = 1."""
        n = len(A)
        d: list[Fraction | None] = [None] * n
        for start in range(n):
            if d[start] is not None:
                continue
            comp = [start]
            d[start] = Fraction(1)
            stack = [start]
            while stack:
                i = stack.pop()
                for j in range(n):
                    if j != i and A[i][j] != 0:
                        if A[j][i] == 0:
                            raise RootDataError("Cartan matrix is not symmetrisable")
                        dj = d[i] * Fraction(A[i][j], A[j][i])
                        if d[j] is None:
                            d[j] = dj
                            comp.append(j)
                            stack.append(j)
                        elif d[j] != dj:
                            raise RootDataError("Cartan matrix is not symmetrisable")
            m = min(d[i] for i in comp)
            for i in comp:
                d[i] = d[i] / m
        B = [[d[i] * A[i][j] for j in range(n)] for i in range(n)]
        return cls.from_gram(B, label)

    def validate(self) -> None:
        n = self.rank
        for i in range(n):
            if self.cartan[i][i] != 2:
                raise RootDataError("Cartan diagonal must be 2")
            for j in range(n):
                if i != j and self.cartan[i][j] > 0:
                    raise RootDataError("Cartan off-diagonal entries must be <= 0")
                if (self.cartan[i][j] == 0) != (self.cartan[j][i] == 0):
                    raise RootDataError("Cartan zero pattern must be symmetric")
                if self.gram[i][j] != self.gram[j][i]:
                    raise RootDataError("symmetrised form is not symmetric")
        # finite type <=> symmetrised form positive definite
        for k in range(1, n + 1):
            minor = [list(r[:k]) for r in self.gram[:k]]
            if linalg.det(minor) <= 0:
                raise RootDataError("Cartan matrix is not of finite type")

    # forms ------------------------------------------------------------------
    def simple_root(self, i: int) -> Weight:
        return Weight.unit(self.rank, i)

    def simple_roots(self) -> list[Weight]:
        return [self.simple_root(i) for i in range(self.rank)]

    def inner(self, lam: Sequence, mu: Sequence) -> Fraction:
        G = self.gram
        s = Fraction(0)
        for i, a in enumerate(lam):
            if a:
                row = G[i]
                for j, b in enumerate(mu):
                    if b:
                        s += a * row[j] * b
        return s

    def q_exponent(self, i: int) -> Fraction:
        """d_i = (alpha_i, alpha_i)/2, so q_alpha_i = q^d_i."""
        return self.symmetrizers[i]

    def reflect(self, i: int, lam: Sequence) -> Weight:
        a = self.simple_root(i)
        c = 2 * self.inner(lam, a) / self.gram[i][i]
        return Weight(lam) - a * c

    @cached_property
    def _gram_inverse(self):
        return linalg.inverse([list(r) for r in self.gram])

    def fundamental_weights(self) -> list[Weight]:
        """varpi_i with 2(varpi_i, alpha_j)/(alpha_j, alpha_j) = delta_ij."""
        Binv = self._gram_inverse
        out = []
        for i in range(self.rank):
            d = self.symmetrizers[i]
            out.append(Weight(Binv[k][i] * d for k in range(self.rank)))
        return out

    @cached_property
    def positive_roots(self) -> tuple[Weight, ...]:
        """Positive roots sorted by height, by closure under adding simple roots."""
        n = self.rank
        roots = {self.simple_root(i) for i in range(n)}
        layer = sorted(roots)
        while layer:
            nxt = set()
            for beta in layer:
                for i in range(n):
                    a = self.simple_root(i)
                    if beta == a:
                        continue
                    p = 0
                    while (beta - a * (p + 1)) in roots:
                        p += 1
                    pairing = 2 * self.inner(beta, a) / self.gram[i][i]
                    if p - pairing > 0:
                        nxt.add(beta + a)
            nxt -= roots
            roots |= nxt
            layer = sorted(nxt)
        return tuple(sorted(roots, key=lambda r: (r.height(), tuple(-c for c in r))))

    def root_lattice(self) -> "Lattice":
        return Lattice.from_generators(self.simple_roots(), self.rank)

    def weight_lattice(self) -> "Lattice":
        return Lattice.from_generators(self.fundamental_weights(), self.rank)

    def to_json(self) -> dict:
        lab = self.label
        if len(lab) >= 2 and lab[0].isalpha() and lab[1:].isdigit():
            return {"type": lab[0], "rank": self.rank}
        return {"type": lab, "rank": self.rank}


def build(kind: str, rank: int) -> RootDatum:
    """Root datum of finite type A-G in Bourbaki labelling."""
    if not isinstance(rank, int) or rank < 1:
        raise RootDataError(f"invalid rank {rank!r}")
    return RootDatum.from_gram(_gram_for(kind, rank), f"{kind.upper()}{rank}")


def product(*parts: RootDatum) -> RootDatum:
    """Orthogonal direct sum (block-diagonal Cartan data)."""
    n = sum(p.rank for p in parts)
    B = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                B[off + i][off + j] = p.gram[i][j]
        off += p.rank
    return RootDatum.from_gram(B, "x".join(p.label for p in parts))


def parse_type(text: str) -> RootDatum:
    """``"A2"`` or a product such as ``"A2xA2"``."""
    parts = []
    for token in text.replace("×", "x").split("x"):
        token = token.strip()
        if len(token) < 2 or not token[1:].isdigit():
            raise RootDataError(f"bad root datum {text!r}")
        parts.append(build(token[0], int(token[1:])))
    return parts[0] if len(parts) == 1 else product(*parts)


# lattices ---------------------------------------------------------------------

def _hnf_int(rows: list[list[int]], ncols: int) -> list[list[int]]:
    A = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(ncols):
        if r >= len(A):
            break
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            clean = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    f = A[i][c] // A[r][c]
                    A[i] = [a - f * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            f = A[i][c] // A[r][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    return [row for row in A[:r] if any(row)]


class Lattice:
    """Finitely generated subgroup of Q^rank with a Hermite-normal-form basis.

    The basis is canonical (upper triangular, positive pivots, entries above
    each pivot reduced into [0, pivot)), so equality is basis equality.
    """

    __slots__ = ("rank", "basis")

    def __init__(self, basis: Sequence[Sequence], rank: int):
        self.rank = rank
        self.basis = tuple(Weight(b) for b in basis)

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence], rank: int) -> "Lattice":
        gens = [Weight(g) for g in gens]
        if not gens:
            return cls([], rank)
        den = 1
        for g in gens:
            for c in g:
                den = den * c.denominator // gcd(den, c.denominator)
        rows = [[int(c * den) for c in g] for g in gens]
        hnf = _hnf_int(rows, rank)
        return cls([[Fraction(x, den) for x in row] for row in hnf], rank)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __contains__(self, v: Sequence) -> bool:
        v = list(Weight(v))
        for b in self.basis:
            c = next(i for i, x in enumerate(b) if x)
            k = v[c] / b[c]
            if k.denominator != 1:
                return False
            v = [x - k * y for x, y in zip(v, b)]
        return not any(v)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(b in self for b in other.basis)

    def index_of(self, sub: "Lattice") -> Fraction:
        """[self : sub] for full-rank lattices (covolume ratio)."""
        if self.dimension != self.rank or sub.dimension != sub.rank:
            raise RootDataError("index needs full-rank lattices")
        return abs(linalg.det([list(b) for b in sub.basis]) / linalg.det([list(b) for b in self.basis]))

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.rank == other.rank and self.basis == other.basis

    def __hash__(self):
        return hash((self.rank, self.basis))

    def __repr__(self):
        return f"Lattice({[list(map(str, b)) for b in self.basis]})"

    def to_json(self) -> list[list[str]]:
        return [[str(c) for c in b] for b in self.basis]

    @classmethod
    def from_json(cls, data, rank: int) -> "Lattice":
        return cls.from_generators([[Fraction(c) for c in row] for row in data], rank)


def lattice_from_generators(gens: Iterable[Sequence], rank: int) -> Lattice:
    return Lattice.from_generators(gens, rank)


def enumerate_box(rank: int, bound: int) -> Iterable[Weight]:
    """All integer weights with coordinates in [-bound, bound] (test helper)."""
    for c in iproduct(range(-bound, bound + 1), repeat=rank):
        yield Weight(c)
