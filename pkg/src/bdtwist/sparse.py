"""Small exact sparse square matrices with :class:`Frac` entries."""
from __future__ import annotations

from typing import Callable, Iterable

from bdtwist import linalg
from bdtwist.scalar import FONE, FZERO, Frac


class Mat:
    __slots__ = ("n", "e")

    def __init__(self, n: int, entries: dict | Iterable = ()):
        self.n = n
        items = entries.items() if isinstance(entries, dict) else entries
        e: dict[tuple[int, int], Frac] = {}
        for (i, j), v in items:
            v = Frac.of(v)
            if v:
                e[i, j] = v
        self.e = e

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, {(i, i): FONE for i in range(n)})

    @classmethod
    def diagonal(cls, vals) -> "Mat":
        vals = list(vals)
        return cls(len(vals), {(i, i): v for i, v in enumerate(vals)})

    @classmethod
    def permutation(cls, perm: list[int]) -> "Mat":
        """Matrix sending basis vector j to basis vector perm[j]."""
        return cls(len(perm), {(perm[j], j): FONE for j in range(len(perm))})

    def __getitem__(self, ij) -> Frac:
        return self.e.get(ij, FZERO)

    def __add__(self, other: "Mat") -> "Mat":
        out = dict(self.e)
        for k, v in other.e.items():
            out[k] = out.get(k, FZERO) + v
        return Mat(self.n, out)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + other.scale(-FONE)

    def __neg__(self) -> "Mat":
        return self.scale(-FONE)

    def scale(self, c) -> "Mat":
        c = Frac.of(c)
        return Mat(self.n, {k: v * c for k, v in self.e.items()})

    def __matmul__(self, other: "Mat") -> "Mat":
        rows: dict[int, list[tuple[int, Frac]]] = {}
        for (k, j), v in other.e.items():
            rows.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], Frac] = {}
        for (i, k), a in self.e.items():
            for j, b in rows.get(k, ()):
                key = (i, j)
                out[key] = out.get(key, FZERO) + a * b
        m = Mat(self.n)
        m.e = {k: v for k, v in out.items() if v}
        return m

    def kron(self, other: "Mat") -> "Mat":
        m = other.n
        out = {}
        for (i, k), a in self.e.items():
            for (j, l), b in other.e.items():
                out[i * m + j, k * m + l] = a * b
        return Mat(self.n * m, out)

    def transpose(self) -> "Mat":
        return Mat(self.n, {(j, i): v for (i, j), v in self.e.items()})

    def map(self, f: Callable[[Frac], Frac]) -> "Mat":
        return Mat(self.n, {k: f(v) for k, v in self.e.items()})

    def __eq__(self, other):
        return isinstance(other, Mat) and self.n == other.n and self.e == other.e

    def __hash__(self):
        return hash((self.n, frozenset(self.e.items())))

    def is_zero(self) -> bool:
        return not self.e

    def support(self) -> set[tuple[int, int]]:
        return set(self.e)

    def first_difference(self, other: "Mat"):
        """(i, j, self[i,j], other[i,j]) at the first differing position, or None."""
        for k in sorted(set(self.e) | set(other.e)):
            if self[k] != other[k]:
                return (k[0], k[1], self[k], other[k])
        return None

    def dense(self) -> list[list[Frac]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def inverse(self) -> "Mat":
        inv = linalg.inverse(self.dense(), FZERO, FONE)
        return Mat(self.n, {(i, j): v for i, row in enumerate(inv) for j, v in enumerate(row)})

    def apply(self, vec: dict[int, Frac]) -> dict[int, Frac]:
        out: dict[int, Frac] = {}
        for (i, j), a in self.e.items():
            b = vec.get(j)
            if b:
                out[i] = out.get(i, FZERO) + a * b
        return {k: v for k, v in out.items() if v}

    def __repr__(self):
        return f"Mat(n={self.n}, nnz={len(self.e)})"


def flip(n: int, d: int = 2, i: int = 0) -> Mat:
    """Swap of tensor factors i and i+1 on (C^n)^(tensor d)."""
    perm = []
    for idx in range(n ** d):
        digits = list(multi_index(idx, n, d))
        digits[i], digits[i + 1] = digits[i + 1], digits[i]
        perm.append(flat_index(digits, n))
    return Mat.permutation(perm)


def multi_index(idx: int, n: int, d: int) -> tuple[int, ...]:
    out = []
    for _ in range(d):
        out.append(idx % n)
        idx //= n
    return tuple(reversed(out))


def flat_index(digits, n: int) -> int:
    idx = 0
    for x in digits:
        idx = idx * n + x
    return idx


def min_poly_degree(M: Mat) -> int:
    """Degree of the minimal polynomial of M."""
    powers = [Mat.identity(M.n)]
    while True:
        powers.append(powers[-1] @ M)
        keys = sorted(set().union(*(p.support() for p in powers)))
        rows = [[p[k] for k in keys] for p in powers]
        if linalg.rank(rows) < len(powers):
            return len(powers) - 1
