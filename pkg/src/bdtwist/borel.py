"""Borel halves U_p(b+) and U_p(b-) as free word algebras with a skew pairing.

An element is a finite combination of monomials ``X_w K`` where ``w`` is a
word of simple-root indices and ``K`` a toral index:

* ``+`` side: ``E_w K_{lam~}``; the stored label is the untilded ``lam``.
* ``-`` side: ``F_w K_mu``; the stored label is ``mu``.

Elements are never rewritten modulo the Serre relations.  Two elements are
equal in the quotient iff they pair identically with every opposite word of
their weight, which is what :func:`gram` and the theta maps use.

Pairing axioms (checked against the E-F commutator by
:func:`calibrate_pairing`)::

    <x | y y'> = sum <x_1 | y> <x_2 | y'>
    <x x' | y> = sum <x | y_2> <x' | y_1>
    <x K_{lam~} | y K_mu> = q^{u_-(lam, mu)} <x | y>
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from bdtwist import linalg
from bdtwist.bdstruct import BDTriple, CompatibleForm
from bdtwist.rootdata import Lattice, RootDatum, Weight
from bdtwist.scalar import FONE, FZERO, ONE, ZERO, Frac, Scalar, qbinom, qpow

DEFAULT_HEIGHT_CAP = 6

Word = tuple[int, ...]
Key = tuple[Word, Weight]


class LatticeViolation(ValueError):
    pass


class CalibrationFailed(RuntimeError):
    pass


class HeightCapExceeded(ValueError):
    pass


class NotInImage(ValueError):
    pass


class AmbiguousToral(ValueError):
    pass


class UnsupportedLetters(ValueError):
    pass


def word_weight(w: Word, rank: int) -> Weight:
    c = [0] * rank
    for a in w:
        c[a] += 1
    return Weight(c)


def words_of_weight(nu: Sequence) -> list[Word]:
    """Distinct words with letter multiset ``nu``, in lexicographic order."""
    counts = [int(x) for x in nu]
    if any(Fraction(x) != c or c < 0 for x, c in zip(nu, counts)):
        raise ValueError(f"{nu} is not in Z+Pi")
    total = sum(counts)
    out: list[Word] = []
    cur: list[int] = []

    def rec():
        if len(cur) == total:
            out.append(tuple(cur))
            return
        for a, c in enumerate(counts):
            if c:
                counts[a] -= 1
                cur.append(a)
                rec()
                cur.pop()
                counts[a] += 1

    rec()
    return out


class FreeElement:
    """Finite combination of ``(word, label) -> Frac`` on one side."""

    __slots__ = ("side", "terms", "rank")

    def __init__(self, side: str, terms: dict | Iterable = (), rank: int | None = None,
                 lattice: Lattice | None = None):
        if side not in ("+", "-"):
            raise ValueError("side must be '+' or '-'")
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[Key, Frac] = {}
        for (w, lab), c in items:
            key = (tuple(w), Weight(lab))
            v = acc.get(key, FZERO) + Frac.of(c)
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
        if rank is None:
            rank = len(next(iter(acc))[1]) if acc else 0
        if lattice is not None:
            for _, lab in acc:
                if lab not in lattice:
                    raise LatticeViolation(f"K-index {lab} is not in {lattice}")
        self.side = side
        self.terms = acc
        self.rank = rank

    @classmethod
    def generator(cls, side: str, a: int, rank: int) -> "FreeElement":
        return cls(side, {((a,), Weight.zero(rank)): FONE}, rank)

    @classmethod
    def word(cls, side: str, w: Sequence[int], rank: int, label=None, coeff=FONE) -> "FreeElement":
        lab = Weight.zero(rank) if label is None else Weight(label)
        return cls(side, {(tuple(w), lab): coeff}, rank)

    @classmethod
    def toral(cls, side: str, label, rank: int | None = None) -> "FreeElement":
        lab = Weight(label)
        return cls(side, {((), lab): FONE}, rank or len(lab))

    @classmethod
    def one(cls, side: str, rank: int) -> "FreeElement":
        return cls.toral(side, Weight.zero(rank), rank)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FreeElement") -> "FreeElement":
        self._same_side(other)
        return FreeElement(self.side, list(self.terms.items()) + list(other.terms.items()), self.rank)

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return self + other.scale(-FONE)

    def scale(self, c) -> "FreeElement":
        c = Frac.of(c)
        return FreeElement(self.side, {k: v * c for k, v in self.terms.items()}, self.rank)

    def _same_side(self, other):
        if other.side != self.side:
            raise ValueError("elements live on different sides")

    def weights(self) -> set[Weight]:
        return {word_weight(w, self.rank) for w, _ in self.terms}

    def letters(self) -> set[int]:
        return {a for w, _ in self.terms for a in w}

    def counit(self) -> Frac:
        return sum((c for (w, _), c in self.terms.items() if not w), FZERO)

    def __eq__(self, other):
        return isinstance(other, FreeElement) and self.side == other.side and self.terms == other.terms

    def __hash__(self):
        return hash((self.side, frozenset(self.terms.items())))

    def __repr__(self):
        sym = "E" if self.side == "+" else "F"
        parts = []
        for (w, lab), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], tuple(kv[0][1]))):
            mono = "".join(f"{sym}{a + 1}" for a in w) or "1"
            if not lab.is_zero():
                mono += f"K[{lab}]"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts) or "0"


@dataclass
class GramData:
    nu: Weight
    words: list[Word]
    laurent: list[list[Scalar]]
    scale: Frac
    plus_normal: list[int]
    minus_normal: list[int]

    @property
    def rank(self) -> int:
        return len(self.plus_normal)

    def entry(self, i: int, j: int) -> Frac:
        return self.scale * self.laurent[i][j]

    @cached_property
    def matrix(self) -> list[list[Frac]]:
        return [[self.entry(i, j) for j in range(len(self.words))] for i in range(len(self.words))]

    @cached_property
    def reduced(self) -> list[list[Frac]]:
        return [[self.entry(i, j) for j in self.minus_normal] for i in self.plus_normal]

    @cached_property
    def reduced_inverse(self) -> list[list[Frac]]:
        """Inverse of the reduced Gram matrix (rows: minus normal words)."""
        return linalg.inverse(self.reduced, FZERO, FONE)

    def to_json(self) -> dict:
        return {
            "nu": [str(x) for x in self.nu],
            "words": [[a + 1 for a in w] for w in self.words],
            "scale": self.scale.to_json(),
            "laurent": [[x.to_json() for x in row] for row in self.laurent],
            "plus_normal": [[a + 1 for a in self.words[i]] for i in self.plus_normal],
            "minus_normal": [[a + 1 for a in self.words[j]] for j in self.minus_normal],
        }


def _bareiss_pivots(M: list[list[Scalar]]) -> tuple[list[int], list[int]]:
    """Fraction-free echelon form; returns (independent rows, pivot columns)."""
    A = [list(r) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    order = list(range(rows))
    prev = ONE
    r = 0
    pcols = []
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        order[r], order[p] = order[p], order[r]
        piv = A[r][c]
        for i in range(r + 1, rows):
            a_ic = A[i][c]
            new = []
            for j in range(cols):
                if j <= c:
                    new.append(ZERO)
                    continue
                v = piv * A[i][j] - a_ic * A[r][j]
                new.append(v.divexact(prev) if v else ZERO)
            A[i] = new
        prev = piv
        pcols.append(c)
        r += 1
        if r == rows:
            break
    return sorted(order[:r]), pcols


class Borel:
    """Pairing, coproducts and Gram data for a root datum with a compatible form."""

    def __init__(self, rd: RootDatum, cf: CompatibleForm, height_cap: int = DEFAULT_HEIGHT_CAP,
                 constants: dict[int, Frac] | None = None):
        if cf.rd is not rd and cf.rd.gram != rd.gram:
            raise ValueError("form and root datum disagree")
        self.rd = rd
        self.cf = cf
        self.height_cap = height_cap
        self.rank = rd.rank
        self._um = cf.Uminus
        self._up = cf.Uplus
        self._laurent_memo: dict[tuple[Word, Word], Scalar] = {}
        self._gram_memo: dict[Weight, GramData] = {}
        self.constants = dict(constants) if constants is not None else calibrate_pairing(rd, cf)

    # bicharacter helpers --------------------------------------------------------
    def _um_word(self, lam, w: Word) -> Fraction:
        """u_-(lam, wt w)"""
        s = Fraction(0)
        for b in w:
            for i, x in enumerate(lam):
                if x:
                    s += x * self._um[i][b]
        return s

    def _up_word(self, lam, w: Word) -> Fraction:
        s = Fraction(0)
        for b in w:
            for i, x in enumerate(lam):
                if x:
                    s += x * self._up[i][b]
        return s

    # algebra ----------------------------------------------------------------
    def multiply(self, x: FreeElement, y: FreeElement) -> FreeElement:
        x._same_side(y)
        out = []
        for (w, lam), c in x.terms.items():
            for (v, mu), d in y.terms.items():
                if x.side == "+":
                    e = -self._um_word(lam, v)
                else:
                    e = -self._up_word(lam, v)
                out.append(((w + v, lam + mu), c * d * qpow(e)))
        return FreeElement(x.side, out, self.rank)

    def coproduct_word(self, side: str, w: Word, lab: Weight) -> list[tuple[Key, Key, Scalar]]:
        r = self.rank
        n = len(w)
        out = []
        for mask in range(1 << n):
            S = [i for i in range(n) if mask >> i & 1]
            rest = [i for i in range(n) if not mask >> i & 1]
            e = Fraction(0)
            if side == "+":
                # positions in S send K_{w_i~} left; it passes E_{w_j} for j > i outside S
                for i in S:
                    for j in rest:
                        if j > i:
                            e -= self._um[w[i]][w[j]]
                left = (tuple(w[i] for i in rest), lab + word_weight(tuple(w[i] for i in S), r))
                right = (tuple(w[i] for i in S), lab)
            else:
                # positions in S go left as F, leaving K_{-w_i} on the right
                for i in S:
                    for j in rest:
                        if j > i:
                            e += self._up[w[i]][w[j]]
                left = (tuple(w[i] for i in S), lab)
                right = (tuple(w[i] for i in rest), lab - word_weight(tuple(w[i] for i in S), r))
            out.append((left, right, qpow(e)))
        return out

    def coproduct(self, x: FreeElement) -> list[tuple[FreeElement, FreeElement, Frac]]:
        """Delta(x) as a list of (left, right, coefficient) with collected terms."""
        acc: dict[tuple[Key, Key], Frac] = {}
        for (w, lab), c in x.terms.items():
            for left, right, s in self.coproduct_word(x.side, w, lab):
                k = (left, right)
                acc[k] = acc.get(k, FZERO) + c * s
        out = []
        for (left, right), c in sorted(acc.items(), key=lambda kv: (kv[0][0][0], tuple(kv[0][0][1]), kv[0][1][0], tuple(kv[0][1][1]))):
            if c:
                out.append((FreeElement(x.side, {left: FONE}, self.rank), FreeElement(x.side, {right: FONE}, self.rank), c))
        return out

    # pairing ----------------------------------------------------------------
    def word_pairing_laurent(self, w: Word, v: Word) -> Scalar:
        """<E_w | F_v> divided by prod c_alpha (a Laurent polynomial)."""
        if len(w) != len(v) or sorted(w) != sorted(v):
            return ZERO
        key = (w, v)
        hit = self._laurent_memo.get(key)
        if hit is not None:
            return hit
        if not w:
            return ONE
        beta, rest = v[0], v[1:]
        total = ZERO
        e = Fraction(0)
        for j, a in enumerate(w):
            if a == beta:
                sub = self.word_pairing_laurent(w[:j] + w[j + 1:], rest)
                if sub:
                    total = total + qpow(e) * sub
            e -= self._um[a][beta]
        self._laurent_memo[key] = total
        return total

    def constant_product(self, w: Word) -> Frac:
        out = FONE
        for a in w:
            out = out * self.constants[a]
        return out

    def word_pairing(self, w: Word, v: Word) -> Frac:
        L = self.word_pairing_laurent(tuple(w), tuple(v))
        if not L:
            return FZERO
        return self.constant_product(w) * L

    def pairing(self, x: FreeElement, y: FreeElement) -> Frac:
        if x.side != "+" or y.side != "-":
            raise ValueError("pairing takes a '+' element and a '-' element")
        total = FZERO
        for (w, lam), c in x.terms.items():
            for (v, mu), d in y.terms.items():
                p = self.word_pairing(w, v)
                if p:
                    total = total + c * d * p * qpow(self.cf.uminus(lam, mu))
        return total

    # Gram data --------------------------------------------------------------
    def gram(self, nu) -> GramData:
        nu = Weight(nu)
        hit = self._gram_memo.get(nu)
        if hit is not None:
            return hit
        h = sum(nu)
        if h > self.height_cap:
            raise HeightCapExceeded(f"height {h} exceeds cap {self.height_cap}")
        words = words_of_weight(nu)
        L = [[self.word_pairing_laurent(w, v) for v in words] for w in words]
        rows, cols = _bareiss_pivots(L) if words else ([], [])
        scale = self.constant_product(words[0]) if words else FONE
        g = GramData(nu, words, L, scale, rows, cols)
        self._gram_memo[nu] = g
        return g

    def dump_gram(self, weights: Iterable) -> str:
        return json.dumps({"grams": [self.gram(nu).to_json() for nu in weights]}, sort_keys=True)

    # Serre elements -----------------------------------------------------------
    def serre_element(self, a: int, b: int, side: str) -> FreeElement:
        if a == b:
            raise ValueError("Serre element needs distinct simple roots")
        m = 1 - self.rd.cartan[a][b]
        d = self.rd.q_exponent(a)
        ua = self.cf.u(self.rd.simple_root(a), self.rd.simple_root(b))
        zero = Weight.zero(self.rank)
        terms = []
        for k in range(m + 1):
            # p(a, b)^{-+2k} = q^{-+k u(a, b)}
            e = -k * ua if side == "+" else k * ua
            c = qbinom(m, k, d) * qpow(e)
            if k % 2:
                c = -c
            terms.append((((a,) * (m - k) + (b,) + (a,) * k, zero), Frac(c)))
        return FreeElement(side, terms, self.rank)

    def in_radical(self, x: FreeElement) -> bool:
        """True iff x pairs to zero with every opposite word of its weights."""
        for nu in x.weights():
            for v in words_of_weight(nu):
                if x.side == "+":
                    if self.pairing(x, FreeElement.word("-", v, self.rank)):
                        return False
                else:
                    if self.pairing(FreeElement.word("+", v, self.rank), x):
                        return False
        return True


# calibration ------------------------------------------------------------------

def _cross_relation_defect(bo: "_Probe", a: int, c: Frac) -> dict:
    """LHS - RHS of the double cross-relation sum x_1 y_1 <x_2|y_2> = sum <x_1|y_1> y_2 x_2
    for x = E_a, y = F_a, as a combination of normal monomials."""
    r = bo.rank
    x = FreeElement.generator("+", a, r)
    y = FreeElement.generator("-", a, r)

    def pair(k1: Key, k2: Key) -> Frac:
        (w, lam), (v, mu) = k1, k2
        L = bo.word_pairing_laurent(w, v)
        if not L:
            return FZERO
        return Frac.of(c) ** len(w) * L * qpow(bo.cf.uminus(lam, mu))

    def mono(*parts) -> tuple:
        out = []
        for kind, (w, lab) in parts:
            letter = "E" if kind == "+" else "F"
            out.extend((letter, i) for i in w)
            if not lab.is_zero():
                out.append(("Kt" if kind == "+" else "K", tuple(lab)))
        return tuple(out)

    acc: dict[tuple, Frac] = {}
    dx = bo.coproduct_word("+", *next(iter(x.terms)))
    dy = bo.coproduct_word("-", *next(iter(y.terms)))
    for x1, x2, cx in dx:
        for y1, y2, cy in dy:
            lhs = pair(x2, y2)
            if lhs:
                k = mono(("+", x1), ("-", y1))
                acc[k] = acc.get(k, FZERO) + cx * cy * lhs
            rhs = pair(x1, y1)
            if rhs:
                k = mono(("-", y2), ("+", x2))
                acc[k] = acc.get(k, FZERO) - cx * cy * rhs
    return {k: v for k, v in acc.items() if v}


class _Probe(Borel):
    """Borel without calibrated constants (only the Laurent part is used)."""

    def __init__(self, rd, cf):
        super().__init__(rd, cf, constants={})


def calibrate_pairing(rd: RootDatum, cf: CompatibleForm) -> dict[int, Frac]:
    """Per-root pairing constants c_a = <E_a | F_a> fixed by the E-F commutator.

    Each candidate +-1/(q_a - q_a^-1) is fed into the double cross-relation
    in weight (1,1); exactly one must reproduce
    E_a F_a - F_a E_a = (K_{a~} - K_{-a}) / (q_a - q_a^-1).
    """
    probe = _Probe(rd, cf)
    out = {}
    r = rd.rank
    for a in range(r):
        d = rd.q_exponent(a)
        delta = qpow(d) - qpow(-d)
        k = Frac(ONE, delta)
        al = tuple(rd.simple_root(a))
        neg = tuple(-x for x in al)
        target = {
            (("E", a), ("F", a)): FONE,
            (("F", a), ("E", a)): -FONE,
            (("Kt", al),): -k,
            (("K", neg),): k,
        }
        passing = [c for c in (k, -k) if _cross_relation_defect(probe, a, c) == target]
        if len(passing) != 1:
            raise CalibrationFailed(f"no unique pairing constant for alpha_{a + 1}")
        out[a] = passing[0]
    return out


# functionals and theta --------------------------------------------------------

@dataclass
class Functional:
    """Linear functional on one Borel half.

    ``side`` is the half it evaluates on.  ``data[label][word]`` encodes

    * side '-':  f(F_z K_mu)     = sum_lam q^{u_-(lam, mu)} data[lam][z]
    * side '+':  f(E_x K_{lam~}) = sum_mu  q^{u_-(lam, mu)} data[mu][x]

    Missing words are zero.
    """

    side: str
    data: dict[Weight, dict[Word, Frac]]
    cf: CompatibleForm = field(compare=False, repr=False)
    letters: tuple[int, ...] | None = None

    @property
    def rank(self) -> int:
        return self.cf.rank

    def value(self, word: Sequence[int], label=None) -> Frac:
        w = tuple(word)
        lab = Weight.zero(self.rank) if label is None else Weight(label)
        out = FZERO
        for t, vals in self.data.items():
            v = vals.get(w)
            if v:
                e = self.cf.uminus(t, lab) if self.side == "-" else self.cf.uminus(lab, t)
                out = out + v * qpow(e)
        return out

    def evaluate(self, x: FreeElement) -> Frac:
        if x.side != self.side:
            raise ValueError("functional evaluated on the wrong side")
        out = FZERO
        for (w, lab), c in x.terms.items():
            v = self.value(w, lab)
            if v:
                out = out + c * v
        return out

    def counit_value(self) -> Frac:
        return self.value(())

    def shape_value(self, word: Sequence[int]) -> Frac:
        """Value at the word with trivial toral part."""
        return self.value(word)

    def weights(self) -> set[Weight]:
        return {word_weight(w, self.rank) for vals in self.data.values() for w in vals}

    def is_zero(self) -> bool:
        return not any(any(v for v in vals.values()) for vals in self.data.values())


def _clean(data: dict) -> dict:
    out = {}
    for lab, vals in data.items():
        vv = {w: c for w, c in vals.items() if c}
        if vv:
            out[lab] = vv
    return out


def theta_apply(bo: Borel, X: FreeElement, letters: Sequence[int] | None = None) -> Functional:
    """y -> <X | y> (X on '+') or x -> <x | X> (X on '-') as a functional on the other half."""
    data: dict[Weight, dict[Word, Frac]] = {}
    for (w, lab), c in X.terms.items():
        vals = data.setdefault(lab, {})
        for v in words_of_weight(word_weight(w, bo.rank)):
            p = bo.word_pairing(w, v) if X.side == "+" else bo.word_pairing(v, w)
            if p:
                vals[v] = vals.get(v, FZERO) + c * p
    other = "-" if X.side == "+" else "+"
    return Functional(other, _clean(data), bo.cf, tuple(letters) if letters is not None else None)


def theta_invert(bo: Borel, f: Functional, lattice: Lattice | None = None) -> FreeElement:
    """The element X on the opposite half with theta(X) = f.

    Raises NotInImage when some graded piece of f does not vanish on the
    radical, AmbiguousToral when a label is outside ``lattice``.
    """
    target = "+" if f.side == "-" else "-"
    terms = []
    for lab, vals in sorted(f.data.items(), key=lambda kv: tuple(kv[0])):
        if lattice is not None and lab not in lattice:
            raise AmbiguousToral(f"toral index {lab} is not in {lattice}")
        by_weight: dict[Weight, dict[Word, Frac]] = {}
        for w, c in vals.items():
            by_weight.setdefault(word_weight(w, bo.rank), {})[w] = c
        for nu in sorted(by_weight, key=tuple):
            vv = by_weight[nu]
            g = bo.gram(nu)
            idx = {w: i for i, w in enumerate(g.words)}
            # unknowns on the normal words of the target side
            if target == "+":
                unk, eq = g.plus_normal, range(len(g.words))
                A = [[g.entry(i, j) for i in unk] for j in eq]
            else:
                unk, eq = g.minus_normal, range(len(g.words))
                A = [[g.entry(j, i) for i in unk] for j in eq]
            b = [vv.get(g.words[j], FZERO) for j in eq]
            for w in vv:
                if w not in idx:
                    raise NotInImage(f"word {w} not of weight {nu}")
            sol = linalg.solve(A, b, FZERO) if unk else None
            if sol is None:
                if any(b):
                    raise NotInImage(f"functional is not in the image at weight {nu}, label {lab}")
                continue
            for i, s in zip(unk, sol):
                if s:
                    terms.append(((g.words[i], lab), s))
    return FreeElement(target, terms, bo.rank)


# psi ----------------------------------------------------------------------------

def psi(t: BDTriple, x: FreeElement, inverse: bool = False) -> FreeElement:
    """Relabel letters and toral indices by tau (Pi_1 -> Pi_2) or by tau^-1."""
    dom = set(t.pi2 if inverse else t.pi1)
    m = t.inverse if inverse else t
    terms = []
    for (w, lab), c in x.terms.items():
        bad = [a for a in w if a not in dom]
        if bad:
            raise UnsupportedLetters(f"letters {[a + 1 for a in bad]} outside the domain of psi")
        try:
            new_lab = t.map_weight(lab, x.rank, inverse=inverse)
        except ValueError as exc:
            raise UnsupportedLetters(str(exc)) from None
        terms.append(((tuple(m(a) for a in w), new_lab), c))
    return FreeElement(x.side, terms, x.rank)
