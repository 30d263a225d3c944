"""Exact Laurent polynomials in a formal ``q`` with rational exponents.

A :class:`Scalar` is a finite sum ``sum c_e q^e`` with ``e`` and ``c`` exact
rationals.  Internally the exponents are stored as integers over a common
denominator ``n`` which is chosen lazily (the lcm of whatever the operands
need) and kept minimal, so two equal Scalars always have identical storage.

:class:`Frac` is the fraction field of that ring.  It is only needed where
linear algebra forces division by non-units (Gram matrix inverses, the
generator pairing constant ``1/(q^-1 - q)``); results that are known to be
Laurent are brought back with :meth:`Frac.to_scalar`.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

from bdtwist._terms import add_terms, mul_terms, scale_terms, sub_terms


class NotAUnit(ArithmeticError):
    """Raised when inverting a Scalar that is not a single monomial."""


class NotDivisible(ArithmeticError):
    """Raised by exact division when the divisor does not divide."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def _norm_coef(c):
    c = _as_fraction(c) if not isinstance(c, int) else c
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Scalar:
    """Immutable element of Q[q^(1/N), q^(-1/N)] for a lazily chosen N."""

    __slots__ = ("_n", "_t", "_hash")

    def __init__(self, terms=None):
        # terms: mapping exponent -> coefficient (exact rationals)
        if not terms:
            self._n, self._t, self._hash = 1, (), None
            return
        items = [(_as_fraction(e), _norm_coef(c)) for e, c in dict(terms).items()]
        n = 1
        for e, _ in items:
            n = _lcm(n, e.denominator)
        t = tuple(sorted((int(e * n), c) for e, c in items if c))
        self._n, self._t, self._hash = n, t, None
        self._reduce()

    @classmethod
    def _raw(cls, n: int, t: tuple) -> "Scalar":
        s = object.__new__(cls)
        s._n, s._t, s._hash = n, t, None
        s._reduce()
        return s

    def _reduce(self):
        n = self._n
        if n == 1:
            return
        g = n
        for e, _ in self._t:
            g = gcd(g, e)
            if g == 1:
                return
        if g > 1:
            self._n = n // g
            self._t = tuple((e // g, c) for e, c in self._t)

    # construction helpers -------------------------------------------------
    @classmethod
    def const(cls, c) -> "Scalar":
        c = _norm_coef(c)
        return cls._raw(1, ((0, c),)) if c else cls._raw(1, ())

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return cls.const(x)

    # inspection -----------------------------------------------------------
    def terms(self) -> list[tuple[Fraction, Fraction]]:
        """(exponent, coefficient) pairs sorted by exponent."""
        n = self._n
        return [(Fraction(e, n), Fraction(c)) for e, c in self._t]

    def as_dict(self) -> dict[Fraction, Fraction]:
        return dict(self.terms())

    @property
    def denominator(self) -> int:
        """Smallest N with every exponent in (1/N)Z."""
        return self._n

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and self._t[0][0] == 0)

    def constant_term(self) -> Fraction:
        for e, c in self._t:
            if e == 0:
                return Fraction(c)
        return Fraction(0)

    def min_exponent(self) -> Fraction:
        return Fraction(self._t[0][0], self._n)

    def max_exponent(self) -> Fraction:
        return Fraction(self._t[-1][0], self._n)

    # arithmetic ------------------------------------------------------------
    def _aligned(self, other: "Scalar"):
        a, b = self, other
        if a._n == b._n:
            return a._n, a._t, b._t
        n = _lcm(a._n, b._n)
        fa, fb = n // a._n, n // b._n
        ta = a._t if fa == 1 else tuple((e * fa, c) for e, c in a._t)
        tb = b._t if fb == 1 else tuple((e * fb, c) for e, c in b._t)
        return n, ta, tb

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Frac):
                return NotImplemented
            other = Scalar.const(other)
        n, ta, tb = self._aligned(other)
        return Scalar._raw(n, add_terms(ta, tb))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Frac):
                return NotImplemented
            other = Scalar.const(other)
        n, ta, tb = self._aligned(other)
        return Scalar._raw(n, sub_terms(ta, tb))

    def __rsub__(self, other):
        return Scalar.const(other) - self

    def __neg__(self):
        return Scalar._raw(self._n, tuple((e, -c) for e, c in self._t))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Frac):
                return NotImplemented
            c = _norm_coef(other)
            return Scalar._raw(self._n, scale_terms(self._t, c))
        n, ta, tb = self._aligned(other)
        return Scalar._raw(n, mul_terms(ta, tb))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def invert(self) -> "Scalar":
        """Inverse of a unit (single monomial); NotAUnit otherwise."""
        if len(self._t) != 1:
            raise NotAUnit(f"{self} is not a unit in the Laurent ring")
        e, c = self._t[0]
        return Scalar._raw(self._n, ((-e, _norm_coef(Fraction(1) / c)),))

    def __truediv__(self, other):
        if isinstance(other, Frac):
            return Frac(self) / other
        if not isinstance(other, Scalar):
            other = Scalar.const(other)
        if other.is_monomial():
            return self * other.invert()
        return self.divexact(other)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def divexact(self, other: "Scalar") -> "Scalar":
        """Exact quotient in the Laurent ring; NotDivisible when it does not exist."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        if self.is_zero():
            return ZERO
        if other.is_monomial():
            return self * other.invert()
        n, ta, tb = self._aligned(other)
        pa, sa = _to_poly(ta)
        pb, sb = _to_poly(tb)
        quo, rem = _poly_divmod(pa, pb)
        if any(rem):
            raise NotDivisible(f"{other} does not divide {self}")
        return _from_poly(quo, sa - sb, n)

    # comparison ---------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self._n == other._n and self._t == other._t
        if isinstance(other, Frac):
            return other == self
        if isinstance(other, (int, Fraction)):
            return self == Scalar.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, self._t))
        return self._hash

    # specialisation / serialisation ---------------------------------------
    def specialize_classical(self) -> Fraction:
        """Value at q = 1 (sum of coefficients)."""
        return Fraction(sum(c for _, c in self._t))

    def to_json(self) -> list[list[int]]:
        out = []
        for e, c in self.terms():
            out.append([c.numerator, c.denominator, e.numerator, e.denominator])
        return out

    @classmethod
    def from_json(cls, data) -> "Scalar":
        terms: dict[Fraction, Fraction] = {}
        for item in data:
            if len(item) != 4:
                raise ValueError(f"bad Scalar term {item!r}")
            cn, cd, en, ed = (int(v) for v in item)
            e = Fraction(en, ed)
            terms[e] = terms.get(e, Fraction(0)) + Fraction(cn, cd)
        return cls(terms)

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for e, c in self.terms():
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "q"
            elif e.denominator == 1:
                mono = f"q^{e.numerator}"
            else:
                mono = f"q^({e})"
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        s = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


ZERO = Scalar._raw(1, ())
ONE = Scalar._raw(1, ((0, 1),))


def qpow(x) -> Scalar:
    """The monomial q^x for exact rational x."""
    x = _as_fraction(x)
    return Scalar._raw(x.denominator, ((x.numerator, 1),))


def qint(n: int, d=1) -> Scalar:
    """Quantum integer (q_a^n - q_a^-n)/(q_a - q_a^-1) with q_a = q^d."""
    d = _as_fraction(d)
    if n == 0:
        return ZERO
    if n < 0:
        return -qint(-n, d)
    return sum((qpow(d * (n - 1 - 2 * k)) for k in range(n)), ZERO)


def qfactorial(n: int, d=1) -> Scalar:
    if n < 0:
        raise ValueError("quantum factorial of a negative integer")
    out = ONE
    for m in range(1, n + 1):
        out = out * qint(m, d)
    return out


def qbinom(n: int, k: int, d=1) -> Scalar:
    """Quantum binomial coefficient [n k] at q_a = q^d."""
    if k < 0 or k > n:
        raise ValueError(f"quantum binomial needs 0 <= k <= n, got n={n}, k={k}")
    return qfactorial(n, d).divexact(qfactorial(k, d) * qfactorial(n - k, d))


def specialize_classical(a: Scalar) -> Fraction:
    return Scalar.coerce(a).specialize_classical()


# dense polynomial helpers (coefficients low -> high degree) -------------------

def _to_poly(t):
    lo = t[0][0]
    hi = t[-1][0]
    p = [Fraction(0)] * (hi - lo + 1)
    for e, c in t:
        p[e - lo] = Fraction(c)
    return p, lo


def _from_poly(p, shift: int, n: int) -> Scalar:
    t = tuple((i + shift, _norm_coef(c)) for i, c in enumerate(p) if c)
    return Scalar._raw(n, t)


def _poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    r = a
    for i in range(len(a) - len(b), -1, -1):
        coef = r[i + len(b) - 1] / lead
        q[i] = coef
        if coef:
            for j, bj in enumerate(b):
                r[i + j] -= coef * bj
    return q, _poly_trim(r[: len(b) - 1])


def _poly_gcd(a, b):
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


class Frac:
    """Element of the fraction field Q(q^(1/N)), kept in lowest terms.

    The denominator is normalised to a polynomial in q^(1/N) with nonzero
    constant term and leading coefficient 1; a unit denominator is folded
    into the numerator, so Laurent values have ``den == 1``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = Scalar.coerce(num)
        if den is None:
            self.num, self.den = num, ONE
            return
        den = Scalar.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("Frac with zero denominator")
        if den.is_monomial():
            self.num, self.den = num * den.invert(), ONE
            return
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        n, ta, tb = num._aligned(den)
        pa, sa = _to_poly(ta)
        pb, sb = _to_poly(tb)  # pb[0] != 0: lowest term of den
        g = _poly_gcd(pa, pb)
        if len(g) > 1:
            pa, _ = _poly_divmod(pa, g)
            pb, _ = _poly_divmod(pb, g)
        pa, pb = _poly_trim(pa), _poly_trim(pb)
        lead = pb[-1]
        self.num = _from_poly([c / lead for c in pa], sa - sb, n)
        self.den = _from_poly([c / lead for c in pb], 0, n)

    @classmethod
    def of(cls, x) -> "Frac":
        return x if isinstance(x, Frac) else cls(x)

    def to_scalar(self) -> Scalar:
        if self.den != ONE:
            raise NotDivisible(f"{self} is not a Laurent polynomial")
        return self.num

    def is_laurent(self) -> bool:
        return self.den == ONE

    def __bool__(self):
        return bool(self.num)

    def is_zero(self):
        return not self.num

    def __add__(self, other):
        o = Frac.of(other) if not isinstance(other, Frac) else other
        if self.den == ONE and o.den == ONE:
            return _lift(self.num + o.num)
        if self.den == o.den:
            return Frac(self.num + o.num, self.den)
        return Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        f = object.__new__(Frac)
        f.num, f.den = -self.num, self.den
        return f

    def __sub__(self, other):
        return self + (-Frac.of(other))

    def __rsub__(self, other):
        return Frac.of(other) - self

    def __mul__(self, other):
        o = Frac.of(other) if not isinstance(other, Frac) else other
        if self.den == ONE and o.den == ONE:
            return _lift(self.num * o.num)
        return Frac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Frac.of(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero Frac")
        if self.den == ONE and o.den == ONE and o.num.is_monomial():
            return _lift(self.num * o.num.invert())
        return Frac(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return Frac.of(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (Frac(ONE) / self) ** (-k)
        out = Frac(ONE)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Frac):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (Scalar, int, Fraction)):
            return self.den == ONE and self.num == Scalar.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def specialize_classical(self) -> Fraction:
        d = self.den.specialize_classical()
        if d == 0:
            raise ZeroDivisionError(f"{self} has a pole at q = 1")
        return self.num.specialize_classical() / d

    def to_json(self):
        if self.den == ONE:
            return self.num.to_json()
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "Frac":
        if isinstance(data, dict):
            return cls(Scalar.from_json(data["num"]), Scalar.from_json(data["den"]))
        return _lift(Scalar.from_json(data))

    def __repr__(self):
        return f"Frac({self})"

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _lift(s: Scalar) -> Frac:
    f = object.__new__(Frac)
    f.num, f.den = s, ONE
    return f


FZERO = _lift(ZERO)
FONE = _lift(ONE)
