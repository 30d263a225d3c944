"""Laurent term kernels.

Terms are sorted tuples of ``(exponent, coefficient)`` pairs with integer
exponents over a shared denominator and nonzero rational coefficients
(``int`` or ``Fraction``).
"""
from fractions import Fraction


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def add_terms(a, b):
    i = j = 0
    la, lb = len(a), len(b)
    out = []
    while i < la and j < lb:
        ea, ca = a[i]
        eb, cb = b[j]
        if ea < eb:
            out.append(a[i])
            i += 1
        elif eb < ea:
            out.append(b[j])
            j += 1
        else:
            c = ca + cb
            if c:
                out.append((ea, _norm(c)))
            i += 1
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def sub_terms(a, b):
    return add_terms(a, tuple((e, -c) for e, c in b))


def mul_terms(a, b):
    if not a or not b:
        return ()
    if len(a) == 1 and len(b) == 1:
        (ea, ca), (eb, cb) = a[0], b[0]
        return ((ea + eb, _norm(ca * cb)),)
    acc = {}
    get = acc.get
    for ea, ca in a:
        for eb, cb in b:
            e = ea + eb
            acc[e] = get(e, 0) + ca * cb
    return tuple(sorted((e, _norm(c)) for e, c in acc.items() if c))


def scale_terms(a, c):
    if not c:
        return ()
    return tuple((e, _norm(x * c)) for e, x in a)
