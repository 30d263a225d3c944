import random
from fractions import Fraction

import pytest

from bdtwist.bdstruct import CompatibleForm
from bdtwist.qfa import (
    MatrixCoefficient,
    RMatrix,
    braid_relation_holds,
    braiding_R,
    qybe_holds,
    rho_restrict,
    rtt_check,
    standard_support,
    support_outside_standard,
    vector_rep,
    verify_R,
)
from bdtwist.rootdata import build
from bdtwist.scalar import FONE, FZERO, Frac, qpow
from bdtwist.sparse import Mat, flip, min_poly_degree

F = Fraction


def random_form(rd, seed):
    rng = random.Random(seed)
    r = rd.rank
    u = [[F(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            x = F(rng.randint(-4, 4), rng.randint(1, 3))
            u[i][j], u[j][i] = x, -x
    return CompatibleForm(rd, u)


FORMS = [("A1", None), ("A2", None), ("A2", 1), ("A3", None), ("A3", 2)]


def _form(label, seed):
    rd = build(label[0], int(label[1:]))
    return rd, (CompatibleForm.zero(rd) if seed is None else random_form(rd, seed))


@pytest.mark.parametrize("label,seed", FORMS)
def test_vector_rep_relations(label, seed):
    rd, cf = _form(label, seed)
    rep = vector_rep(rd, cf)
    rep.check_relations(2)


def test_vector_rep_type_a_only():
    with pytest.raises(ValueError):
        vector_rep(build("B", 2), CompatibleForm.zero(build("B", 2)))


def test_a1_braiding_is_standard():
    rd = build("A", 1)
    R = braiding_R(vector_rep(rd, CompatibleForm.zero(rd)))
    # q^{1/2} R = diag(1, q, q, 1) + (1 - q^2) e_{12,21}: the sl2 matrix in the q^x = exp(-x h/2) reading
    R = R.R.scale(qpow(F(1, 2)))
    q = qpow(1)
    assert R == Mat(4, {(0, 0): FONE, (1, 1): q, (2, 2): q, (3, 3): FONE, (1, 2): 1 - q * q})
    R = braiding_R(vector_rep(rd, CompatibleForm.zero(rd)))
    off = [k for k in R.R.e if k[0] != k[1]]
    assert len(off) == 1
    assert support_outside_standard(R.R, 2) == []


@pytest.mark.parametrize("label,seed", FORMS)
def test_braiding_properties(label, seed):
    rd, cf = _form(label, seed)
    rep = vector_rep(rd, cf)
    R = braiding_R(rep)
    n = rep.n
    assert qybe_holds(R.R, n)
    assert braid_relation_holds(R.braid, n)
    assert rtt_check(R, rep).ok
    assert min_poly_degree(R.braid) == 2
    assert set(R.R.e) <= standard_support(n)
    # classical limit is the identity
    for (i, j), v in R.R.e.items():
        assert v.specialize_classical() == (1 if i == j else 0)


def test_rmatrix_json_roundtrip():
    rd = build("A", 2)
    R = braiding_R(vector_rep(rd, random_form(rd, 4)))
    back = RMatrix.from_json(R.to_json())
    assert back.R == R.R
    with pytest.raises(ValueError):
        RMatrix.from_json({"n": 2, "entries": [[9, 0, [[1, 1, 0, 1]]]]})


def test_verify_detects_broken_matrix():
    rd = build("A", 2)
    R = braiding_R(vector_rep(rd, CompatibleForm.zero(rd)))
    ents = dict(R.R.e)
    ents[0, 4] = FONE
    rep = verify_R(RMatrix(3, Mat(9, ents)))
    assert not rep.ok
    good = verify_R(R)
    assert good.ok and good.standard_support


def test_min_poly_degree():
    assert min_poly_degree(Mat.identity(4)) == 1
    assert min_poly_degree(flip(2)) == 2
    assert min_poly_degree(Mat(3, {(0, 1): FONE, (1, 2): FONE})) == 3


def test_matrix_coefficient():
    t = MatrixCoefficient((0, 1), (1, 0))
    assert len(t.coproduct(3)) == 9
    assert t.counit() == 0
    assert MatrixCoefficient((2,), (2,)).counit() == 1


def test_rho_restrict_degree_one():
    rd = build("A", 2)
    cf = random_form(rd, 9)
    rep = vector_rep(rd, cf)
    # t_12 restricted to the E_1 half sees exactly the word (E_1)
    f = rho_restrict(rep, (0,), (1,), (0,), "+")
    assert f.shape_value((0,)) != FZERO
    # t_13 needs letters outside {alpha_1}
    assert rho_restrict(rep, (0,), (2,), (0,), "+").is_zero()
    # diagonal coefficients restrict to toral characters with counit 1
    g = rho_restrict(rep, (1,), (1,), (0,), "-")
    assert g.counit_value() == FONE
