from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdtwist.bdstruct import (
    BDTriple,
    CompatibleForm,
    enumerate_disjoint,
    solve_compatible,
    sublattice_L,
    validate_triple,
)
from bdtwist.rootdata import Lattice, Weight, build

from conftest import brute_force_triples, cg_data, load_golden

F = Fraction


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "A4", "D4"])
def test_enumeration_matches_brute_force_and_golden(label):
    rd = build(label[0], int(label[1:]))
    got = enumerate_disjoint(rd)
    keys = [frozenset(t.tau) for t in got]
    assert len(keys) == len(set(keys))
    assert set(keys) == brute_force_triples(rd)
    assert len(got) == load_golden("enumeration_counts.json")[label]


@pytest.mark.parametrize("label", ["A5", "B3", "C3"])
def test_enumeration_matches_brute_force_more_types(label):
    rd = build(label[0], int(label[1:]))
    assert {frozenset(t.tau) for t in enumerate_disjoint(rd)} == brute_force_triples(rd)


def test_enumeration_deterministic():
    rd = build("A", 4)
    assert [t.to_json() for t in enumerate_disjoint(rd)] == [t.to_json() for t in enumerate_disjoint(rd)]
    assert BDTriple.from_map({0: 2, 1: 3}) in enumerate_disjoint(rd)


def test_validate_triple():
    rd = build("A", 3)
    assert validate_triple(rd, BDTriple.from_map({0: 2})).ok
    assert not validate_triple(rd, BDTriple.from_map({0: 1, 1: 2})).ok  # overlapping
    assert not validate_triple(rd, BDTriple.from_map({0: 2, 1: 3})).ok  # out of range in A3
    a4 = build("A", 4)
    assert not validate_triple(a4, BDTriple.from_map([(0, 2), (1, 2)])).ok  # not injective
    assert not validate_triple(a4, BDTriple.from_map({0: 2, 3: 1})).ok  # not an isometry
    assert validate_triple(a4, BDTriple.from_map({0: 3, 1: 2})).ok


def test_triple_json_roundtrip():
    t = BDTriple.from_map({0: 2, 1: 3})
    assert t.to_json() == {"pi1": [1, 2], "pi2": [3, 4], "tau": {"1": 3, "2": 4}}
    assert BDTriple.from_json(t.to_json()) == t


def test_cg_solution_space():
    rd, cf, t = cg_data()
    space = solve_compatible(rd, t)
    assert space.dim == 0
    assert abs(cf.u(rd.simple_root(0), rd.simple_root(1))) == 1
    # literal convention gives +1, the flipped switch presents -1
    assert cf.u(rd.simple_root(0), rd.simple_root(1)) == 1
    minus = CompatibleForm(rd, solve_compatible(rd, t, -1).point(), -1)
    assert minus.presented[0][1] == -1
    assert minus.U == cf.U
    # compatibility 1 is vacuous for a singleton
    assert cf.is_compatible(t)


def test_disjoint_a3_zero_form_compatible():
    rd = build("A", 3)
    t = BDTriple.from_map({0: 2})
    assert CompatibleForm.zero(rd).is_compatible(t)
    space = solve_compatible(rd, t)
    assert space is not None


def test_u_forms_examples():
    rd, cf, t = cg_data()
    a1, a2 = rd.simple_root(0), rd.simple_root(1)
    assert cf.uplus(a1, a2) == 0
    assert cf.uminus(a1, a1) == -2
    lam = Weight([F(1, 2), F(3)])
    assert cf.uplus(lam, lam) == rd.inner(lam, lam)
    assert cf.p_exponent("p", lam, lam) == 0
    assert cf.p_exponent("p+", a1, a2) == 0


def test_tilde_examples():
    rd = build("A", 2)
    z = CompatibleForm.zero(rd)
    lam = Weight([F(1), F(2)])
    assert z.tilde(lam) == lam
    _, cf, _ = cg_data()
    # hand solve: u_+(x, mu) = -u_-(lam, mu) for both basis mu is a 2x2 system
    for lam in (rd.simple_root(0), rd.simple_root(1), Weight([F(1, 3), F(2, 3)])):
        x = cf.tilde(lam)
        for j in range(2):
            assert cf.uplus(x, rd.simple_root(j)) == -cf.uminus(lam, rd.simple_root(j))
        assert cf.tilde_inverse(x) == lam


def test_projection_examples():
    rd, cf, t = cg_data()
    w2 = rd.fundamental_weights()[1]
    p = cf.project([0], "-", w2)
    assert abs(p[0]) == F(1, 3) and p[1] == 0
    assert cf.project([0], "-", rd.simple_root(0)) == rd.simple_root(0)
    rd3 = build("A", 3)
    z = CompatibleForm.zero(rd3)
    assert z.project([0], "-", rd3.simple_root(2)).is_zero()


def test_lattice_values():
    rd, cf, t = cg_data()
    L1, _ = sublattice_L(cf, t, 1, rd.weight_lattice())
    assert L1 == Lattice.from_generators([[F(1, 3), 0]], 2)
    L1r, _ = sublattice_L(cf, t, 1, rd.root_lattice())
    assert L1r == Lattice.from_generators([[1, 0]], 2)
    rd3 = build("A", 3)
    z = CompatibleForm.zero(rd3)
    t3 = BDTriple.from_map({0: 2})
    L, _ = sublattice_L(z, t3, 1, rd3.root_lattice())
    # alpha_2 projects to -alpha_1/2 since (alpha_1, alpha_2) = -1
    assert L == Lattice.from_generators([[F(1, 2), 0, 0]], 3)
    assert L.contains_lattice(Lattice.from_generators([[1, 0, 0]], 3))


def test_restriction_is_never_degenerate():
    # x (U - B) x = -(x, x) < 0, so u_- restricted to any subset is invertible
    rd = build("A", 3)
    cf = CompatibleForm(rd, [[0, F(7), F(-2)], [F(-7), 0, F(5, 3)], [F(2), F(-5, 3), 0]])
    for S in ([0], [0, 1], [0, 2], [0, 1, 2]):
        p = cf.project(S, "-", Weight([1, 1, 1]))
        assert set(p.support()) <= set(S)


frac = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def triple_and_form(draw):
    label = draw(st.sampled_from(["A2", "A3", "A4", "D4"]))
    rd = build(label[0], int(label[1:]))
    ts = enumerate_disjoint(rd)
    t = draw(st.sampled_from(ts))
    space = solve_compatible(rd, t)
    params = draw(st.lists(frac, min_size=space.dim, max_size=space.dim))
    return rd, t, CompatibleForm(rd, space.point(params))


@given(triple_and_form())
@settings(max_examples=40, deadline=None)
def test_solutions_satisfy_compatibility(data):
    rd, t, cf = data
    r = rd.rank
    for a in t.pi1:
        for b in t.pi1:
            A, B = rd.simple_root(a), rd.simple_root(b)
            assert cf.u(rd.simple_root(t(a)), rd.simple_root(t(b))) == cf.u(A, B)
            assert cf.uplus(A, rd.simple_root(t(b))) == 0
    assert cf.violations(t) == []
    for i in range(r):
        for j in range(r):
            A, B = rd.simple_root(i), rd.simple_root(j)
            assert cf.uplus(A, B) == -cf.uminus(B, A)
            assert cf.p_exponent("p+", cf.tilde(A), B) + cf.p_exponent("p-", A, B) == 0


@given(triple_and_form(), st.data())
@settings(max_examples=30, deadline=None)
def test_projection_properties(data, draw):
    rd, t, cf = data
    lam = Weight(draw.draw(st.lists(frac, min_size=rd.rank, max_size=rd.rank)))
    for S in (t.pi1, t.pi2):
        pm = cf.project(S, "-", lam)
        pp = cf.project(S, "+", lam)
        assert set(pm.support()) <= set(S) and set(pp.support()) <= set(S)
        for b in S:
            mu = rd.simple_root(b)
            assert cf.uminus(mu, pm) == cf.uminus(mu, lam)
            assert cf.uminus(pp, mu) == cf.uminus(lam, mu)
        assert cf.project(S, "-", pm) == pm
        assert cf.project(S, "+", pp) == pp
