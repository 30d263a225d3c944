import json
from itertools import combinations, permutations
from pathlib import Path

import pytest

from bdtwist.bdstruct import BDTriple, CompatibleForm, solve_compatible
from bdtwist.rootdata import build
from bdtwist.twist import Cocycle

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def cg_data(sign=1):
    rd = build("A", 2)
    t = BDTriple.from_map({0: 1})
    u = solve_compatible(rd, t, sign).point()
    return rd, CompatibleForm(rd, u, sign), t


def disjoint_sl4_data():
    rd = build("A", 3)
    t = BDTriple.from_map({0: 2})
    return rd, CompatibleForm.zero(rd), t


@pytest.fixture(scope="session")
def cg():
    return cg_data()


@pytest.fixture(scope="session")
def cg_cocycle():
    rd, cf, t = cg_data()
    return Cocycle(rd, cf, t)


@pytest.fixture(scope="session")
def sl4_cocycle():
    rd, cf, t = disjoint_sl4_data()
    return Cocycle(rd, cf, t, omega=rd.root_lattice())


@pytest.fixture(scope="session")
def empty_cocycle():
    rd = build("A", 2)
    return Cocycle(rd, CompatibleForm.zero(rd), BDTriple.empty())


def load_golden(name):
    return json.loads((GOLDEN / name).read_text())


def brute_force_triples(rd):
    """Every ordered pair of disjoint subsets with every isometric bijection."""
    r = rd.rank
    out = set()
    for k in range(1, r // 2 + 1):
        for s1 in combinations(range(r), k):
            rest = [x for x in range(r) if x not in s1]
            for s2 in combinations(rest, k):
                for img in permutations(s2):
                    m = dict(zip(s1, img))
                    if all(rd.gram[a][b] == rd.gram[m[a]][m[b]] for a in s1 for b in s1):
                        out.add(frozenset(m.items()))
    return out
