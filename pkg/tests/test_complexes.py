from __future__ import annotations

import random

import pytest

from mixkoszul.complexes import (
    FreeComplex,
    euler_characteristic,
    generalized_koszul,
    homology_lengths,
    koszul_complex,
    mixed_double_complex,
    tensor_total,
    tensor_with_module,
    unit_complex,
)
from mixkoszul.errors import RelationViolated
from mixkoszul.localalg import INFINITE, RingSpec, SubmodulePresentation
from mixkoszul.polyring import Poly, PolyVec

R1 = RingSpec.parse(["x"])
R2 = RingSpec.parse(["x", "y"])
NODE = RingSpec.parse(["x", "y"], ["x*y"])
CUSP = RingSpec.parse(["x", "y"], ["x^2 - y^3"])

FIXTURES = {
    "cusp": (["x", "y"], ["x^2-y^3"], ["3*x", "2*y"], [["2*x", "-3*y^2"]]),
    "node": (["x", "y"], ["x*y"], ["x", "y"], [["y", "x"]]),
    "a1_surface": (["x", "y", "z"], ["x^2+y^2+z^2"], ["x", "y", "z"], [["2*x", "2*y", "2*z"]]),
    "space_curve": (["x", "y", "z"], ["x^2+y^2+z^2", "x*y"], ["x", "y", "z"],
                    [["2*x", "2*y", "2*z"], ["y", "x", "0"]]),
}


def fixture(name):
    variables, rels, a, A = FIXTURES[name]
    ring = RingSpec.parse(variables, rels)
    return ring, [ring.poly(s) for s in a], [[ring.poly(s) for s in row] for row in A]


def polys(ring, *texts):
    return [ring.poly(t) for t in texts]


def compose_is_zero(C):
    """Independent check of d_{i+1} d_i = 0 by explicit matrix products."""
    for i in C.degrees():
        if i + 1 >= C.hi or not C.rank(i) or not C.rank(i + 1) or not C.rank(i + 2):
            continue
        M1, M2 = C.matrix(i), C.matrix(i + 1)
        for r in range(len(M2)):
            for c in range(len(M1[0])):
                s = Poly.zero(C.ring.nvars)
                for k in range(len(M1)):
                    s = s + M2[r][k] * M1[k][c]
                if not C.ring.is_zero(s):
                    return False
    return True


# ---------- Koszul complexes ----------

def test_koszul_regular_sequence():
    C = koszul_complex(polys(R2, "x", "y"), R2)
    assert [C.rank(i) for i in C.degrees()] == [1, 2, 1]
    assert homology_lengths(C) == {-2: 0, -1: 0, 0: 1}
    assert euler_characteristic(C) == 1


def test_koszul_on_node():
    assert homology_lengths(koszul_complex(polys(NODE, "x", "y"), NODE)) == {-2: 0, -1: 1, 0: 1}


def test_koszul_principal():
    assert homology_lengths(koszul_complex(polys(R1, "x^3"), R1)) == {-1: 0, 0: 3}


def test_koszul_of_zero():
    lengths = homology_lengths(koszul_complex([R1.zero()], R1))
    assert lengths == {-1: INFINITE, 0: INFINITE}


def test_exact_complex():
    one = PolyVec.from_polys([R1.one()], 1)
    C = FreeComplex(R1, -1, 0, {-1: 1, 0: 1}, {-1: (one,)})
    assert homology_lengths(C) == {-1: 0, 0: 0}
    assert euler_characteristic(C) == 0


def _dual(C):
    """Hom(C, R) placed in degrees -hi..-lo, via transposed matrices."""
    ranks = {-i: C.rank(i) for i in C.degrees()}
    diffs = {}
    for i in C.degrees():
        if i == C.hi:
            continue
        M = C.matrix(i)  # rank(i+1) x rank(i)
        cols = []
        for r in range(C.rank(i + 1)):
            cols.append(PolyVec.from_polys([M[r][c] for c in range(C.rank(i))], C.ring.nvars))
        diffs[-i - 1] = tuple(cols)
    return FreeComplex(C.ring, -C.hi, -C.lo, ranks, diffs)


@pytest.mark.parametrize("seed", range(6))
def test_koszul_self_duality(seed):
    rng = random.Random(seed)
    a = [R2.var(0) ** rng.randint(1, 3) + R2.var(1) ** rng.randint(2, 4) * rng.randint(-2, 2),
         R2.var(1) ** rng.randint(1, 3)]
    if rng.random() < 0.5:
        a.append(R2.var(0) * R2.var(1))
    C = koszul_complex(a, R2)
    k = len(a)
    lengths = homology_lengths(C)
    dual = homology_lengths(_dual(C))
    # Hom(K, R) is K shifted by k
    assert {i: dual[i + k] for i in C.degrees()} == lengths


# ---------- generalized Koszul complexes ----------

def test_generalized_koszul_small():
    L = generalized_koszul([polys(R1, "x")], 0, R1)
    assert homology_lengths(L) == {-1: 0, 0: 1}
    L = generalized_koszul([polys(R2, "x"), polys(R2, "y")], 0, R2)
    assert L.rank(-1) == 1 and L.rank(0) == 2
    assert L.matrix(-1) == [[R2.poly("x")], [R2.poly("y")]]


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_generalized_koszul_rank_sum_is_one(m):
    n = m - 1
    A = [[R2.poly("x") for _ in range(n)] for _ in range(m)]
    L = generalized_koszul(A, 0, R2, m=m, check=False)
    assert L.alternating_rank_sum() == 1


# ---------- mixed double complexes ----------

def _random_relation_data(rng, ring, n, m):
    """a random, A with sum_j a_j A_j = 0 built from skew-symmetric matrices."""
    nv = ring.nvars

    def small():
        p = Poly.zero(nv)
        for _ in range(rng.randint(0, 2)):
            e = tuple(rng.randint(0, 1) for _ in range(nv))
            p = p + Poly.monomial(e, rng.randint(-2, 2))
        return p

    a = []
    for _ in range(n):
        p = Poly.zero(nv)
        for _ in range(2):
            e = [0] * nv
            e[rng.randrange(nv)] = rng.randint(1, 2)
            p = p + Poly.monomial(tuple(e), rng.randint(-3, 3))
        a.append(p)
    A = []
    for _ in range(m):
        S = [[Poly.zero(nv)] * n for _ in range(n)]
        for j in range(n):
            for l in range(j + 1, n):
                s = small()
                S[j][l], S[l][j] = s, -s
        A.append([sum((S[j][l] * a[l] for l in range(n)), Poly.zero(nv)) for j in range(n)])
    return a, A


@pytest.mark.parametrize("seed", range(24))
def test_total_differential_squares_to_zero(seed):
    rng = random.Random(seed)
    ring = [R2, NODE, CUSP][seed % 3]
    n, m = rng.randint(2, 3), rng.randint(1, 2)
    a, A = _random_relation_data(rng, ring, n, m)
    C = mixed_double_complex(a, A, rng.randint(0, 1), ring)
    assert compose_is_zero(C)


@pytest.mark.parametrize("name", ["cusp", "node"])
def test_fixture_double_complexes_are_complexes(name):
    ring, a, A = fixture(name)
    assert compose_is_zero(mixed_double_complex(a, A, 1, ring))


def test_relation_violated():
    with pytest.raises(RelationViolated):
        mixed_double_complex(polys(R2, "x", "y"), [polys(R2, "x", "y")], 0, R2)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_chi_independent_of_nu(name):
    ring, a, A = fixture(name)
    values = {euler_characteristic(mixed_double_complex(a, A, nu, ring)) for nu in (0, 1, 2)}
    assert len(values) == 1


# ---------- tensor products ----------

def test_tensor_unit():
    C = koszul_complex(polys(R2, "x", "y^2"), R2)
    T = tensor_total(C, unit_complex(R2))
    assert homology_lengths(T) == homology_lengths(C)


def test_tensor_of_koszul_complexes():
    T = tensor_total(koszul_complex(polys(R2, "x"), R2), koszul_complex(polys(R2, "y"), R2))
    assert [T.rank(i) for i in T.degrees()] == [1, 2, 1]
    assert homology_lengths(T) == homology_lengths(koszul_complex(polys(R2, "x", "y"), R2))


@pytest.mark.parametrize("seed", range(5))
def test_tensor_swap_symmetry(seed):
    rng = random.Random(seed)
    C = koszul_complex([R2.var(0) ** rng.randint(1, 3), R2.var(1) ** rng.randint(1, 2)], R2)
    A = [[R2.var(0) ** rng.randint(1, 2), R2.var(1) ** rng.randint(1, 3)]]
    L = generalized_koszul(A, rng.randint(0, 1), R2)
    CL, LC = tensor_total(C, L), tensor_total(L, C)
    assert compose_is_zero(CL) and compose_is_zero(LC)
    assert euler_characteristic(CL) == euler_characteristic(LC)


def test_tensor_with_module():
    C = koszul_complex(polys(R1, "x"), R1)
    E = SubmodulePresentation.ideal(R1, polys(R1, "x"))
    assert homology_lengths(tensor_with_module(C, E)) == {-1: 1, 0: 1}
    free = SubmodulePresentation(R1, 1, ())
    assert homology_lengths(tensor_with_module(C, free)) == homology_lengths(C)


def test_module_of_relations_matches_quotient_ring():
    C = koszul_complex(polys(R2, "x", "y"), R2)
    E = SubmodulePresentation.ideal(R2, polys(R2, "x*y"))
    over_node = homology_lengths(koszul_complex(polys(NODE, "x", "y"), NODE))
    assert homology_lengths(tensor_with_module(C, E)) == over_node
