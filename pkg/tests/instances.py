"""Seeded random instances over regular local rings Q[x]_(x) and Q[x,y]_(x,y)."""

from __future__ import annotations

import random

from mixkoszul.localalg import RingSpec
from mixkoszul.errors import NotFiniteColength
from mixkoszul.multiplicities import IdealModulePair, ParamSystem
from mixkoszul.polyring import Poly

RINGS = {1: RingSpec.parse(["x"]), 2: RingSpec.parse(["x", "y"])}


def small_poly(rng, nvars, min_degree=1, max_degree=3, terms=2):
    """A sum of 1..terms monomials of degree in [min_degree, max_degree]."""
    p = Poly.zero(nvars)
    while not p:
        for _ in range(rng.randint(1, terms)):
            deg = rng.randint(min_degree, max_degree)
            e = [0] * nvars
            for _ in range(deg):
                e[rng.randrange(nvars)] += 1
            p = p + Poly.monomial(tuple(e), rng.choice([1, 1, 2, -1, 3]))
    return p


def maybe_zero(rng, nvars):
    return Poly.zero(nvars) if rng.random() < 0.3 else small_poly(rng, nvars)


def random_param_system(rng, d, m, k):
    """Parameter system on Q[x_1..x_d] with k elements, n = d-k+m-1 columns, finite length."""
    ring = RINGS[d]
    n = d - k + m - 1
    while True:
        a = [small_poly(rng, d) for _ in range(k)]
        A = [[maybe_zero(rng, d) for _ in range(n)] for _ in range(m)]
        PS = ParamSystem(ring, a, A, m)
        if PS.is_defined():
            return PS


def param_instances(count, seed):
    """(PS, kind) with kind 'ordinary' for k = d and 'length' for k < d."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        d = 1 + i % 2
        m = rng.randint(1, 2)
        k = d if i % 4 < 2 else rng.randrange(d)
        out.append((random_param_system(rng, d, m, k), "ordinary" if k == d else "length"))
    return out


def additivity_instances(count, seed):
    """(ring, a, A, m) with a of length k >= 1 and n = d+m-1 columns, every side defined."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(1, 2)
        m = rng.randint(1, 2)
        n = d + m - 1
        k = rng.randint(1, min(n, d))
        ring = RINGS[d]
        a = [small_poly(rng, d) for _ in range(k)]
        A = [[maybe_zero(rng, d) for _ in range(n - k + 1)] for _ in range(m)]
        ak = a[-1]
        sides = [
            ParamSystem(ring, a[:-1], [[ak * row[0]] + row[1:] for row in A], m),
            ParamSystem(ring, a, [row[1:] for row in A], m),
            ParamSystem(ring, a[:-1], A, m),
        ]
        if all(S.is_defined() for S in sides):
            out.append(sides)
    return out


def reduction_instances(count, seed):
    """IdealModulePair with d+m columns (one more than a reduction needs), finite colength.

    Shapes cycle through (d, m) = (2, 1), (1, 2), (2, 1), (1, 2), (2, 2); the last
    shape uses a = m and linear entries to keep the Hilbert grid small.  Entries
    are monomials with small coefficients so every column combination stays
    homogeneous in each row.
    """
    rng = random.Random(seed)
    shapes = [(2, 1), (1, 2), (2, 1), (1, 2), (2, 2)]
    out = []
    while len(out) < count:
        d, m = shapes[len(out) % len(shapes)]
        ring = RINGS[d]
        big = d == 2 and m == 2
        a = [ring.var(v) ** (1 if big else rng.randint(1, 2)) for v in range(d)]
        deg = 1 if big else rng.randint(1, 2)
        A = [[Poly.zero(d) if rng.random() < 0.25 else small_poly(rng, d, deg, deg, 1) for _ in range(d + m)]
             for _ in range(m)]
        P = IdealModulePair(ring, a, A)
        try:
            P.check_finite()
        except NotFiniteColength:
            continue
        out.append(P)
    return out
