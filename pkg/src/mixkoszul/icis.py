"""Index of a vector field at an isolated complete intersection singularity.

The index is computed by three routes that must agree:
the Euler characteristic of the mixed double complex K_0, the alternating sum
of parameter multiplicities after an admissible coordinate change, and the
contraction complex of Kaehler differentials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .complexes import (
    FreeComplex,
    PresentedComplex,
    check_relation,
    euler_characteristic,
    exterior_basis,
    homology_lengths,
    mixed_double_complex,
    wedge_sign,
    _scale_into,
)
from .errors import Disagreement, InputError, NotInMaximalIdeal, NotIsolated, UnitJacobianEntry
from .localalg import RingSpec, SubmodulePresentation, colength, INFINITE
from .multiplicities import alternating_terms, find_admissible_transform, random_invertible
from .polyring import Poly, PolyVec, Q


@dataclass
class ICISGerm:
    """Germ of V(f_1..f_m) in affine space with coordinates ``ambient_vars``."""

    ambient_vars: tuple
    f: list

    def __post_init__(self):
        self.ambient_vars = tuple(self.ambient_vars)
        self.f = list(self.f)
        if not self.f:
            raise InputError("an ICIS needs at least one equation")
        for p in self.f:
            if p.constant_term():
                raise NotInMaximalIdeal("defining equation does not vanish at the origin")

    @classmethod
    def parse(cls, variables, equations):
        ring = RingSpec.parse(variables)
        return cls(tuple(variables), [ring.poly(s) for s in equations])

    @property
    def n(self):
        return len(self.ambient_vars)

    @property
    def m(self):
        return len(self.f)

    @property
    def d(self):
        return self.n - self.m

    def ambient(self) -> RingSpec:
        return RingSpec(self.ambient_vars, ())

    def ring(self) -> RingSpec:
        return RingSpec(self.ambient_vars, tuple(self.f))

    def jacobian(self) -> list[list[Poly]]:
        return [[fi.diff(j) for j in range(self.n)] for fi in self.f]

    def check(self):
        """Certify complete intersection and isolated singularity by colengths."""
        R = self.ring()
        if R.dim != self.d:
            raise InputError("equations do not form a regular sequence", dim=R.dim, expected=self.d)
        if self.d > 0:
            gens = list(self.f) + _minors(self.jacobian(), self.m)
            if colength(SubmodulePresentation.ideal(self.ambient(), gens)) is INFINITE:
                raise NotIsolated("singular locus is not isolated")


@dataclass
class VectorField:
    V: list

    def __post_init__(self):
        self.V = list(self.V)
        for p in self.V:
            if p.constant_term():
                raise NotInMaximalIdeal("vector field does not vanish at the origin")


@dataclass
class IndexReport:
    chi_K0: int
    milnor: int
    index_formula: int
    index_direct: int
    terms: list
    transform_used: list
    agreement: bool
    chi_omega: int = 0
    omega_homology: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "chi_K0": self.chi_K0,
            "milnor": self.milnor,
            "index_formula": self.index_formula,
            "index_direct": self.index_direct,
            "chi_omega": self.chi_omega,
            "omega_homology": {str(k): v for k, v in sorted(self.omega_homology.items())},
            "terms": list(self.terms),
            "transform_used": [[int(x) for x in row] for row in self.transform_used],
            "agreement": self.agreement,
        }


def _minors(M, k):
    """All k x k minors of a matrix of polynomials (k = number of rows used)."""
    rows = len(M)
    nv = M[0][0].nvars
    out = []
    for cols in combinations(range(len(M[0])), k):
        for rsel in combinations(range(rows), k):
            out.append(_det([[M[r][c] for c in cols] for r in rsel], nv))
    return [p for p in out if p]


def _det(M, nv):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = Poly.zero(nv)
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, nv)
        total = total - term if j % 2 else total + term
    return total


def jacobian_and_relation(germ: ICISGerm, vf: VectorField):
    """a = V and A = Jacobian of f, with sum_j V_j A_j = 0 checked on X."""
    if len(vf.V) != germ.n:
        raise InputError("vector field has the wrong number of components")
    A = germ.jacobian()
    for i, row in enumerate(A):
        for j, p in enumerate(row):
            if p.constant_term():
                raise UnitJacobianEntry("Jacobian entry is a unit", row=i, column=j)
    check_relation(vf.V, A, germ.ring())
    return list(vf.V), A


def _le_greuel_terms(f, ambient):
    out = []
    n = ambient.nvars
    for k in range(1, len(f) + 1):
        jac = [[fi.diff(j) for j in range(n)] for fi in f[:k]]
        gens = list(f[: k - 1]) + _minors(jac, k)
        out.append(colength(SubmodulePresentation.ideal(ambient, gens)))
    return out


def milnor_number(germ: ICISGerm, seed: int = 0, attempts: int = 16) -> int:
    """Milnor number; for m > 1 by the alternating Le-Greuel sum over X_1..X_m."""
    ambient = germ.ambient()
    if germ.m == 1:
        c = colength(SubmodulePresentation.ideal(ambient, [germ.f[0].diff(j) for j in range(germ.n)]))
        if c is INFINITE:
            raise NotIsolated("Jacobian ideal is not of finite colength")
        return c
    rng = random.Random(seed)
    f = list(germ.f)
    for attempt in range(attempts + 1):
        lengths = _le_greuel_terms(f, ambient)
        if all(c is not INFINITE for c in lengths):
            mu = 0
            for k, c in enumerate(lengths, start=1):
                mu += (-1) ** (germ.m - k) * c
            return mu
        g = random_invertible(germ.m, rng)
        f = [sum((germ.f[j] * Q(g[i][j]) for j in range(germ.m) if g[i][j]), Poly.zero(germ.n))
             for i in range(germ.m)]
    raise NotIsolated("no coordinates found in which every intermediate germ is isolated", attempts=attempts)


def kaehler_contraction_complex(germ: ICISGerm, vf: VectorField, check: bool = True) -> PresentedComplex:
    """(Omega^d -> ... -> Omega^0, i_V) with Omega^p placed in degree -p."""
    ring = germ.ring()
    n, d, nv = germ.n, germ.d, germ.n
    jac = germ.jacobian()
    V = vf.V
    ranks, diffs, rels = {}, {}, {}
    for p in range(d + 1):
        ranks[-p] = comb(n, p)
    for p in range(1, d + 1):
        src, dst = exterior_basis(n, p), exterior_basis(n, p - 1)
        pos = {J: i for i, J in enumerate(dst)}
        cols = []
        for J in src:
            out: dict = {}
            for l, j in enumerate(J):
                if V[j]:
                    _scale_into(out, V[j].terms, pos[J[:l] + J[l + 1:]], -1 if l % 2 else 1)
            cols.append(PolyVec._raw(len(dst), nv, out))
        diffs[-p] = tuple(cols)
    for p in range(1, d + 1):
        lower = exterior_basis(n, p - 1)
        pos = {J: i for i, J in enumerate(exterior_basis(n, p))}
        gens = []
        for row in jac:
            for K in lower:
                out: dict = {}
                for j in range(n):
                    if j in K or not row[j]:
                        continue
                    _scale_into(out, row[j].terms, pos[tuple(sorted(K + (j,)))], wedge_sign(j, K))
                if out:
                    gens.append(PolyVec._raw(len(pos), nv, out))
        rels[-p] = SubmodulePresentation(ring, len(pos), tuple(gens))
    C = PresentedComplex(FreeComplex(ring, -d, 0, ranks, diffs), rels)
    if check:
        C.check_square_zero()
        C.check_relations()
    return C


def index_of_vector_field(germ: ICISGerm, vf: VectorField, seed: int = 0) -> IndexReport:
    germ.check()
    ring = germ.ring()
    d = germ.d
    a, A = jacobian_and_relation(germ, vf)
    if colength(SubmodulePresentation.ideal(ring, a)) is INFINITE:
        raise NotIsolated("vector field does not have an isolated zero on X")
    chi_K0 = euler_characteristic(mixed_double_complex(a, A, 0, ring))
    T = find_admissible_transform(a, A, ring, seed=seed)
    terms = alternating_terms(T.a, T.A, list(range(1, d + 2)), ring)
    S = sum(terms)
    mu = milnor_number(germ, seed=seed)
    omega = kaehler_contraction_complex(germ, vf)
    hom = homology_lengths(omega)
    chi_omega = euler_characteristic(omega, hom)
    sign = (-1) ** d
    index_formula = sign * chi_K0 - sign * mu
    index_direct = chi_omega - sign * mu
    agreement = S == chi_K0 and chi_omega == sign * chi_K0 and index_formula == index_direct
    report = IndexReport(chi_K0, mu, index_formula, index_direct, terms, T.g, agreement, chi_omega, hom)
    if not agreement:
        raise Disagreement("index routes disagree", report=report.to_json(), alternating_sum=S)
    return report
