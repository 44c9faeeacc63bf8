"""Mixed, Buchsbaum-Rim, parameter-system and alternating multiplicities.

Hilbert functions are lengths of finite-colength submodules, computed with a
degree cutoff ("noether" bound): if ``m^s F`` lies in the submodule, every term
of degree >= s can be dropped.  Cutoffs are derived from the smallest c with
``m^c`` inside the ideal and ``m^c R^m`` inside the module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Sequence

from .complexes import (
    euler_characteristic,
    generalized_koszul,
    koszul_complex,
    symmetric_basis,
    tensor_total,
    tensor_with_module,
    check_relation,
)
from .errors import (
    KMError,
    NotFiniteColength,
    NotFiniteLength,
    NotInMaximalIdeal,
    RankMismatch,
    ReductionNotFound,
    StabilizationNotReached,
    TermUndefined,
    TransformNotFound,
)
from .localalg import (
    INFINITE,
    LOCAL_ORDER,
    RingSpec,
    SubmodulePresentation,
    _cached_std,
    _count_standard,
)
from .polyring import ZERO, Poly, PolyVec, Q

DEFAULT_CAP = 24


# ---------- data ----------

@dataclass
class IdealModulePair:
    """An ideal (a_1..a_k) and a submodule of R^m given by the columns of A."""

    ring: RingSpec
    ideal_gens: list
    matrix: list  # m rows, n columns

    def __post_init__(self):
        self.ideal_gens = list(self.ideal_gens)
        self.matrix = [list(row) for row in self.matrix]
        for p in self.ideal_gens:
            if p.constant_term():
                raise NotInMaximalIdeal("ideal generator outside the maximal ideal")
        for row in self.matrix:
            if len(row) != self.n:
                raise RankMismatch("ragged matrix")
            for p in row:
                if p.constant_term():
                    raise NotInMaximalIdeal("module generator outside m R^m")

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def n(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def d(self) -> int:
        return self.ring.dim

    def columns(self) -> list[PolyVec]:
        nv = self.ring.nvars
        return [PolyVec.from_polys([self.matrix[i][j] for i in range(self.m)], nv) for j in range(self.n)]

    def ideal(self) -> SubmodulePresentation:
        return SubmodulePresentation.ideal(self.ring, self.ideal_gens)

    def module(self) -> SubmodulePresentation:
        return SubmodulePresentation(self.ring, self.m, tuple(self.columns()))

    def check_finite(self):
        if ideal_power_bound(self.ideal()) is None:
            raise NotFiniteColength("ideal is not of finite colength")
        if ideal_power_bound(self.module()) is None:
            raise NotFiniteColength("module is not of finite colength")


@dataclass
class HilbertGrid:
    values: dict
    caps: tuple


@dataclass
class MultiplicityVector:
    e: list
    degree_witness: dict = field(default_factory=dict)

    def alternating_sum(self) -> int:
        return sum((-1) ** i * x for i, x in enumerate(self.e))


@dataclass
class ParamSystem:
    """Sequence a (k elements), m x n matrix A and optional module E = R^r/N."""

    ring: RingSpec
    a: list
    A: list
    m: int
    E: SubmodulePresentation | None = None

    def __post_init__(self):
        self.a = list(self.a)
        self.A = [list(row) for row in self.A] if self.A else [[] for _ in range(self.m)]
        if len(self.A) != self.m:
            raise RankMismatch("matrix must have m rows")

    @property
    def k(self):
        return len(self.a)

    @property
    def n(self):
        return len(self.A[0]) if self.A else 0

    def finite_length_module(self) -> SubmodulePresentation:
        """Presentation of R/(a) (x) R^m/(A) (x) E inside R^{m r}."""
        ring = self.ring
        nv = ring.nvars
        E = self.E if self.E is not None else SubmodulePresentation(ring, 1, ())
        r = E.rank
        rank = self.m * r
        gens = []
        for ai in self.a:
            for c in range(rank):
                gens.append(PolyVec._raw(rank, nv, {(c, e): v for e, v in ai.terms.items()}))
        for j in range(self.n):
            for s in range(r):
                terms = {}
                for i in range(self.m):
                    for e, v in self.A[i][j].terms.items():
                        terms[(i * r + s, e)] = v
                gens.append(PolyVec._raw(rank, nv, terms))
        for i in range(self.m):
            for g in E.generators:
                gens.append(PolyVec._raw(rank, nv, {(i * r + c, e): v for (c, e), v in g.terms.items()}))
        return SubmodulePresentation(ring, rank, tuple(gens))

    def is_defined(self) -> bool:
        return ideal_power_bound(self.finite_length_module()) is not None


# ---------- finite-colength helpers ----------

def ideal_power_bound(N: SubmodulePresentation):
    """Smallest c with m^c R^rank inside N, or None if N has infinite colength."""
    elems = _cached_std(N.raw(), LOCAL_ORDER)
    if _count_standard(elems, N.rank, N.ring.nvars) is INFINITE:
        return None
    return _max_standard_degree(elems, N.rank, N.ring.nvars) + 1


def _max_standard_degree(elems, rank, nvars):
    by_comp = {}
    for el in elems:
        by_comp.setdefault(el.lt[0], []).append(el.lt[1])
    top = -1
    for c in range(rank):
        lts = by_comp.get(c, [])
        if any(sum(e) == 0 for e in lts):
            continue
        frontier = [(0,) * nvars]
        seen = set(frontier)
        while frontier:
            nxt = []
            for mono in frontier:
                top = max(top, sum(mono))
                for v in range(nvars):
                    e = list(mono)
                    e[v] += 1
                    e = tuple(e)
                    if e in seen or any(all(a <= b for a, b in zip(l, e)) for l in lts):
                        continue
                    seen.add(e)
                    nxt.append(e)
            frontier = nxt
    return top


def _raw_length(gens, rank, ring, noether):
    elems = _cached_std(list(gens) + ring.relation_vectors(rank), LOCAL_ORDER, noether)
    return _count_standard(elems, rank, ring.nvars, noether), elems


# ---------- Hilbert functions ----------

class _HilbertEngine:
    """Standard bases of a^mu, U_nu and a^mu U_nu under one degree cutoff."""

    def __init__(self, P: IdealModulePair, noether: int):
        self.P = P
        self.ring = P.ring
        self.noether = noether
        self.nv = P.ring.nvars
        self._apow = {}
        self._upow = {}

    def _cut(self, vec):
        s = self.noether
        return {t: c for t, c in vec.items() if sum(t[1]) < s}

    def ideal_power(self, mu):
        """Standard basis elements (rank 1) of a^mu."""
        if mu in self._apow:
            return self._apow[mu]
        z = (0,) * self.nv
        if mu == 0:
            gens = [{(0, z): Q(1)}]
        else:
            prev = self.ideal_power(mu - 1)
            gens = []
            for el in prev:
                for a in self.P.ideal_gens:
                    gens.append(self._cut(_poly_times_vec(a, el.vec)))
        _, elems = _raw_length([g for g in gens if g], 1, self.ring, self.noether)
        self._apow[mu] = elems
        return elems

    def module_power(self, nu):
        """Standard basis elements of U_nu inside S_nu (rank C(nu+m-1, m-1))."""
        if nu in self._upow:
            return self._upow[nu]
        m = self.P.m
        z = (0,) * self.nv
        rank = comb(nu + m - 1, m - 1)
        if nu == 0:
            gens = [{(0, z): Q(1)}]
        else:
            prev = self.module_power(nu - 1)
            src = symmetric_basis(m, nu - 1)
            dst = {b: i for i, b in enumerate(symmetric_basis(m, nu))}
            gens = []
            for el in prev:
                for j in range(self.P.n):
                    gens.append(self._cut(_times_y(el.vec, j, self.P.matrix, m, src, dst)))
        _, elems = _raw_length([g for g in gens if g], rank, self.ring, self.noether)
        self._upow[nu] = elems
        return elems

    def length(self, mu, nu, cutoff=None):
        """L(S_nu / a^mu U_nu), given m^cutoff S_nu inside a^mu U_nu.

        Bases computed modulo m^noether stay valid modulo any smaller power,
        so each cell can use its own (smaller) cutoff.
        """
        s = self.noether if cutoff is None else min(cutoff, self.noether)
        rank = comb(nu + self.P.m - 1, self.P.m - 1)
        gens = []
        for p in self.ideal_power(mu):
            poly = {e: c for (_, e), c in p.vec.items() if sum(e) < s}
            for u in self.module_power(nu):
                v = {t: c for t, c in _poly_times_vec_terms(poly, u.vec).items() if sum(t[1]) < s}
                if v:
                    gens.append(v)
        L, _ = _raw_length(gens, rank, self.ring, s)
        return L


def _poly_times_vec(p: Poly, vec: dict) -> dict:
    return _poly_times_vec_terms(p.terms, vec)


def _poly_times_vec_terms(pterms: dict, vec: dict) -> dict:
    out = {}
    for e1, c1 in pterms.items():
        for (comp, e2), c2 in vec.items():
            t = (comp, tuple(x + y for x, y in zip(e1, e2)))
            v = out.get(t, ZERO) + c1 * c2
            if v:
                out[t] = v
            else:
                out.pop(t, None)
    return out


def _times_y(vec, j, A, m, src_basis, dst_pos):
    """Multiply an element of S_{nu-1} by y_j = sum_i A_ij x_i."""
    out = {}
    for (comp, e), c in vec.items():
        beta = src_basis[comp]
        for i in range(m):
            entry = A[i][j]
            if not entry:
                continue
            b = list(beta)
            b[i] += 1
            target = dst_pos[tuple(b)]
            for e2, c2 in entry.terms.items():
                t = (target, tuple(x + y for x, y in zip(e, e2)))
                v = out.get(t, ZERO) + c * c2
                if v:
                    out[t] = v
                else:
                    out.pop(t, None)
    return out


def _bounds(P: IdealModulePair):
    ca = ideal_power_bound(P.ideal())
    cm = ideal_power_bound(P.module())
    if ca is None:
        raise NotFiniteColength("ideal is not of finite colength")
    if cm is None:
        raise NotFiniteColength("module is not of finite colength")
    return max(ca, 1), max(cm, 1)


def hilbert_length(P: IdealModulePair, mu: int, nu: int) -> int:
    """Length of S_nu / a^mu U_nu."""
    if mu < 0 or nu < 0:
        raise ValueError("mu and nu must be non-negative")
    ca, cm = _bounds(P)
    return _HilbertEngine(P, max(ca * mu + cm * nu, 1)).length(mu, nu)


def hilbert_grid(P: IdealModulePair, mus: Sequence[int], nus: Sequence[int]) -> HilbertGrid:
    ca, cm = _bounds(P)
    eng = _HilbertEngine(P, max(ca * max(mus) + cm * max(nus), 1))
    values = {(mu, nu): eng.length(mu, nu, max(ca * mu + cm * nu, 1)) for mu in mus for nu in nus}
    return HilbertGrid(values, (max(mus), max(nus)))


# ---------- polynomial fitting ----------

def _finite_difference(values, base, steps):
    """Mixed forward difference; ``steps`` gives the order per coordinate."""
    total = Fraction(0)
    ranges = [range(s + 1) for s in steps]

    def rec(axis, offset, coeff):
        nonlocal total
        if axis == len(steps):
            total += coeff * values[tuple(b + o for b, o in zip(base, offset))]
            return
        s = steps[axis]
        for t in range(s + 1):
            rec(axis + 1, offset + (t,), coeff * comb(s, t) * (-1) ** (s - t))

    rec(0, (), 1)
    return total


def _solve(rows, rhs):
    """Exact solution of a square nonsingular rational system."""
    n = len(rows)
    M = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def fit_bivariate(values: dict, mu0: int, nu0: int, D: int) -> dict:
    """Interpolate a total-degree-D polynomial through a triangle of cells.

    Returns coefficients {(i, j): c} of mu^i nu^j.
    """
    exps = [(i, j) for i in range(D + 1) for j in range(D + 1 - i)]
    cells = [(mu0 + i, nu0 + j) for i, j in exps]
    rows = [[Fraction(mu) ** i * Fraction(nu) ** j for i, j in exps] for mu, nu in cells]
    sol = _solve(rows, [values[c] for c in cells])
    return {ij: c for ij, c in zip(exps, sol)}


def fit_univariate(values: dict, x0: int, D: int) -> list:
    rows = [[Fraction(x0 + i) ** k for k in range(D + 1)] for i in range(D + 1)]
    return _solve(rows, [values[(x0 + i,)] for i in range(D + 1)])


# ---------- mixed multiplicities ----------

def mixed_multiplicities(P: IdealModulePair, mu_cap: int = DEFAULT_CAP, nu_cap: int = DEFAULT_CAP,
                         check_extremes: bool = True) -> MultiplicityVector:
    """Mixed multiplicities (e_0, ..., e_d) from the bigraded Hilbert polynomial.

    The window [0, W)^2 starts at W = d+m+2 and doubles until every mixed
    difference of order d+m vanishes on its top quarter [W//2, W)^2.
    """
    d, m = P.d, P.m
    D = d + m - 1
    ca, cm = _bounds(P)
    W = d + m + 2
    while True:
        lo = W // 2
        side = W - lo
        if W - 1 > min(mu_cap, nu_cap):
            raise StabilizationNotReached(
                "Hilbert function did not stabilize within the caps", caps=[mu_cap, nu_cap]
            )
        if side >= D + 2:
            eng = _HilbertEngine(P, ca * (W - 1) + cm * (W - 1))
            values = {(mu, nu): eng.length(mu, nu, ca * mu + cm * nu) for mu in range(lo, W) for nu in range(lo, W)}
            if _differences_vanish(values, lo, W, D + 1):
                break
        W *= 2
    coeffs = fit_bivariate(values, lo, lo, D)
    for (mu, nu), v in values.items():
        if sum(c * Fraction(mu) ** i * Fraction(nu) ** j for (i, j), c in coeffs.items()) != v:
            raise StabilizationNotReached("polynomial fit does not match the window", cell=[mu, nu])
    e = []
    for i in range(D + 1):
        val = coeffs.get((i, D - i), Fraction(0)) * factorial(i) * factorial(D - i)
        if i > d:
            if val != 0:
                raise StabilizationNotReached("mu-degree exceeds the dimension", index=i)
            continue
        if val.denominator != 1:
            raise StabilizationNotReached("non-integral mixed multiplicity", index=i, value=str(val))
        e.append(int(val))
    witness = {"window": [lo, W - 1], "noether": ca * (W - 1) + cm * (W - 1)}
    mv = MultiplicityVector(e, witness)
    if check_extremes:
        ea = ideal_multiplicity(P.ideal_gens, P.ring, cap=mu_cap)
        eM = buchsbaum_rim_multiplicity(P.matrix, P.ring, cap=nu_cap)
        if e[d] != ea or e[0] != eM:
            raise KMError(
                "extreme mixed multiplicities disagree with single-graded computations",
                e=e, e_ideal=ea, e_module=eM,
            )
    return mv


def _differences_vanish(values, lo, W, order):
    for a in range(order + 1):
        b = order - a
        for mu in range(lo, W - a):
            for nu in range(lo, W - b):
                if _finite_difference(values, (mu, nu), (a, b)) != 0:
                    return False
    return True


def _leading_coefficient_1d(length_fn, D, cap, what):
    """D! times the leading coefficient of an eventually polynomial function."""
    W = D + 3
    while True:
        if W - 1 > cap:
            raise StabilizationNotReached(f"{what} Hilbert function did not stabilize", caps=[cap])
        lo = W // 2
        if W - lo >= D + 2:
            values = {(x,): length_fn(x, W - 1) for x in range(lo, W)}
            ok = all(
                _finite_difference(values, (x,), (D + 1,)) == 0 for x in range(lo, W - D - 1)
            )
            if ok:
                break
        W *= 2
    coeffs = fit_univariate(values, lo, D)
    val = coeffs[D] * factorial(D)
    if val.denominator != 1:
        raise StabilizationNotReached(f"non-integral {what} multiplicity", value=str(val))
    return int(val)


def ideal_multiplicity(gens: Sequence[Poly], ring: RingSpec, E: SubmodulePresentation | None = None,
                       dim: int | None = None, cap: int = DEFAULT_CAP) -> int:
    """Hilbert-Samuel multiplicity e(a; E) from the lengths of E / a^s E."""
    E = E if E is not None else SubmodulePresentation(ring, 1, ())
    d = ring.dim if dim is None else dim
    r = E.rank
    Nraw = [dict(g.terms) for g in E.generators if g.terms]
    I = SubmodulePresentation(ring, r, tuple(
        PolyVec._raw(r, ring.nvars, {(c, e): v for e, v in a.terms.items()}) for a in gens for c in range(r)
    ) + E.generators)
    c = ideal_power_bound(I)
    if c is None:
        raise NotFiniteColength("E / aE is not of finite length")
    c = max(c, 1)
    if d == 0:
        return _raw_length(Nraw, r, ring, None)[0]

    cache = {}

    def length(s, top):
        noether = c * top
        key = (s, noether)
        if key not in cache:
            vecs = [{(comp, (0,) * ring.nvars): Q(1)} for comp in range(r)]
            for _ in range(s):
                nxt = []
                for v in vecs:
                    for a in gens:
                        w = {t: x for t, x in _poly_times_vec(a, v).items() if sum(t[1]) < noether}
                        if w:
                            nxt.append(w)
                _, elems = _raw_length(nxt + Nraw, r, ring, noether)
                vecs = [el.vec for el in elems]
            cache[key] = _raw_length(vecs + Nraw, r, ring, noether)[0]
        return cache[key]

    return _leading_coefficient_1d(length, d, cap, "ideal")


def buchsbaum_rim_multiplicity(A: Sequence[Sequence[Poly]], ring: RingSpec, dim: int | None = None,
                               cap: int = DEFAULT_CAP) -> int:
    """Buchsbaum-Rim multiplicity of the module generated by the columns of A."""
    m = len(A)
    d = ring.dim if dim is None else dim
    D = d + m - 1
    P = IdealModulePair(ring, [ring.var(i) for i in range(ring.nvars)], A)
    cm = ideal_power_bound(P.module())
    if cm is None:
        raise NotFiniteColength("module is not of finite colength")
    cm = max(cm, 1)
    engines = {}

    def length(nu, top):
        eng = engines.setdefault(top, _HilbertEngine(P, cm * top))
        rank = comb(nu + m - 1, m - 1)
        return _raw_length([el.vec for el in eng.module_power(nu)], rank, ring, eng.noether)[0]

    return _leading_coefficient_1d(length, D, cap, "module")


# ---------- parameter systems ----------

def param_complex(PS: ParamSystem, nu: int = 0):
    ring = PS.ring
    K = koszul_complex(PS.a, ring, check=False)
    L = generalized_koszul(PS.A, nu, ring, m=PS.m, check=False)
    T = tensor_total(K, L, check=False)
    if PS.E is not None:
        return tensor_with_module(T, PS.E)
    return T


def param_multiplicity(PS: ParamSystem, nu: int = 0) -> int:
    """e(a; A; E): Euler characteristic of K (x) L_nu (x) E."""
    if not PS.is_defined():
        raise NotFiniteLength("R/(a) (x) R^m/(A) (x) E is not of finite length", k=PS.k, n=PS.n)
    return euler_characteristic(param_complex(PS, nu))


def _sub_matrix(A, cols):
    return [[row[j] for j in cols] for row in A]


def _products_module(a, A, ring):
    m = len(A)
    nv = ring.nvars
    cols = []
    for j, aj in enumerate(a):
        cols.append(PolyVec.from_polys([aj * A[i][j] for i in range(m)], nv))
    return SubmodulePresentation(ring, m, tuple(cols))


def alternating_terms(a, A, idx, ring: RingSpec, nu: int = 0) -> list[int]:
    """Signed summands (-1)^j e(a_{i_1..i_j}; A_k, k not in i_1..i_{j+1})."""
    n = len(a)
    m = len(A)
    d = ring.dim
    if n != d + m:
        raise RankMismatch(f"need n = d + m, got n={n}, d={d}, m={m}")
    idx = [i - 1 for i in idx]
    if len(idx) != d + 1 or len(set(idx)) != d + 1 or not all(0 <= i < n for i in idx):
        raise ValueError("index sequence must be injective of length d+1 within 1..n")
    check_relation(a, A, ring)
    systems = []
    for j in range(d + 1):
        cols = [k for k in range(n) if k not in idx[: j + 1]]
        systems.append(ParamSystem(ring, [a[i] for i in idx[:j]], _sub_matrix(A, cols), m))
    if ideal_power_bound(_products_module(a, A, ring)) is None:
        for j, PS in enumerate(systems):
            if not PS.is_defined():
                raise TermUndefined(f"summand {j} is not defined", j=j)
        raise TermUndefined("(a_1 A_1, ..., a_n A_n) is not of finite colength", j=None)
    terms = []
    for j, PS in enumerate(systems):
        if not PS.is_defined():
            raise TermUndefined(f"summand {j} is not defined", j=j)
        terms.append((-1) ** j * param_multiplicity(PS, nu))
    return terms


def alternating_multiplicity(a, A, idx, ring: RingSpec, nu: int = 0) -> int:
    """S(a, A, i) for an injective 1-based index sequence of length d+1."""
    return sum(alternating_terms(a, A, idx, ring, nu))


# ---------- coordinate changes ----------

def _det_and_inverse(g):
    n = len(g)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == r)) for i in range(n)] for r, row in enumerate(g)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0), None
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        pv = M[col][col]
        det *= pv
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det, [row[n:] for row in M]


def apply_transform(g, a, A, ring):
    """(a^g)^T = g a^T and A^g = A g^{-1}."""
    det, ginv = _det_and_inverse(g)
    if det == 0:
        raise ValueError("transform is singular")
    n = len(a)
    nv = ring.nvars
    ag = []
    for i in range(n):
        s = Poly.zero(nv)
        for j in range(n):
            if g[i][j]:
                s = s + a[j] * Q(g[i][j])
        ag.append(s)
    Ag = []
    for row in A:
        new = []
        for j in range(n):
            s = Poly.zero(nv)
            for k in range(n):
                if ginv[k][j]:
                    s = s + row[k] * Q(ginv[k][j].numerator, ginv[k][j].denominator)
            new.append(s)
        Ag.append(new)
    return ag, Ag


def random_invertible(n: int, rng: random.Random, lo: int = -9, hi: int = 9):
    while True:
        g = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if _det_and_inverse(g)[0] != 0:
            return g


def is_admissible(a, A, ring) -> bool:
    return ideal_power_bound(_products_module(a, A, ring)) is not None


@dataclass
class Transform:
    g: list
    a: list
    A: list
    attempts: int


def find_admissible_transform(a, A, ring: RingSpec, seed: int = 0, attempts: int = 64,
                              try_identity: bool = True) -> Transform:
    """Search for g in GL_n such that (a^g_j A^g_j)_j has finite colength."""
    n = len(a)
    if try_identity and is_admissible(a, A, ring):
        return Transform([[int(i == j) for j in range(n)] for i in range(n)], list(a), [list(r) for r in A], 0)
    rng = random.Random(seed)
    for t in range(1, attempts + 1):
        g = random_invertible(n, rng)
        ag, Ag = apply_transform(g, a, A, ring)
        if is_admissible(ag, Ag, ring):
            return Transform(g, ag, Ag, t)
    raise TransformNotFound("no admissible transform within the attempt budget", attempts=attempts, seed=seed)


# ---------- reductions ----------

def combine_columns(A, coeffs, ring):
    """Columns sum_j coeffs[l][j] A_j for each row l of ``coeffs``."""
    nv = ring.nvars
    out = [[Poly.zero(nv) for _ in coeffs] for _ in A]
    for l, row in enumerate(coeffs):
        for j, c in enumerate(row):
            if c:
                for i in range(len(A)):
                    out[i][l] = out[i][l] + A[i][j] * Q(c)
    return out


def reduction_number(N, A, ring, max_nu: int = 6):
    """Smallest nu <= max_nu with N U_nu = U_{nu+1} for U = (A), or None.

    With m^c R^m inside (A) we have m^{c(nu+1)} S_{nu+1} inside U_{nu+1}, so
    equality modulo m^{c(nu+1)+1} already gives U_{nu+1} = N U_nu + m U_{nu+1},
    and Nakayama turns that into equality.
    """
    m = len(A)
    P = IdealModulePair(ring, [], A)
    c = ideal_power_bound(P.module())
    if c is None:
        raise NotFiniteColength("module is not of finite colength")
    for nu in range(max_nu + 1):
        s = c * (nu + 1) + 1
        eng = _HilbertEngine(P, s)
        rank = comb(nu + m, m - 1)
        target, _ = _raw_length([el.vec for el in eng.module_power(nu + 1)], rank, ring, s)
        src = symmetric_basis(m, nu)
        dst = {b: i for i, b in enumerate(symmetric_basis(m, nu + 1))}
        gens = []
        for el in eng.module_power(nu):
            for j in range(len(N[0])):
                v = eng._cut(_times_y(el.vec, j, N, m, src, dst))
                if v:
                    gens.append(v)
        if _raw_length(gens, rank, ring, s)[0] == target:
            return nu
    return None


def is_reduction(N, A, ring, max_nu: int = 6) -> bool:
    """Certify N (combinations of the columns of A) as a reduction of (A)."""
    m = len(A)
    if ideal_power_bound(SubmodulePresentation.from_columns(
            ring, m, [[row[j] for row in N] for j in range(len(N[0]))])) is None:
        return False
    return reduction_number(N, A, ring, max_nu) is not None


def general_reduction(A, ring: RingSpec, seed: int = 0, attempts: int = 16, max_nu: int = 6):
    """d+m-1 general combinations of the columns of A generating a reduction."""
    m = len(A)
    n = len(A[0])
    d = ring.dim
    if d <= 0:
        raise ValueError("reductions need a ring of positive dimension")
    target = d + m - 1
    if n <= target:
        return [list(row) for row in A]
    rng = random.Random(seed)
    for _ in range(attempts):
        coeffs = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(target)]
        N = combine_columns(A, coeffs, ring)
        if is_reduction(N, A, ring, max_nu):
            return N
    raise ReductionNotFound("no reduction found within the attempt budget", attempts=attempts, seed=seed)


# ---------- finite-difference identity ----------

def delta_identity_value(a: int, b: int, n: int) -> Poly:
    """n-th forward difference in k at 0 of sum_{p=k}^n (mu+p)^a (nu+p-k)^b."""
    mu = Poly.var(2, 0)
    nu = Poly.var(2, 1)

    def F(k):
        s = Poly.zero(2)
        for p in range(k, n + 1):
            s = s + (mu + p) ** a * (nu + (p - k)) ** b
        return s

    total = Poly.zero(2)
    for k in range(n + 1):
        total = total + F(k) * ((-1) ** (n - k) * comb(n, k))
    return total


def delta_identity_check(a: int, b: int, n: int) -> bool:
    value = delta_identity_value(a, b, n)
    if a + b == n - 1:
        expected = -((-1) ** b) * factorial(a) * factorial(b)
    elif a + b < n - 1:
        expected = 0
    else:
        raise ValueError("identity only covers a + b <= n - 1")
    return value == Poly.const(2, expected)
