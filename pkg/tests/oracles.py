"""Independent reference computations used by the tests.

Nothing here touches the standard basis engine.  Lengths come from dense
exact linear algebra on truncated polynomial spaces: the length of
R^r / N equals dim Q[x]^r / (N + m^D) once two consecutive truncation
degrees D and D+1 give the same dimension (Nakayama).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb

import sympy


def monomials_below(nvars, degree):
    """All exponent tuples of total degree < degree."""
    out = []
    for d in range(degree):
        for e in product(range(d + 1), repeat=nvars):
            if sum(e) == d:
                out.append(e)
    return out


def rank(rows):
    """Rank of a list of sparse rows {column: Fraction} by exact elimination."""
    pivots = {}
    r = 0
    for row in rows:
        row = {k: Fraction(v) for k, v in row.items() if v}
        while row:
            col = min(row)
            if col not in pivots:
                pivots[col] = row
                r += 1
                break
            prow = pivots[col]
            f = row[col] / prow[col]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return r


def _as_terms(p):
    return {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in p.terms.items()}


def truncated_quotient_dim(vectors, rank_r, nvars, degree):
    """dim of Q[x]^r / (span of x^alpha * v, truncated at ``degree``)."""
    mons = monomials_below(nvars, degree)
    col = {(c, e): i for i, (c, e) in enumerate((c, e) for c in range(rank_r) for e in mons)}
    rows = []
    for v in vectors:
        low = min(sum(e) for (_, e) in v) if v else degree
        for alpha in mons:
            if sum(alpha) + low >= degree:
                continue
            row = {}
            for (c, e), coeff in v.items():
                t = tuple(a + b for a, b in zip(alpha, e))
                if sum(t) < degree:
                    row[col[(c, t)]] = coeff
            if row:
                rows.append(row)
    return len(col) - rank(rows)


def oracle_colength(vectors, rank_r, nvars, relations=(), max_degree=30):
    """Length of (Q[x]_(x) / relations)^r / (vectors), or None if not finite by max_degree.

    ``vectors`` are dicts {(comp, exps): coeff}; ``relations`` are Poly objects.
    """
    vecs = [dict(v) for v in vectors]
    for f in relations:
        t = _as_terms(f)
        for c in range(rank_r):
            vecs.append({(c, e): v for e, v in t.items()})
    prev = None
    for D in range(1, max_degree + 1):
        cur = truncated_quotient_dim(vecs, rank_r, nvars, D)
        if cur == prev:
            return cur
        prev = cur
    return None


def ideal_vectors(polys):
    return [{(0, e): c for e, c in _as_terms(p).items()} for p in polys]


def column_vectors(A):
    """Columns of a matrix of Poly as sparse vectors."""
    out = []
    for j in range(len(A[0])):
        v = {}
        for i, row in enumerate(A):
            for e, c in _as_terms(row[j]).items():
                v[(i, e)] = c
        out.append(v)
    return out


def oracle_hilbert_length(a, A, mu, nu, nvars, relations=()):
    """L(S_nu / a^mu U_nu) by expanding every generator explicitly."""
    m = len(A)
    n = len(A[0])
    x = sympy.symbols(f"t0:{m}")
    sym_basis = [e for e in product(range(nu + 1), repeat=m) if sum(e) == nu]
    pos = {b: i for i, b in enumerate(sym_basis)}
    vars_ = sympy.symbols(f"v0:{nvars}")

    def to_expr(p):
        return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.prod(
            [v ** k for v, k in zip(vars_, e)]) for e, c in p.terms.items())

    ys = [sum(to_expr(A[i][j]) * x[i] for i in range(m)) for j in range(n)]
    a_exprs = [to_expr(p) for p in a]
    gens = []
    a_pows = [sympy.prod(c) for c in _multisets(a_exprs, mu)]
    y_pows = [sympy.prod(c) for c in _multisets(ys, nu)]
    for ap in a_pows:
        for yp in y_pows:
            poly = sympy.Poly(sympy.expand(ap * yp), *x, *vars_)
            v = {}
            for monom, coeff in poly.terms():
                b, e = monom[:m], monom[m:]
                v[(pos[b], e)] = Fraction(int(coeff.p), int(coeff.q))
            if v:
                gens.append(v)
    return oracle_colength(gens, len(sym_basis), nvars, relations)


def _multisets(items, k):
    if k == 0:
        return [()]
    out = []

    def rec(start, acc):
        if len(acc) == k:
            out.append(tuple(acc))
            return
        for i in range(start, len(items)):
            rec(i, acc + [items[i]])

    rec(0, [])
    return out


def delta_identity_sympy(a, b, n):
    """n-th forward difference in k at 0 of sum_{p=k}^n (mu+p)^a (nu+p-k)^b."""
    mu, nu = sympy.symbols("mu nu")

    def F(k):
        return sum((mu + p) ** a * (nu + p - k) ** b for p in range(k, n + 1))

    return sympy.expand(sum((-1) ** (n - k) * comb(n, k) * F(k) for k in range(n + 1)))
