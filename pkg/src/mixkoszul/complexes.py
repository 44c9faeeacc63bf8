"""Bounded cochain complexes of free and presented modules.

A differential ``d_i : F_i -> F_{i+1}`` is stored as the tuple of images of the
basis vectors of ``F_i`` (its columns).  All complexes are cohomological.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

from .errors import NotAComplex, NotFiniteLength, NotInMaximalIdeal, RankMismatch, RelationViolated
from .localalg import (
    INFINITE,
    LOCAL_ORDER,
    RingSpec,
    SubmodulePresentation,
    _count_standard,
    _cached_std,
    _index,
    _modulo_elems,
    _nf,
    _second_block,
    _syz_elems,
    standard_basis,
)
from .polyring import ONE, ZERO, Poly, PolyVec


# ---------- bases ----------

def exterior_basis(n: int, p: int) -> list[tuple]:
    """Sorted index tuples of the basis of the p-th exterior power of R^n."""
    return list(combinations(range(n), p))


def symmetric_basis(m: int, deg: int) -> list[tuple]:
    """Exponent vectors of degree ``deg`` in m symbols, in a fixed order."""
    if m == 0:
        return [()] if deg == 0 else []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for k in range(left, -1, -1):
            rec(prefix + (k,), left - k, slots - 1)

    rec((), deg, m)
    return out


def wedge_sign(j: int, J: tuple) -> int:
    """Sign of e_j ^ e_J reordered into increasing position."""
    return -1 if sum(1 for x in J if x < j) % 2 else 1


# ---------- raw vector helpers ----------

def _scale_into(out: dict, poly_terms: dict, comp: int, sign):
    for e, c in poly_terms.items():
        t = (comp, e)
        v = out.get(t, ZERO) + sign * c
        if v:
            out[t] = v
        else:
            out.pop(t, None)


def _apply(columns: Sequence[PolyVec], vec_terms: dict, rank: int, nvars: int) -> dict:
    """Image of a vector under the map with the given columns."""
    out: dict = {}
    for (comp, e), c in vec_terms.items():
        for (comp2, e2), c2 in columns[comp].terms.items():
            t = (comp2, tuple(a + b for a, b in zip(e, e2)))
            v = out.get(t, ZERO) + c * c2
            if v:
                out[t] = v
            else:
                out.pop(t, None)
    return out


def _shift(vec: dict, offset: int) -> dict:
    return {(c + offset, e): v for (c, e), v in vec.items()}


# ---------- complexes ----------

@dataclass
class FreeComplex:
    """Cochain complex of free modules R^{ranks[i]} in degrees lo..hi."""

    ring: RingSpec
    lo: int
    hi: int
    ranks: dict
    differentials: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict, repr=False)

    def rank(self, i: int) -> int:
        return self.ranks.get(i, 0)

    def diff(self, i: int) -> tuple:
        """Columns of d_i : F_i -> F_{i+1}."""
        return self.differentials.get(i, ())

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def matrix(self, i: int) -> list[list[Poly]]:
        cols = self.diff(i)
        nv = self.ring.nvars
        rows = self.rank(i + 1)
        mat = [[Poly.zero(nv) for _ in cols] for _ in range(rows)]
        for j, col in enumerate(cols):
            for r, p in enumerate(col.components()):
                mat[r][j] = p
        return mat

    def alternating_rank_sum(self) -> int:
        return sum((-1) ** (i % 2) * self.rank(i) for i in self.degrees())

    def relations(self, i: int) -> list[dict]:
        return []

    def check_square_zero(self) -> None:
        """Raise NotAComplex unless d_{i+1} d_i = 0 modulo the term relations."""
        nv = self.ring.nvars
        for i in range(self.lo, self.hi - 1):
            cols, nxt = self.diff(i), self.diff(i + 1)
            if not cols or not nxt:
                continue
            target = self.rank(i + 2)
            rel = self.relations(i + 2) + self.ring.relation_vectors(target)
            idx = _index(_cached_std(rel, LOCAL_ORDER)) if rel else {}
            for j, col in enumerate(cols):
                img = _apply(nxt, col.terms, target, nv)
                if img and (not idx or _nf(img, idx, LOCAL_ORDER)):
                    raise NotAComplex("d^2 != 0", degree=i, column=j)

    def to_json(self) -> dict:
        return {
            "degrees": [self.lo, self.hi],
            "ranks": {str(i): self.rank(i) for i in self.degrees()},
            "differentials": {
                str(i): [[self.ring.fmt(p) for p in row] for row in self.matrix(i)]
                for i in self.degrees()
                if self.diff(i)
            },
        }


@dataclass
class PresentedComplex:
    """Complex whose degree-i term is R^{r_i} / N_i."""

    underlying: FreeComplex
    term_relations: dict = field(default_factory=dict)

    @property
    def ring(self):
        return self.underlying.ring

    @property
    def lo(self):
        return self.underlying.lo

    @property
    def hi(self):
        return self.underlying.hi

    def rank(self, i):
        return self.underlying.rank(i)

    def diff(self, i):
        return self.underlying.diff(i)

    def degrees(self):
        return self.underlying.degrees()

    def relations(self, i: int) -> list[dict]:
        N = self.term_relations.get(i)
        return [dict(g.terms) for g in N.generators if g.terms] if N is not None else []

    def check_square_zero(self) -> None:
        FreeComplex.check_square_zero(self)

    def check_relations(self) -> None:
        """Raise NotAComplex unless every d_i maps N_i into N_{i+1}."""
        nv = self.ring.nvars
        for i in self.degrees():
            cols = self.diff(i)
            if not cols:
                continue
            target = self.rank(i + 1)
            rel = self.relations(i + 1) + self.ring.relation_vectors(target)
            idx = _index(_cached_std(rel, LOCAL_ORDER)) if rel else {}
            for g in self.relations(i):
                img = _apply(cols, g, target, nv)
                if img and (not idx or _nf(img, idx, LOCAL_ORDER)):
                    raise NotAComplex("differential does not respect the relations", degree=i)

    def to_json(self) -> dict:
        out = self.underlying.to_json()
        out["relations"] = {
            str(i): [[self.ring.fmt(p) for p in g.components()] for g in N.generators]
            for i, N in self.term_relations.items()
        }
        return out


def _require_in_m(polys, what):
    for p in polys:
        if p.constant_term():
            raise NotInMaximalIdeal(f"{what} has an entry outside the maximal ideal")


# ---------- constructions ----------

def koszul_complex(a: Sequence[Poly], ring: RingSpec, check: bool = True) -> FreeComplex:
    """Koszul complex of a_1..a_k in degrees -k..0; degree p-k holds the p-th exterior power."""
    a = list(a)
    _require_in_m(a, "Koszul sequence")
    k = len(a)
    nv = ring.nvars
    ranks, diffs = {}, {}
    for p in range(k + 1):
        ranks[p - k] = comb(k, p)
    for p in range(k):
        src, dst = exterior_basis(k, p), exterior_basis(k, p + 1)
        pos = {J: i for i, J in enumerate(dst)}
        cols = []
        for J in src:
            out: dict = {}
            for j in range(k):
                if j in J or not a[j]:
                    continue
                K = tuple(sorted(J + (j,)))
                _scale_into(out, a[j].terms, pos[K], wedge_sign(j, J))
            cols.append(PolyVec._raw(len(dst), nv, out))
        diffs[p - k] = tuple(cols)
    C = FreeComplex(ring, -k, 0, ranks, diffs)
    if check:
        C.check_square_zero()
    return C


def _contraction_images(A, J, beta, m, nv, pos):
    """sum_i sum_l (-1)^l A[i][j_l] e_{J minus j_l} (x) x_i x^beta (l 0-based)."""
    out: dict = {}
    for l, j in enumerate(J):
        rest = J[:l] + J[l + 1:]
        sign = -1 if l % 2 else 1
        for i in range(m):
            entry = A[i][j]
            if not entry:
                continue
            b = list(beta)
            b[i] += 1
            _scale_into(out, entry.terms, pos[(rest, tuple(b))], sign)
    return out


def _matrix_of(A, m, n):
    A = [list(row) for row in A]
    if len(A) != m or any(len(row) != n for row in A):
        raise RankMismatch("matrix shape mismatch")
    return A


def generalized_koszul(A: Sequence[Sequence[Poly]], nu: int, ring: RingSpec, m: int | None = None,
                       check: bool = True) -> FreeComplex:
    """Generalized Koszul complex L_nu of the m x n matrix A.

    Degree q-n holds Lambda^{n-q} R^n (x) S_{nu+q} R^m; the differential is
    contraction with the columns of A followed by multiplication by x_i.
    """
    if m is None:
        m = len(A)
    n = len(A[0]) if m and A else 0
    A = _matrix_of(A, m, n)
    _require_in_m([p for row in A for p in row], "matrix")
    nv = ring.nvars
    ranks, diffs = {}, {}
    bases = {}
    for q in range(n + 1):
        basis = [(J, b) for J in exterior_basis(n, n - q) for b in symmetric_basis(m, nu + q)]
        bases[q] = basis
        ranks[q - n] = len(basis)
    for q in range(n):
        pos = {key: i for i, key in enumerate(bases[q + 1])}
        cols = [
            PolyVec._raw(len(bases[q + 1]), nv, _contraction_images(A, J, b, m, nv, pos))
            for J, b in bases[q]
        ]
        diffs[q - n] = tuple(cols)
    C = FreeComplex(ring, -n, 0, ranks, diffs)
    if check:
        C.check_square_zero()
    return C


def check_relation(a: Sequence[Poly], A, ring: RingSpec) -> list[Poly]:
    """Return sum_j a_j A_j; raise RelationViolated unless it vanishes in the ring."""
    m = len(A)
    n = len(a)
    out = []
    for i in range(m):
        s = Poly.zero(ring.nvars)
        for j in range(n):
            s = s + a[j] * A[i][j]
        out.append(s)
        if not ring.is_zero(s):
            raise RelationViolated(
                "sum_j a_j A_j is not zero", row=i, value=ring.fmt(s)
            )
    return out


def mixed_double_complex(a: Sequence[Poly], A: Sequence[Sequence[Poly]], nu: int,
                         ring: RingSpec, check: bool = True) -> FreeComplex:
    """Total complex of the mixed double complex K_nu.

    K^{pq} = Lambda^{p-q} R^n (x) S_{nu+q} R^m for 0 <= q <= p <= n in total
    degree p+q; D = d' + d'' with d' = (sum a_j e_j) ^ . and d'' the
    contraction with A.  The two anticommute because sum_j a_j A_j = 0.
    """
    a = list(a)
    n = len(a)
    m = len(A)
    A = _matrix_of(A, m, n)
    _require_in_m(a, "sequence a")
    _require_in_m([p for row in A for p in row], "matrix A")
    check_relation(a, A, ring)
    nv = ring.nvars
    blocks = {}
    for t in range(2 * n + 1):
        keys = []
        for p in range(n + 1):
            q = t - p
            if 0 <= q <= p:
                for J in exterior_basis(n, p - q):
                    for b in symmetric_basis(m, nu + q):
                        keys.append((p, q, J, b))
        blocks[t] = keys
    ranks = {t: len(k) for t, k in blocks.items()}
    positions = {t: {(p, q, J, b): i for i, (p, q, J, b) in enumerate(keys)} for t, keys in blocks.items()}
    diffs = {}
    for t in range(2 * n):
        pos = positions[t + 1]
        cols = []
        for p, q, J, b in blocks[t]:
            out: dict = {}
            if p + 1 <= n:
                for j in range(n):
                    if j in J or not a[j]:
                        continue
                    K = tuple(sorted(J + (j,)))
                    _scale_into(out, a[j].terms, pos[(p + 1, q, K, b)], wedge_sign(j, J))
            if q + 1 <= p:
                for l, j in enumerate(J):
                    rest = J[:l] + J[l + 1:]
                    sign = -1 if l % 2 else 1
                    for i in range(m):
                        entry = A[i][j]
                        if not entry:
                            continue
                        bb = list(b)
                        bb[i] += 1
                        _scale_into(out, entry.terms, pos[(p, q + 1, rest, tuple(bb))], sign)
            cols.append(PolyVec._raw(ranks[t + 1], nv, out))
        diffs[t] = tuple(cols)
    C = FreeComplex(ring, 0, 2 * n, ranks, diffs, labels=blocks)
    if check:
        C.check_square_zero()
    return C


def unit_complex(ring: RingSpec) -> FreeComplex:
    return FreeComplex(ring, 0, 0, {0: 1}, {})


def tensor_total(C: FreeComplex, D: FreeComplex, check: bool = True) -> FreeComplex:
    """Total complex of C (x) D with d(c (x) e) = dc (x) e + (-1)^deg(c) c (x) de."""
    if C.ring != D.ring:
        raise RankMismatch("tensor product of complexes over different rings")
    ring = C.ring
    nv = ring.nvars
    lo, hi = C.lo + D.lo, C.hi + D.hi
    layout = {}
    for t in range(lo, hi + 1):
        keys = []
        for i in C.degrees():
            j = t - i
            if D.lo <= j <= D.hi:
                for x in range(C.rank(i)):
                    for y in range(D.rank(j)):
                        keys.append((i, x, y))
        layout[t] = keys
    ranks = {t: len(k) for t, k in layout.items()}
    pos = {t: {key: n for n, key in enumerate(keys)} for t, keys in layout.items()}
    diffs = {}
    for t in range(lo, hi):
        target = pos[t + 1]
        cols = []
        for i, x, y in layout[t]:
            j = t - i
            out: dict = {}
            cd = C.diff(i)
            if cd:
                for (comp, e), c in cd[x].terms.items():
                    key = (comp, e)
                    tt = (target[(i + 1, comp, y)], e)
                    v = out.get(tt, ZERO) + c
                    if v:
                        out[tt] = v
                    else:
                        out.pop(tt, None)
            dd = D.diff(j)
            if dd:
                sign = -1 if i % 2 else 1
                for (comp, e), c in dd[y].terms.items():
                    tt = (target[(i, x, comp)], e)
                    v = out.get(tt, ZERO) + sign * c
                    if v:
                        out[tt] = v
                    else:
                        out.pop(tt, None)
            cols.append(PolyVec._raw(ranks[t + 1], nv, out))
        diffs[t] = tuple(cols)
    T = FreeComplex(ring, lo, hi, ranks, diffs)
    if check:
        T.check_square_zero()
    return T


def tensor_with_module(C: FreeComplex, E: SubmodulePresentation) -> PresentedComplex:
    """C (x) E for E = R^r / N, with N replicated on every basis block."""
    if C.ring != E.ring:
        raise RankMismatch("module over a different ring")
    r = E.rank
    nv = C.ring.nvars
    ranks = {i: C.rank(i) * r for i in C.degrees()}
    diffs = {}
    for i in C.degrees():
        cols = []
        for col in C.diff(i):
            for s in range(r):
                cols.append(PolyVec._raw(ranks[i + 1], nv, {(comp * r + s, e): c for (comp, e), c in col.terms.items()}))
        if cols:
            diffs[i] = tuple(cols)
    rels = {}
    for i in C.degrees():
        gens = []
        for blk in range(C.rank(i)):
            for g in E.generators:
                gens.append(PolyVec._raw(ranks[i], nv, {(blk * r + c, e): v for (c, e), v in g.terms.items()}))
        rels[i] = SubmodulePresentation(C.ring, ranks[i], tuple(gens))
    return PresentedComplex(FreeComplex(C.ring, C.lo, C.hi, ranks, diffs), rels)


# ---------- homology ----------

def kernel_generators(C, i: int) -> list[dict] | None:
    """Generators of {v in F_i : d_i v in N_{i+1}}; None means all of F_i."""
    cols = C.diff(i)
    r_next = C.rank(i + 1)
    if not cols or r_next == 0:
        return None
    ring = C.ring
    extra = C.relations(i + 1) + ring.relation_vectors(r_next)
    elems, _ = _syz_elems([dict(c.terms) for c in cols], r_next, extra, ring.nvars)
    return _second_block(elems, r_next)


def homology_length(C, i: int):
    """Length of the degree-i cohomology of a free or presented complex."""
    ring = C.ring
    r = C.rank(i)
    if r == 0:
        return 0
    image = C.relations(i)
    if C.lo <= i - 1 and C.diff(i - 1):
        image = image + [dict(c.terms) for c in C.diff(i - 1) if c.terms]
    kernel = kernel_generators(C, i)
    if kernel is None:
        gens = image + ring.relation_vectors(r)
        return _count_standard(_cached_std(gens, LOCAL_ORDER), r, ring.nvars)
    kernel = [k for k in kernel if k]
    if not kernel:
        return 0
    elems = _modulo_elems(kernel, image, r, ring)
    return _count_standard(elems, len(kernel), ring.nvars)


def homology_lengths(C) -> dict:
    """Map degree -> length of H^i (an int or INFINITE)."""
    return {i: homology_length(C, i) for i in C.degrees()}


def euler_characteristic(C, lengths: dict | None = None) -> int:
    """Alternating sum of homology lengths, indexed by stored degree."""
    if lengths is None:
        lengths = {}
        for i in C.degrees():
            L = homology_length(C, i)
            if L is INFINITE:
                raise NotFiniteLength("homology is not of finite length", degree=i)
            lengths[i] = L
    total = 0
    for i, L in lengths.items():
        if L is INFINITE:
            raise NotFiniteLength("homology is not of finite length", degree=i)
        total += -L if i % 2 else L
    return total
