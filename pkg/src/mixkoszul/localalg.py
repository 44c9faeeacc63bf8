"""Standard bases over the localization of Q[x] at the origin.

All module computations run on raw term dicts ``{(comp, exps): coeff}``.
Quotient rings are handled by adding ``relation * e_c`` for every component to
each submodule, so one engine serves R, R/p and O_{X,0}.

Mora's weak normal form may multiply by a local unit.  Membership, syzygies
and lengths do not see the unit; :func:`lift` records it explicitly.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import ImageNotInKernel, NotInMaximalIdeal, RankMismatch
from .polyring import (
    LOCAL_ORDER,
    ONE,
    ZERO,
    MonomialOrder,
    Poly,
    PolyVec,
    Q,
    format_poly,
    parse_poly,
)


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITE"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


class _NotMember:
    def __repr__(self):
        return "NOT_MEMBER"


NOT_MEMBER = _NotMember()


# ---------- rings and presentations ----------

@dataclass(frozen=True)
class RingSpec:
    """``Q[variables]`` localized at the origin, modulo ``relations``."""

    variables: tuple
    relations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "relations", tuple(self.relations))
        for f in self.relations:
            if f.nvars != len(self.variables):
                raise RankMismatch("relation lives in a different polynomial ring")
            if not f.in_maximal_ideal():
                raise NotInMaximalIdeal(
                    "ring relation has a nonzero constant term",
                    relation=format_poly(f, self.variables),
                )

    @classmethod
    def parse(cls, variables, relations=()):
        variables = tuple(variables)
        return cls(variables, tuple(parse_poly(r, variables) for r in relations))

    @property
    def nvars(self):
        return len(self.variables)

    def poly(self, text: str) -> Poly:
        return parse_poly(text, self.variables)

    def fmt(self, p: Poly) -> str:
        return format_poly(p, self.variables)

    def zero(self):
        return Poly.zero(self.nvars)

    def one(self):
        return Poly.one(self.nvars)

    def var(self, i):
        return Poly.var(self.nvars, i)

    def relation_vectors(self, rank: int) -> list[dict]:
        out = []
        for c in range(rank):
            for f in self.relations:
                out.append({(c, e): v for e, v in f.terms.items()})
        return out

    @cached_property
    def relation_basis(self) -> list["_Elem"]:
        return _std([{(0, e): c for e, c in f.terms.items()} for f in self.relations], LOCAL_ORDER)

    @cached_property
    def dim(self) -> int:
        """Krull dimension, read off the local leading ideal of the relations."""
        n = self.nvars
        supports = [frozenset(i for i, k in enumerate(el.lt[1]) if k) for el in self.relation_basis]
        for size in range(n, -1, -1):
            for subset in itertools.combinations(range(n), size):
                s = set(subset)
                if not any(sup <= s for sup in supports):
                    return size
        return 0

    def reduce(self, p: Poly) -> Poly:
        """Weak normal form modulo the relations (zero iff p lies in the ideal)."""
        if not self.relations:
            return p
        h = _nf({(0, e): c for e, c in p.terms.items()}, _index(self.relation_basis), LOCAL_ORDER)
        return Poly._raw(self.nvars, {e: c for (_, e), c in h.items()})

    def is_zero(self, p: Poly) -> bool:
        return p.is_zero() or (bool(self.relations) and not self.reduce(p))


@dataclass(frozen=True)
class SubmodulePresentation:
    """Submodule of ``R^rank`` generated by ``generators`` (plus ring relations)."""

    ring: RingSpec
    rank: int
    generators: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.rank != self.rank:
                raise RankMismatch(f"generator of rank {g.rank} in a rank-{self.rank} module")

    @classmethod
    def ideal(cls, ring: RingSpec, polys: Sequence[Poly]):
        return cls(ring, 1, tuple(PolyVec.from_polys([p], ring.nvars) for p in polys))

    @classmethod
    def from_columns(cls, ring: RingSpec, rank: int, columns: Sequence[Sequence[Poly]]):
        return cls(ring, rank, tuple(PolyVec.from_polys(list(c), ring.nvars) for c in columns))

    def raw(self) -> list[dict]:
        return [dict(g.terms) for g in self.generators if g.terms] + self.ring.relation_vectors(self.rank)


@dataclass(frozen=True)
class StandardBasis:
    order: MonomialOrder
    elements: tuple
    source: SubmodulePresentation
    noether: int | None = None
    _elems: list = field(default_factory=list, repr=False, compare=False)

    def leading_terms(self):
        return [el.lt for el in self._elems]

    def contains(self, f: PolyVec) -> bool:
        return not _nf(dict(f.terms), _index(self._elems), self.order, self.noether)

    def normal_form(self, f: PolyVec) -> PolyVec:
        h = _nf(dict(f.terms), _index(self._elems), self.order, self.noether)
        return PolyVec._raw(f.rank, f.nvars, h)

    def colength(self):
        return _count_standard(self._elems, self.source.rank, self.source.ring.nvars, self.noether)


# ---------- engine internals ----------

class _Elem:
    __slots__ = ("vec", "lt", "lc", "ecart")

    def __init__(self, vec, lt, ecart):
        self.vec = vec
        self.lt = lt
        self.lc = vec[lt]
        self.ecart = ecart


def _lead(vec, order):
    return max(vec, key=order.key)


def _ecart(vec, lt):
    top = 0
    for _, e in vec:
        d = sum(e)
        if d > top:
            top = d
    return top - sum(lt[1])


def _make(vec, order):
    lt = _lead(vec, order)
    return _Elem(vec, lt, _ecart(vec, lt))


def _index(elems):
    idx = {}
    for el in elems:
        idx.setdefault(el.lt[0], []).append(el)
    return idx


def _truncate(vec, noether):
    if noether is None:
        return vec
    return {t: c for t, c in vec.items() if sum(t[1]) < noether}


def _reduce_step(h, lt, g, noether):
    """h - (lc_h / lc_g) x^(lt_h - lt_g) g, which cancels the leading term."""
    factor = h[lt] / g.lc
    shift = tuple(a - b for a, b in zip(lt[1], g.lt[1]))
    out = dict(h)
    if noether is None:
        for (comp, e), c in g.vec.items():
            t = (comp, tuple(x + y for x, y in zip(e, shift)))
            v = out.get(t, ZERO) - factor * c
            if v:
                out[t] = v
            else:
                del out[t]
    else:
        sd = sum(shift)
        for (comp, e), c in g.vec.items():
            if sum(e) + sd >= noether:
                continue
            t = (comp, tuple(x + y for x, y in zip(e, shift)))
            v = out.get(t, ZERO) - factor * c
            if v:
                out[t] = v
            else:
                del out[t]
    out.pop(lt, None)
    return out


def _divisor(index_lists, lt):
    comp, e = lt
    best = None
    for lst in index_lists:
        for g in lst.get(comp, ()):
            ge = g.lt[1]
            if all(a <= b for a, b in zip(ge, e)):
                if best is None or g.ecart < best.ecart:
                    best = g
                    if best.ecart == 0:
                        return best
    return best


def _nf(h, index, order, noether=None, stop=None):
    """Mora's weak normal form of ``h`` with respect to an indexed basis."""
    h = _truncate(h, noether)
    if not index:
        return h
    extra = {}
    lists = (index, extra)
    while h:
        lt = _lead(h, order)
        if stop is not None and stop(lt):
            return h
        g = _divisor(lists, lt)
        if g is None:
            return h
        eh = _ecart(h, lt)
        if g.ecart > eh:
            el = _Elem(h, lt, eh)
            extra.setdefault(lt[0], []).append(el)
        h = _reduce_step(h, lt, g, noether)
    return h


def _spoly(a: _Elem, b: _Elem, lcm):
    sa = tuple(x - y for x, y in zip(lcm, a.lt[1]))
    sb = tuple(x - y for x, y in zip(lcm, b.lt[1]))
    out = {}
    ca, cb = b.lc, a.lc
    for (comp, e), c in a.vec.items():
        t = (comp, tuple(x + y for x, y in zip(e, sa)))
        out[t] = out.get(t, ZERO) + ca * c
    for (comp, e), c in b.vec.items():
        t = (comp, tuple(x + y for x, y in zip(e, sb)))
        out[t] = out.get(t, ZERO) - cb * c
    return {t: c for t, c in out.items() if c}


def _normalize(vec, lt):
    c = vec[lt]
    if c == 1:
        return vec
    inv = ONE / c
    return {t: v * inv for t, v in vec.items()}


def _std(gens, order: MonomialOrder, noether=None) -> list[_Elem]:
    """Mora's standard basis algorithm with the Buchberger chain criterion."""
    basis: list[_Elem] = []
    index: dict = {}
    pending: set = set()
    heap: list = []
    counter = itertools.count()

    def add(h):
        lt = _lead(h, order)
        h = _normalize(h, lt)
        el = _Elem(h, lt, _ecart(h, lt))
        j = len(basis)
        for i, g in enumerate(basis):
            if g.lt[0] != lt[0]:
                continue
            lcm = tuple(x if x > y else y for x, y in zip(g.lt[1], lt[1]))
            pending.add((i, j))
            heapq.heappush(heap, (sum(lcm) + max(g.ecart, el.ecart), sum(lcm), next(counter), i, j, lcm))
        basis.append(el)
        index.setdefault(lt[0], []).append(el)

    for f in gens:
        h = _nf(f, index, order, noether)
        if h:
            add(h)

    while heap:
        _, _, _, i, j, lcm = heapq.heappop(heap)
        pending.discard((i, j))
        a, b = basis[i], basis[j]
        if _chain_criterion(basis, pending, i, j, lcm):
            continue
        s = _spoly(a, b, lcm)
        h = _nf(s, index, order, noether)
        if h:
            add(h)
    basis = _minimize(basis)
    if noether is not None:
        basis = _tail_reduce(basis, order, noether)
    return basis


def _tail_reduce(elems, order, noether):
    """Reduce every non-leading term to a standard monomial.

    Only used under a degree cutoff, where the space of terms is finite and
    the reduction terminates.  Leading terms are unchanged.
    """
    idx = _index(elems)
    out = []
    for el in elems:
        rest = {t: c for t, c in el.vec.items() if t != el.lt}
        done = {el.lt: el.lc}
        while rest:
            t = _lead(rest, order)
            g = _divisor((idx,), t)
            if g is None:
                done[t] = rest.pop(t)
            else:
                rest = _reduce_step(rest, t, g, noether)
        out.append(_Elem(done, el.lt, _ecart(done, el.lt)))
    return out


def _chain_criterion(basis, pending, i, j, lcm):
    comp = basis[i].lt[0]
    for k, g in enumerate(basis):
        if k == i or k == j or g.lt[0] != comp:
            continue
        if all(a <= b for a, b in zip(g.lt[1], lcm)):
            p1 = (i, k) if i < k else (k, i)
            p2 = (j, k) if j < k else (k, j)
            if p1 not in pending and p2 not in pending:
                return True
    return False


def _minimize(basis):
    out = []
    for i, g in enumerate(basis):
        redundant = False
        for k, h in enumerate(basis):
            if k == i or h.lt[0] != g.lt[0]:
                continue
            if all(a <= b for a, b in zip(h.lt[1], g.lt[1])):
                if h.lt[1] != g.lt[1] or k < i:
                    redundant = True
                    break
        if not redundant:
            out.append(g)
    return out


def _count_standard(elems, rank, nvars, noether=None):
    """Number of (component, monomial) pairs outside the leading module."""
    by_comp = {}
    for el in elems:
        by_comp.setdefault(el.lt[0], []).append(el.lt[1])
    total = 0
    for c in range(rank):
        lts = by_comp.get(c, [])
        if noether is None:
            for v in range(nvars):
                if not any(sum(e) == e[v] and e[v] > 0 for e in lts) and not any(sum(e) == 0 for e in lts):
                    return INFINITE
        if any(sum(e) == 0 for e in lts):
            continue
        seen = {(0,) * nvars}
        frontier = [(0,) * nvars]
        while frontier:
            nxt = []
            for m in frontier:
                for v in range(nvars):
                    e = list(m)
                    e[v] += 1
                    e = tuple(e)
                    if e in seen:
                        continue
                    if noether is not None and sum(e) >= noether:
                        continue
                    if any(all(a <= b for a, b in zip(l, e)) for l in lts):
                        continue
                    seen.add(e)
                    nxt.append(e)
            frontier = nxt
        total += len(seen)
    return total


# ---------- cache ----------

_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _cache_key(gens, order, noether):
    return (tuple(frozenset(g.items()) for g in gens), order, noether)


def _cached_std(gens, order, noether=None):
    key = _cache_key(gens, order, noether)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    result = _std(gens, order, noether)
    with _CACHE_LOCK:
        _CACHE[key] = result
    return result


def clear_cache():
    with _CACHE_LOCK:
        _CACHE.clear()


# ---------- public operations ----------

def _to_vec(f):
    return dict(f.terms)


def mora_normal_form(f: PolyVec, G: Sequence[PolyVec], order: MonomialOrder = LOCAL_ORDER) -> PolyVec:
    """Weak normal form of ``f`` against the list ``G`` (not necessarily a basis)."""
    for g in G:
        if g.rank != f.rank:
            raise RankMismatch(f"rank mismatch: {g.rank} vs {f.rank}")
    elems = [_make(dict(g.terms), order) for g in G if g.terms]
    h = _nf(dict(f.terms), _index(elems), order)
    return PolyVec._raw(f.rank, f.nvars, h)


def standard_basis(N: SubmodulePresentation, order: MonomialOrder = LOCAL_ORDER,
                   noether: int | None = None) -> StandardBasis:
    """Standard basis of ``N`` plus the ring relations.

    ``noether`` is an optional degree bound with ``m^noether R^rank`` contained
    in ``N``; terms of that degree or higher are discarded throughout.
    """
    elems = _cached_std(N.raw(), order, noether)
    nv = N.ring.nvars
    return StandardBasis(
        order,
        tuple(PolyVec._raw(N.rank, nv, el.vec) for el in elems),
        N,
        noether,
        elems,
    )


def colength(N: SubmodulePresentation, noether: int | None = None):
    """Length of ``R^rank / N``, or INFINITE."""
    return standard_basis(N, noether=noether).colength()


def _syz_elems(gens: list[dict], r: int, extra: list[dict], nvars: int, order=LOCAL_ORDER):
    """Elimination standard basis of <(g_i, e_i)> + <(x, 0) : x in extra>."""
    z = (0,) * nvars
    aug = []
    for i, g in enumerate(gens):
        v = dict(g)
        v[(r + i, z)] = ONE
        aug.append(v)
    aug.extend(x for x in extra if x)
    elim = MonomialOrder(order.kind, order.module_extension, elim=r)
    return _cached_std(aug, elim), elim


def _second_block(elems, r):
    return [{(c - r, e): v for (c, e), v in el.vec.items()} for el in elems if el.lt[0] >= r]


def syzygies(G: Sequence[PolyVec], ring: RingSpec) -> SubmodulePresentation:
    """Generators of the kernel of ``R^|G| -> R^rank``, e_i -> G_i, over ``ring``."""
    if not G:
        return SubmodulePresentation(ring, 0, ())
    r = G[0].rank
    for g in G:
        if g.rank != r:
            raise RankMismatch("generators of different ranks")
    k = len(G)
    nv = ring.nvars
    elems, _ = _syz_elems([dict(g.terms) for g in G], r, ring.relation_vectors(r), nv)
    return SubmodulePresentation(
        ring, k, tuple(PolyVec._raw(k, nv, v) for v in _second_block(elems, r))
    )


@dataclass(frozen=True)
class Lift:
    """Witness ``sum(coeffs[i] * G[i]) == unit * f`` modulo ring relations."""

    unit: Poly
    coeffs: tuple


def lift(f: PolyVec, G: Sequence[PolyVec], ring: RingSpec):
    """Express ``f`` through ``G`` up to a local unit, or return NOT_MEMBER."""
    r = f.rank
    for g in G:
        if g.rank != r:
            raise RankMismatch("generators of different ranks")
    nv = ring.nvars
    z = (0,) * nv
    k = len(G)
    if not f.terms:
        return Lift(Poly.one(nv), tuple(Poly.zero(nv) for _ in G))
    gens = [dict(g.terms) for g in G]
    elems, elim = _syz_elems(gens, r, ring.relation_vectors(r), nv)
    h = dict(f.terms)
    h[(r + k, z)] = ONE
    h = _nf(h, _index(elems), elim, stop=lambda lt: lt[0] >= r)
    if any(c < r for c, _ in h):
        return NOT_MEMBER
    comps = [dict() for _ in range(k + 1)]
    for (c, e), v in h.items():
        comps[c - r][e] = v
    unit = Poly._raw(nv, comps[k])
    coeffs = tuple(-Poly._raw(nv, comps[i]) for i in range(k))
    return Lift(unit, coeffs)


def verify_lift(f: PolyVec, G: Sequence[PolyVec], w: Lift, ring: RingSpec) -> bool:
    """Exact check of a lift witness modulo the ring relations."""
    if not w.unit.constant_term():
        return False
    total = f * (-w.unit)
    for q, g in zip(w.coeffs, G):
        total = total + g * q
    if not total.terms:
        return True
    rel = SubmodulePresentation(ring, f.rank, ())
    return standard_basis(rel).contains(total)


def _modulo_elems(kernel: list[dict], image: list[dict], r: int, ring: RingSpec):
    """Standard basis of {q : sum q_j k_j in image + relations} in R^|kernel|."""
    elems, _ = _syz_elems(kernel, r, image + ring.relation_vectors(r), ring.nvars)
    return [_Elem(v, (el.lt[0] - r, el.lt[1]), el.ecart)
            for el, v in ((el, {(c - r, e): x for (c, e), x in el.vec.items()})
                          for el in elems if el.lt[0] >= r)]


def subquotient_length(kernel_gens: Sequence[PolyVec], image_gens: Sequence[PolyVec],
                       ring: RingSpec, check: bool = True):
    """Length of (kernel)/(image) for submodules image <= kernel of a free module."""
    kernel = [dict(g.terms) for g in kernel_gens if g.terms]
    image = [dict(g.terms) for g in image_gens if g.terms]
    if not kernel:
        if image:
            raise ImageNotInKernel("nonzero image inside a zero kernel")
        return 0
    r = kernel_gens[0].rank
    if check and image:
        kb = _cached_std(kernel + ring.relation_vectors(r), LOCAL_ORDER)
        idx = _index(kb)
        for n, v in enumerate(image):
            if _nf(v, idx, LOCAL_ORDER):
                raise ImageNotInKernel("image generator not in kernel", generator=n)
    elems = _modulo_elems(kernel, image, r, ring)
    return _count_standard(elems, len(kernel), ring.nvars)
