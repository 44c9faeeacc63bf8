"""Exact multivariate polynomials and free-module elements over the rationals.

Monomials are exponent tuples.  A module term is a pair ``(comp, exps)`` with a
0-based component index.  Coefficients are ``gmpy2.mpq`` when available,
otherwise :class:`fractions.Fraction`; both are always in lowest terms.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .errors import ParseError, RankMismatch, UnknownVariable, ZeroInput

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

ZERO = Q(0)
ONE = Q(1)


def to_rational(c) -> Q:
    if isinstance(c, str):
        if "/" in c:
            num, den = c.split("/")
            return Q(int(num), int(den))
        return Q(int(c))
    return Q(c)


# ---------- monomials ----------

def mono_deg(a):
    return sum(a)


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    """True if x^a divides x^b."""
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


# ---------- orders ----------

LOCAL = "LocalAntiDegRevLex"
GLOBAL = "GlobalDegRevLex"
TOP = "TermOverPosition"
POT = "PositionOverTerm"


class MonomialOrder:
    """Monomial order on ``R^rank``.

    ``kind`` is LOCAL (1 is the largest monomial) or GLOBAL.  ``elim`` > 0 makes
    components ``< elim`` a dominant block: any term there beats any term in a
    later component.  Keys compare with ``>``: bigger key, bigger term.
    """

    __slots__ = ("kind", "module_extension", "elim", "_cache")

    def __init__(self, kind: str = LOCAL, module_extension: str = TOP, elim: int = 0):
        if kind not in (LOCAL, GLOBAL):
            raise ValueError(f"unknown order kind {kind!r}")
        if module_extension not in (TOP, POT):
            raise ValueError(f"unknown module extension {module_extension!r}")
        self.kind = kind
        self.module_extension = module_extension
        self.elim = elim
        self._cache = {}

    @property
    def is_local(self) -> bool:
        return self.kind == LOCAL

    def mono_key(self, exps):
        d = sum(exps)
        rev = tuple(-e for e in reversed(exps))
        return (-d, rev) if self.kind == LOCAL else (d, rev)

    def key(self, term):
        k = self._cache.get(term)
        if k is None:
            comp, exps = term
            mk = self.mono_key(exps)
            if self.module_extension == TOP:
                k = (mk, -comp)
            else:
                k = (-comp, mk)
            if self.elim:
                k = (comp < self.elim, k)
            self._cache[term] = k
        return k

    def shifted(self, elim: int) -> "MonomialOrder":
        return MonomialOrder(self.kind, self.module_extension, elim)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and (self.kind, self.module_extension, self.elim)
            == (other.kind, other.module_extension, other.elim)
        )

    def __hash__(self):
        return hash((self.kind, self.module_extension, self.elim))

    def __repr__(self):
        return f"MonomialOrder({self.kind}, {self.module_extension}, elim={self.elim})"


LOCAL_ORDER = MonomialOrder(LOCAL, TOP)
GLOBAL_ORDER = MonomialOrder(GLOBAL, TOP)


# ---------- polynomials ----------

class Poly:
    """Polynomial in ``nvars`` variables with rational coefficients.

    Treat instances as immutable; ``terms`` maps exponent tuples to nonzero
    coefficients.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        else:
            self.terms = {e: Q(c) for e, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars, c):
        c = Q(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars, i, power=1):
        e = [0] * nvars
        e[i] = power
        return cls._raw(nvars, {tuple(e): ONE})

    @classmethod
    def monomial(cls, exps, coeff=1):
        return cls._raw(len(exps), {tuple(exps): Q(coeff)} if coeff else {})

    def _check(self, other):
        if self.nvars != other.nvars:
            raise RankMismatch(
                f"variable-count mismatch: {self.nvars} vs {other.nvars}",
                left=self.nvars, right=other.nvars,
            )

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.nvars, other)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Q(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e, ZERO) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Q)) or hasattr(other, "denominator"):
            return self.terms == Poly.const(self.nvars, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self):
        return min((sum(e) for e in self.terms), default=-1)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def in_maximal_ideal(self):
        return not self.constant_term()

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly._raw(self.nvars, out)

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute ``images[i]`` for the i-th variable."""
        nv = images[0].nvars if images else self.nvars
        result = Poly.zero(nv)
        powers = [dict() for _ in images]

        def pw(i, k):
            if k not in powers[i]:
                powers[i][k] = images[i] ** k
            return powers[i][k]

        for e, c in self.terms.items():
            t = Poly.const(nv, c)
            for i, k in enumerate(e):
                if k:
                    t = t * pw(i, k)
            result = result + t
        return result

    def __repr__(self):
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"Poly({format_poly(self, names)!r})"


class PolyVec:
    """Element of the free module ``R^rank`` (0-based components)."""

    __slots__ = ("rank", "nvars", "terms", "_hash")

    def __init__(self, rank: int, nvars: int, terms=None):
        self.rank = rank
        self.nvars = nvars
        self.terms = {} if terms is None else {t: Q(c) for t, c in terms.items() if c}
        self._hash = None
        for comp, _ in self.terms:
            if not 0 <= comp < rank:
                raise RankMismatch(f"component {comp} outside 0..{rank - 1}")

    @classmethod
    def _raw(cls, rank, nvars, terms):
        v = cls.__new__(cls)
        v.rank = rank
        v.nvars = nvars
        v.terms = terms
        v._hash = None
        return v

    @classmethod
    def from_polys(cls, polys: Sequence[Poly], nvars: int | None = None):
        if nvars is None:
            if not polys:
                raise ValueError("need nvars for an empty vector")
            nvars = polys[0].nvars
        terms = {}
        for i, p in enumerate(polys):
            if p.nvars != nvars:
                raise RankMismatch("variable-count mismatch in vector entries")
            for e, c in p.terms.items():
                terms[(i, e)] = c
        return cls._raw(len(polys), nvars, terms)

    @classmethod
    def zero(cls, rank, nvars):
        return cls._raw(rank, nvars, {})

    @classmethod
    def unit(cls, rank, nvars, i, coeff=1):
        return cls._raw(rank, nvars, {(i, (0,) * nvars): Q(coeff)})

    def components(self) -> list[Poly]:
        out = [dict() for _ in range(self.rank)]
        for (comp, e), c in self.terms.items():
            out[comp][e] = c
        return [Poly._raw(self.nvars, d) for d in out]

    def __getitem__(self, i) -> Poly:
        return Poly._raw(self.nvars, {e: c for (comp, e), c in self.terms.items() if comp == i})

    def _check(self, other):
        if self.rank != other.rank or self.nvars != other.nvars:
            raise RankMismatch(f"rank mismatch: {self.rank} vs {other.rank}")

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        self._check(other)
        return PolyVec._raw(self.rank, self.nvars, vec_add(self.terms, other.terms))

    def __neg__(self):
        return PolyVec._raw(self.rank, self.nvars, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            out = {}
            for (comp, e1), c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    t = (comp, tuple(x + y for x, y in zip(e1, e2)))
                    v = out.get(t, ZERO) + c1 * c2
                    if v:
                        out[t] = v
                    else:
                        out.pop(t, None)
            return PolyVec._raw(self.rank, self.nvars, out)
        c = Q(other)
        if not c:
            return PolyVec.zero(self.rank, self.nvars)
        return PolyVec._raw(self.rank, self.nvars, {t: v * c for t, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return "PolyVec([" + ", ".join(format_poly(p, names) for p in self.components()) + "])"


def vec_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for t, c in b.items():
        v = out.get(t, ZERO) + c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def leading_term(p, order: MonomialOrder = LOCAL_ORDER):
    """Order-maximal term of a Poly or PolyVec as ``(comp, exps, coeff)``."""
    if isinstance(p, Poly):
        if not p.terms:
            raise ZeroInput("leading term of the zero polynomial")
        e = max(p.terms, key=lambda e: order.key((0, e)))
        return 0, e, p.terms[e]
    if not p.terms:
        raise ZeroInput("leading term of the zero vector")
    t = max(p.terms, key=order.key)
    return t[0], t[1], p.terms[t]


# ---------- printing and parsing ----------

def _format_coeff(c):
    c = Q(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, names: Sequence[str]) -> str:
    if not p.terms:
        return "0"
    order_terms = sorted(p.terms, key=lambda e: GLOBAL_ORDER.mono_key(e), reverse=True)
    out = []
    for e in order_terms:
        c = p.terms[e]
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        if a != 1 or not factors:
            factors.insert(0, _format_coeff(a))
        body = "*".join(factors)
        if not out:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {v: k for k, v in enumerate(variables)}
        self.n = len(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "*":
                self.take()
                p = p * self.factor()
            elif tok[0] in ("int", "name", "("):
                raise ParseError("implicit multiplication", tok[2])
            else:
                return p

    def factor(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "-":
            self.take()
            return -self.factor()
        if kind == "int":
            self.take()
            num = tok[1]
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if den[1] == 0:
                    raise ParseError("zero denominator", den[2])
                return Poly.const(self.n, Q(num, den[1]))
            return Poly.const(self.n, num)
        if kind == "name":
            self.take()
            if tok[1] not in self.index:
                raise UnknownVariable(f"unknown variable {tok[1]!r}", tok[2], name=tok[1])
            k = 1
            if self.peek()[0] == "^":
                self.take()
                ex = self.take("int")
                if ex[1] < 1:
                    raise ParseError("exponent must be a positive integer", ex[2])
                k = ex[1]
            return Poly.var(self.n, self.index[tok[1]], k)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse a polynomial expression over the given variable names."""
    return _Parser(text, list(variables)).parse()


def parse_polys(texts: Iterable[str], variables: Sequence[str]) -> list[Poly]:
    return [parse_poly(t, variables) for t in texts]
