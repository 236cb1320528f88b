"""Differential polynomials in one differential indeterminate.

A monomial ``Y^i = Y^{i_0} (Y')^{i_1} ... (Y^{(r)})^{i_r}`` is keyed by a
:class:`MultiIndex`; multi-indices are ordered anti-lexicographically
(compare the highest position first), which is a well-order on N*.

The chain-rule families ``A_ij`` and ``B_ij`` express derivatives of
``phi(f(z))`` through ``f'`` and derivatives of ``phi`` when ``phi`` solves
``phi(f) = f' phi``.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd
from typing import Iterable, Mapping

from .errors import OrderDeficitError, ParseError, RankUndefinedError
from .series import PowerSeries, derive

__all__ = [
    "MultiIndex",
    "ZPolynomial",
    "DiffPolynomial",
    "ChainFamilyA",
    "compare_antilex",
    "rank",
    "degree_weight",
    "evaluate",
    "chain_A",
    "chain_B",
    "multi_indices",
]


@functools.total_ordering
class MultiIndex:
    """Exponent pattern ``(i_0, ..., i_r)`` with trailing zeros stripped."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[int] = ()):
        e = list(entries)
        if any((not isinstance(x, int)) or x < 0 for x in e):
            raise ValueError(f"multi-index entries must be natural numbers: {e}")
        while len(e) > 1 and e[-1] == 0:
            e.pop()
        if not e:
            e = [0]
        self.entries = tuple(e)

    @classmethod
    def unit(cls, k: int, times: int = 1) -> MultiIndex:
        """The index of the monomial ``(Y^{(k)})^times``."""
        return cls([0] * k + [times])

    @property
    def order(self) -> int:
        """Highest derivative appearing (0 for the constant monomial)."""
        return len(self.entries) - 1

    @property
    def abs(self) -> int:
        return sum(self.entries)

    @property
    def weight(self) -> int:
        return sum(k * x for k, x in enumerate(self.entries))

    def __getitem__(self, k):
        return self.entries[k] if k < len(self.entries) else 0

    def __add__(self, other: MultiIndex) -> MultiIndex:
        n = max(len(self.entries), len(other.entries))
        return MultiIndex(self[k] + other[k] for k in range(n))

    def _key(self):
        return (len(self.entries), self.entries[::-1])

    def __eq__(self, other):
        if isinstance(other, tuple):
            other = MultiIndex(other)
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return self.entries == other.entries

    def __lt__(self, other):
        if isinstance(other, tuple):
            other = MultiIndex(other)
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"MultiIndex({self.entries})"


def compare_antilex(i, j) -> int:
    """-1, 0 or 1 as ``i`` is smaller than, equal to or larger than ``j``."""
    i, j = MultiIndex(i) if not isinstance(i, MultiIndex) else i, MultiIndex(j) if not isinstance(j, MultiIndex) else j
    if i == j:
        return 0
    return -1 if i < j else 1


def multi_indices(max_order: int, max_degree: int, *, min_degree: int = 0) -> list[MultiIndex]:
    """All indices with derivative order <= max_order and min_degree <= |i| <= max_degree, ascending."""
    out = set()
    for d in range(min_degree, max_degree + 1):
        for combo in combinations_with_replacement(range(max_order + 1), d):
            e = [0] * (max_order + 1)
            for k in combo:
                e[k] += 1
            out.add(MultiIndex(e))
    return sorted(out)


class ZPolynomial:
    """Univariate polynomial in ``z`` with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def coerce(cls, x) -> ZPolynomial:
        if isinstance(x, ZPolynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return cls([x])
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZPolynomial([other])
        if not isinstance(other, ZPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        try:
            other = ZPolynomial.coerce(other)
        except TypeError:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ZPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return ZPolynomial(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-ZPolynomial.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = ZPolynomial.coerce(other)
        except TypeError:
            return NotImplemented
        if not self or not other:
            return ZPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return ZPolynomial(out)

    __rmul__ = __mul__

    def derive(self) -> ZPolynomial:
        return ZPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def to_series(self, order: int) -> PowerSeries:
        return PowerSeries(list(self.coeffs[: order + 1]), order=order, exact=True)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"ZPolynomial({str(self)!r})"


RINGS = ("integers", "polynomials", "series")


def _ring_of(c) -> str:
    if isinstance(c, int):
        return "integers"
    if isinstance(c, Fraction):
        if c.denominator != 1:
            return "polynomials"
        return "integers"
    if isinstance(c, ZPolynomial):
        return "polynomials"
    if isinstance(c, PowerSeries):
        return "series"
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _convert(c, ring):
    if ring == "integers":
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise TypeError("non-integral coefficient in an integer differential polynomial")
            return int(c)
        if isinstance(c, int):
            return c
        raise TypeError(f"cannot place {type(c).__name__} in the integers")
    if ring == "polynomials":
        return ZPolynomial.coerce(c)
    if isinstance(c, PowerSeries):
        return c
    raise TypeError("series-ring differential polynomials need PowerSeries coefficients")


def _join_rings(a: str, b: str) -> str:
    if a == b:
        return a
    if {a, b} == {"integers", "polynomials"}:
        return "polynomials"
    raise TypeError(f"cannot combine coefficient rings {a} and {b}")


def _is_zero(c) -> bool:
    if isinstance(c, PowerSeries):
        return c.is_zero()
    return not c


class DiffPolynomial:
    """Finite sum ``sum_i P_i Y^i`` over a closed set of coefficient rings.

    ``ring`` is one of ``"integers"``, ``"polynomials"`` (rational
    polynomials in ``z``) or ``"series"`` (exact power series).
    """

    __slots__ = ("ring", "terms")

    def __init__(self, terms: Mapping | Iterable = (), ring: str | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        items = [(k if isinstance(k, MultiIndex) else MultiIndex(k), c) for k, c in items]
        if ring is None:
            found = None
            for _, c in items:
                rc = _ring_of(c)
                found = rc if found is None else _join_rings(found, rc)
            ring = found or "integers"
        if ring not in RINGS:
            raise ValueError(f"unknown coefficient ring {ring!r}")
        out: dict[MultiIndex, object] = {}
        for k, c in items:
            c = _convert(c, ring)
            out[k] = out[k] + c if k in out else c
        self.ring = ring
        self.terms = {k: out[k] for k in sorted(out) if not _is_zero(out[k])}

    @classmethod
    def monomial(cls, index, coeff=1, ring=None) -> DiffPolynomial:
        return cls({MultiIndex(index) if not isinstance(index, MultiIndex) else index: coeff}, ring=ring)

    @classmethod
    def one(cls, ring="integers"):
        return cls.monomial(MultiIndex(), 1, ring=ring)

    @classmethod
    def zero(cls, ring="integers"):
        return cls({}, ring=ring)

    @classmethod
    def variable(cls, k: int = 0, ring="integers"):
        """The monomial ``Y^{(k)}``."""
        return cls.monomial(MultiIndex.unit(k), 1, ring=ring)

    # -- structure -----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    @property
    def support(self) -> list[MultiIndex]:
        return list(self.terms)

    @property
    def order(self) -> int:
        """Highest derivative index occurring (0 for constants and for 0)."""
        return max((i.order for i in self.terms), default=0)

    def coefficient(self, index):
        index = index if isinstance(index, MultiIndex) else MultiIndex(index)
        if index in self.terms:
            return self.terms[index]
        return 0 if self.ring == "integers" else ZPolynomial() if self.ring == "polynomials" else None

    def rank(self) -> MultiIndex:
        return rank(self)

    def degree(self) -> int:
        return degree_weight(self)[0]

    def weight(self) -> int:
        return degree_weight(self)[1]

    def is_homogeneous(self) -> bool:
        d = self.degree()
        return all(i.abs == d for i in self.terms)

    def is_isobaric(self) -> bool:
        w = self.weight()
        return all(i.weight == w for i in self.terms)

    # -- ring operations -------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, DiffPolynomial):
            return other
        return DiffPolynomial({MultiIndex(): other}) if not _is_zero(other) else DiffPolynomial.zero(_ring_of(other))

    def __eq__(self, other):
        if not isinstance(other, DiffPolynomial):
            if isinstance(other, (int, Fraction, ZPolynomial)):
                other = self._lift(other)
            else:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self.ring == "series":
            return hash(tuple(self.terms))
        return hash(tuple(self.terms.items()))

    def __add__(self, other):
        other = self._lift(other)
        ring = _join_rings(self.ring, other.ring)
        return DiffPolynomial(list(self.terms.items()) + list(other.terms.items()), ring=ring)

    __radd__ = __add__

    def __neg__(self):
        return DiffPolynomial({k: -c for k, c in self.terms.items()}, ring=self.ring)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DiffPolynomial):
            other = self._lift(other)
        ring = _join_rings(self.ring, other.ring)
        items = []
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                items.append((i + j, _convert(a, ring) * _convert(b, ring)))
        return DiffPolynomial(items, ring=ring)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = DiffPolynomial.one(self.ring)
        for _ in range(n):
            result = result * self
        return result

    def derive(self) -> DiffPolynomial:
        """Total derivative: coefficients by d/dz, ``(Y^{(k)})' = Y^{(k+1)}``."""
        items = []
        for i, c in self.terms.items():
            if self.ring == "polynomials":
                dc = c.derive()
                if dc:
                    items.append((i, dc))
            elif self.ring == "series":
                if c.order >= 1:
                    items.append((i, derive(c)))
            for k, e in enumerate(i.entries):
                if not e:
                    continue
                shifted = list(i.entries) + [0]
                shifted[k] -= 1
                shifted[k + 1] += 1
                items.append((MultiIndex(shifted), c * e))
        return DiffPolynomial(items, ring=self.ring)

    def evaluate(self, y: PowerSeries) -> PowerSeries:
        return evaluate(self, y)

    # -- printing -------------------------------------------------------------

    def format(self, var: str = "Y") -> str:
        """Terms ascending by rank, e.g. ``-(X')^2 + X X''``."""
        if not self.terms:
            return "0"
        out = []
        for i, c in self.terms.items():
            mono = _format_monomial(i, var)
            sign, body = _format_coeff(c, bool(mono))
            term = body + (" " if body and mono else "") + mono
            if not out:
                out.append(("-" if sign < 0 else "") + term)
            else:
                out.append((" - " if sign < 0 else " + ") + term)
        return "".join(out)

    def __str__(self):
        return self.format("Y")

    def __repr__(self):
        return f"DiffPolynomial({self.format('Y')!r}, ring={self.ring!r})"

    @classmethod
    def parse(cls, text: str, var: str = "Y") -> DiffPolynomial:
        return _parse_diffpoly(text, var)


def _format_factor(k: int, e: int, var: str) -> str:
    base = var + "'" * k
    if e == 1:
        return base
    return f"{base}^{e}" if k == 0 else f"({base})^{e}"


def _format_monomial(i: MultiIndex, var: str) -> str:
    return " ".join(_format_factor(k, e, var) for k, e in enumerate(i.entries) if e)


def _format_coeff(c, has_mono: bool):
    """Return (sign, magnitude text); empty text stands for a unit coefficient."""
    if isinstance(c, ZPolynomial):
        if c.is_constant():
            c = c.constant_value()
        else:
            return 1, f"({c})"
    if isinstance(c, PowerSeries):
        return 1, f"[{c}]"
    sign = -1 if c < 0 else 1
    mag = abs(c)
    if mag == 1 and has_mono:
        return sign, ""
    return sign, str(mag)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]'*)|(.))")


def _parse_diffpoly(text: str, var: str) -> DiffPolynomial:
    from .expr import eval_expression, parse as parse_expr

    toks = []
    for m in _TOKEN.finditer(text):
        if m.group(1):
            toks.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(("op", m.group(3), m.start(3)))
    pos = 0

    def peek(kind=None, value=None):
        if pos >= len(toks):
            return None
        t = toks[pos]
        if kind and t[0] != kind:
            return None
        if value is not None and t[1] != value:
            return None
        return t

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def is_var(t):
        return t and t[0] == "name" and t[1].rstrip("'") == var

    def factor():
        # var with primes, optionally ^e;  or ( var' ) ^ e
        t = peek()
        if is_var(t):
            take()
            k = len(t[1]) - len(var)
            e = 1
            if peek("op", "^"):
                take()
                e = take()[1]
            return MultiIndex.unit(k, e)
        take()  # "("
        inner = take()
        if not is_var(inner) or not peek("op", ")"):
            raise ParseError("malformed factor", inner[2])
        take()
        if not peek("op", "^"):
            raise ParseError("parenthesized factor needs an exponent", inner[2])
        take()
        e = take()
        if e[0] != "num":
            raise ParseError("exponent must be an integer", e[2])
        return MultiIndex.unit(len(inner[1]) - len(var), e[1])

    def starts_factor():
        t = peek()
        if is_var(t):
            return True
        if t and t[1] == "(" and pos + 1 < len(toks) and is_var(toks[pos + 1]):
            return True
        return False

    def coefficient():
        t = peek()
        if t and t[0] == "num":
            take()
            value = Fraction(t[1])
            if peek("op", "/"):
                take()
                value /= take()[1]
            return value
        if t and t[1] == "(":
            depth = 0
            start = t[2]
            while True:
                u = take()
                if u[1] == "(":
                    depth += 1
                elif u[1] == ")":
                    depth -= 1
                    if depth == 0:
                        end = u[2]
                        break
            src = text[start + 1 : end]
            s = eval_expression(parse_expr(src), 64)
            poly = ZPolynomial(s.coeffs)
            if poly.degree > 32:
                raise ParseError("coefficient is not a polynomial in z", start)
            return poly
        return Fraction(1)

    items = []
    sign = 1
    if peek("op", "-"):
        take()
        sign = -1
    elif peek("op", "+"):
        take()
    while True:
        if peek() is None:
            raise ParseError("unexpected end of differential polynomial", len(text))
        coeff = Fraction(1) if starts_factor() else coefficient()
        if peek("op", "*"):
            take()
        idx = MultiIndex()
        while starts_factor():
            idx = idx + factor()
            if peek("op", "*"):
                take()
        items.append((idx, sign * coeff))
        t = peek()
        if t is None:
            break
        if t[0] == "op" and t[1] in "+-":
            take()
            sign = 1 if t[1] == "+" else -1
        else:
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
    return DiffPolynomial(items)


def rank(P: DiffPolynomial) -> MultiIndex:
    """Largest supported multi-index under the anti-lexicographic order."""
    if not P.terms:
        raise RankUndefinedError("the zero differential polynomial has no rank")
    return max(P.terms)


def degree_weight(P: DiffPolynomial) -> tuple[int, int]:
    if not P.terms:
        raise RankUndefinedError("degree and weight are undefined for 0")
    return max(i.abs for i in P.terms), max(i.weight for i in P.terms)


def _embed(c, y: PowerSeries) -> PowerSeries | Fraction:
    if isinstance(c, ZPolynomial):
        return c.to_series(y.order + len(c.coeffs))
    if isinstance(c, PowerSeries):
        return c
    return c


def evaluate(P: DiffPolynomial, y: PowerSeries) -> PowerSeries:
    """Substitute ``y, y', y'', ...`` for ``Y, Y', Y'', ...``."""
    r = P.order
    if y.order < r:
        raise OrderDeficitError(f"series of order {y.order} cannot supply derivative {r}")
    ders = [y]
    for _ in range(r):
        ders.append(derive(ders[-1]))
    powers: dict[tuple[int, int], PowerSeries] = {}

    def power(k, e):
        key = (k, e)
        if key not in powers:
            powers[key] = ders[k] if e == 1 else power(k, e - 1) * ders[k]
        return powers[key]

    total = None
    for i, c in P.terms.items():
        mono = None
        for k, e in enumerate(i.entries):
            if e:
                pk = power(k, e)
                mono = pk if mono is None else mono * pk
        if mono is None:
            mono = PowerSeries.one(y.order, exact=y.exact)
        c = _embed(c, y)
        term = mono * c
        total = term if total is None else total + term
    if total is None:
        return PowerSeries.zero(y.order, exact=y.exact)
    return total


class ChainFamilyA:
    """Table of ``A_ij`` (0 <= i <= j <= upper) in the indeterminate ``X``."""

    def __init__(self, upper: int, table: dict[tuple[int, int], DiffPolynomial]):
        self.upper = upper
        self.table = table

    def __getitem__(self, ij) -> DiffPolynomial:
        i, j = ij
        if not 0 <= j <= self.upper:
            raise KeyError(ij)
        if not 0 <= i <= j:
            return DiffPolynomial.zero()
        return self.table[(i, j)]

    def row(self, j: int) -> list[DiffPolynomial]:
        return [self[i, j] for i in range(j + 1)]

    def __repr__(self):
        return f"ChainFamilyA(upper={self.upper})"


@functools.lru_cache(maxsize=None)
def _chain_A_row(j: int) -> tuple[DiffPolynomial, ...]:
    # A_{i,j+1} = X (A_ij)' + X A_{i-1,j} - (2j-1) X' A_ij
    if j == 0:
        return (DiffPolynomial.one(),)
    prev = _chain_A_row(j - 1)
    jj = j - 1
    X = DiffPolynomial.variable(0)
    dX = DiffPolynomial.variable(1)
    row = []
    for i in range(j + 1):
        a = prev[i] if i <= jj else DiffPolynomial.zero()
        b = prev[i - 1] if i >= 1 else DiffPolynomial.zero()
        row.append(X * a.derive() + X * b - dX * a * (2 * jj - 1))
    return tuple(row)


def chain_A(j_max: int) -> ChainFamilyA:
    table = {}
    for j in range(j_max + 1):
        for i, a in enumerate(_chain_A_row(j)):
            table[(i, j)] = a
    return ChainFamilyA(j_max, table)


def chain_B(j) -> dict[MultiIndex, DiffPolynomial]:
    """All ``B_ij`` for a fixed ``j``: expand ``prod_k (sum_i A_ik Phi_i)^{j_k}``."""
    j = j if isinstance(j, MultiIndex) else MultiIndex(j)
    A = chain_A(j.order)
    acc = {MultiIndex(): DiffPolynomial.one()}
    for k, jk in enumerate(j.entries):
        for _ in range(jk):
            new: dict[MultiIndex, DiffPolynomial] = {}
            for idx, coeff in acc.items():
                for i in range(k + 1):
                    a = A[i, k]
                    if not a:
                        continue
                    key = idx + MultiIndex.unit(i)
                    new[key] = new[key] + coeff * a if key in new else coeff * a
            acc = {key: v for key, v in new.items() if v}
    return dict(sorted(acc.items()))
