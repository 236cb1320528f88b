"""Truncated formal power series over exact rationals or complex floats.

A :class:`PowerSeries` of order ``N`` stores the coefficients ``c_0 .. c_N``.
Coefficients past ``N`` are unknown, not zero: every operation returns the
largest order it can guarantee from the orders (and valuations) of its
inputs.  Exact series hold :class:`fractions.Fraction` values only; float
series hold :class:`complex` values only, and the two never mix.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import lcm
from numbers import Number
from typing import Iterable, Sequence

try:
    from gmpy2 import gcd as _gcd
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    from math import gcd as _gcd

    _mpz = int

from .errors import (
    CompositionError,
    DomainMismatchError,
    EmptyResultError,
    NonFormalError,
    NotAPowerSeriesError,
    NotInvertibleError,
    NotParabolicError,
    OrderDeficitError,
    SeriesError,
    SeriesZeroDivisionError,
)

__all__ = [
    "PowerSeries",
    "ParabolicGerm",
    "add",
    "mul",
    "div",
    "derive",
    "compose",
    "reverse",
    "iterate",
    "exp_series",
    "log_series",
    "sin_series",
    "cos_series",
]

FLOAT_RTOL = 1e-12


def _exact_coeff(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"exact series accept int/Fraction coefficients only, got {type(c).__name__}")


def _is_exact_value(c):
    return isinstance(c, (int, Fraction))


class PowerSeries:
    """Immutable truncated power series ``c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})``."""

    __slots__ = ("_c", "_exact")

    def __init__(self, coeffs: Iterable, order: int | None = None, *, exact: bool | None = None):
        c = list(coeffs)
        if order is not None:
            if order < 0:
                raise EmptyResultError("truncation order must be non-negative")
            c = c[: order + 1] + [0] * (order + 1 - len(c))
        if not c:
            raise EmptyResultError("a series needs at least one known coefficient")
        if exact is None:
            exact = all(_is_exact_value(x) for x in c)
        if exact:
            self._c = tuple(_exact_coeff(x) for x in c)
        else:
            self._c = tuple(complex(x) for x in c)
        self._exact = exact

    @classmethod
    def _raw(cls, coeffs, exact):
        # trusted constructor: coefficients are already of the right type
        obj = cls.__new__(cls)
        obj._c = tuple(coeffs)
        obj._exact = exact
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order, exact=True):
        return cls([0] * (order + 1), exact=exact)

    @classmethod
    def one(cls, order, exact=True):
        return cls.constant(1, order, exact=exact)

    @classmethod
    def constant(cls, value, order, exact=True):
        return cls([value] + [0] * order, exact=exact)

    @classmethod
    def variable(cls, order, exact=True):
        """The series ``z`` truncated at ``order``."""
        if order < 1:
            return cls.zero(order, exact=exact)
        return cls([0, 1] + [0] * (order - 1), exact=exact)

    @classmethod
    def monomial(cls, k, coeff, order, exact=True):
        c = [0] * (order + 1)
        if k <= order:
            c[k] = coeff
        return cls(c, exact=exact)

    @classmethod
    def from_function(cls, fn, order, exact=True):
        return cls([fn(k) for k in range(order + 1)], exact=exact)

    # -- basic accessors ---------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def domain(self) -> str:
        return "exact" if self._exact else "float"

    @property
    def valuation(self) -> int | None:
        """Index of the first non-zero known coefficient, or None."""
        for k, c in enumerate(self._c):
            if c:
                return k
        return None

    def _val_bound(self):
        v = self.valuation
        return self.order + 1 if v is None else v

    def is_zero(self) -> bool:
        return self.valuation is None

    def __len__(self):
        return len(self._c)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return self._c[k]
        if k < 0:
            raise IndexError("negative coefficient index")
        if k > self.order:
            raise IndexError(f"coefficient {k} lies beyond the truncation order {self.order}")
        return self._c[k]

    def __iter__(self):
        return iter(self._c)

    def truncate(self, order: int) -> PowerSeries:
        if order > self.order:
            raise OrderDeficitError(f"cannot raise truncation order {self.order} to {order}")
        return PowerSeries._raw(self._c[: order + 1], self._exact)

    def _zero(self):
        return Fraction(0) if self._exact else 0j

    # -- equality ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        if self._exact != other._exact or self.order != other.order:
            return False
        if self._exact:
            return self._c == other._c
        return all(cmath.isclose(a, b, rel_tol=FLOAT_RTOL, abs_tol=FLOAT_RTOL) for a, b in zip(self._c, other._c))

    def __hash__(self):
        if self._exact:
            return hash((self._c,))
        return hash(("float", self.order))

    def allclose(self, other: PowerSeries, tol: float = 1e-12) -> bool:
        n = min(self.order, other.order)
        return all(abs(complex(a) - complex(b)) <= tol for a, b in zip(self._c[: n + 1], other._c[: n + 1]))

    # -- arithmetic operators ------------------------------------------------

    def _coerce_scalar(self, s):
        if self._exact:
            if not _is_exact_value(s):
                raise DomainMismatchError(f"cannot combine an exact series with {type(s).__name__}")
            return Fraction(s)
        if not isinstance(s, Number):
            raise TypeError(f"not a scalar: {s!r}")
        return complex(s)

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            return add(self, other)
        if isinstance(other, Number):
            s = self._coerce_scalar(other)
            return PowerSeries._raw((self._c[0] + s,) + self._c[1:], self._exact)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries._raw(tuple(-c for c in self._c), self._exact)

    def __sub__(self, other):
        if isinstance(other, (PowerSeries, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return mul(self, other)
        if isinstance(other, Number):
            s = self._coerce_scalar(other)
            return PowerSeries._raw(tuple(c * s for c in self._c), self._exact)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return div(self, other)
        if isinstance(other, Number):
            s = self._coerce_scalar(other)
            if not s:
                raise SeriesZeroDivisionError("division of a series by zero")
            return PowerSeries._raw(tuple(c / s for c in self._c), self._exact)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return div(PowerSeries.constant(other, self.order, exact=self._exact), self)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("series powers must be integers")
        if n < 0:
            return div(PowerSeries.one(self.order, exact=self._exact), self**-n)
        result = PowerSeries.one(self.order + n * self._val_bound(), exact=self._exact)
        base = self
        while n:
            if n & 1:
                result = mul(result, base)
            n >>= 1
            if n:
                base = mul(base, base)
        return result

    def derive(self):
        return derive(self)

    def compose(self, inner):
        return compose(self, inner)

    def __call__(self, inner):
        """Composition ``self(inner)``."""
        return compose(self, inner)

    # -- formatting --------------------------------------------------------

    def _fmt_coeff(self, c):
        if self._exact:
            return str(c)
        if c.imag == 0:
            return repr(c.real)
        return repr(c)

    def __str__(self):
        parts = []
        for k, c in enumerate(self._c):
            if not c:
                continue
            s = self._fmt_coeff(c)
            if k == 0:
                term = s
            else:
                mono = "z" if k == 1 else f"z^{k}"
                if self._exact and c == 1:
                    term = mono
                elif self._exact and c == -1:
                    term = "-" + mono
                else:
                    term = f"{s}*{mono}" if self._exact or c.imag == 0 else f"({s})*{mono}"
            parts.append(term)
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(z^{self.order + 1})"

    def __repr__(self):
        return f"PowerSeries({str(self)!r})"

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """Serialize to the line-based series format (``order N`` + coefficient lines)."""
        lines = [f"order {self.order}"]
        for k, c in enumerate(self._c):
            if not c:
                continue
            if self._exact:
                lines.append(f"{k} {c.numerator}/{c.denominator}")
            else:
                lines.append(f"{k} {c.real!r} {c.imag!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> PowerSeries:
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("order"):
            raise SeriesError("series text must start with 'order N'")
        try:
            order = int(lines[0].split()[1])
        except (IndexError, ValueError):
            raise SeriesError(f"malformed order line: {lines[0]!r}") from None
        exact = True
        entries = {}
        for ln in lines[1:]:
            fields = ln.split()
            try:
                k = int(fields[0])
                if len(fields) == 2:
                    entries[k] = Fraction(fields[1])
                elif len(fields) == 3:
                    entries[k] = complex(float(fields[1]), float(fields[2]))
                    exact = False
                else:
                    raise ValueError
            except (ValueError, ZeroDivisionError):
                raise SeriesError(f"malformed coefficient line: {ln!r}") from None
            if not 0 <= k <= order:
                raise SeriesError(f"coefficient index {k} outside 0..{order}")
        if not exact and any(isinstance(v, Fraction) for v in entries.values()):
            raise DomainMismatchError("series text mixes exact and float coefficients")
        c = [0] * (order + 1)
        for k, v in entries.items():
            c[k] = v
        return cls(c, exact=exact)


class ParabolicGerm(PowerSeries):
    """A series ``z + f_p z^p + ...`` with ``p >= 2`` and ``f_p != 0``."""

    __slots__ = ("p",)

    def __init__(self, coeffs, order=None, *, exact=None):
        super().__init__(coeffs, order, exact=exact)
        self.p = self._find_p()

    @classmethod
    def from_series(cls, s: PowerSeries) -> ParabolicGerm:
        if isinstance(s, ParabolicGerm):
            return s
        obj = cls.__new__(cls)
        obj._c = s.coeffs
        obj._exact = s.exact
        obj.p = obj._find_p()
        return obj

    def _find_p(self):
        c = self._c
        if len(c) < 2 or c[0] != 0 or c[1] != 1:
            raise NotParabolicError("a parabolic germ needs f(0) = 0 and f'(0) = 1")
        for k in range(2, len(c)):
            if c[k]:
                return k
        raise NotParabolicError("no non-zero coefficient beyond z within the truncation (identity germ)")

    @property
    def leading(self):
        """The coefficient ``f_p``."""
        return self._c[self.p]

    def truncate(self, order):
        return ParabolicGerm.from_series(super().truncate(order))

    def __repr__(self):
        return f"ParabolicGerm({str(self)!r}, p={self.p})"


# ---------------------------------------------------------------------------
# raw coefficient-list kernels (no validation, results truncated at index n)


def _to_common(a: Sequence[Fraction]):
    """Fractions -> (integer numerators, common denominator)."""
    d = 1
    for x in a:
        if x.denominator != 1:
            d = lcm(d, x.denominator)
    return [_mpz(x.numerator * (d // x.denominator)) for x in a], _mpz(d)


def _conv(a: Sequence, b: Sequence, n: int) -> list:
    out = [0] * (n + 1)
    nzb = [(j, bj) for j, bj in enumerate(b[: n + 1]) if bj]
    for i, ai in enumerate(a[: n + 1]):
        if not ai:
            continue
        lim = n - i
        for j, bj in nzb:
            if j > lim:
                break
            out[i + j] += ai * bj
    return out


def _reduce_common(ints: list, den):
    g = den
    for x in ints:
        if g == 1:
            break
        if x:
            g = _gcd(g, x)
    if g != 1:
        ints = [x // g for x in ints]
        den //= g
    return ints, den


def _from_common(ints, den) -> list:
    return [Fraction(int(x), int(den)) for x in ints]


def _mul_raw(a: Sequence, b: Sequence, n: int, zero) -> list:
    if isinstance(zero, Fraction):
        ai, ad = _to_common(a[: n + 1])
        bi, bd = _to_common(b[: n + 1])
        return _from_common(_conv(ai, bi, n), ad * bd)
    out = [zero] * (n + 1)
    nzb = [(j, bj) for j, bj in enumerate(b[: n + 1]) if bj]
    for i, ai in enumerate(a[: n + 1]):
        if not ai:
            continue
        lim = n - i
        for j, bj in nzb:
            if j > lim:
                break
            out[i + j] += ai * bj
    return out


def _inv_raw(b: Sequence, n: int, zero) -> list:
    # reciprocal of a unit series, coefficients 0..n
    b0 = b[0]
    out = [zero] * (n + 1)
    out[0] = 1 / b0
    nzb = [(j, bj) for j, bj in enumerate(b[: n + 1]) if bj and j]
    for k in range(1, n + 1):
        s = zero
        for j, bj in nzb:
            if j > k:
                break
            s += bj * out[k - j]
        out[k] = -s / b0
    return out


def _compose_raw(outer: Sequence, inner: Sequence, n: int, zero) -> list:
    # Horner evaluation of outer at inner (inner[0] == 0), truncated at n
    deg = len(outer) - 1
    while deg > 0 and not outer[deg]:
        deg -= 1
    res = [zero] * (n + 1)
    res[0] = outer[deg]
    for k in range(deg - 1, -1, -1):
        res = _mul_raw(res, inner, n, zero)
        res[0] += outer[k]
    return res


def _check_domain(a: PowerSeries, b: PowerSeries):
    if a.exact != b.exact:
        raise DomainMismatchError("cannot combine exact-rational and complex-float series")


# ---------------------------------------------------------------------------
# public operations


def add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    _check_domain(a, b)
    n = min(a.order, b.order)
    return PowerSeries._raw(tuple(x + y for x, y in zip(a.coeffs[: n + 1], b.coeffs[: n + 1])), a.exact)


def mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product.

    The result order is ``min(order(a) + val(b), order(b) + val(a))``, which
    reduces to ``min(order(a), order(b))`` when both series are units.
    """
    _check_domain(a, b)
    n = min(a.order + b._val_bound(), b.order + a._val_bound())
    return PowerSeries._raw(_mul_raw(a.coeffs, b.coeffs, n, a._zero()), a.exact)


def div(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    _check_domain(a, b)
    v = b.valuation
    if v is None:
        raise SeriesZeroDivisionError("division by a series with no known non-zero coefficient")
    if any(a.coeffs[: min(v, a.order + 1)]):
        raise NotAPowerSeriesError(f"dividend has order < {v}; the quotient is not a power series")
    if a.order < v:
        raise EmptyResultError("dividend is truncated below the divisor's valuation")
    num = PowerSeries._raw(a.coeffs[v:], a.exact)
    den = b.coeffs[v:]
    n = min(num.order, len(den) - 1 + num._val_bound())
    zero = a._zero()
    inv = _inv_raw(den, n, zero)
    return PowerSeries._raw(_mul_raw(num.coeffs, inv, n, zero), a.exact)


def derive(a: PowerSeries) -> PowerSeries:
    if a.order == 0:
        raise EmptyResultError("the derivative of an order-0 series has no known coefficient")
    return PowerSeries._raw(tuple(k * a.coeffs[k] for k in range(1, a.order + 1)), a.exact)


def compose(outer: PowerSeries, inner: PowerSeries) -> PowerSeries:
    """``outer(inner(z))`` by Horner's rule; ``inner`` must vanish at 0."""
    _check_domain(outer, inner)
    if inner.coeffs[0]:
        raise CompositionError("inner series has a non-zero constant term")
    v = inner._val_bound()
    m = inner.order
    n = v * (outer.order + 1) - 1
    for k in range(1, outer.order + 1):
        if outer.coeffs[k]:
            n = min(n, m + (k - 1) * v)
            break
    zero = outer._zero()
    return PowerSeries._raw(_compose_raw(outer.coeffs, inner.coeffs, n, zero), outer.exact)


def reverse(a: PowerSeries) -> PowerSeries:
    """Compositional inverse by Lagrange inversion: ``g_n = [w^(n-1)] (w/a(w))^n / n``."""
    if a.order < 1 or a.coeffs[0] or not a.coeffs[1]:
        raise NotInvertibleError("reversion needs a(0) = 0 and a'(0) != 0")
    n_max = a.order
    zero = a._zero()
    h = _inv_raw(a.coeffs[1:], n_max - 1, zero)
    g = [zero] * (n_max + 1)
    power = h
    for n in range(1, n_max + 1):
        g[n] = power[n - 1] / n
        if n < n_max:
            power = _mul_raw(power, h, n_max - 1, zero)
    return PowerSeries._raw(g, a.exact)


def iterate(f: ParabolicGerm, n: int) -> PowerSeries:
    """``n``-fold self-composition of a germ.

    ``n = 0`` yields the plain series ``z`` (not a ParabolicGerm, since the
    identity has no parabolic part).
    """
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    if n == 0:
        return PowerSeries.variable(f.order, exact=f.exact)
    result = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    if isinstance(f, ParabolicGerm):
        return ParabolicGerm.from_series(result)
    return result


def exp_series(a: PowerSeries) -> PowerSeries:
    if a.coeffs[0]:
        raise NonFormalError("exp needs an argument with zero constant term")
    n = a.order
    c = a.coeffs
    zero = a._zero()
    e = [zero] * (n + 1)
    e[0] = zero + 1
    nz = [(k, k * c[k]) for k in range(1, n + 1) if c[k]]
    for m in range(1, n + 1):
        s = zero
        for k, kc in nz:
            if k > m:
                break
            s += kc * e[m - k]
        e[m] = s / m
    return PowerSeries._raw(e, a.exact)


def log_series(a: PowerSeries) -> PowerSeries:
    if a.coeffs[0] != 1:
        raise NonFormalError("log needs an argument with constant term 1")
    n = a.order
    c = a.coeffs
    zero = a._zero()
    out = [zero] * (n + 1)
    for m in range(1, n + 1):
        s = m * c[m]
        for k in range(1, m):
            if c[m - k]:
                s -= k * out[k] * c[m - k]
        out[m] = s / m
    return PowerSeries._raw(out, a.exact)


def _sin_cos(a: PowerSeries):
    if a.coeffs[0]:
        raise NonFormalError("sin/cos need an argument with zero constant term")
    n = a.order
    c = a.coeffs
    zero = a._zero()
    s = [zero] * (n + 1)
    co = [zero] * (n + 1)
    co[0] = zero + 1
    nz = [(k, k * c[k]) for k in range(1, n + 1) if c[k]]
    for m in range(1, n + 1):
        ss = zero
        cc = zero
        for k, kc in nz:
            if k > m:
                break
            ss += kc * co[m - k]
            cc -= kc * s[m - k]
        s[m] = ss / m
        co[m] = cc / m
    return PowerSeries._raw(s, a.exact), PowerSeries._raw(co, a.exact)


def sin_series(a: PowerSeries) -> PowerSeries:
    return _sin_cos(a)[0]


def cos_series(a: PowerSeries) -> PowerSeries:
    return _sin_cos(a)[1]
