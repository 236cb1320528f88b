"""Julia's equation, Schroeder's equation and the flow of a parabolic germ.

The iterative logarithm of ``f = z + f_p z^p + ...`` is the unique series
``phi = f_p z^p + phi_{p+1} z^{p+1} + ...`` with ``phi(f(z)) = f'(z) phi(z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BoettcherCaseError, OrderDeficitError, ResonanceError
from .series import (
    ParabolicGerm,
    PowerSeries,
    _conv,
    _reduce_common,
    _to_common,
    compose,
    derive,
    iterate,
)

__all__ = [
    "ItlogResult",
    "SchroederResult",
    "itlog",
    "julia_residual",
    "scale_check",
    "schroeder_solve",
    "flow",
    "as_germ",
]

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class ItlogResult:
    phi: PowerSeries
    source_p: int
    verified_order: int
    input_truncation: int

    def __getitem__(self, k):
        return self.phi[k]


@dataclass(frozen=True)
class SchroederResult:
    multiplier: object
    phi: PowerSeries
    verified_order: int


def as_germ(f) -> ParabolicGerm:
    if isinstance(f, ParabolicGerm):
        return f
    return ParabolicGerm.from_series(f)


def itlog(f, order: int | None = None) -> ItlogResult:
    """Iterative logarithm of a parabolic germ, to ``order`` (default: order of ``f``).

    Row ``k`` of the linear system is ``phi_k * (f^k - f' z^k)``; it starts
    at index ``k + p - 1`` with entry ``(k - p) f_p``, so matching the
    coefficient of ``z^(m+p-1)`` determines ``phi_m`` from earlier values.
    """
    f = as_germ(f)
    p = f.p
    n = f.order if order is None else order
    if n < p:
        raise ValueError(f"order {n} is below the germ's p = {p}")
    if f.order < n:
        raise OrderDeficitError(f"germ known to order {f.order}, itlog requested to order {n}")
    fp = f.leading
    top = n + p - 1
    zero = f._zero()
    c = list(f.coeffs[: n + 1]) + [zero] * (p - 1)
    dc = [(k + 1) * c[k + 1] for k in range(top)] + [zero]

    phi = [zero] * (n + 1)
    acc = [zero] * (top + 1)
    # f^m kept as integer numerators over a common denominator
    exact = f.exact
    if exact:
        ci, cd = _to_common(c)

        def next_power(row, den):
            return _reduce_common(_conv(row, ci, top), den * cd)

    else:

        def next_power(row, den):
            return _conv(row, c, top), 1

    power, pden = [1] + [0] * top, 1
    for _ in range(p):
        power, pden = next_power(power, pden)
    for m in range(p, n + 1):
        if m == p:
            phi[m] = fp
        else:
            phi[m] = -acc[m + p - 1] / ((m - p) * fp)
        pm = phi[m]
        if pm:
            for idx in range(m + p, top + 1):
                pw = Fraction(int(power[idx]), int(pden)) if exact else power[idx]
                r = pw - dc[idx - m]
                if r:
                    acc[idx] += pm * r
        if m < n:
            power, pden = next_power(power, pden)
    return ItlogResult(PowerSeries._raw(phi, f.exact), p, n, f.order)


def julia_residual(f, phi: PowerSeries) -> PowerSeries:
    """``phi(f) - f' * phi`` at its guaranteed order."""
    return compose(phi, f) - derive(f) * phi


def scale_check(f, n: int, order: int) -> bool:
    """True iff ``itlog(f^n) == n * itlog(f)`` exactly to ``order``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    f = as_germ(f)
    if f.order < order:
        raise OrderDeficitError(f"germ known to order {f.order}, check requested to order {order}")
    f = f.truncate(order)
    lhs = itlog(iterate(f, n), order).phi
    rhs = itlog(f, order).phi * n
    return lhs == rhs


def schroeder_solve(f: PowerSeries, order: int | None = None) -> SchroederResult:
    """Formal solution of ``phi(lam z) = f(phi(z))`` with ``phi(0) = 0``, ``phi'(0) = 1``."""
    n = f.order if order is None else order
    if f.order < n:
        raise OrderDeficitError(f"f known to order {f.order}, solution requested to order {n}")
    if f.order < 1 or f[0]:
        raise ValueError("Schroeder linearization needs f(0) = 0")
    lam = f[1]
    if not lam:
        raise BoettcherCaseError("multiplier 0: superattracting fixed point, use Boettcher's equation")
    if not f.exact and abs(abs(lam) - 1) <= PIVOT_TOL:
        raise ResonanceError(f"multiplier {lam} has modulus 1; float mode requires |lambda| != 1")
    c = f.coeffs
    zero = f._zero()
    phi = [zero] * (n + 1)
    if n >= 1:
        phi[1] = zero + 1
    # pw[j][k] = [z^k] phi^j, filled column by column
    pw = [[zero] * (n + 1) for _ in range(n + 1)]
    if n >= 1:
        pw[1][1] = phi[1]
    lam_k = lam
    for k in range(2, n + 1):
        lam_k = lam_k * lam
        for j in range(2, k + 1):
            s = zero
            prev = pw[j - 1]
            for i in range(1, k - j + 2):
                if phi[i] and prev[k - i]:
                    s += phi[i] * prev[k - i]
            pw[j][k] = s
        rhs = zero
        for j in range(2, k + 1):
            if c[j] and pw[j][k]:
                rhs += c[j] * pw[j][k]
        pivot = lam_k - lam
        if (f.exact and pivot == 0) or (not f.exact and abs(pivot) <= PIVOT_TOL):
            raise ResonanceError(f"resonant multiplier: lambda^{k} = lambda", k=k)
        phi[k] = rhs / pivot
        pw[1][k] = phi[k]
    return SchroederResult(lam, PowerSeries._raw(phi, f.exact), n)


def flow(f, t, order: int | None = None) -> PowerSeries:
    """Time-``t`` map of the flow generated by ``itlog(f)``.

    Computed as ``exp(t D) z`` with ``D g = itlog(f) * g'``; ``D`` raises
    the valuation by ``p - 1``, so the sum is finite modulo ``z^(order+1)``.
    """
    f = as_germ(f)
    n = f.order if order is None else order
    if f.exact:
        if not isinstance(t, (int, Fraction)):
            raise TypeError("exact flows need a rational time t")
        t = Fraction(t)
    phi = itlog(f, n).phi
    term = PowerSeries.variable(n, exact=f.exact)
    result = term
    k = 1
    while True:
        term = (phi * derive(term)).truncate(n) * t / k
        if term.is_zero():
            break
        result = result + term
        k += 1
    return result
