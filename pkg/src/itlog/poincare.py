"""Numeric Poincare functions at repelling periodic points.

For a repelling point ``xi`` of period ``p`` with multiplier ``lam``,
``psi(z) = lim f^(np)(xi + lam^-n z)``.  Orbits are followed in local
coordinates ``w = z - xi_k`` so that tiny displacements from a non-zero
fixed point are not swamped by rounding; near the orbit a Taylor jet of
``f`` replaces the subtraction ``f(xi_k + w) - xi_(k+1)``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DivergenceError, NoFixedPointError, NotRepellingError
from .series import PowerSeries, compose, cos_series, exp_series, log_series, sin_series

__all__ = [
    "EvaluableMap",
    "RationalMap",
    "NamedMap",
    "FixedPointData",
    "EvalReport",
    "find_repelling_fixed_point",
    "poincare_eval",
    "poincare_derivative",
    "poincare_monomial",
    "check_schroeder_numeric",
    "PoincareFunction",
    "read_samples",
    "write_reports",
]

JET_ORDER = 24
ESCAPE_CAP = 1e150
MAX_N = 200
NEWTON_STEPS = 100


# ---------------------------------------------------------------------------
# maps


def cexpm1(w: complex) -> complex:
    """``exp(w) - 1`` without cancellation for small ``w``."""
    x, y = w.real, w.imag
    re_part = math.expm1(x) * math.cos(y) - 2 * math.sin(y / 2) ** 2
    return complex(re_part, math.exp(x) * math.sin(y))


def jet_exp(a: PowerSeries) -> PowerSeries:
    c0 = a[0]
    return exp_series(a - c0) * cmath.exp(c0)


def jet_expm1(a: PowerSeries) -> PowerSeries:
    c0 = a[0]
    e = exp_series(a - c0) * cmath.exp(c0)
    return e - 1 if not c0 else (e - cmath.exp(c0)) + cexpm1(c0)


def jet_sin(a: PowerSeries) -> PowerSeries:
    c0 = a[0]
    h = a - c0
    return sin_series(h) * cmath.cos(c0) + cos_series(h) * cmath.sin(c0)


def jet_log(a: PowerSeries) -> PowerSeries:
    c0 = a[0]
    return log_series(a / c0) + cmath.log(c0)


class EvaluableMap(ABC):
    """A holomorphic map with pointwise values and Taylor jets."""

    @abstractmethod
    def __call__(self, z: complex) -> complex: ...

    @abstractmethod
    def jet(self, s: PowerSeries) -> PowerSeries:
        """``f(s)`` for a complex-float series ``s`` with arbitrary constant term."""

    def taylor(self, z: complex, order: int = JET_ORDER) -> list[complex]:
        """Taylor coefficients of ``f`` at ``z``."""
        s = PowerSeries([complex(z), 1] + [0] * (order - 1), exact=False)
        return list(self.jet(s).coeffs)

    def derivative(self, z: complex) -> complex:
        return self.taylor(z, 1)[1]


class RationalMap(EvaluableMap):
    """``num(z) / den(z)`` with complex coefficients listed from degree 0 up."""

    def __init__(self, num: Sequence, den: Sequence = (1,)):
        self.num = [complex(c) for c in num]
        self.den = [complex(c) for c in den]
        if not any(self.den):
            raise ValueError("zero denominator")

    @staticmethod
    def _horner(coeffs, x):
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __call__(self, z):
        return self._horner(self.num, z) / self._horner(self.den, z)

    def jet(self, s):
        return self._horner(self.num, s) / self._horner(self.den, s)

    def __repr__(self):
        return f"RationalMap({self.num}, {self.den})"


class NamedMap(EvaluableMap):
    """The entire maps ``expm1`` (e^z - 1), ``sin`` and ``zexp`` (z e^z)."""

    NAMES = ("expm1", "sin", "zexp")

    def __init__(self, name: str):
        if name not in self.NAMES:
            raise ValueError(f"unknown named map {name!r}; expected one of {self.NAMES}")
        self.name = name

    def __call__(self, z):
        z = complex(z)
        if self.name == "expm1":
            return cexpm1(z)
        if self.name == "sin":
            return cmath.sin(z)
        return z * cmath.exp(z)

    def jet(self, s):
        if self.name == "expm1":
            return jet_expm1(s)
        if self.name == "sin":
            return jet_sin(s)
        return s * jet_exp(s)

    def __repr__(self):
        return f"NamedMap({self.name!r})"


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class FixedPointData:
    xi: complex
    period: int
    multiplier: complex

    @property
    def lam(self):
        return self.multiplier


@dataclass(frozen=True)
class EvalReport:
    value: complex
    n_used: int
    error_estimate: float
    converged: bool

    # the estimate is a successive difference, not a rigorous bound
    heuristic_error: bool = True


def _iterate_with_derivative(f: EvaluableMap, z: complex, p: int):
    d = 1
    for _ in range(p):
        c = f.taylor(z, 1)
        z, d = c[0], d * c[1]
    return z, d


def find_repelling_fixed_point(f: EvaluableMap, seed: complex, period: int = 1) -> FixedPointData:
    """Newton's method on ``f^p(z) - z`` from ``seed``; only repelling points are accepted."""
    if period < 1:
        raise ValueError("period must be at least 1")
    z = complex(seed)
    for _ in range(NEWTON_STEPS):
        try:
            fz, d = _iterate_with_derivative(f, z, period)
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise NoFixedPointError(f"Newton iteration left the domain of f near {z}") from exc
        g = fz - z
        if g == 0:
            break
        if d == 1:
            raise NoFixedPointError(f"Newton iteration hit a critical point of f^p(z) - z at {z}")
        step = g / (d - 1)
        z -= step
        if not cmath.isfinite(z):
            raise NoFixedPointError("Newton iteration diverged")
        if abs(step) < 1e-15 * (1 + abs(z)):
            break
    fz, lam = _iterate_with_derivative(f, z, period)
    if not abs(fz - z) < 1e-12 * (1 + abs(z)):
        raise NoFixedPointError(f"no fixed point of f^{period} found from seed {seed} in {NEWTON_STEPS} steps")
    if abs(lam) <= 1 + 1e-9:
        raise NotRepellingError(f"fixed point {z} has multiplier {lam}, |lambda| <= 1")
    return FixedPointData(z, period, lam)


# ---------------------------------------------------------------------------
# orbit machinery


class _Orbit:
    """Local jets of ``f`` along the cycle of ``fp``."""

    def __init__(self, f: EvaluableMap, fp: FixedPointData):
        self.f = f
        self.fp = fp
        p = fp.period
        pts = [fp.xi]
        for _ in range(p - 1):
            pts.append(f(pts[-1]))
        self.points = pts
        self.jets = []
        self.radius = []
        for x in pts:
            c = f.taylor(x, JET_ORDER)
            c[0] = 0j
            while len(c) > 2 and c[-1] == 0:
                c.pop()
            self.jets.append(c)
            tail = [abs(a) ** (-1.0 / m) for m, a in enumerate(c) if m >= 2 and a != 0]
            self.radius.append(min(tail) if tail else math.inf)
        # local scale of f^p at xi from its second Taylor coefficient
        loc = PowerSeries([0, 1, 0], exact=False)
        for c in self.jets:
            loc = compose(PowerSeries(c[:3] + [0] * (3 - len(c[:3])), exact=False), loc)
        c2 = abs(loc[2])
        self.scale = 1.0 / c2 if c2 > 1e-300 else 1.0

    def start_n(self, z: complex) -> int:
        lam = abs(self.fp.multiplier)
        target = 0.01 * self.scale
        if abs(z) < target:
            return 0
        return max(0, math.ceil(math.log(abs(z) / target) / math.log(lam)))

    def step(self, k: int, w: complex) -> complex:
        """Local coordinate of ``f(xi_k + w)`` relative to ``xi_(k+1)``."""
        if abs(w) < 0.1 * self.radius[k]:
            c = self.jets[k]
            acc = c[-1]
            for a in reversed(c[1:-1]):
                acc = acc * w + a
            return acc * w
        nxt = self.points[(k + 1) % len(self.points)]
        return self.f(self.points[k] + w) - nxt

    def step_jet(self, k: int, w: list, m: int) -> list:
        if abs(w[0]) < 0.1 * self.radius[k]:
            c = self.jets[k]
            acc = [c[-1]] + [0j] * m
            for a in reversed(c[1:-1]):
                acc = _lmul(acc, w, m)
                acc[0] += a
            return _lmul(acc, w, m)
        s = PowerSeries([self.points[k] + w[0]] + list(w[1:]), exact=False)
        out = list(self.f.jet(s).coeffs)
        out[0] -= self.points[(k + 1) % len(self.points)]
        return out

    def psi_n(self, z: complex, n: int) -> complex:
        w = complex(z) * self.fp.multiplier ** (-n)
        p = self.fp.period
        for t in range(n * p):
            w = self.step(t % p, w)
            if not (abs(w) < ESCAPE_CAP):
                raise DivergenceError(f"orbit escaped at iterate {t} of n = {n}", last_n=n - 1)
        return self.fp.xi + w

    def psi_n_jet(self, z: complex, n: int, m: int) -> list:
        """Taylor coefficients in ``e`` of ``f^(np)(xi + lam^-n (z + e))`` minus ``xi``."""
        s = self.fp.multiplier ** (-n)
        w = [complex(z) * s, s] + [0j] * (m - 1)
        p = self.fp.period
        for t in range(n * p):
            w = self.step_jet(t % p, w, m)
            if not all(abs(c) < ESCAPE_CAP for c in w):
                raise DivergenceError(f"orbit escaped at iterate {t} of n = {n}", last_n=n - 1)
        return w


def _lmul(a, b, m):
    out = [0j] * (m + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(m + 1 - i):
                out[i + j] += x * b[j]
    return out


def _converge(seq, n0: int, tol: float) -> EvalReport:
    if not tol > 0:
        raise ValueError("tol must be positive")

    def safe(n):
        try:
            v = seq(n)
        except (OverflowError, ZeroDivisionError) as exc:
            raise DivergenceError(f"evaluation failed at n = {n}: {exc}", last_n=n - 1) from exc
        if not cmath.isfinite(v):
            raise DivergenceError(f"non-finite value at n = {n}", last_n=n - 1)
        return v

    prev = safe(n0)
    n = n0
    err = math.inf
    while n < MAX_N:
        n += 1
        cur = safe(n)
        err = abs(cur - prev)
        prev = cur
        if err < tol:
            return EvalReport(cur, n, err, True)
    return EvalReport(prev, n, err, False)


def poincare_eval(f: EvaluableMap, fp: FixedPointData, z: complex, tol: float = 1e-12) -> EvalReport:
    """``psi(z)`` by the limit of ``f^(np)(xi + lam^-n z)``."""
    orb = _Orbit(f, fp)
    return _converge(lambda n: orb.psi_n(z, n), orb.start_n(z), tol)


def _derivatives(orb: _Orbit, z, n, m):
    w = orb.psi_n_jet(z, n, m)
    out = []
    fact = 1
    for k in range(m + 1):
        if k:
            fact *= k
        out.append(w[k] * fact)
    out[0] += orb.fp.xi
    return out


def poincare_derivative(f: EvaluableMap, fp: FixedPointData, z: complex, m: int, tol: float = 1e-12) -> EvalReport:
    """``psi^(m)(z)`` via ``lam^(-mn) (f^(np))^(m)(xi + lam^-n z)``, using order-m jets."""
    if m < 1:
        raise ValueError("m must be at least 1")
    orb = _Orbit(f, fp)
    return _converge(lambda n: complex(_derivatives(orb, z, n, m)[m]), orb.start_n(z), tol)


def poincare_monomial(
    f: EvaluableMap, fp: FixedPointData, z: complex, index, *, of_derivative: bool = False, tol: float = 1e-10
) -> EvalReport:
    """``psi^i(z)`` (or ``(psi')^i(z)`` when ``of_derivative``) as a limit over n.

    ``index`` lists the exponents ``(i_0, i_1, ...)`` of ``psi, psi', ...``.
    """
    idx = tuple(int(e) for e in index)
    shift = 1 if of_derivative else 0
    m = len(idx) - 1 + shift
    orb = _Orbit(f, fp)

    def value(n):
        d = _derivatives(orb, z, n, max(m, 1))
        v = 1 + 0j
        for k, e in enumerate(idx):
            if e:
                v *= d[k + shift] ** e
        return v

    return _converge(value, orb.start_n(z), tol)


def check_schroeder_numeric(f: EvaluableMap, fp: FixedPointData, samples: Iterable[complex], tol: float = 1e-12) -> float:
    """Largest ``|psi(lam z) - f^p(psi(z))|`` over the samples (0 for none)."""
    worst = 0.0
    p = fp.period
    for z in samples:
        a = poincare_eval(f, fp, complex(z) * fp.multiplier, tol).value
        b = poincare_eval(f, fp, z, tol).value
        for _ in range(p):
            b = f(b)
        worst = max(worst, abs(a - b))
    return worst


# ---------------------------------------------------------------------------
# estimator wrapper and CSV


class PoincareFunction(BaseEstimator):
    """Poincare function of ``f`` at the repelling point nearest Newton's reach from ``seed``.

    ``fit`` locates the fixed point; ``predict`` evaluates ``psi`` on an
    array of complex points.
    """

    def __init__(self, f=None, seed=0j, period=1, tol=1e-12):
        self.f = f
        self.seed = seed
        self.period = period
        self.tol = tol

    def _map(self):
        f = self.f
        if isinstance(f, EvaluableMap):
            return f
        if isinstance(f, str):
            from .expr import ExpressionMap

            return ExpressionMap.from_text(f)
        raise TypeError("f must be an EvaluableMap or an expression string")

    def fit(self, X=None, y=None):
        self.map_ = self._map()
        self.fixed_point_ = find_repelling_fixed_point(self.map_, complex(self.seed), int(self.period))
        self.multiplier_ = self.fixed_point_.multiplier
        return self

    def _check_fitted(self):
        if not hasattr(self, "fixed_point_"):
            raise AttributeError("PoincareFunction is not fitted; call fit() first")

    def evaluate(self, Z) -> list[EvalReport]:
        self._check_fitted()
        pts = np.asarray(Z, dtype=complex).ravel()
        return [poincare_eval(self.map_, self.fixed_point_, complex(z), self.tol) for z in pts]

    def predict(self, Z) -> np.ndarray:
        shape = np.shape(Z)
        vals = [r.value for r in self.evaluate(Z)]
        return np.asarray(vals, dtype=complex).reshape(shape)


def read_samples(source) -> list[complex]:
    """Parse ``re,im`` lines from a path or text stream; blank and '#' lines are skipped."""
    if isinstance(source, str):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_samples(fh)
    out = []
    for lineno, row in enumerate(csv.reader(source), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            re_part = float(row[0])
            im_part = float(row[1]) if len(row) > 1 and row[1].strip() else 0.0
        except ValueError as exc:
            if lineno == 1:
                continue  # header
            raise ValueError(f"line {lineno}: expected re,im") from exc
        out.append(complex(re_part, im_part))
    return out


def write_reports(samples: Sequence[complex], reports: Sequence[EvalReport], sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z_re", "z_im", "val_re", "val_im", "n_used", "err"])
    for z, r in zip(samples, reports):
        w.writerow([repr(z.real), repr(z.imag), repr(r.value.real), repr(r.value.imag), r.n_used, repr(r.error_estimate)])
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text
