"""Search for algebraic or linear differential equations satisfied by a truncated series.

The ansatz ``sum_{a, i} c_{a,i} z^a Y^i`` is matched against the series
coefficient by coefficient; a non-trivial rational nullspace of the
resulting matrix is a candidate equation.  Everything is exact.

A negative outcome only excludes equations inside the searched bounds; it
is never a proof of differential transcendence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

from sklearn.base import BaseEstimator

from .diffpoly import DiffPolynomial, MultiIndex, ZPolynomial, evaluate, multi_indices
from .errors import OrderDeficitError
from .funceq import as_germ, itlog
from .linalg import clear_denominators, nullspace, rank_mod_p
from .series import PowerSeries, derive

__all__ = [
    "SearchBounds",
    "GuessOutcome",
    "guess_ade",
    "guess_linear_ode",
    "egf_ogf_transform",
    "nonvanishing_scan",
    "ADEGuesser",
    "NOT_A_PROOF",
    "FOUND_CAVEAT",
]

NOT_A_PROOF = (
    "no equation within the searched bounds; this is NOT a proof of differential "
    "transcendence, only evidence restricted to these bounds and this truncation"
)
FOUND_CAVEAT = "candidate verified only up to the stated order; it is not proved to hold beyond it"


@dataclass(frozen=True)
class SearchBounds:
    max_order: int = 2
    max_total_degree: int = 3
    max_z_degree: int = 4
    margin: int = 20

    def __post_init__(self):
        if self.margin < 1:
            raise ValueError("margin must be at least 1")
        if min(self.max_order, self.max_total_degree, self.max_z_degree) < 0:
            raise ValueError("bounds must be non-negative")

    def as_dict(self):
        return {
            "max_order": self.max_order,
            "max_total_degree": self.max_total_degree,
            "max_z_degree": self.max_z_degree,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class GuessOutcome:
    verdict: str  # "found" or "none_within_bounds"
    candidate: DiffPolynomial | None
    verified_to: int
    bounds: SearchBounds
    mode: str = "ade"
    unknowns: int = 0
    caveat: str = field(default="")

    @property
    def found(self) -> bool:
        return self.verdict == "found"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "bounds": self.bounds.as_dict(),
            "unknowns": self.unknowns,
            "verified_to": self.verified_to,
            "candidate": None if self.candidate is None else self.candidate.format("Y"),
            "caveat": self.caveat,
        }

    def report(self) -> str:
        b = self.bounds
        lines = [
            f"verdict: {self.verdict}",
            f"mode: {self.mode}",
            f"bounds: r={b.max_order} d={b.max_total_degree} e={b.max_z_degree} margin={b.margin}",
            f"unknowns: {self.unknowns}",
            f"verified_to: {self.verified_to}",
        ]
        if self.candidate is not None:
            lines.append(f"candidate: {self.candidate.format('Y')}")
        lines.append(f"caveat: {self.caveat}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------


def _shift(s: PowerSeries, a: int) -> PowerSeries:
    if not a:
        return s
    return PowerSeries._raw((Fraction(0),) * a + s.coeffs, True)


class _Ansatz:
    """Columns ``z^a y^i`` with their guaranteed orders and integer data."""

    def __init__(self, y: PowerSeries, monomials, max_z: int, margin: int):
        if not y.exact:
            raise TypeError("the guesser works on exact rational series only")
        self.y = y
        self.monomials = list(monomials)
        self.max_z = max_z
        self.keys = [(m, a) for m in self.monomials for a in range(max_z + 1)]
        n_unknowns = len(self.keys)
        self.unknowns = n_unknowns
        if y.order < n_unknowns + margin:
            raise OrderDeficitError(
                f"series known to order {y.order}, but {n_unknowns} unknowns plus margin {margin} "
                f"need order {n_unknowns + margin}"
            )
        r = max((m.order for m in self.monomials), default=0)
        ders = [y]
        for _ in range(r):
            ders.append(derive(ders[-1]))
        base = {}
        for m in self.monomials:
            s = None
            for k, e in enumerate(m.entries):
                for _ in range(e):
                    s = ders[k] if s is None else s * ders[k]
            if s is None:
                s = PowerSeries.one(y.order + max_z)
            base[m] = s
        cols = [_shift(base[m], a) for m, a in self.keys]
        self.rows_to = min(c.order for c in cols)
        if self.rows_to + 1 <= n_unknowns:
            raise OrderDeficitError(
                f"only {self.rows_to + 1} coefficients survive differentiation for {n_unknowns} unknowns"
            )
        raw = [list(c.coeffs[: self.rows_to + 1]) for c in cols]
        self.int_rows, self.scales = clear_denominators(raw)
        self._cache = {}

    def submatrix(self, idx):
        return [[row[j] for j in idx] for row in self.int_rows]

    def has_kernel(self, idx) -> bool:
        idx = tuple(idx)
        if idx not in self._cache:
            if not idx:
                self._cache[idx] = False
            else:
                sub = self.submatrix(idx)
                if rank_mod_p(sub) == len(idx):
                    self._cache[idx] = False
                else:
                    self._cache[idx] = bool(nullspace(sub, len(idx)))
        return self._cache[idx]


def _first_true(n: int, pred) -> int | None:
    """Smallest k in [0, n) with pred(k), for a monotone predicate."""
    if n == 0 or not pred(n - 1):
        return None
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _normalize(coeffs: dict) -> DiffPolynomial:
    """Integer coefficients, content 1, leading coefficient positive."""
    g = 0
    for poly in coeffs.values():
        for c in poly:
            g = gcd(g, int(c))
    top = max(coeffs)
    lead = coeffs[top]
    sign = -1 if lead[max(a for a, c in enumerate(lead) if c)] < 0 else 1
    terms = {}
    for m, poly in coeffs.items():
        terms[m] = ZPolynomial([Fraction(sign * int(c), g) for c in poly])
    return DiffPolynomial(terms, ring="polynomials")


def _search(y: PowerSeries, monomials, bounds: SearchBounds, mode: str) -> GuessOutcome:
    ans = _Ansatz(y, monomials, bounds.max_z_degree, bounds.margin)
    keys = ans.keys
    all_idx = list(range(len(keys)))
    if not ans.has_kernel(all_idx):
        return GuessOutcome("none_within_bounds", None, ans.rows_to, bounds, mode, ans.unknowns, NOT_A_PROOF)

    mons = ans.monomials

    # smallest rank: restrict to monomials up to mons[k]
    def upto_rank(k):
        top = mons[k]
        return [j for j, (m, a) in enumerate(keys) if m <= top]

    k_rank = _first_true(len(mons), lambda k: ans.has_kernel(upto_rank(k)))
    by_rank = upto_rank(k_rank)

    # then the smallest z-degree
    def upto_z(e):
        return [j for j in by_rank if keys[j][1] <= e]

    e_min = _first_true(bounds.max_z_degree + 1, lambda e: ans.has_kernel(upto_z(e)))
    chosen = sorted(upto_z(e_min), key=lambda j: (keys[j][0], keys[j][1]))

    # then push the support as high as possible in (monomial, z-power) order;
    # what remains is a one-dimensional kernel
    cut = _first_true(len(chosen), lambda c: not ans.has_kernel(chosen[c:]))
    tail = chosen[(cut if cut is not None else len(chosen)) - 1 :]
    basis = nullspace(ans.submatrix(tail), len(tail))
    assert len(basis) == 1, "tie-breaking must leave a one-dimensional kernel"
    vec = basis[0]

    coeffs: dict[MultiIndex, list] = {}
    for j, x in zip(tail, vec):
        if not x:
            continue
        m, a = keys[j]
        poly = coeffs.setdefault(m, [0] * (e_min + 1))
        poly[a] = x * ans.scales[j]
    candidate = _normalize(coeffs)

    # independent soundness check
    res = evaluate(candidate, y)
    if res.order < ans.rows_to or any(res.coeffs[: ans.rows_to + 1]):
        raise AssertionError("candidate failed the independent re-check")
    return GuessOutcome("found", candidate, ans.rows_to, bounds, mode, ans.unknowns, FOUND_CAVEAT)


def guess_ade(y: PowerSeries, bounds: SearchBounds | None = None) -> GuessOutcome:
    """Algebraic differential equation ``P(z, y, y', ...) = 0`` within ``bounds``."""
    bounds = bounds or SearchBounds()
    mons = multi_indices(bounds.max_order, bounds.max_total_degree)
    return _search(y, mons, bounds, "ade")


def guess_linear_ode(y: PowerSeries, bounds: SearchBounds | None = None, *, affine: bool = False) -> GuessOutcome:
    """Linear equation ``sum p_k(z) y^(k) = 0`` (or ``= q(z)`` with ``affine``)."""
    bounds = bounds or SearchBounds(max_order=4, max_total_degree=1, max_z_degree=6)
    if bounds.max_total_degree != 1:
        bounds = SearchBounds(bounds.max_order, 1, bounds.max_z_degree, bounds.margin)
    mons = [MultiIndex.unit(k) for k in range(bounds.max_order + 1)]
    if affine:
        mons = [MultiIndex(())] + mons
    return _search(y, sorted(mons), bounds, "ode-affine" if affine else "ode")


def egf_ogf_transform(y: PowerSeries, direction: str = "to_ogf") -> PowerSeries:
    """Multiply (``to_ogf``) or divide (``to_egf``) the k-th coefficient by k!."""
    if not y.exact:
        raise TypeError("egf/ogf transform needs exact coefficients")
    if direction == "to_ogf":
        return PowerSeries._raw(tuple(c * factorial(k) for k, c in enumerate(y.coeffs)), True)
    if direction == "to_egf":
        return PowerSeries._raw(tuple(c / factorial(k) for k, c in enumerate(y.coeffs)), True)
    raise ValueError("direction must be 'to_ogf' or 'to_egf'")


def nonvanishing_scan(f, k_max: int) -> list[int]:
    """Indices p+1 <= k <= k_max where the iterative logarithm's coefficient vanishes."""
    g = as_germ(f)
    if not g.exact:
        raise TypeError("the scan needs an exactly representable germ")
    phi = itlog(g.truncate(k_max) if g.order > k_max else g, k_max).phi
    return [k for k in range(g.p + 1, k_max + 1) if phi[k] == 0]


class ADEGuesser(BaseEstimator):
    """Estimator front-end to the guesser.

    ``fit(y)`` runs the search on an exact series (or coefficient list) and
    stores ``outcome_``, ``verdict_``, ``candidate_`` and ``verified_to_``.
    """

    def __init__(self, mode="ade", max_order=2, max_total_degree=3, max_z_degree=4, margin=20, affine=False):
        self.mode = mode
        self.max_order = max_order
        self.max_total_degree = max_total_degree
        self.max_z_degree = max_z_degree
        self.margin = margin
        self.affine = affine

    def fit(self, y, _=None):
        if not isinstance(y, PowerSeries):
            y = PowerSeries([Fraction(c) for c in y], exact=True)
        b = SearchBounds(self.max_order, self.max_total_degree, self.max_z_degree, self.margin)
        if self.mode == "ade":
            out = guess_ade(y, b)
        elif self.mode == "ode":
            out = guess_linear_ode(y, b, affine=self.affine)
        else:
            raise ValueError(f"mode must be 'ade' or 'ode', got {self.mode!r}")
        self.outcome_ = out
        self.verdict_ = out.verdict
        self.candidate_ = out.candidate
        self.verified_to_ = out.verified_to
        return self

    def annihilates(self, y) -> bool:
        """Whether the fitted candidate also annihilates ``y`` to its own order."""
        if getattr(self, "candidate_", None) is None:
            return False
        res = evaluate(self.candidate_, y)
        return not any(res.coeffs)
