"""Invariant suites shared by the CLI ``verify`` command and the test-suite.

Each suite returns a list of ``Check`` records; a suite passes when every
check does.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .diffpoly import DiffPolynomial, MultiIndex, chain_A, chain_B, evaluate
from .funceq import flow, itlog, julia_residual, scale_check
from .series import ParabolicGerm, PowerSeries, compose, derive, exp_series, sin_series

__all__ = ["Check", "SUITES", "run_suite", "example_germs", "chain_indices"]


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail and not self.ok else "")


def example_germs(order: int) -> dict[str, ParabolicGerm]:
    """The four entire example germs, truncated at ``order``."""
    z = PowerSeries.variable(order)
    e = exp_series(z)
    return {
        "z+z^2": ParabolicGerm.from_series(z + z * z),
        "exp(z)-1": ParabolicGerm.from_series(e - 1),
        "z*exp(z)": ParabolicGerm.from_series(z * e),
        "sin(z)": ParabolicGerm.from_series(sin_series(z)),
    }


def moebius(c, order: int) -> ParabolicGerm:
    z = PowerSeries.variable(order)
    return ParabolicGerm.from_series(z / (1 - z * Fraction(c)))


def _deriv_list(s: PowerSeries, k: int) -> list[PowerSeries]:
    out = [s]
    for _ in range(k):
        out.append(derive(out[-1]))
    return out


def _monomial_value(ders: list[PowerSeries], index: MultiIndex, order: int) -> PowerSeries:
    v = PowerSeries.one(order)
    for k, e in enumerate(index.entries):
        for _ in range(e):
            v = v * ders[k]
    return v


def _zero_to(s: PowerSeries, n: int) -> bool:
    return s.order >= n and not any(s.coeffs[: n + 1])


# ---------------------------------------------------------------------------


def suite_julia(order: int = 30) -> list[Check]:
    checks = []
    for name, f in example_germs(order).items():
        phi = itlog(f, order).phi
        res = julia_residual(f, phi)
        checks.append(Check(f"julia residual {name} to order {res.order}", not any(res.coeffs)))
    for c in (1, -2, Fraction(3, 5)):
        f = moebius(c, 60)
        phi = itlog(f, 60).phi
        expect = PowerSeries.monomial(2, Fraction(c), 60)
        checks.append(Check(f"itlog(z/(1-({c})z)) = ({c})z^2 to order 60", phi == expect))
    return checks


def chain_A_checks(j_max: int = 6) -> list[Check]:
    A = chain_A(j_max)
    checks = []
    X = DiffPolynomial.variable(0)
    for j in range(j_max + 1):
        checks.append(Check(f"A_{j}{j} = X^{j}", A[j, j] == X**j))
        for i in range(j + 1):
            a = A[i, j]
            if a:
                ok = a.is_homogeneous() and a.degree() == j and a.is_isobaric() and a.weight() == j - i
                checks.append(Check(f"A_{i}{j} homogeneous deg {j}, isobaric wt {j - i}", ok, a.format("X")))
        top = MultiIndex([j - 1] + [0] * (j - 1) + [1]) if j else MultiIndex(())
        checks.append(Check(f"rank A_0{j} is X^({j}) X^{max(j - 1, 0)}", A[0, j].rank() == top, str(A[0, j].rank())))
    return checks


def chain_A_oracle(f: PowerSeries, j_max: int = 5, order: int = 25) -> list[Check]:
    """phi^(j)(f) (f')^(2j-1) == sum_i A_ij(f') phi^(i), exactly to ``order``."""
    A = chain_A(j_max)
    phi = itlog(f, f.order).phi
    fp = derive(f)
    phis = _deriv_list(phi, j_max)
    checks = []
    for j in range(j_max + 1):
        lhs = compose(phis[j], f) * fp ** (2 * j - 1)
        rhs = None
        for i in range(j + 1):
            t = evaluate(A[i, j], fp) * phis[i] if A[i, j] else None
            if t is not None:
                rhs = t if rhs is None else rhs + t
        checks.append(Check(f"chain rule display j={j}", _zero_to(lhs - rhs, order), f"orders {lhs.order}/{rhs.order}"))
    return checks


def chain_indices(max_weight: int = 5, max_j0: int = 2) -> list[MultiIndex]:
    """All j with weight <= max_weight and j_0 <= max_j0."""
    out = set()
    for tail in product(*[range(max_weight // k + 1) for k in range(1, max_weight + 1)]):
        if sum(k * e for k, e in enumerate(tail, 1)) > max_weight:
            continue
        for j0 in range(max_j0 + 1):
            out.add(MultiIndex((j0,) + tail))
    return sorted(out)


def chain_B_checks(max_weight: int = 5) -> list[Check]:
    X = DiffPolynomial.variable(0)
    checks = []
    for j in chain_indices(max_weight):
        B = chain_B(j)
        w = j.weight
        checks.append(Check(f"B_jj = X^{w} for j={j.entries}", B.get(j) == X**w))
        b0 = B.get(MultiIndex((j.abs,)))
        ok = b0 is not None and b0.is_homogeneous() and b0.degree() == w and b0.is_isobaric() and b0.weight() == w
        checks.append(Check(f"B_(|j|),j homogeneous and isobaric of {w} for j={j.entries}", ok))
        for i in B:
            if i.abs != j.abs or not i <= j:
                checks.append(Check(f"B index {i.entries} admissible for j={j.entries}", False))
    return checks


def chain_B_oracle(f: PowerSeries, max_weight: int = 5, order: int = 25) -> list[Check]:
    """phi^j(f) (f')^(2||j|| - |j|) == sum_i B_ij(f') phi^i, exactly to ``order``."""
    phi = itlog(f, f.order).phi
    fp = derive(f)
    phis = _deriv_list(phi, max_weight)
    comp = [compose(p, f) for p in phis]
    n = f.order
    checks = []
    for j in chain_indices(max_weight):
        lhs = _monomial_value(comp, j, n) * fp ** (2 * j.weight - j.abs)
        rhs = PowerSeries.zero(n)
        for i, b in chain_B(j).items():
            rhs = rhs + evaluate(b, fp) * _monomial_value(phis, i, n)
        checks.append(Check(f"substitution j={j.entries}", _zero_to(lhs - rhs, order)))
    return checks


def suite_chainA() -> list[Check]:
    out = chain_A_checks(6)
    g = example_germs(40)
    for name in ("z+z^2", "exp(z)-1"):
        out += [Check(f"{c.name} [{name}]", c.ok, c.detail) for c in chain_A_oracle(g[name], 5, 25)]
    return out


def suite_chainB() -> list[Check]:
    out = chain_B_checks(5)
    g = example_germs(40)
    for name in ("z+z^2", "exp(z)-1"):
        out += [Check(f"{c.name} [{name}]", c.ok) for c in chain_B_oracle(g[name], 5, 25)]
    return out


def suite_flow(order: int = 30) -> list[Check]:
    z = PowerSeries.variable(order)
    q = ParabolicGerm.from_series(z + z * z)
    half = flow(q, Fraction(1, 2), order)
    checks = [Check("flow(z+z^2, 1/2) o flow(z+z^2, 1/2) = z+z^2", compose(half, half) == q)]
    m = moebius(1, order)
    t = Fraction(2, 3)
    expect = z / (1 - z * t)
    checks.append(Check("flow(z/(1-z), 2/3) = z/(1-2z/3)", flow(m, t, order) == expect))
    checks.append(Check("flow(f, 1) = f", flow(q, 1, order) == q))
    checks.append(Check("flow(f, 0) = z", flow(q, 0, order) == z))
    for s, t in [(Fraction(1, 3), Fraction(1, 4)), (Fraction(-1, 2), Fraction(3, 2)), (Fraction(2, 5), Fraction(-1, 7))]:
        for name, f in example_germs(order).items():
            if name not in ("z+z^2", "exp(z)-1"):
                continue
            lhs = compose(flow(f, s, order), flow(f, t, order))
            checks.append(Check(f"flow({name}, {s}) o flow({name}, {t}) = flow(., {s + t})", lhs == flow(f, s + t, order)))
    return checks


def suite_scale(order: int = 40) -> list[Check]:
    checks = []
    for name, f in example_germs(order).items():
        for n in (1, 2, 3):
            checks.append(Check(f"itlog({name}^{n}) = {n} itlog({name}) to order {order}", scale_check(f, n, order)))
    return checks


def suite_julia_default() -> list[Check]:
    return suite_julia(30)


SUITES = {
    "julia": suite_julia_default,
    "chainA": suite_chainA,
    "chainB": suite_chainB,
    "flow": suite_flow,
    "scale": suite_scale,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name]()
