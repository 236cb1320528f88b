import random
from fractions import Fraction as F
from math import factorial

import pytest
from sklearn.base import clone

from itlog.diffpoly import DiffPolynomial, ZPolynomial, evaluate
from itlog.errors import OrderDeficitError
from itlog.expr import eval_expression, parse
from itlog.funceq import itlog
from itlog.guesser import (
    NOT_A_PROOF,
    ADEGuesser,
    SearchBounds,
    egf_ogf_transform,
    guess_ade,
    guess_linear_ode,
    nonvanishing_scan,
)
from itlog.series import ParabolicGerm, PowerSeries


def ev(text, n):
    return eval_expression(parse(text), n)


def poly(*c):
    return ZPolynomial(c)


def dp(terms):
    return DiffPolynomial({k: poly(*v) for k, v in terms.items()}, ring="polynomials")


TANH = "(exp(2*z) - 1)/(exp(2*z) + 1)"


def test_bounds_validation():
    with pytest.raises(ValueError):
        SearchBounds(margin=0)
    assert SearchBounds() == SearchBounds(2, 3, 4, 20)


def test_exp():
    out = guess_ade(ev("exp(z)", 30), SearchBounds(1, 1, 0, 20))
    assert out.found and out.candidate == dp({(0, 1): (1,), (1,): (-1,)})
    assert out.candidate.format() == "-Y + Y'"


def test_z_squared():
    out = guess_ade(ev("z^2", 30), SearchBounds(1, 1, 1, 20))
    assert out.candidate == dp({(0, 1): (0, 1), (1,): (-2,)})


def test_geometric_series_linear():
    out = guess_linear_ode(ev("1/(1-z)", 30), SearchBounds(1, 1, 1, 20))
    # (1 - z) Y' - Y up to the sign normalization
    assert out.candidate == dp({(0, 1): (-1, 1), (1,): (1,)})


def test_tanh():
    out = guess_ade(ev(TANH, 30), SearchBounds(1, 2, 0, 20))
    assert out.candidate == dp({(0, 1): (1,), (2,): (1,), (): (-1,)})


def test_factorial_ogf_needs_affine_column():
    y = PowerSeries([factorial(k) for k in range(41)])
    b = SearchBounds(1, 1, 2, 20)
    assert guess_linear_ode(y, b).verdict == "none_within_bounds"
    # a_{k+1} = (k+1) a_k gives z^2 Y' + (z - 1) Y + 1 = 0
    out = guess_linear_ode(y, b, affine=True)
    assert out.candidate == dp({(0, 1): (0, 0, 1), (1,): (-1, 1), (): (1,)})


def test_default_bounds_prefer_minimal_rank():
    # sin satisfies Y'' + Y = 0 and (Y')^2 + Y^2 - 1 = 0; the latter has lower rank
    out = guess_ade(ev("sin(z)", 125))
    assert out.candidate == dp({(0, 2): (1,), (2,): (1,), (): (-1,)})


def test_found_candidate_is_sound_and_normalized():
    y = ev("exp(z) + z^3", 60)
    out = guess_ade(y, SearchBounds(1, 1, 3, 20))
    assert out.found
    res = evaluate(out.candidate, y)
    assert not any(res.coeffs[: out.verified_to + 1])
    coeffs = [c for p in out.candidate.terms.values() for c in p.coeffs]
    assert all(c.denominator == 1 for c in coeffs)
    from math import gcd

    g = 0
    for c in coeffs:
        g = gcd(g, int(c))
    assert g == 1
    lead = out.candidate.terms[out.candidate.rank()]
    assert lead.coeffs[-1] > 0


def test_negative_control_has_caveat():
    phi = itlog(ParabolicGerm.from_series(ev("z + z^2", 60)), 60).phi
    out = guess_ade(phi, SearchBounds(1, 2, 2, 20))
    assert out.verdict == "none_within_bounds" and out.candidate is None
    assert "NOT a proof" in out.caveat and out.caveat == NOT_A_PROOF
    assert "NOT a proof" in out.report() and out.to_dict()["caveat"] == NOT_A_PROOF


def test_order_deficit_is_never_silently_absorbed():
    with pytest.raises(OrderDeficitError):
        guess_ade(ev("exp(z)", 119))  # 100 unknowns + margin 20
    with pytest.raises(OrderDeficitError):
        guess_linear_ode(ev("exp(z)", 10), SearchBounds(2, 1, 2, 5))


def test_monotonicity():
    y = ev("z*exp(z)", 80)
    small = guess_ade(y, SearchBounds(1, 1, 1, 10))
    assert small.found
    for b in (SearchBounds(1, 2, 1, 10), SearchBounds(2, 2, 2, 10), SearchBounds(1, 1, 3, 10)):
        assert guess_ade(y, b).found


@pytest.mark.parametrize("c", [F(3), F(-2, 7)])
def test_scaling_invariance(c):
    b = SearchBounds(1, 2, 0, 20)
    y = ev(TANH, 30)
    assert guess_ade(y * c, b).found == guess_ade(y, b).found
    phi = itlog(ParabolicGerm.from_series(ev("exp(z)-1", 50)), 50).phi
    b2 = SearchBounds(1, 2, 2, 15)
    assert guess_ade(phi * c, b2).found == guess_ade(phi, b2).found is False


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("margin", [10, 20])
def test_random_series_give_no_spurious_equation(seed, margin):
    rng = random.Random(seed)
    y = PowerSeries([F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(100 + margin + 1)])
    assert guess_ade(y, SearchBounds(margin=margin)).verdict == "none_within_bounds"


def test_egf_ogf_transform():
    phi = itlog(ParabolicGerm.from_series(ev("exp(z)-1", 7)), 7).phi
    ogf = egf_ogf_transform(phi, "to_ogf")
    assert list(ogf.coeffs[2:]) == [1, F(-1, 2), F(1, 2), F(-2, 3), F(11, 12), F(-3, 4)]
    assert egf_ogf_transform(ogf, "to_egf") == phi
    assert egf_ogf_transform(ev("z^2", 4)).coeffs == (0, 0, 2, 0, 0)
    with pytest.raises(ValueError):
        egf_ogf_transform(phi, "sideways")


def test_nonvanishing_scan():
    assert nonvanishing_scan(ev("z/(1-z)", 50), 50) == list(range(3, 51))
    assert nonvanishing_scan(ev("z+z^2", 10), 10) == []
    # sin is odd, so its itlog is odd: the even coefficients vanish
    zeros = nonvanishing_scan(ev("sin(z)", 20), 20)
    phi = itlog(ParabolicGerm.from_series(ev("sin(z)", 20)), 20).phi
    assert zeros == [k for k in range(4, 21) if phi[k] == 0] == list(range(4, 21, 2))


def test_estimator_wrapper():
    est = ADEGuesser(max_order=1, max_total_degree=1, max_z_degree=0)
    assert est.get_params()["max_order"] == 1
    est.fit(ev("exp(z)", 30))
    assert est.verdict_ == "found" and est.verified_to_ == 29
    assert est.candidate_.format() == "-Y + Y'"
    assert est.annihilates(ev("3*exp(z)", 40))
    ode = clone(est).set_params(mode="ode", max_z_degree=1).fit([1] * 31)
    assert ode.candidate_.format() == "Y + (z - 1) Y'"
    with pytest.raises(ValueError):
        ADEGuesser(mode="nope").fit(ev("z", 30))
