import cmath
import io
import math
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itlog.errors import DivergenceError, NoFixedPointError, NotRepellingError
from itlog.funceq import schroeder_solve
from itlog.poincare import (
    EvalReport,
    NamedMap,
    PoincareFunction,
    RationalMap,
    check_schroeder_numeric,
    find_repelling_fixed_point,
    poincare_derivative,
    poincare_eval,
    poincare_monomial,
    read_samples,
    write_reports,
)
from itlog.series import PowerSeries

TANH_MAP = RationalMap([0, 2], [1, 0, 1])
SQUARE = RationalMap([0, 0, 1])


@pytest.fixture(scope="module")
def tanh_fp():
    return find_repelling_fixed_point(TANH_MAP, 0.1)


@pytest.fixture(scope="module")
def exp_fp():
    return find_repelling_fixed_point(SQUARE, 1.3)


def test_fixed_points(tanh_fp, exp_fp):
    assert tanh_fp.xi == 0 and tanh_fp.lam == 2 and tanh_fp.period == 1
    assert exp_fp.xi == 1 and exp_fp.multiplier == 2
    with pytest.raises(NotRepellingError):
        find_repelling_fixed_point(NamedMap("sin"), 0.2)
    with pytest.raises(NotRepellingError):
        find_repelling_fixed_point(SQUARE, 0.01)  # attracting at 0
    with pytest.raises(NoFixedPointError):
        find_repelling_fixed_point(RationalMap([1, 1]), 0.0)  # z + 1
    with pytest.raises(ValueError):
        find_repelling_fixed_point(SQUARE, 1.0, period=0)


def test_period_two_cycle():
    # z^2 - 2 has the 2-cycle (-1 +- sqrt 5)/2 with multiplier 4 r1 r2 = -4
    f = RationalMap([-2, 0, 1])
    fp = find_repelling_fixed_point(f, -1.6, period=2)
    assert min(abs(fp.xi - (-1 + s * math.sqrt(5)) / 2) for s in (1, -1)) < 1e-12
    assert abs(fp.multiplier + 4) < 1e-9
    res = check_schroeder_numeric(f, fp, [0.01, 0.02j])
    assert res < 1e-9


def test_tanh(tanh_fp):
    for k in range(1, 11):
        x = k / 10
        r = poincare_eval(TANH_MAP, tanh_fp, x)
        assert isinstance(r, EvalReport) and r.converged and r.heuristic_error
        assert abs(r.value - math.tanh(x)) < 1e-9


def test_exponential(exp_fp):
    for k in range(20):
        z = 0.9 * cmath.exp(2j * math.pi * k / 20)
        assert abs(poincare_eval(SQUARE, exp_fp, z).value - cmath.exp(z)) < 1e-9


def test_schroeder_residual(tanh_fp, exp_fp):
    assert check_schroeder_numeric(TANH_MAP, tanh_fp, [0.1 * k for k in range(1, 11)]) < 1e-8
    assert check_schroeder_numeric(SQUARE, exp_fp, [0.3j, -0.4, 0.2 + 0.2j]) < 1e-8
    assert check_schroeder_numeric(SQUARE, exp_fp, []) == 0.0


def test_refinement_estimate_shrinks(tanh_fp):
    coarse = poincare_eval(TANH_MAP, tanh_fp, 0.5, tol=1e-4)
    fine = poincare_eval(TANH_MAP, tanh_fp, 0.5, tol=1e-12)
    assert fine.n_used > coarse.n_used and fine.error_estimate < coarse.error_estimate
    assert abs(fine.value - math.tanh(0.5)) <= abs(coarse.value - math.tanh(0.5)) + 1e-15


def test_taylor_coefficients_agree_with_exact_solution(tanh_fp):
    exact = schroeder_solve(PowerSeries([0, 2, 0, -2, 0, 2, 0, -2, 0])).phi
    for m in range(1, 6):
        d = poincare_derivative(TANH_MAP, tanh_fp, 0.0, m).value
        assert abs(d / factorial(m) - float(exact[m])) < 1e-6
    # and against a central difference of the values themselves
    h = 1e-4
    fd = (poincare_eval(TANH_MAP, tanh_fp, 0.3 + h).value - poincare_eval(TANH_MAP, tanh_fp, 0.3 - h).value) / (2 * h)
    assert abs(fd - poincare_derivative(TANH_MAP, tanh_fp, 0.3, 1).value) < 1e-6
    with pytest.raises(ValueError):
        poincare_derivative(TANH_MAP, tanh_fp, 0.3, 0)


def test_monomial_forms_stabilize(exp_fp, tanh_fp):
    z = 0.4 + 0.1j
    e = cmath.exp(z)
    # psi^2 psi' and (psi')^2 psi'' for psi = exp
    assert abs(poincare_monomial(SQUARE, exp_fp, z, (2, 1)).value - e**3) < 1e-8
    assert abs(poincare_monomial(SQUARE, exp_fp, z, (2, 1), of_derivative=True).value - e**3) < 1e-8
    x = 0.7
    sech2 = 1 / math.cosh(x) ** 2
    assert abs(poincare_monomial(TANH_MAP, tanh_fp, x, (0, 1)).value - sech2) < 1e-8
    assert abs(poincare_monomial(TANH_MAP, tanh_fp, x, (1,), of_derivative=True).value - sech2) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_exponential_property(a, b):
    fp = find_repelling_fixed_point(SQUARE, 1.2)
    z = complex(a, b)
    assert abs(poincare_eval(SQUARE, fp, z).value - cmath.exp(z)) < 1e-9 * max(1, abs(cmath.exp(z)))


def test_divergence_is_reported():
    # psi for z^2 at 1 is exp, which overflows long before z = 1000
    fp = find_repelling_fixed_point(SQUARE, 1.1)
    with pytest.raises(DivergenceError):
        poincare_eval(SQUARE, fp, 1000.0)
    with pytest.raises(ValueError):
        poincare_eval(SQUARE, fp, 0.1, tol=0)


def test_estimator():
    est = PoincareFunction(f="2*z/(1+z^2)", seed=0.1).fit()
    assert est.multiplier_ == pytest.approx(2)
    out = est.predict(np.array([[0.1, 0.2], [0.3, 0.4]]))
    assert out.shape == (2, 2)
    assert np.allclose(out, np.tanh([[0.1, 0.2], [0.3, 0.4]]), atol=1e-9)
    with pytest.raises(AttributeError):
        PoincareFunction(f=SQUARE).predict([0.1])
    with pytest.raises(TypeError):
        PoincareFunction(f=3).fit()
    assert PoincareFunction(f=NamedMap("zexp")).get_params()["tol"] == 1e-12


def test_csv_round_trip(exp_fp):
    text = "re,im\n# comment\n0.1,0.2\n\n-0.5\n"
    zs = read_samples(io.StringIO(text))
    assert zs == [0.1 + 0.2j, -0.5 + 0j]
    reps = [poincare_eval(SQUARE, exp_fp, z) for z in zs]
    sink = io.StringIO()
    out = write_reports(zs, reps, sink)
    assert sink.getvalue() == out
    lines = out.splitlines()
    assert lines[0] == "z_re,z_im,val_re,val_im,n_used,err"
    vals = [complex(float(r.split(",")[2]), float(r.split(",")[3])) for r in lines[1:]]
    assert all(abs(v - cmath.exp(z)) < 1e-9 for v, z in zip(vals, zs))
    with pytest.raises(ValueError):
        read_samples(io.StringIO("0.1,0.2\nbad,row\n"))


def test_eight_coefficients_from_values_on_a_circle(tanh_fp):
    # discrete Cauchy integral over 32 points of radius 1/2
    exact = schroeder_solve(PowerSeries([0, 2] + [(-1) ** (k // 2) * 2 * (k % 2) for k in range(2, 12)])).phi
    n, r = 32, 0.5
    vals = [poincare_eval(TANH_MAP, tanh_fp, r * cmath.exp(2j * math.pi * j / n)).value for j in range(n)]
    for k in range(1, 9):
        c = sum(v * cmath.exp(-2j * math.pi * j * k / n) for j, v in enumerate(vals)) / n / r**k
        assert abs(c - float(exact[k])) < 1e-6
