from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itlog.diffpoly import (
    DiffPolynomial,
    MultiIndex,
    ZPolynomial,
    chain_A,
    chain_B,
    compare_antilex,
    degree_weight,
    evaluate,
    multi_indices,
    rank,
)
from itlog.errors import OrderDeficitError, RankUndefinedError
from itlog.series import PowerSeries, exp_series
from itlog.verify import chain_A_oracle, chain_B_oracle, chain_indices, example_germs

Y = DiffPolynomial.variable
X0, X1, X2, X3, X4 = (DiffPolynomial.variable(k) for k in range(5))


def P(text):
    return DiffPolynomial.parse(text)


def test_multiindex_basics():
    i = MultiIndex((2, 0, 1, 0, 0))
    assert i.entries == (2, 0, 1) and i.abs == 3 and i.weight == 2 and i.order == 2
    assert MultiIndex((0, 0)) == MultiIndex(()) == (0,)


def test_compare_antilex_examples():
    assert compare_antilex((1, 0, 1), (0, 3, 0)) == 1
    assert compare_antilex((5,), (0, 1)) == -1
    assert compare_antilex((2, 1), (2, 1)) == 0


indices = st.lists(st.integers(0, 4), max_size=5).map(tuple)


@settings(max_examples=200)
@given(indices, indices, indices, st.integers(0, 3))
def test_antilex_total_order(a, b, c, pad):
    ca, cb = compare_antilex(a, b), compare_antilex(b, a)
    assert ca == -cb
    assert (ca == 0) == (MultiIndex(a) == MultiIndex(b))
    if compare_antilex(a, b) <= 0 and compare_antilex(b, c) <= 0:
        assert compare_antilex(a, c) <= 0
    assert compare_antilex(a + (0,) * pad, b) == ca


def test_antilex_well_order_on_generated_set():
    ms = multi_indices(3, 4)
    assert ms == sorted(ms) and min(ms) == MultiIndex(())
    # every element has finitely many predecessors in the set and a least element exists
    assert all(sum(1 for x in ms if x < m) == k for k, m in enumerate(ms))


def test_rank_examples():
    assert rank(P("Y Y'' + (Y')^3")) == (1, 0, 1)
    assert rank(Y(0)) == (1,)
    assert rank(chain_A(2)[0, 2]) == (1, 0, 1)
    with pytest.raises(RankUndefinedError):
        rank(DiffPolynomial.zero())


def test_degree_weight_examples():
    p = P("Y Y'' + (Y')^2")
    assert degree_weight(p) == (2, 2) and p.is_homogeneous() and p.is_isobaric()
    q = Y(0) + Y(1)
    assert degree_weight(q) == (1, 1) and q.is_homogeneous() and not q.is_isobaric()
    assert degree_weight(chain_A(2)[1, 2]) == (2, 1)


def test_evaluate_examples():
    z = PowerSeries.variable(20)
    e = exp_series(z)
    assert evaluate(Y(1) - Y(0), e).is_zero()
    zp = DiffPolynomial({(0, 1): ZPolynomial([0, 1]), (1,): ZPolynomial([-2])})
    assert evaluate(zp, z * z).is_zero()
    tanh = PowerSeries([0, 1, 0, F(-1, 3), 0, F(2, 15), 0, F(-17, 315), 0, F(62, 2835)])
    res = evaluate(Y(1) - 1 + Y(0) ** 2, tanh)
    assert res.order >= 8 and not any(res.coeffs[:9])
    with pytest.raises(OrderDeficitError):
        evaluate(Y(3), PowerSeries([1, 2]))


def test_printing_and_parsing():
    a = chain_A(2)
    assert a[0, 2].format("X") == "-(X')^2 + X X''"
    assert str(P("3 Y^2 (Y')^3 Y'''")) == "3 Y^2 (Y')^3 Y'''"
    for j in range(5):
        for i in range(j + 1):
            p = chain_A(4)[i, j]
            assert DiffPolynomial.parse(p.format("X"), "X") == p
    zp = DiffPolynomial({(0, 1): ZPolynomial([-1, 1]), (1,): ZPolynomial([1])})
    assert DiffPolynomial.parse(zp.format()) == zp


def test_total_derivative():
    # (Y Y')' = (Y')^2 + Y Y''
    assert (Y(0) * Y(1)).derive() == Y(1) ** 2 + Y(0) * Y(2)
    zp = DiffPolynomial({(1,): ZPolynomial([0, 0, 1])})
    assert zp.derive() == DiffPolynomial({(1,): ZPolynomial([0, 2]), (0, 1): ZPolynomial([0, 0, 1])})


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(indices, st.integers(-5, 5)), max_size=4), st.lists(st.fractions(-3, 3, max_denominator=4), min_size=12, max_size=12))
def test_evaluate_commutes_with_derivation(terms, coeffs):
    p = DiffPolynomial([(i, c) for i, c in terms if c])
    y = PowerSeries(coeffs)
    if p.order + 1 > y.order - 1:
        return
    lhs = evaluate(p.derive(), y)
    rhs = evaluate(p, y).derive()
    n = min(lhs.order, rhs.order)
    assert lhs.truncate(n) == rhs.truncate(n)


# -- chain families --------------------------------------------------------------


def test_chain_A_small_rows():
    A = chain_A(2)
    assert A[0, 0] == DiffPolynomial.one()
    assert A[0, 1] == X1 and A[1, 1] == X0
    assert A[0, 2] == X0 * X2 - X1**2 and A[1, 2] == X0 * X1 and A[2, 2] == X0**2


def test_chain_A_rows_3_and_4_match_symbolic_differentiation():
    # obtained independently with sympy by differentiating phi(f) = f' phi
    A = chain_A(4)
    assert A[0, 3] == X0**2 * X3 - 4 * X0 * X1 * X2 + 3 * X1**3
    assert A[1, 3] == X0 * (2 * X0 * X2 - 3 * X1**2)
    assert not A[2, 3]
    assert A[0, 4] == X0**3 * X4 - 7 * X0**2 * X1 * X3 - 4 * X0**2 * X2**2 + 25 * X0 * X1**2 * X2 - 15 * X1**4
    assert A[1, 4] == X0 * (3 * X0**2 * X3 - 16 * X0 * X1 * X2 + 15 * X1**3)
    assert A[2, 4] == X0**2 * (2 * X0 * X2 - 3 * X1**2)
    assert A[3, 4] == -2 * X0**3 * X1


def test_chain_A_structure():
    A = chain_A(6)
    for j in range(7):
        assert A[j, j] == X0**j
        for i in range(j + 1):
            a = A[i, j]
            if a:
                assert a.is_homogeneous() and a.degree() == j
                assert a.is_isobaric() and a.weight() == j - i
        if j:
            assert rank(A[0, j]) == MultiIndex([j - 1] + [0] * (j - 1) + [1])


@pytest.mark.parametrize("name", ["z+z^2", "exp(z)-1"])
def test_chain_A_substitution_oracle(name):
    assert all(c.ok for c in chain_A_oracle(example_germs(40)[name], 5, 25))


def test_substitution_oracle_detects_a_wrong_table(monkeypatch):
    import itlog.verify as v

    good = chain_A(5)
    table = dict(good.table)
    table[(1, 3)] = table[(1, 3)] + X0**3 * X1
    bad = type(good)(5, table)
    monkeypatch.setattr(v, "chain_A", lambda j: bad)
    checks = v.chain_A_oracle(example_germs(40)["z+z^2"], 5, 25)
    assert [c.ok for c in checks] == [True, True, True, False, True, True]


def test_chain_B_examples():
    B = chain_B((0, 2))
    assert B == {MultiIndex((2,)): X1**2, MultiIndex((1, 1)): 2 * X0 * X1, MultiIndex((0, 2)): X0**2}
    assert chain_B((0, 1, 1))[MultiIndex((0, 1, 1))] == X0**3
    assert chain_B((3,)) == {MultiIndex((3,)): DiffPolynomial.one()}


def test_chain_B_structure():
    for j in chain_indices(5):
        B = chain_B(j)
        assert B[j] == X0**j.weight
        top = B[MultiIndex((j.abs,))]
        assert top.is_homogeneous() and top.is_isobaric()
        assert top.degree() == j.weight == top.weight()
        # B_(|j|),j is the product of the A_0k
        A = chain_A(j.order)
        prod = DiffPolynomial.one()
        for k, e in enumerate(j.entries):
            prod = prod * A[0, k] ** e
        assert top == prod


@pytest.mark.parametrize("name", ["z+z^2", "exp(z)-1"])
def test_chain_B_substitution_oracle(name):
    assert all(c.ok for c in chain_B_oracle(example_germs(40)[name], 5, 25))
