from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from normlift.errors import ConstantTermNotSmallError, NotAUnitError, NotInvertibleError, ShiftNotSmallError
from normlift.padic_core import AtLeast
from normlift.series import (
    TruncSeries,
    binomial_series,
    comp_inverse,
    compare,
    compose,
    derivative,
    evaluate,
    mul_inverse,
    power,
    reduce_mod_p,
    taylor_shift,
)


def series(fd, values, M=None):
    return TruncSeries.from_ints(fd, values, M)


def assert_same(a, b):
    r = compare(a, b)
    assert r.ok, f"differ at T^{r.index} (valuation {r.valuation})"


def test_product(q3):
    assert_same(series(q3, [1, 1], 6) * series(q3, [1, -1], 6), series(q3, [1, 0, -1], 6))


def test_mul_inverse_of_one_minus_t(q3):
    inv = mul_inverse(series(q3, [1, -1], 8))
    assert inv.shift == 0
    assert_same(inv, series(q3, [1] * 8))


def test_mul_inverse_moves_shift(q3):
    inv = mul_inverse(series(q3, [0, 1, 1], 8))
    assert inv.shift == -1
    assert inv.coefficient(-1).equals(1)
    assert inv.coefficient(0).equals(-1)
    assert inv.coefficient(1).equals(1)


def test_mul_inverse_needs_unit_leading_coefficient(q3):
    with pytest.raises(NotAUnitError):
        mul_inverse(series(q3, [0, 3, 1], 8))


def test_negative_power(q3):
    f = series(q3, [1, 1], 10)
    assert_same(power(f, -1) * f, TruncSeries.one(q3, 10))
    assert_same(power(f, 3), series(q3, [1, 3, 3, 1], 10))


def test_compose_polynomials(q3):
    f = series(q3, [1, 1, 1], 6)
    g = series(q3, [0, 1, 1], 6)
    assert_same(compose(f, g), series(q3, [1, 1, 2, 2, 1], 6))


def test_compose_rejects_unit_constant(q3):
    with pytest.raises(ConstantTermNotSmallError):
        compose(series(q3, [0, 1], 4), series(q3, [1, 1], 4))


def test_compose_with_small_constant_caps_precision(q3):
    M = 10
    f = series(q3, [1] * M)
    g = series(q3, [3, 1], M)
    h = compose(f, g)
    # the unknown tail of f reaches coefficient j with valuation (M - j)
    assert h.coeffs[0].prec == M
    assert h.coeffs[4].prec == M - 4
    assert h.coeffs[0].equals(sum(3 ** k for k in range(M)))


def test_taylor_shift(q3):
    f = series(q3, [0, 0, 1], 6)
    assert_same(taylor_shift(f, q3.from_int(3)), series(q3, [9, 6, 1], 6))
    with pytest.raises(ShiftNotSmallError):
        taylor_shift(f, q3.one())


def test_evaluate(q3):
    f = series(q3, [1, 1, 1])
    y = evaluate(f, q3.from_int(3))
    assert y.prec == 3
    assert y.equals(13)


def test_derivative(q3):
    d = derivative(series(q3, [0, 0, 0, 1], 6))
    assert_same(d, series(q3, [0, 0, 3], 5))


def test_derivative_of_laurent_series(q3):
    f = TruncSeries.from_ints(q3, [1, 1], 4, shift=-1)
    d = derivative(f)
    assert d.shift == -2
    assert d.coefficient(-2).equals(-1)


def test_laurent_addition_aligns_shifts(q3):
    a = TruncSeries.from_ints(q3, [1, 2], 4, shift=-1)
    b = series(q3, [5, 5], 4)
    s = a + b
    assert s.shift == -1
    assert s.coefficient(0).equals(7)


def test_comp_inverse(q3):
    f = series(q3, [0, 1, 3, 1], 12)
    g = comp_inverse(f)
    t = TruncSeries.variable(q3, 12)
    assert_same(compose(f, g), t)
    assert_same(compose(g, f), t)


def test_comp_inverse_needs_unit_linear_term(q3):
    with pytest.raises(NotInvertibleError):
        comp_inverse(series(q3, [0, 3, 1], 8))


def test_binomial_series_integer_exponent(q3):
    assert_same(binomial_series(4, q3, 8), series(q3, [0, 4, 6, 4, 1], 8))


def test_binomial_series_square_root(q3):
    b = binomial_series(Fraction(1, 2), q3, 12)
    assert b.coeffs[1].equals(q3.from_rational(Fraction(1, 2)))
    assert b.coeffs[2].equals(q3.from_rational(Fraction(-1, 8)))
    one = TruncSeries.one(q3, 12)
    assert_same(power(b + one, 2) - one, TruncSeries.variable(q3, 12))


def test_reduction_of_cyclotomic_frobenius(q3):
    P = binomial_series(3, q3, 8)
    assert reduce_mod_p(P).is_monomial(3)
    assert not reduce_mod_p(binomial_series(4, q3, 8)).is_monomial(3)


def test_compare_reports_first_failing_coefficient(q3):
    r = compare(series(q3, [1, 1, 1], 4), series(q3, [1, 1, 4], 4))
    assert not r.ok
    assert r.index == 2
    assert r.valuation == 1


def test_compare_of_equal_series_is_bounded_by_precision(q3):
    r = compare(series(q3, [1, 2], 4), series(q3, [1, 2], 4))
    assert r.ok
    assert r.valuation == AtLeast(q3.N)
    assert r.at_least(q3.N)


# --- Properties ---

coefficients = st.lists(st.integers(min_value=-10**4, max_value=10**4), min_size=1, max_size=8)


@given(coefficients, coefficients, coefficients)
def test_multiplication_is_associative(q3, a, b, c):
    f, g, h = series(q3, a, 8), series(q3, b, 8), series(q3, c, 8)
    assert_same((f * g) * h, f * (g * h))


@given(st.lists(st.integers(min_value=-10**4, max_value=10**4), min_size=3, max_size=9),
       st.integers(min_value=-10**4, max_value=10**4).filter(lambda n: n % 3 != 0))
def test_comp_inverse_round_trip(q3, tail, lead):
    f = series(q3, [0, lead] + tail, 10)
    g = comp_inverse(f)
    assert_same(compose(f, g), TruncSeries.variable(q3, 10))


@given(coefficients, coefficients)
def test_composition_with_polynomial_matches_evaluation(q3, a, b):
    # f(g)(3) = f(g(3)) when g(0) = 0
    f = series(q3, a, 8)
    g = series(q3, [0] + b, 8)
    x = q3.from_int(3)
    assert evaluate(compose(f, g), x).equals(evaluate(f, evaluate(g, x)), 6)


@given(coefficients, coefficients, coefficients)
def test_composition_is_associative(q3, a, b, c):
    f = series(q3, a, 8)
    g, h = series(q3, [0] + b, 8), series(q3, [0] + c, 8)
    assert_same(compose(compose(f, g), h), compose(f, compose(g, h)))


@given(st.lists(st.integers(min_value=-10**4, max_value=10**4), min_size=3, max_size=9),
       st.integers(min_value=-10**4, max_value=10**4).filter(lambda n: n % 3 != 0))
def test_comp_inverse_is_an_involution(q3, tail, lead):
    f = series(q3, [0, lead] + tail, 10)
    assert_same(comp_inverse(comp_inverse(f)), f)


@given(coefficients, coefficients)
def test_product_rule(q3, a, b):
    f, g = series(q3, a, 8), series(q3, b, 8)
    assert_same(derivative(f * g), derivative(f) * g + f * derivative(g))


@given(coefficients, st.integers(min_value=-30, max_value=30))
def test_taylor_shift_round_trip(q3, a, m):
    f = series(q3, a, 8)
    shift = q3.from_int(3 * m)
    assert_same(taylor_shift(taylor_shift(f, shift), -shift), f)


exponents = st.builds(Fraction, st.integers(min_value=-30, max_value=30), st.sampled_from([1, 2, 4, 5]))


@given(exponents, exponents)
def test_binomial_series_adds_exponents(q3, c1, c2):
    # (1+T)^(c1+c2) = (1+T)^c1 (1+T)^c2
    B1, B2 = binomial_series(c1, q3, 8), binomial_series(c2, q3, 8)
    assert_same(binomial_series(c1 + c2, q3, 8), B1 + B2 + B1 * B2)


@given(exponents, exponents)
def test_binomial_series_composes_by_multiplying_exponents(q3, c1, c2):
    B1, B2 = binomial_series(c1, q3, 8), binomial_series(c2, q3, 8)
    assert_same(compose(B1, B2), binomial_series(c1 * c2, q3, 8))


@given(coefficients, coefficients)
def test_reduction_commutes_with_composition(q3, a, b):
    f, g = series(q3, a, 8), series(q3, [0] + b, 8)

    def lifted_residue(s):
        return series(q3, [c[0] for c in reduce_mod_p(s).coeffs], 8)

    reduced = reduce_mod_p(compose(f, g))
    assert reduced.coeffs == reduce_mod_p(compose(lifted_residue(f), lifted_residue(g))).coeffs
