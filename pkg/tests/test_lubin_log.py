from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from normlift.errors import LinearCoefficientZeroError, NotDistinguishedError
from normlift.lubin_log import ScaledElem, eigen_check, logarithm
from normlift.padic_core import val_int
from normlift.series import TruncSeries, binomial_series


@pytest.fixture(scope="module")
def cyclotomic_log(q3):
    return logarithm(binomial_series(3, q3, 32))


def test_cyclotomic_logarithm_is_log_one_plus_t(q3, cyclotomic_log):
    A = cyclotomic_log
    assert A.M == 32
    assert A.pi1_valuation == 1
    for k in range(1, 32):
        v = val_int(k, 3)
        c = A.coeffs[k]
        assert c.shift == -v
        assert c.unit.equals(q3.from_rational(Fraction((-1) ** (k - 1) * 3 ** v, k)), q3.N)


def test_cyclotomic_logarithm_satisfies_functional_equation(q3, cyclotomic_log):
    r = cyclotomic_log.identity_residual
    assert r.ok
    assert r.at_least(6)
    assert cyclotomic_log.denominator_bound_ok()


def test_lubin_tate_logarithm(q3):
    A = logarithm(TruncSeries.from_ints(q3, [0, 3, 0, 1], 12))
    a3 = A.coeffs[3]
    assert a3.shift == -1
    assert a3.unit.equals(q3.from_rational(Fraction(-1, 8)))
    assert all(A.coeffs[k].is_zero() for k in range(2, 12, 2))
    assert not A.coeffs[5].is_zero()
    assert A.identity_residual.ok
    assert A.denominator_bound_ok()


def test_linear_frobenius_has_trivial_logarithm(q3):
    A = logarithm(TruncSeries.from_ints(q3, [0, 3], 8))
    assert all(c.is_zero() for c in A.coeffs[2:])
    assert A.coeffs[1].unit.equals(1)


def test_cleared_series_is_integral_multiple(q3):
    A = logarithm(TruncSeries.from_ints(q3, [0, 3, 0, 1], 6))
    C = A.cleared()
    # 3^5 * (-1/24) = -81/8
    assert C.coeffs[3].equals(q3.from_rational(Fraction(-81, 8)))
    assert C.coeffs[1].equals(3 ** 5)


@pytest.mark.parametrize("values, error", [
    ([0, 0, 3, 1], LinearCoefficientZeroError),
    ([0, 1, 0, 1], NotDistinguishedError),
    ([3, 3, 0, 1], NotDistinguishedError),
])
def test_logarithm_input_validation(q3, values, error):
    with pytest.raises(error):
        logarithm(TruncSeries.from_ints(q3, values, 8))


def test_scaled_elem_moves_valuation_into_shift(q3):
    s = ScaledElem.normalized(q3.from_int(18), -3)
    assert s.shift == -1
    assert s.unit.equals(2)
    assert s.scaled_to(1).equals(2)
    with pytest.raises(ValueError):
        s.scaled_to(0)


# --- Eigen checks ---

@pytest.fixture(scope="module")
def short_log(q3):
    return logarithm(binomial_series(3, q3, 16))


def test_endomorphism_scales_logarithm(q3, short_log):
    F4 = binomial_series(4, q3, 16)
    r = eigen_check(short_log, F4, 4)
    assert r.ok
    assert r.at_least(6)
    assert eigen_check(short_log, TruncSeries.variable(q3, 16), 1).ok


def test_perturbed_endomorphism_is_detected(q3, short_log):
    F = binomial_series(4, q3, 16) + TruncSeries.monomial(q3, 16, 2, 3)
    r = eigen_check(short_log, F, 4)
    assert not r.ok
    assert r.index == 2
    assert r.valuation == 1


# --- Properties ---

@given(st.integers(min_value=1, max_value=10**4).filter(lambda n: n % 3 != 0),
       st.lists(st.integers(min_value=-10**3, max_value=10**3), min_size=0, max_size=22))
def test_logarithm_of_random_frobenius(q3, unit, tail):
    P = TruncSeries.from_ints(q3, [0, 3 * unit] + tail, 24)
    A = logarithm(P)
    assert A.denominator_bound_ok()
    assert A.identity_residual.ok
