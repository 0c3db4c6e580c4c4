from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from normlift.errors import (
    FieldMismatchError,
    InexactDivisionError,
    NotAUnitError,
    NotEisensteinError,
    NotIrreducibleModPError,
    NotPrimeError,
)
from normlift.padic_core import AtLeast, exact_divide, field_make, teichmuller, val_int


# --- Field construction ---

def test_field_make_rejects_composite_p():
    with pytest.raises(NotPrimeError):
        field_make(4)


def test_field_make_rejects_reducible_unramified_polynomial():
    # x^2 + 2 = (x - 1)(x + 1) mod 3
    with pytest.raises(NotIrreducibleModPError):
        field_make(3, f=2, unram_poly=[2, 0, 1])


@pytest.mark.parametrize("eis", [[9, 0, 1], [3, 1, 1], [3, 0, 2]])
def test_field_make_rejects_non_eisenstein(eis):
    with pytest.raises(NotEisensteinError):
        field_make(3, e=2, eis_poly=eis)


def test_field_make_requires_eisenstein_polynomial_when_ramified():
    with pytest.raises(NotEisensteinError):
        field_make(3, e=2)


def test_storage_precision_covers_guard_digits(q3):
    assert q3.guard == 2 + 16 + 32
    assert q3.cap == q3.N + q3.guard
    assert q3.q == 3


def test_ramified_cap_counts_uniformizer_digits(ram3):
    assert ram3.cap == 2 * ram3.base_digits


# --- Arithmetic ---

def test_inverse_of_two_mod_81():
    fd = field_make(3, N=4, series_order=8)
    inv = fd.from_int(2).invert()
    assert inv.coords[0] % 81 == 41
    assert (inv * 2).equals(1)


def test_uniformizer_squares_to_three(ram3):
    pi = ram3.uniformizer()
    assert (pi * pi).equals(ram3.from_int(3))
    assert pi.valuation() == 1
    assert ram3.from_int(3).valuation() == 2
    assert ram3.from_int(3).val_p() == Fraction(1)


def test_unramified_generator_squares_to_minus_one(q9):
    u = q9.generator()
    assert (u * u).equals(-1)
    assert u.is_unit()
    assert u.residue() == (0, 1)


def test_divide_by_pi_in_unramified_field(q9):
    u = q9.generator()
    x = u * 3
    assert x.valuation() == 1
    assert x.divide_by_pi().equals(u)


def test_multiplication_uses_sharp_precision(q3):
    x = q3.from_int(3, prec=5)
    y = q3.from_int(9, prec=4)
    assert (x * y).prec == 5
    assert (x + y).prec == 4


def test_zero_at_precision_has_lower_bound_valuation(q3):
    z = q3.from_int(27, prec=3)
    assert z.is_zero()
    assert z.valuation() == AtLeast(3)


def test_equality_respects_precision(q3):
    assert q3.from_int(1, prec=2) == q3.from_int(10)
    assert q3.from_int(1, prec=3) != q3.from_int(10)


def test_exact_divide(q3):
    assert exact_divide(q3.from_int(18), q3.from_int(9)).equals(2)
    assert (q3.from_int(18) / q3.from_int(9)).prec == q3.cap - 2
    with pytest.raises(InexactDivisionError):
        exact_divide(q3.from_int(3), q3.from_int(9))


def test_invert_rejects_non_unit(q3):
    with pytest.raises(NotAUnitError):
        q3.from_int(6).invert()


def test_from_rational_needs_p_integral(q3):
    assert (q3.from_rational(Fraction(1, 2)) * 2).equals(1)
    with pytest.raises(InexactDivisionError):
        q3.from_rational(Fraction(1, 3))


def test_negative_power_inverts(q5):
    x = q5.from_int(7)
    assert (x ** -2 * 49).equals(1)


def test_divide_int_loses_digits(q3):
    x = q3.from_int(18)
    y = x.divide_int(9)
    assert y.equals(2)
    assert y.prec == q3.cap - 2


def test_teichmuller_is_root_of_unity_with_same_residue(q5):
    t = teichmuller(q5.from_int(2))
    assert (t ** 4).equals(1)
    assert t.residue() == (2,)
    assert teichmuller(q5.from_int(10)).is_zero()


def test_field_mismatch(q3, q5):
    with pytest.raises(FieldMismatchError):
        q3.one() + q5.one()


def test_val_int():
    assert val_int(0, 3) is None
    assert val_int(54, 3) == 3
    assert val_int(-7, 7) == 1


# --- Properties ---

units = st.integers(min_value=-10**6, max_value=10**6).filter(lambda n: n % 3 != 0)


@given(st.integers(min_value=-10**9, max_value=10**9), units)
def test_division_undoes_multiplication(q3, a, b):
    x, y = q3.from_int(a), q3.from_int(b)
    assert ((x * y) / y).equals(x)


@given(st.integers(min_value=1, max_value=10**9), st.integers(min_value=1, max_value=10**9))
def test_valuation_is_additive(q3, a, b):
    x, y = q3.from_int(a), q3.from_int(b)
    assert (x * y).valuation() == val_int(a, 3) + val_int(b, 3)


@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=2, max_size=2),
       st.lists(st.integers(min_value=-50, max_value=50), min_size=2, max_size=2))
def test_ramified_multiplication_commutes(ram3, a, b):
    x, y = ram3.element(a), ram3.element(b)
    assert (x * y).equals(y * x)


def _valuation_by_division(x):
    count = 0
    while not any(x.residue()):
        x = x.divide_by_pi()
        count += 1
    return count


pairs = st.lists(st.integers(min_value=-50, max_value=50), min_size=2, max_size=2).filter(any)


@given(pairs)
def test_ramified_valuation_counts_divisions(ram3, coords):
    x = ram3.element(coords)
    assert x.valuation() == _valuation_by_division(x)


@given(pairs)
def test_unramified_valuation_counts_divisions(q9, coords):
    x = q9.element(coords)
    assert x.valuation() == _valuation_by_division(x)
