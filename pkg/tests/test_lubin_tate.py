import pytest

from normlift.errors import FieldMismatchError, NotDistinguishedError
from normlift.lift_checker import Verdict, check_lift
from normlift.lubin_tate import (
    cyclotomic_lift,
    default_frobenius,
    endomorphism,
    frobenius_series,
    lt_unique_series,
    lubin_tate_lift,
)
from normlift.series import TruncSeries, binomial_series, compare, compose


def test_default_frobenius(q3):
    f = default_frobenius(q3, 8)
    assert f.uniformizer.equals(3)
    assert compare(f.series, TruncSeries.from_ints(q3, [0, 3, 0, 1], 8)).ok


def test_endomorphism_commutes_with_frobenius(q3):
    f = default_frobenius(q3, 16)
    two = endomorphism(f, 2)
    assert two.coeffs[1].equals(2)
    r = compare(compose(f.series, two), compose(two, f.series))
    assert r.ok
    assert r.at_least(q3.N)


def test_endomorphisms_compose_like_multiplication(q3):
    f = default_frobenius(q3, 16)
    r = compare(compose(endomorphism(f, 2), endomorphism(f, 5)), endomorphism(f, 10))
    assert r.ok
    assert r.at_least(q3.N)


def test_endomorphism_of_one_is_identity(q3):
    f = default_frobenius(q3, 12)
    assert compare(endomorphism(f, 1), TruncSeries.variable(q3, 12)).ok


def test_unique_series_between_two_frobenius_series(q3):
    f = default_frobenius(q3, 12)
    g = frobenius_series(binomial_series(3, q3, 12))
    F = lt_unique_series(f, g, 1)
    assert compare(compose(f.series, F), compose(F, g.series)).ok


def test_unramified_quadratic_endomorphism(q9):
    f = default_frobenius(q9, 12)
    u = q9.generator()
    Fu = endomorphism(f, u)
    assert compare(compose(f.series, Fu), compose(Fu, f.series)).ok
    # [u][u] = [-1]
    assert compare(compose(Fu, Fu), endomorphism(f, -1)).ok


@pytest.mark.parametrize("values", [[0, 9, 0, 1], [0, 3, 1, 0], [1, 3, 0, 1]])
def test_frobenius_series_validation(q3, values):
    with pytest.raises(NotDistinguishedError):
        frobenius_series(TruncSeries.from_ints(q3, values, 8))


def test_unique_series_rejects_other_field(q3, q5):
    with pytest.raises(FieldMismatchError):
        lt_unique_series(default_frobenius(q3, 8), default_frobenius(q5, 8), 1)


def test_lubin_tate_lift_is_accepted(q3):
    spec = lubin_tate_lift(q3, [2, 5, 10], M=16)
    assert spec.labels == ["2", "5", "10"]
    assert ("2", "5", "10") in spec.products
    report = check_lift(spec)
    assert report.verdict is Verdict.ACCEPT
    assert report.character("10").equals(10)


def test_cyclotomic_lift_is_accepted(q3):
    spec = cyclotomic_lift(q3, [4, 7, 28], M=16)
    assert set(spec.products) == {("4", "7", "28"), ("7", "4", "28")}
    report = check_lift(spec)
    assert report.verdict is Verdict.ACCEPT
    assert report.working_precision == q3.N


def test_cyclotomic_lift_needs_residue_degree_one(q9):
    with pytest.raises(NotDistinguishedError):
        cyclotomic_lift(q9, [2], M=12)
