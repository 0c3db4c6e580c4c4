import itertools

import pytest

from normlift.errors import DNotPrimeError
from normlift.weights import (
    WeightClass,
    WeightVector,
    circulant_det,
    circulant_matrix,
    classify_weights,
    eigenvalue_product,
    search_singular_nonconstant,
)


@pytest.mark.parametrize("weights, det", [
    ((1, 0, 0), 1),
    ((1, 1, 1), 0),
    ((1, 2, 0), 9),
    ((2, 1), 3),
    ((0, 0, 1, 1), 0),
    ((1, 0, 1, 0), 0),
    ((1, 0, 0, 0, 0), 1),
])
def test_circulant_determinant(weights, det):
    w = WeightVector.of(weights)
    assert circulant_det(w) == det
    assert eigenvalue_product(w) == det


def test_circulant_matrix_layout():
    m = circulant_matrix(WeightVector.of([1, 2, 3]))
    assert m.tolist() == [[1, 2, 3], [3, 1, 2], [2, 3, 1]]


@pytest.mark.parametrize("weights, expected", [
    ((0, 0, 0), WeightClass.ZERO_MAP),
    ((2, 2, 2), WeightClass.TRACE_LINE),
    ((1, 0, 0), WeightClass.BIJECTIVE),
    ((0, 5), WeightClass.BIJECTIVE),
    ((1, 1, 1, 1, 1), WeightClass.TRACE_LINE),
    ((1, 0, 2, 0, 0), WeightClass.BIJECTIVE),
])
def test_classify_weights(weights, expected):
    assert classify_weights(WeightVector.of(weights)) is expected


def test_classify_needs_prime_order():
    with pytest.raises(DNotPrimeError):
        classify_weights(WeightVector.of([1, 0, 0, 0]))


@pytest.mark.parametrize("d", [2, 3])
def test_classification_exhaustive(d):
    for a in itertools.product(range(5), repeat=d):
        w = WeightVector(d, a)
        singular = circulant_det(w) == 0
        assert singular == (len(set(a)) == 1)
        assert (classify_weights(w) is WeightClass.BIJECTIVE) != singular


@pytest.mark.slow
def test_classification_exhaustive_order_five():
    for a in itertools.product(range(5), repeat=5):
        w = WeightVector(5, a)
        assert (circulant_det(w) == 0) == (len(set(a)) == 1)


@pytest.mark.parametrize("weights", [(2, 1), (1, 2, 0), (3, 0, 1, 1), (1, 2, 0, 4, 0)])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_rotation_changes_sign_only(weights, s):
    w = WeightVector.of(weights)
    d = w.d
    assert circulant_det(w.rotated(s)) == (-1) ** ((d - 1) * s) * circulant_det(w)


def test_search_finds_first_singular_vector():
    w = search_singular_nonconstant(4, 1)
    assert w.a == (0, 0, 1, 1)
    assert circulant_det(WeightVector.of([0, 1, 0, 1])) == 0


@pytest.mark.parametrize("d, bound", [(3, 3), (2, 5)])
def test_search_finds_nothing_for_prime_order(d, bound):
    assert search_singular_nonconstant(d, bound) is None


def test_search_arguments():
    with pytest.raises(ValueError):
        search_singular_nonconstant(1, 3)
    with pytest.raises(ValueError):
        search_singular_nonconstant(3, 0)


@pytest.mark.parametrize("d, a", [(1, (1,)), (3, (1, 2)), (2, (1, -1))])
def test_weight_vector_validation(d, a):
    with pytest.raises(ValueError):
        WeightVector(d, a)
