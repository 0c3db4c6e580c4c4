"""Weight vectors f = sum_h a_h h on a cyclic Galois group of order d.

The map x -> sum_i a_i sigma^i(x) on K (with Gal(K/Q_p) = Z/d) has the
circulant matrix (a_{(j-i) mod d}) in a normal basis. Its determinant is
prod_j sum_i zeta_d^(ij) a_i; for prime d and nonnegative weights that vanishes
only when all a_i are equal, so the image is {0}, Q_p or K.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

import sympy

from normlift.errors import DNotPrimeError

logger = logging.getLogger(__name__)

_x = sympy.Symbol("x")


@dataclass(frozen=True)
class WeightVector:
    d: int
    a: tuple[int, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be at least 2, got {self.d}")
        if len(self.a) != self.d:
            raise ValueError(f"expected {self.d} weights, got {len(self.a)}")
        if any(w < 0 for w in self.a):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def of(cls, weights) -> "WeightVector":
        a = tuple(int(w) for w in weights)
        return cls(len(a), a)

    def rotated(self, s: int) -> "WeightVector":
        s %= self.d
        return WeightVector(self.d, self.a[s:] + self.a[:s])


class WeightClass(str, Enum):
    ZERO_MAP = "ZeroMap"
    TRACE_LINE = "TraceLine"
    BIJECTIVE = "Bijective"


def circulant_matrix(w: WeightVector) -> sympy.Matrix:
    d, a = w.d, w.a
    return sympy.Matrix(d, d, lambda i, j: a[(j - i) % d])


def eigenvalue_product(w: WeightVector) -> int:
    """prod_j sum_i zeta^(ij) a_i, computed in Z[x]/(Phi_d(x))."""
    d = w.d
    phi = sympy.Poly(sympy.cyclotomic_poly(d, _x), _x, domain="ZZ")
    acc = sympy.Poly(1, _x, domain="ZZ")
    for j in range(d):
        terms = [0] * d
        for i, ai in enumerate(w.a):
            terms[(i * j) % d] += ai
        lam = sympy.Poly(list(reversed(terms)), _x, domain="ZZ")
        acc = (acc * lam).rem(phi)
    if acc.degree() > 0:
        raise ArithmeticError(f"eigenvalue product {acc} is not a rational integer")
    return int(acc.coeff_monomial(1))


def circulant_det(w: WeightVector) -> int:
    """Determinant by fraction-free elimination, checked against the eigenvalue product."""
    det = int(circulant_matrix(w).det(method="bareiss"))
    check = eigenvalue_product(w)
    if det != check:
        raise ArithmeticError(f"circulant determinant {det} disagrees with eigenvalue product {check}")
    return det


def classify_weights(w: WeightVector) -> WeightClass:
    if not sympy.isprime(w.d):
        raise DNotPrimeError(f"d = {w.d} is not prime")
    if not any(w.a):
        result = WeightClass.ZERO_MAP
    elif len(set(w.a)) == 1:
        result = WeightClass.TRACE_LINE
    else:
        result = WeightClass.BIJECTIVE
    det = circulant_det(w)
    if (result is WeightClass.BIJECTIVE) != (det != 0):
        raise ArithmeticError(f"{w.a} classified {result.value} but det = {det}")
    return result


def search_singular_nonconstant(d: int, bound: int) -> WeightVector | None:
    """First vector in lexicographic order with entries in [0, bound], not all equal, and det 0."""
    if d < 2 or bound < 1:
        raise ValueError("need d >= 2 and bound >= 1")
    checked = 0
    for a in itertools.product(range(bound + 1), repeat=d):
        if len(set(a)) == 1:
            continue
        checked += 1
        w = WeightVector(d, a)
        if circulant_det(w) == 0:
            logger.debug("singular vector %s after %d candidates", a, checked)
            return w
    logger.debug("no singular nonconstant vector among %d candidates", checked)
    return None
