"""Exact arithmetic in the ring of integers O_E of a two-step tower E / E0 / Q_p.

O_E0 = Z_p[u]/(m(u)) is unramified of degree f, and O_E = O_E0[pi]/(E(pi)) is
totally ramified of degree e with E Eisenstein. An element is stored as f*e
integer coordinates c[i*f + j] on the basis u^j pi^i, each reduced modulo
p^K, where K = ceil(N/e) + G. Since p^K and varpi^(e*K) generate the same
ideal, the storage is exact modulo varpi^(e*K) and every element also carries
the number of varpi-adic digits it guarantees.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import sympy

from normlift.errors import (
    FieldMismatchError,
    InexactDivisionError,
    NotAUnitError,
    NotEisensteinError,
    NotIrreducibleModPError,
    NotPrimeError,
    PrecisionExhaustedError,
)

logger = logging.getLogger(__name__)

DEFAULT_SERIES_ORDER = 64

Coords = tuple[int, ...]


def val_int(n: int, p: int) -> int | None:
    """p-adic valuation of an integer; None for 0."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class AtLeast:
    """A valuation known only to be at least `bound`."""
    bound: Union[int, Fraction]

    def __str__(self) -> str:
        return f">={self.bound}"


def floor_of(v: Union[int, Fraction, AtLeast]) -> Union[int, Fraction]:
    """Lower bound carried by an exact valuation or an AtLeast."""
    return v.bound if isinstance(v, AtLeast) else v


@dataclass(frozen=True)
class PadicFieldDesc:
    """Validated description of O_E; build it with `field_make`."""
    p: int
    f: int
    e: int
    unram_poly: tuple[int, ...]
    eis_poly: tuple[Coords, ...]
    N: int
    series_order: int = DEFAULT_SERIES_ORDER
    guard: int = 0

    # --- Derived sizes ---

    @cached_property
    def q(self) -> int:
        return self.p ** self.f

    @cached_property
    def base_digits(self) -> int:
        return -(-self.N // self.e) + self.guard

    @cached_property
    def modulus(self) -> int:
        return self.p ** self.base_digits

    @cached_property
    def cap(self) -> int:
        """Largest precision an element can carry (the storage precision)."""
        return self.e * self.base_digits

    @cached_property
    def degree(self) -> int:
        return self.f * self.e

    @cached_property
    def zero_coords(self) -> Coords:
        return (0,) * self.degree

    @cached_property
    def one_coords(self) -> Coords:
        return (1,) + (0,) * (self.degree - 1)

    @cached_property
    def _simple(self) -> bool:
        return self.f == 1 and self.e == 1

    def __str__(self) -> str:
        return f"O_E(p={self.p}, f={self.f}, e={self.e}, N={self.N})"

    # --- Coordinate kernels ---
    # These work on raw coordinate tuples and never look at precision.

    def add(self, a: Coords, b: Coords) -> Coords:
        mod = self.modulus
        if self._simple:
            return ((a[0] + b[0]) % mod,)
        return tuple((x + y) % mod for x, y in zip(a, b))

    def sub(self, a: Coords, b: Coords) -> Coords:
        mod = self.modulus
        if self._simple:
            return ((a[0] - b[0]) % mod,)
        return tuple((x - y) % mod for x, y in zip(a, b))

    def neg(self, a: Coords) -> Coords:
        mod = self.modulus
        return tuple(-x % mod for x in a)

    def scale(self, a: Coords, n: int) -> Coords:
        mod = self.modulus
        return tuple(x * n % mod for x in a)

    def _unram_mul(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        """Product in Z[u]/(m(u)), not reduced modulo p^K."""
        f = self.f
        if f == 1:
            return [x[0] * y[0]]
        conv = [0] * (2 * f - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    conv[i + j] += xi * yj
        m = self.unram_poly
        for d in range(2 * f - 2, f - 1, -1):
            c = conv[d]
            if c:
                conv[d] = 0
                for k in range(f):
                    conv[d - f + k] -= c * m[k]
        return conv[:f]

    def mul(self, a: Coords, b: Coords) -> Coords:
        mod = self.modulus
        if self._simple:
            return (a[0] * b[0] % mod,)
        f, e = self.f, self.e
        rows_a = [a[i * f:(i + 1) * f] for i in range(e)]
        rows_b = [b[i * f:(i + 1) * f] for i in range(e)]
        conv = [[0] * f for _ in range(2 * e - 1)]
        for i, x in enumerate(rows_a):
            if not any(x):
                continue
            for j, y in enumerate(rows_b):
                if not any(y):
                    continue
                row = conv[i + j]
                for k, z in enumerate(self._unram_mul(x, y)):
                    row[k] += z
        # pi^e = -(E_0 + E_1 pi + ... + E_{e-1} pi^{e-1})
        for d in range(2 * e - 2, e - 1, -1):
            c = conv[d]
            if not any(c):
                continue
            conv[d] = [0] * f
            for k in range(e):
                row = conv[d - e + k]
                for idx, z in enumerate(self._unram_mul(c, self.eis_poly[k])):
                    row[idx] -= z
        return tuple(v % mod for row in conv[:e] for v in row)

    def pow(self, a: Coords, n: int) -> Coords:
        result = self.one_coords
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def val(self, a: Coords) -> int | None:
        """varpi-adic valuation of the stored representative; None if it is 0."""
        p, f, e = self.p, self.f, self.e
        best = None
        for idx, c in enumerate(a):
            if c == 0:
                continue
            v = e * val_int(c, p) + idx // f
            if best is None or v < best:
                best = v
        return best

    def inverse(self, a: Coords) -> Coords:
        """Inverse of a unit representative, exact modulo p^K."""
        one = self.one_coords
        # x^(q-1) = 1 in the residue field
        y = self.pow(a, self.q - 2)
        for _ in range(self.cap.bit_length() + 2):
            r = self.sub(self.mul(a, y), one)
            if not any(r):
                return y
            y = self.sub(y, self.mul(y, r))
        raise PrecisionExhaustedError("Newton inversion did not converge")

    def divide_by_pi(self, a: Coords) -> Coords:
        """a / pi for a representative of valuation >= 1."""
        f, p = self.f, self.p
        head = tuple(c // p for c in a[:f]) + (0,) * (self.degree - f)
        shifted = a[f:] + (0,) * f
        return self.add(self.mul(head, self.p_over_pi), shifted)

    @cached_property
    def p_over_pi(self) -> Coords:
        # pi * (pi^{e-1} + E_{e-1} pi^{e-2} + ... + E_1) = -E_0 = -p * eps0
        f, e, p = self.f, self.e, self.p
        rows: list[int] = []
        for i in range(e):
            rows.extend(self.eis_poly[i + 1] if i + 1 < e else (1,) + (0,) * (f - 1))
        eps0 = tuple(c // p for c in self.eis_poly[0]) + (0,) * (self.degree - f)
        eps0 = tuple(c % self.modulus for c in eps0)
        cofactor = tuple(c % self.modulus for c in rows)
        return self.neg(self.mul(cofactor, self.inverse(eps0)))

    # --- Element constructors ---

    def element(self, coords: Sequence[int], prec: int | None = None) -> "PadicElem":
        if len(coords) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(coords)}")
        mod = self.modulus
        return PadicElem(self, tuple(int(c) % mod for c in coords), self._clamp(prec))

    def from_int(self, n: int, prec: int | None = None) -> "PadicElem":
        return PadicElem(self, (n % self.modulus,) + (0,) * (self.degree - 1), self._clamp(prec))

    def from_rational(self, x: Fraction | int, prec: int | None = None) -> "PadicElem":
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise InexactDivisionError(f"{x} is not {self.p}-integral")
        n = x.numerator * pow(x.denominator, -1, self.modulus)
        return self.from_int(n, prec)

    def zero(self, prec: int | None = None) -> "PadicElem":
        return self.from_int(0, prec)

    def one(self) -> "PadicElem":
        return self.from_int(1)

    def uniformizer(self) -> "PadicElem":
        """pi when e > 1, and the root -E_0 of the linear Eisenstein polynomial otherwise."""
        if self.e == 1:
            return self.element(self.neg(self.eis_poly[0]))
        coords = [0] * self.degree
        coords[self.f] = 1
        return self.element(coords)

    def generator(self) -> "PadicElem":
        """u, the generator of the unramified step."""
        if self.f == 1:
            raise ValueError("an f=1 field has no unramified generator")
        coords = [0] * self.degree
        coords[1] = 1
        return self.element(coords)

    def _clamp(self, prec: int | None) -> int:
        return self.cap if prec is None else max(0, min(prec, self.cap))


def default_guard(p: int, e: int, series_order: int) -> int:
    return 2 + math.ceil(series_order / (p - 1)) + math.ceil(series_order / e)


def _as_base_coeff(value: int | Sequence[int], f: int) -> Coords:
    if isinstance(value, int):
        return (value,) + (0,) * (f - 1)
    coeff = tuple(int(c) for c in value)
    if len(coeff) > f:
        raise NotEisensteinError(f"coefficient {value!r} has more than f={f} entries")
    return coeff + (0,) * (f - len(coeff))


def field_make(
    p: int,
    f: int = 1,
    e: int = 1,
    unram_poly: Sequence[int] | None = None,
    eis_poly: Sequence[int | Sequence[int]] | None = None,
    N: int = 8,
    *,
    series_order: int = DEFAULT_SERIES_ORDER,
    guard: int | None = None,
) -> PadicFieldDesc:
    """Validate a two-step tower and return its descriptor.

    Polynomials are coefficient lists, constant term first. Coefficients of
    `eis_poly` are elements of O_E0, given as ints or as lists of f
    u-coordinates. `unram_poly` is ignored when f == 1, and `eis_poly`
    defaults to pi - p when e == 1.
    """
    if not sympy.isprime(p):
        raise NotPrimeError(f"{p} is not prime")
    if f < 1 or e < 1:
        raise ValueError("f and e must be at least 1")
    if N < 1:
        raise ValueError("N must be at least 1")

    if f == 1:
        unram: tuple[int, ...] = (0, 1)
    else:
        if unram_poly is None or len(unram_poly) != f + 1 or unram_poly[-1] != 1:
            raise NotIrreducibleModPError(f"unram_poly must be monic of degree {f}")
        unram = tuple(int(c) for c in unram_poly)
        x = sympy.Symbol("x")
        if not sympy.Poly(list(reversed(unram)), x, modulus=p).is_irreducible:
            raise NotIrreducibleModPError(f"{list(unram)} is reducible modulo {p}")

    if eis_poly is None:
        if e != 1:
            raise NotEisensteinError("eis_poly is required when e > 1")
        eis_poly = [-p, 1]
    if len(eis_poly) != e + 1:
        raise NotEisensteinError(f"eis_poly must have degree e={e}")
    eis = tuple(_as_base_coeff(c, f) for c in eis_poly)
    if eis[-1] != (1,) + (0,) * (f - 1):
        raise NotEisensteinError("eis_poly must be monic")
    if any(c % p for coeff in eis[:-1] for c in coeff):
        raise NotEisensteinError("non-leading coefficients must be divisible by p")
    if all(c % (p * p) == 0 for c in eis[0]):
        raise NotEisensteinError("constant term must have valuation exactly 1")

    if guard is None:
        guard = default_guard(p, e, series_order)
    fd = PadicFieldDesc(p, f, e, unram, eis, N, series_order, guard)
    logger.debug("field %s: base modulus p^%d, cap %d", fd, fd.base_digits, fd.cap)
    return fd


@dataclass(frozen=True, eq=False)
class PadicElem:
    """An element of O_E known modulo varpi^prec."""
    field: PadicFieldDesc
    coords: Coords
    prec: int

    __hash__ = None  # type: ignore[assignment]

    # --- Valuation ---

    def raw_val(self) -> int | None:
        return self.field.val(self.coords)

    def valuation(self) -> Union[int, AtLeast]:
        v = self.raw_val()
        if v is None or v >= self.prec:
            return AtLeast(self.prec)
        return v

    @property
    def val(self) -> int:
        """Valuation capped at the precision."""
        v = self.raw_val()
        return self.prec if v is None else min(v, self.prec)

    def val_p(self) -> Union[Fraction, AtLeast]:
        v = self.valuation()
        if isinstance(v, AtLeast):
            return AtLeast(Fraction(v.bound, self.field.e))
        return Fraction(v, self.field.e)

    @property
    def certified(self) -> int:
        return min(self.prec, self.field.N)

    def is_zero(self) -> bool:
        return self.val >= self.prec

    def is_unit(self) -> bool:
        return self.prec > 0 and self.val == 0

    def residue(self) -> Coords:
        """Image in the residue field k_E, as f coordinates modulo p."""
        p, f = self.field.p, self.field.f
        if self.prec == 0:
            raise PrecisionExhaustedError("residue of an element with no known digits")
        return tuple(c % p for c in self.coords[:f])

    def with_prec(self, prec: int) -> "PadicElem":
        return PadicElem(self.field, self.coords, max(0, min(prec, self.prec)))

    def to_int(self) -> int:
        """The integer representative, for elements of Z_p embedded in O_E."""
        if any(self.coords[1:]):
            raise ValueError("element does not lie in Z_p")
        return self.coords[0]

    # --- Arithmetic ---

    def _coerce(self, other: object) -> "PadicElem":
        if isinstance(other, PadicElem):
            if other.field != self.field:
                raise FieldMismatchError(f"{other.field} vs {self.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "PadicElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PadicElem(self.field, self.field.add(self.coords, o.coords), min(self.prec, o.prec))

    __radd__ = __add__

    def __sub__(self, other: object) -> "PadicElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PadicElem(self.field, self.field.sub(self.coords, o.coords), min(self.prec, o.prec))

    def __rsub__(self, other: object) -> "PadicElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self) -> "PadicElem":
        return PadicElem(self.field, self.field.neg(self.coords), self.prec)

    def __mul__(self, other: object) -> "PadicElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        prec = min(self.prec + o.val, o.prec + self.val, self.field.cap)
        return PadicElem(self.field, self.field.mul(self.coords, o.coords), prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PadicElem":
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return self.field.one()
        prec = min(self.prec + (n - 1) * self.val, self.field.cap)
        return PadicElem(self.field, self.field.pow(self.coords, n), prec)

    def __truediv__(self, other: object) -> "PadicElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return exact_divide(self, o)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).is_zero()

    def equals(self, other: "PadicElem | int", prec: int | None = None) -> bool:
        """val(x - y) >= min(prec_x, prec_y), optionally lowered to `prec`."""
        d = self - other
        if prec is not None:
            d = d.with_prec(prec)
        return d.is_zero()

    def invert(self) -> "PadicElem":
        if not self.is_unit():
            raise NotAUnitError(f"valuation {self.valuation()} is not 0")
        return PadicElem(self.field, self.field.inverse(self.coords), self.prec)

    def divide_by_pi(self, k: int = 1) -> "PadicElem":
        if k < 0:
            raise ValueError("k must be nonnegative")
        if self.prec < k:
            raise PrecisionExhaustedError(f"cannot divide by pi^{k} at precision {self.prec}")
        if self.val < k:
            raise InexactDivisionError(f"valuation {self.val} < {k}")
        coords = self.coords
        for _ in range(k):
            coords = self.field.divide_by_pi(coords)
        return PadicElem(self.field, coords, self.prec - k)

    def divide_by_p(self, v: int = 1) -> "PadicElem":
        """Coordinatewise division by p^v; needs valuation >= e*v."""
        e = self.field.e
        if self.prec < e * v:
            raise PrecisionExhaustedError(f"cannot divide by p^{v} at precision {self.prec}")
        if self.val < e * v:
            raise InexactDivisionError(f"valuation {self.val} < {e * v}")
        pv = self.field.p ** v
        return PadicElem(self.field, tuple(c // pv for c in self.coords), self.prec - e * v)

    def divide_int(self, n: int) -> "PadicElem":
        """Exact division by a nonzero integer."""
        v = val_int(n, self.field.p)
        unit = n // self.field.p ** v
        inv = self.field.from_int(pow(unit, -1, self.field.modulus))
        return (self * inv).divide_by_p(v) if v else self * inv

    def __repr__(self) -> str:
        if self.field.degree == 1:
            return f"PadicElem({self.coords[0]}, prec={self.prec})"
        return f"PadicElem({list(self.coords)}, prec={self.prec})"


def exact_divide(x: PadicElem, y: PadicElem) -> PadicElem:
    """x / y when val(x) >= val(y); y must not vanish at precision."""
    if y.is_zero():
        raise PrecisionExhaustedError("division by an element that is zero at precision")
    v = y.val
    unit = y.divide_by_pi(v)
    return x.divide_by_pi(v) * unit.invert()


def teichmuller(x: PadicElem) -> PadicElem:
    """The root of unity of order dividing q-1 with the residue of x (0 for non-units)."""
    fd = x.field
    if not x.is_unit():
        return fd.zero()
    y = x.coords
    for _ in range(fd.cap + 2):
        z = fd.pow(y, fd.q)
        if z == y:
            return PadicElem(fd, y, fd.cap)
        y = z
    raise PrecisionExhaustedError("Teichmuller iteration did not stabilise")
