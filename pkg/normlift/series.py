"""Truncated power series over O_E modulo (varpi^N, T^M), with an optional Laurent shift.

Every coefficient carries its own precision. Arithmetic runs on raw
coordinate tuples and the precision of each output coefficient is derived
separately from the precisions of the inputs that can reach it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from normlift.errors import (
    ConstantTermNotSmallError,
    FieldMismatchError,
    NotAUnitError,
    NotInvertibleError,
    ShiftNotSmallError,
)
from normlift.padic_core import AtLeast, Coords, PadicElem, PadicFieldDesc, floor_of

logger = logging.getLogger(__name__)

Scalar = Union[PadicElem, int, Fraction]


# --- Raw kernels ---

def _mul_raw(fd: PadicFieldDesc, a: Sequence[Coords], b: Sequence[Coords], n: int) -> list[Coords]:
    """First n coefficients of the product of two raw coefficient lists."""
    nz_b = [(j, y) for j, y in enumerate(b[:n]) if any(y)]
    if fd.degree == 1:
        acc = [0] * n
        for i, x in enumerate(a[:n]):
            x0 = x[0]
            if not x0:
                continue
            lim = n - i
            for j, y in nz_b:
                if j >= lim:
                    break
                acc[i + j] += x0 * y[0]
        mod = fd.modulus
        return [(v % mod,) for v in acc]
    out = [fd.zero_coords] * n
    for i, x in enumerate(a[:n]):
        if not any(x):
            continue
        lim = n - i
        for j, y in nz_b:
            if j >= lim:
                break
            out[i + j] = fd.add(out[i + j], fd.mul(x, y))
    return out


def _prefix_min(values: Iterable[int]) -> list[int]:
    out: list[int] = []
    cur = None
    for v in values:
        cur = v if cur is None else min(cur, v)
        out.append(cur)
    return out


def _check_field(a: "TruncSeries", b: "TruncSeries") -> PadicFieldDesc:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    return a.field


@dataclass(frozen=True)
class TruncSeries:
    """sum_k coeffs[k] T^(shift + k), known modulo T^(shift + M)."""
    field: PadicFieldDesc
    coeffs: tuple[PadicElem, ...]
    shift: int = 0

    # --- Constructors ---

    @classmethod
    def build(cls, field: PadicFieldDesc, raw: Sequence[Coords], precs: Sequence[int],
              shift: int = 0) -> "TruncSeries":
        cap = field.cap
        coeffs = tuple(PadicElem(field, c, max(0, min(p, cap))) for c, p in zip(raw, precs))
        return cls(field, coeffs, shift)

    @classmethod
    def from_elems(cls, field: PadicFieldDesc, elems: Sequence[Scalar], M: int | None = None,
                   shift: int = 0) -> "TruncSeries":
        M = len(elems) if M is None else M
        coeffs = [field.from_rational(x) if not isinstance(x, PadicElem) else x for x in elems[:M]]
        coeffs += [field.zero()] * (M - len(coeffs))
        return cls(field, tuple(coeffs), shift)

    @classmethod
    def from_ints(cls, field: PadicFieldDesc, values: Sequence[int | Fraction], M: int | None = None,
                  shift: int = 0, prec: int | None = None) -> "TruncSeries":
        M = len(values) if M is None else M
        coeffs = [field.from_rational(v, prec) for v in values[:M]]
        coeffs += [field.zero(prec) for _ in range(M - len(coeffs))]
        return cls(field, tuple(coeffs), shift)

    @classmethod
    def zero(cls, field: PadicFieldDesc, M: int) -> "TruncSeries":
        return cls.from_ints(field, [], M)

    @classmethod
    def one(cls, field: PadicFieldDesc, M: int) -> "TruncSeries":
        return cls.from_ints(field, [1], M)

    @classmethod
    def variable(cls, field: PadicFieldDesc, M: int) -> "TruncSeries":
        return cls.from_ints(field, [0, 1], M)

    @classmethod
    def monomial(cls, field: PadicFieldDesc, M: int, k: int, c: Scalar = 1) -> "TruncSeries":
        elems: list[Scalar] = [0] * k + [c]
        return cls.from_elems(field, elems, M)

    # --- Views ---

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def raw(self) -> tuple[Coords, ...]:
        return tuple(c.coords for c in self.coeffs)

    @property
    def precisions(self) -> tuple[int, ...]:
        return tuple(c.prec for c in self.coeffs)

    @property
    def prec(self) -> int:
        """Weakest coefficient precision."""
        return min(self.precisions, default=self.field.cap)

    @property
    def certified(self) -> int:
        return min(self.prec, self.field.N)

    def coefficient(self, exponent: int) -> PadicElem:
        k = exponent - self.shift
        if k < 0:
            return self.field.zero()
        if k >= self.M:
            raise IndexError(f"T^{exponent} is beyond the truncation T^{self.shift + self.M}")
        return self.coeffs[k]

    def valuation_order(self) -> int | None:
        """Exponent of the first coefficient that is nonzero at precision."""
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return self.shift + k
        return None

    def truncate(self, M: int) -> "TruncSeries":
        return TruncSeries(self.field, self.coeffs[:M], self.shift)

    def padded(self, M: int) -> "TruncSeries":
        """Treat the series as a polynomial and extend it with exact zeros."""
        extra = tuple(self.field.zero() for _ in range(M - self.M))
        return TruncSeries(self.field, self.coeffs + extra, self.shift)

    def with_prec(self, prec: int) -> "TruncSeries":
        return TruncSeries(self.field, tuple(c.with_prec(prec) for c in self.coeffs), self.shift)

    def without_shift(self) -> "TruncSeries":
        return TruncSeries(self.field, self.coeffs, 0)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    # --- Ring operations ---

    def _combine(self, other: "TruncSeries", negate: bool) -> "TruncSeries":
        fd = _check_field(self, other)
        start = min(self.shift, other.shift)
        end = min(self.shift + self.M, other.shift + other.M)
        coeffs = []
        for t in range(start, end):
            x = self.coefficient(t)
            y = other.coefficient(t)
            coeffs.append(x - y if negate else x + y)
        return TruncSeries(fd, tuple(coeffs), start)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        return self._combine(other, negate=False)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self._combine(other, negate=True)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.field, tuple(-c for c in self.coeffs), self.shift)

    def __mul__(self, other: "TruncSeries | Scalar") -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return scale(self, other)
        fd = _check_field(self, other)
        n = min(self.M, other.M)
        raw = _mul_raw(fd, self.raw, other.raw, n)
        pa, pb = _prefix_min(self.precisions), _prefix_min(other.precisions)
        return TruncSeries.build(fd, raw, [min(pa[k], pb[k]) for k in range(n)],
                                 self.shift + other.shift)

    def __rmul__(self, other: Scalar) -> "TruncSeries":
        return scale(self, other)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                terms.append(f"{c.coords if self.field.degree > 1 else c.coords[0]}*T^{self.shift + k}")
        body = " + ".join(terms) or "0"
        return f"TruncSeries({body} + O(T^{self.shift + self.M}), prec={self.prec})"


def scale(f: TruncSeries, c: Scalar) -> TruncSeries:
    """c * f with the sharp per-coefficient precision rule."""
    if not isinstance(c, PadicElem):
        c = f.field.from_rational(c)
    elif c.field != f.field:
        raise FieldMismatchError(f"{c.field} vs {f.field}")
    return TruncSeries(f.field, tuple(c * x for x in f.coeffs), f.shift)


def power(f: TruncSeries, n: int) -> TruncSeries:
    if n < 0:
        return power(mul_inverse(f), -n)
    result = TruncSeries.one(f.field, f.M)
    base = f
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# --- Composition ---

def _horner(fd: PadicFieldDesc, f_raw: Sequence[Coords], g_raw: Sequence[Coords], n: int) -> list[Coords]:
    top = len(f_raw)
    while top and not any(f_raw[top - 1]):
        top -= 1
    acc = [fd.zero_coords] * n
    for k in range(top - 1, -1, -1):
        if k < top - 1:
            acc = _mul_raw(fd, acc, g_raw, n)
        acc[0] = fd.add(acc[0], f_raw[k])
    return acc


def compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """f(g(T)) by Horner evaluation.

    When g(0) is zero at precision the coefficient j of the result depends
    only on coefficients up to j of f and g. Otherwise with v = val(g(0))
    the term f_k reaches coefficient j with a factor of valuation at least
    (k - j)*v, and the unknown tail of f caps coefficient j at (M - j)*v.
    """
    fd = _check_field(f, g)
    if f.shift or g.shift:
        raise ValueError("composition needs power series (shift 0)")
    n = min(f.M, g.M)
    if n == 0:
        return TruncSeries(fd, (), 0)
    g0 = g.coeffs[0]
    small = not g0.is_zero()
    if small and g0.val == 0:
        raise ConstantTermNotSmallError("g(0) is a unit")

    g_raw = list(g.raw[:n])
    pf, pg = _prefix_min(f.precisions), _prefix_min(g.precisions[:n])
    if small:
        raw = _horner(fd, f.raw, g_raw, n)
        v = g0.val
        tail = [p + k * v for k, p in enumerate(f.precisions)]
        for k in range(len(tail) - 2, -1, -1):
            tail[k] = min(tail[k], tail[k + 1])
        precs = [min(pf[j], tail[j] - j * v, pg[j], (f.M - j) * v) for j in range(n)]
    else:
        g_raw[0] = fd.zero_coords
        raw = _horner(fd, f.raw[:n], g_raw, n)
        precs = [min(pf[j], pg[j]) for j in range(n)]
    return TruncSeries.build(fd, raw, precs)


def derivative(f: TruncSeries) -> TruncSeries:
    fd = f.field
    coeffs = [fd.from_int(f.shift + k) * c for k, c in enumerate(f.coeffs)]
    if f.shift == 0:
        return TruncSeries(fd, tuple(coeffs[1:]), 0)
    return TruncSeries(fd, tuple(coeffs), f.shift - 1)


def evaluate(f: TruncSeries, a: PadicElem) -> PadicElem:
    """f(a) for a in the maximal ideal."""
    fd = f.field
    if f.shift:
        raise ValueError("evaluation needs a power series")
    v = a.val
    if v == 0:
        raise ConstantTermNotSmallError("evaluation point is a unit")
    acc = fd.zero_coords
    for c in reversed(f.raw):
        acc = fd.add(fd.mul(acc, a.coords), c)
    prec = min([a.prec, f.M * v] + [p + k * v for k, p in enumerate(f.precisions)])
    return PadicElem(fd, acc, min(prec, fd.cap))


def taylor_shift(f: TruncSeries, a: PadicElem) -> TruncSeries:
    """f(T + a); coefficient j keeps at most (M - j)*val(a) digits."""
    if f.shift:
        raise ValueError("taylor_shift needs a power series")
    if not a.is_zero() and a.val < 1:
        raise ShiftNotSmallError(f"val(a) = {a.val} < 1")
    g = TruncSeries.variable(f.field, f.M)
    g = TruncSeries(f.field, (a,) + g.coeffs[1:], 0)
    return compose(f, g)


# --- Inverses ---

def mul_inverse(f: TruncSeries) -> TruncSeries:
    """1/f, normalising the shift so the lowest coefficient is a unit."""
    fd = f.field
    k = next((i for i, c in enumerate(f.coeffs) if not c.is_zero()), None)
    if k is None:
        raise NotAUnitError("series is zero at precision")
    if not f.coeffs[k].is_unit():
        raise NotAUnitError(f"lowest coefficient T^{f.shift + k} is not a unit")
    skipped = min((c.prec for c in f.coeffs[:k]), default=fd.cap)
    h = f.raw[k:]
    n = len(h)
    inv0 = fd.inverse(h[0])
    b = [inv0]
    for m in range(1, n):
        s = fd.zero_coords
        for i in range(1, m + 1):
            if any(h[i]):
                s = fd.add(s, fd.mul(h[i], b[m - i]))
        b.append(fd.neg(fd.mul(inv0, s)))
    ph = _prefix_min(f.precisions[k:])
    return TruncSeries.build(fd, b, [min(p, skipped) for p in ph], -(f.shift + k))


def comp_inverse(f: TruncSeries) -> TruncSeries:
    """The series g with f(g) = g(f) = T, by Newton iteration g <- g - (f(g) - T)/f'(g)."""
    fd = f.field
    if f.shift or f.M < 2:
        raise NotInvertibleError("need a power series with a linear term")
    if not f.coeffs[0].is_zero():
        raise NotInvertibleError("f(0) is not zero")
    f1 = f.coeffs[1]
    if not f1.is_unit():
        raise NotInvertibleError(f"f'(0) has valuation {f1.valuation()}")
    M = f.M
    t = TruncSeries.variable(fd, M)
    g = TruncSeries.monomial(fd, M, 1, f1.invert())
    # f(g) - T vanishes to order 2, so the padded top coefficient of f' never
    # reaches the correction.
    df = derivative(f).padded(M)
    correct = 2
    while correct < M:
        correct *= 2
        err = compose(f, g) - t
        g = g - err * mul_inverse(compose(df, g))
    return g


# --- Binomial series ---

def binomial_series(c: Scalar, field: PadicFieldDesc, M: int | None = None) -> TruncSeries:
    """(1+T)^c - 1 for c in O_E.

    Nonnegative integer exponents use exact binomial coefficients. Other
    exponents go through C(c, k) = C(c, k-1) (c - k + 1) / k, and each
    division by k costs e*val_p(k) digits of precision.
    """
    M = field.series_order if M is None else M
    if isinstance(c, int) and c >= 0:
        return TruncSeries.from_ints(field, [0] + [math.comb(c, k) for k in range(1, M)], M)
    if not isinstance(c, PadicElem):
        c = field.from_rational(c)
    coeffs = [field.zero()]
    term = field.one()
    for k in range(1, M):
        term = (term * (c - (k - 1))).divide_int(k)
        coeffs.append(term)
    return TruncSeries(field, tuple(coeffs[:M]), 0)


# --- Reduction and comparison ---

@dataclass(frozen=True)
class ResidueSeries:
    """Coefficientwise image in k_E((T)); coefficients are f-tuples modulo p."""
    p: int
    coeffs: tuple[Coords, ...]
    shift: int = 0

    def is_monomial(self, exponent: int, coefficient: Coords | None = None) -> bool:
        """True when the series is c*T^exponent within the window (c = 1 by default)."""
        for k, c in enumerate(self.coeffs):
            t = self.shift + k
            if t == exponent:
                expected = coefficient if coefficient is not None else (1,) + (0,) * (len(c) - 1)
                if c != tuple(x % self.p for x in expected):
                    return False
            elif any(c):
                return False
        return True

    def __str__(self) -> str:
        terms = [f"{c if len(c) > 1 else c[0]}*T^{self.shift + k}" for k, c in enumerate(self.coeffs) if any(c)]
        return " + ".join(terms) or "0"


def reduce_mod_p(f: TruncSeries) -> ResidueSeries:
    return ResidueSeries(f.field.p, tuple(c.residue() for c in f.coeffs), f.shift)


@dataclass(frozen=True)
class Residual:
    """Outcome of comparing two series coefficientwise.

    `valuation` is the smallest certified valuation of a nonzero difference,
    or AtLeast(precision) when none is certified. `index` is the lowest
    exponent whose difference is certified nonzero.
    """
    valuation: Union[int, AtLeast]
    index: int | None
    precision: int

    @property
    def ok(self) -> bool:
        return self.index is None

    def at_least(self, bound: int) -> bool:
        return floor_of(self.valuation) >= bound

    def shifted(self, offset: int) -> "Residual":
        """Rescale by varpi^offset (used after clearing denominators)."""
        if isinstance(self.valuation, AtLeast):
            return Residual(AtLeast(self.valuation.bound + offset), self.index, self.precision + offset)
        return Residual(self.valuation + offset, self.index, self.precision + offset)


def compare(a: TruncSeries, b: TruncSeries, *, clamp: bool = True) -> Residual:
    """Residual of a - b over the common window; clamp caps precisions at N."""
    d = a - b
    limit = d.field.N if clamp else d.field.cap
    precision = limit
    best: int | None = None
    index: int | None = None
    for k, c in enumerate(d.coeffs):
        pk = min(c.prec, limit)
        precision = min(precision, pk)
        v = c.raw_val()
        if v is not None and v < pk:
            if index is None:
                index = d.shift + k
            best = v if best is None else min(best, v)
    return Residual(AtLeast(precision) if best is None else best, index, precision)
