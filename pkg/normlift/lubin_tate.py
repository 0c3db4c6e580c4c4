"""Lubin-Tate endomorphisms and the two standard families of lifts.

Given Frobenius series f, g (linear term of valuation 1, reduction T^q)
and a in O_F, there is exactly one F = aT + O(T^2) with f(F) = F(g). It is
built one degree at a time: adding c T^n changes the T^n coefficient of
f(F) - F(g) by c (pi_f - pi_g^n), and that factor has valuation 1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from normlift.errors import FieldMismatchError, NotDistinguishedError
from normlift.lift_checker import LiftSpec, product_table
from normlift.padic_core import PadicElem, PadicFieldDesc, exact_divide
from normlift.series import TruncSeries, binomial_series, compose, reduce_mod_p

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrobeniusSeries:
    """A series f with f = pi T + O(T^2), val(pi) = 1 and f = T^q mod varpi."""
    field: PadicFieldDesc
    series: TruncSeries

    @property
    def uniformizer(self) -> PadicElem:
        return self.series.coeffs[1]

    @property
    def M(self) -> int:
        return self.series.M


def frobenius_series(series: TruncSeries) -> FrobeniusSeries:
    fd = series.field
    if series.shift or series.M < 2:
        raise NotDistinguishedError("a Frobenius series needs a linear term")
    if not series.coeffs[0].is_zero():
        raise NotDistinguishedError("constant term must vanish")
    if series.coeffs[1].valuation() != 1:
        raise NotDistinguishedError(f"linear coefficient has valuation {series.coeffs[1].valuation()}, not 1")
    if series.M > fd.q and not reduce_mod_p(series).is_monomial(fd.q):
        raise NotDistinguishedError(f"series does not reduce to T^{fd.q}")
    return FrobeniusSeries(fd, series)


def default_frobenius(field: PadicFieldDesc, M: int | None = None) -> FrobeniusSeries:
    """varpi T + T^q."""
    M = field.series_order if M is None else M
    elems: list = [0, field.uniformizer()] + [0] * (field.q - 2) + [1]
    return frobenius_series(TruncSeries.from_elems(field, elems, M))


def lt_unique_series(f: FrobeniusSeries, g: FrobeniusSeries, a: PadicElem | int,
                     M: int | None = None) -> TruncSeries:
    fd = f.field
    if g.field != fd:
        raise FieldMismatchError(f"{g.field} vs {fd}")
    if not isinstance(a, PadicElem):
        a = fd.from_rational(a)
    elif a.field != fd:
        raise FieldMismatchError(f"{a.field} vs {fd}")
    M = min(f.M, g.M) if M is None else M
    pi_f, pi_g = f.uniformizer, g.uniformizer

    F = TruncSeries(fd, (fd.zero(), a), 0)
    for n in range(2, M):
        Fn = F.padded(n + 1)
        fn, gn = f.series.truncate(n + 1), g.series.truncate(n + 1)
        err = (compose(fn, Fn) - compose(Fn, gn)).coeffs[n]
        c = -exact_divide(err, pi_f - pi_g ** n)
        F = TruncSeries(fd, F.coeffs + (c,), 0)
        if n % 16 == 0:
            logger.debug("degree %d: precision %d", n, c.prec)
    return F.truncate(M)


def endomorphism(f: FrobeniusSeries, a: PadicElem | int, M: int | None = None) -> TruncSeries:
    """[a](T), the unique endomorphism of f tangent to aT."""
    return lt_unique_series(f, f, a, M)


def _unique(values: Iterable) -> list:
    out: list = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


def lubin_tate_lift(field: PadicFieldDesc, multipliers: Iterable[int], M: int | None = None,
                    frobenius: FrobeniusSeries | None = None) -> LiftSpec:
    """P = f and F_a = [a] for each integer multiplier a."""
    f = default_frobenius(field, M) if frobenius is None else frobenius
    M = f.M if M is None else M
    values = _unique(multipliers)
    elements = []
    for a in values:
        elements.append((str(a), endomorphism(f, a, M)))
        logger.debug("built [%s] to T^%d", a, M)
    return LiftSpec(field, f.series.truncate(M), tuple(elements), product_table(values))


def cyclotomic_lift(field: PadicFieldDesc, exponents: Iterable[Union[int, Fraction]],
                    M: int | None = None) -> LiftSpec:
    """P = (1+T)^p - 1 and F_c = (1+T)^c - 1."""
    if field.f != 1:
        raise NotDistinguishedError("the cyclotomic lift needs residue degree 1")
    values = _unique(exponents)
    M = field.series_order if M is None else M
    elements = tuple((str(c), binomial_series(c, field, M)) for c in values)
    return LiftSpec(field, binomial_series(field.p, field, M), elements, product_table(values))
