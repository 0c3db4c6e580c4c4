"""Newton polygons of truncated series and small fixed points of Frobenius-type series."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from normlift.errors import (
    NoSmallFixedPointError,
    NotDistinguishedError,
    PrecisionAmbiguousError,
    PrecisionExhaustedError,
)
from normlift.padic_core import AtLeast, PadicElem
from normlift.series import TruncSeries, derivative, evaluate, reduce_mod_p

logger = logging.getLogger(__name__)

Point = tuple[int, Fraction]


@dataclass(frozen=True)
class Segment:
    start: int
    length: int
    slope: Fraction


@dataclass(frozen=True)
class NewtonPolygon:
    """Certified vertices (degree, val_p) of the lower convex hull, left to right."""
    vertices: tuple[Point, ...]
    certified_degree: int

    @property
    def segments(self) -> tuple[Segment, ...]:
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.append(Segment(x0, x1 - x0, Fraction(y1 - y0, x1 - x0)))
        return tuple(out)

    def slopes(self) -> list[Fraction]:
        """Slope multiset, each slope repeated by its length."""
        return [s.slope for s in self.segments for _ in range(s.length)]


def _lower_hull(points: list[Point]) -> list[Point]:
    hull: list[Point] = []
    for pt in points:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            if (ax - ox) * (pt[1] - oy) - (ay - oy) * (pt[0] - ox) > 0:
                break
            hull.pop()
        hull.append(pt)
    return hull


def newton_polygon(f: TruncSeries, degree_cap: int | None = None) -> NewtonPolygon:
    """Lower hull of (k, val_p(c_k)) for k <= degree_cap.

    Coefficients that vanish at precision give only a lower bound. The hull
    of the known points is compared with the hull where every unknown point
    sits at its bound; segments shared by both are certified, and the
    polygon stops at the first one that is not. Unknown points to the left
    of the first known vertex are ignored.
    """
    if f.shift:
        raise ValueError("newton_polygon needs a power series")
    e = f.field.e
    top = f.M - 1 if degree_cap is None else min(degree_cap, f.M - 1)
    known: list[Point] = []
    bounds: list[Point] = []
    for k in range(top + 1):
        v = f.coeffs[k].valuation()
        if isinstance(v, AtLeast):
            bounds.append((k, Fraction(v.bound, e)))
        else:
            known.append((k, Fraction(v, e)))
    if not known:
        raise PrecisionAmbiguousError("no coefficient is nonzero at precision")

    upper = _lower_hull(known)
    start = upper[0][0]
    lower = _lower_hull(sorted(known + [b for b in bounds if b[0] > start]))
    lower_edges = set(zip(lower, lower[1:]))

    vertices = [upper[0]]
    for edge in zip(upper, upper[1:]):
        if edge not in lower_edges:
            if len(vertices) == 1:
                raise PrecisionAmbiguousError(
                    f"first segment from degree {start} is not certified at current precision")
            logger.info("Newton polygon certified only up to degree %d", vertices[-1][0])
            break
        vertices.append(edge[1])
    return NewtonPolygon(tuple(vertices), vertices[-1][0])


def fixed_point(P: TruncSeries) -> PadicElem:
    """The fixed point a of P in the maximal ideal with val_p(a) = val_p(P(0)).

    Newton iteration a <- a - (P(a) - a)/(P'(a) - 1) seeded at P(0). The
    result is checked against P before it is returned.
    """
    fd = P.field
    c0 = P.coeffs[0]
    if c0.is_zero():
        return fd.zero(c0.prec)
    if c0.val == 0:
        raise NoSmallFixedPointError("P(0) is a unit")
    if P.M > fd.q and not reduce_mod_p(P).is_monomial(fd.q):
        raise NotDistinguishedError(f"P does not reduce to T^{fd.q}")

    shifted = P - TruncSeries.variable(fd, P.M)
    segments = newton_polygon(shifted, degree_cap=fd.q).segments
    if not segments or segments[0].start != 0 or segments[0].length != 1 or segments[0].slope >= 0:
        raise NoSmallFixedPointError("Newton polygon of P - T does not start with a length-1 segment")

    dP = derivative(P)
    a = c0
    for step in range(fd.cap.bit_length() + 4):
        r = evaluate(P, a) - a
        if r.is_zero():
            break
        d = evaluate(dP, a) - 1
        a = a - r * d.invert()
        logger.debug("fixed point step %d: residual valuation %s", step, r.valuation())
    else:
        raise PrecisionExhaustedError("Newton iteration for the fixed point did not converge")

    r = evaluate(P, a) - a
    if not r.is_zero():
        raise PrecisionExhaustedError(f"fixed point residual has valuation {r.valuation()}")
    if a.val != c0.val:
        raise NoSmallFixedPointError(f"fixed point has valuation {a.val}, expected {c0.val}")
    return a.with_prec(r.prec)
