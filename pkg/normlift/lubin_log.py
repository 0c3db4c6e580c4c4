"""The logarithm A(T) attached to a Frobenius lift P: A = T + O(T^2), A(P(T)) = pi1 A(T).

With pi1 = P'(0) and x_{k,i} the T^k coefficient of P(T)^i, comparing T^k
coefficients gives

    a_k (pi1 - pi1^k) = x_{k,1} a_1 + ... + x_{k,k-1} a_{k-1}.

The coefficients have denominators, a_k in pi1^(1-k) O_E, so the recurrence
runs on the integral b_k = pi1^(k-1) a_k:

    b_k (1 - pi1^(k-1)) = sum_{i<k} b_i pi1^(k-i-1) x_{k,i},

and a_k is stored as varpi^shift * unit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from normlift.errors import LinearCoefficientZeroError, NotDistinguishedError
from normlift.padic_core import PadicElem, PadicFieldDesc
from normlift.series import Residual, TruncSeries, compare, compose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScaledElem:
    """varpi^shift * unit. `unit` is a unit, or zero at precision when a_k vanishes."""
    unit: PadicElem
    shift: int

    @classmethod
    def normalized(cls, x: PadicElem, shift: int) -> "ScaledElem":
        """varpi^shift * x, moving the varpi-valuation of x into the shift."""
        if x.is_zero():
            return cls(x, shift)
        v = x.val
        return cls(x.divide_by_pi(v), shift + v) if v else cls(x, shift)

    def is_zero(self) -> bool:
        return self.unit.is_zero()

    def scaled_to(self, exponent: int) -> PadicElem:
        """varpi^exponent * self as an element of O_E; needs exponent + shift >= 0."""
        n = exponent + self.shift
        if n < 0:
            raise ValueError(f"varpi^{exponent} does not clear varpi^{self.shift}")
        if n == 0:
            return self.unit
        return self.unit * self.unit.field.uniformizer() ** n

    def __str__(self) -> str:
        u = self.unit.coords[0] if self.unit.field.degree == 1 else list(self.unit.coords)
        return f"pi^{self.shift}*{u}"


@dataclass(frozen=True)
class LogSeries:
    """A(T) = sum_k coeffs[k] T^k below T^M; coeffs[0] is zero and coeffs[1] is 1."""
    field: PadicFieldDesc
    coeffs: tuple[ScaledElem, ...]
    pi1: PadicElem
    prec: int
    identity_residual: Residual

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def pi1_valuation(self) -> int:
        return self.pi1.val

    def denominator_bound_ok(self) -> bool:
        """shift >= (1-k) val(pi1) for every computed coefficient."""
        v = self.pi1_valuation
        return all(c.shift >= (1 - k) * v for k, c in enumerate(self.coeffs) if k)

    def cleared(self) -> TruncSeries:
        """pi1^(M-1) A(T), which has integral coefficients."""
        return _cleared(self.field, self.coeffs, self.pi1)


def _cleared(fd: PadicFieldDesc, coeffs: tuple[ScaledElem, ...], pi1: PadicElem) -> TruncSeries:
    M = len(coeffs)
    v = pi1.val
    eps_power = pi1.divide_by_pi(v) ** (M - 1)
    out = [fd.zero()]
    for c in coeffs[1:]:
        out.append(c.scaled_to((M - 1) * v) * eps_power)
    return TruncSeries(fd, tuple(out), 0)


def _residual_on_log_scale(lhs: TruncSeries, rhs: TruncSeries, clearing: int) -> Residual:
    return compare(lhs, rhs, clamp=False).shifted(-clearing)


def logarithm(P: TruncSeries, M: int | None = None) -> LogSeries:
    """Solve A(P(T)) = P'(0) A(T) with a_1 = 1 below T^M."""
    fd = P.field
    M = P.M if M is None else min(M, P.M)
    if P.shift or P.M < 2:
        raise NotDistinguishedError("P must be a power series with a linear term")
    if not P.coeffs[0].is_zero():
        raise NotDistinguishedError("P(0) must vanish; normalize the lift first")
    pi1 = P.coeffs[1]
    if pi1.is_zero():
        raise LinearCoefficientZeroError(f"P'(0) vanishes at precision {pi1.prec}")
    v = pi1.val
    if v == 0:
        raise NotDistinguishedError("P'(0) is a unit")

    P = P.truncate(M)
    # x[i] = P^i mod T^M, for i < M
    x = [TruncSeries.one(fd, M), P]
    for _ in range(2, M):
        x.append(x[-1] * P)
    pi_pows = [fd.one()]
    for _ in range(1, M):
        pi_pows.append(pi_pows[-1] * pi1)

    eps = pi1.divide_by_pi(v)
    eps_inv = eps.invert()
    b = [fd.zero(), fd.one()]
    coeffs = [ScaledElem(fd.zero(), 0), ScaledElem(fd.one(), 0)]
    for k in range(2, M):
        s = fd.zero()
        for i in range(1, k):
            if b[i].is_zero():
                continue
            s = s + b[i] * pi_pows[k - i - 1] * x[i].coeffs[k]
        bk = s * (1 - pi_pows[k - 1]).invert()
        b.append(bk)
        coeffs.append(ScaledElem.normalized(bk * eps_inv ** (k - 1), -(k - 1) * v))
        if k % 16 == 0:
            logger.debug("log coefficient %d: precision %d", k, bk.prec)

    prec = min(c.prec for c in b[1:])
    C = _cleared(fd, tuple(coeffs), pi1)
    residual = _residual_on_log_scale(compose(C, P), C * pi1, (M - 1) * v)
    if not residual.ok:
        logger.info("A(P) - pi1 A fails at T^%s", residual.index)
    return LogSeries(fd, tuple(coeffs), pi1, prec, residual)


def eigen_check(A: LogSeries, F: TruncSeries, f1: PadicElem | int) -> Residual:
    """Residual of A(F(T)) - f1 A(T), on the scale of A itself.

    Both sides are multiplied by pi1^(M-1) before comparing, so the reported
    precision is the storage precision minus (M-1) val(pi1).
    """
    fd = A.field
    if not isinstance(f1, PadicElem):
        f1 = fd.from_rational(f1)
    M = min(A.M, F.M)
    C = A.cleared().truncate(M)
    lhs = compose(C, F.truncate(M))
    return _residual_on_log_scale(lhs, C * f1, (A.M - 1) * A.pi1_valuation)
