"""The norm operator N(h) = phi_q^{-1}(Norm(h)) attached to a Frobenius lift P.

O_E[[T]] is free of rank q over O_E[[S]] with S = P(T), with basis
1, T, ..., T^(q-1). Any g in O_E[[T]] therefore splits uniquely as
g = sum_i T^i a_i(P(T)). The norm of h is the determinant of multiplication
by h in this basis, a series n(S), and N(h) = n(T).

Working modulo (varpi^t, S^M_S) it is enough to know g modulo T^M_T with
M_T = q (M_S + t - 1), because T^q = P(T) + varpi * (series) puts T^M_T in
(varpi^t, P^M_S). The split is found digit by digit: writing the current
remainder as sum_n sum_i c T^(nq+i) and subtracting sum c T^i P^n leaves a
remainder divisible by one more power of varpi.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import permutations

from normlift.errors import (
    FieldMismatchError,
    NotAUnitError,
    NotAUnitTailError,
    NotDistinguishedError,
    PrecisionAmbiguousError,
)
from normlift.padic_core import Coords, PadicFieldDesc, field_make
from normlift.series import (
    Residual,
    TruncSeries,
    _mul_raw,
    compare,
    compose,
    mul_inverse,
    power,
    reduce_mod_p,
)

logger = logging.getLogger(__name__)

MAX_COFACTOR_RANK = 5


def _check_frobenius(P: TruncSeries) -> None:
    fd = P.field
    if P.shift:
        raise NotDistinguishedError("P must be a power series")
    if not P.coeffs[0].is_zero():
        raise NotDistinguishedError("P(0) must vanish; normalize the lift first")
    if P.M > fd.q and not reduce_mod_p(P).is_monomial(fd.q):
        raise NotDistinguishedError(f"P does not reduce to T^{fd.q}")


class _Expander:
    """Splits series in T into q series in S = P(T)."""

    def __init__(self, P: TruncSeries, M_S: int, target: int):
        fd = P.field
        self.field = fd
        self.q = fd.q
        self.M_S = M_S
        self.target = target
        self.M_T = self.q * (M_S + target - 1)
        P_raw = list(P.raw[:self.M_T]) + [fd.zero_coords] * max(0, self.M_T - P.M)
        count = -(-self.M_T // self.q)
        powers = [[fd.one_coords] + [fd.zero_coords] * (self.M_T - 1)]
        for _ in range(1, count):
            powers.append(_mul_raw(fd, powers[-1], P_raw, self.M_T))
        self.powers = powers
        logger.debug("expander: q=%d, M_S=%d, M_T=%d", self.q, M_S, self.M_T)

    def split(self, g_raw: list[Coords]) -> list[list[Coords]]:
        fd, q, M_T = self.field, self.q, self.M_T
        zero = fd.zero_coords
        r = list(g_raw[:M_T]) + [zero] * max(0, M_T - len(g_raw))
        acc = [[zero] * self.M_S for _ in range(q)]
        for step in range(self.target):
            digits = [(idx, c) for idx, c in enumerate(r) if any(c)]
            if not digits:
                break
            for idx, c in digits:
                n, i = divmod(idx, q)
                if n < self.M_S:
                    acc[i][n] = fd.add(acc[i][n], c)
                pw = self.powers[n]
                for k in range(n, M_T - i):
                    if any(pw[k]):
                        r[k + i] = fd.sub(r[k + i], fd.mul(c, pw[k]))
            logger.debug("split step %d: %d digits", step, len(digits))
        return acc


def _as_s_series(fd: PadicFieldDesc, raw: list[Coords], precs: list[int]) -> TruncSeries:
    return TruncSeries.build(fd, raw, precs)


def _det(matrix: list[list[TruncSeries]]) -> TruncSeries:
    n = len(matrix)
    if n <= MAX_COFACTOR_RANK:
        return _det_cofactor(matrix)
    return _det_unit_pivot(matrix)


def _det_cofactor(matrix: list[list[TruncSeries]]) -> TruncSeries:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = None
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = matrix[0][perm[0]]
        for row in range(1, n):
            term = term * matrix[row][perm[row]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _dot(xs: list[TruncSeries], ys: list[TruncSeries]) -> TruncSeries:
    total = xs[0] * ys[0]
    for x, y in zip(xs[1:], ys[1:]):
        total = total + x * y
    return total


def _det_berkowitz(matrix: list[list[TruncSeries]]) -> TruncSeries:
    """Division-free determinant in O(n^4) ring operations.

    Builds the characteristic polynomial of each leading block from the
    previous one through a Toeplitz product, the way sympy's berkowitz
    method does; sympy cannot run it on series entries.
    """
    n = len(matrix)
    fd, M = matrix[0][0].field, matrix[0][0].M
    one = TruncSeries.one(fd, M)
    charpoly = [one, -matrix[0][0]]
    for r in range(1, n):
        row = matrix[r][:r]
        vec = [matrix[i][r] for i in range(r)]
        column = [one, -matrix[r][r]]
        for _ in range(r):
            column.append(-_dot(row, vec))
            vec = [_dot(matrix[i][:r], vec) for i in range(r)]
        charpoly = [_dot(column[i - min(i, r):i + 1][::-1], charpoly[:min(i, r) + 1])
                    for i in range(r + 2)]
    return charpoly[n] if n % 2 == 0 else -charpoly[n]


def _det_unit_pivot(matrix: list[list[TruncSeries]]) -> TruncSeries:
    rows = [list(r) for r in matrix]
    n = len(rows)
    det = None
    sign = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col].coeffs[0].is_unit()), None)
        if pivot is None:
            logger.debug("no unit pivot in column %d; Berkowitz on the rest", col)
            rest = _det_berkowitz([row[col:] for row in rows[col:]])
            return rest * sign if det is None else det * rest * sign
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            sign = -sign
        inv = mul_inverse(rows[col][col])
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            rows[r] = [rows[r][c] - factor * rows[col][c] for c in range(n)]
        det = rows[col][col] if det is None else det * rows[col][col]
    return det * sign


def _split_matrix(h: TruncSeries, P: TruncSeries, M_S: int) -> tuple[list[list[TruncSeries]], int]:
    fd = h.field
    target = fd.N
    expander = _Expander(P, M_S, target)
    M_T = expander.M_T
    prec = min([target] + list(h.precisions[:M_T]) + list(P.precisions[:M_T]))
    q = fd.q
    columns = []
    for j in range(q):
        g_raw = [fd.zero_coords] * j + list(h.raw)
        columns.append(expander.split(g_raw))
    matrix = [[_as_s_series(fd, columns[j][i], [prec] * M_S) for j in range(q)] for i in range(q)]
    return matrix, M_T


def norm_op(h: TruncSeries, P: TruncSeries, *, M: int | None = None,
            polynomial: bool = False) -> TruncSeries:
    """N(h) as a series in T, truncated at T^M (default: h's truncation).

    With polynomial=True, h and P are exact polynomials. Otherwise they are
    only known below T^M_in and coefficient m keeps floor(M_in/q) - m digits
    at most.
    """
    if h.field != P.field:
        raise FieldMismatchError(f"{h.field} vs {P.field}")
    _check_frobenius(P)
    fd = h.field
    if h.shift:
        base = norm_op(h.without_shift(), P, M=M, polynomial=polynomial)
        nT, _ = norm_of_variable(P, M=h.M if M is None else M, polynomial=polynomial)
        return base * power(nT, h.shift)

    M_S = h.M if M is None else M
    M_in = min(h.M, P.M)
    M_T = fd.q * (M_S + fd.N - 1)
    matrix, _ = _split_matrix(h.padded(M_T) if polynomial else h,
                              P.padded(M_T) if polynomial else P, M_S)
    n = _det(matrix)
    if not polynomial and M_in < M_T:
        limit = M_in // fd.q
        logger.info("norm inputs known below T^%d; coefficient m keeps %d - m digits", M_in, limit)
        n = TruncSeries(fd, tuple(c.with_prec(limit - m) for m, c in enumerate(n.coeffs)), 0)
    return n.truncate(M_S)


def norm_of_variable(P: TruncSeries, *, M: int | None = None,
                     polynomial: bool = True) -> tuple[TruncSeries, TruncSeries]:
    """N(T), checked to be T times a unit, together with that unit."""
    fd = P.field
    M = P.M if M is None else M
    t = TruncSeries.variable(fd, M)
    nT = norm_op(t, P, M=M, polynomial=polynomial)
    if not nT.coeffs[0].is_zero() or not nT.coeffs[1].is_unit():
        raise NotAUnitTailError(f"N(T) is not T times a unit: {nT}")
    unit = TruncSeries(fd, nT.coeffs[1:], 0)
    if not compare(unit, TruncSeries.one(fd, unit.M)).ok:
        logger.info("N(T) = T * u with u != 1")
    return nT, unit


# --- Weierstrass data ---

@dataclass(frozen=True)
class WeierstrassData:
    """W(X) U(X) = P(X) - S with W monic of degree q; coefficients are series in S."""
    W: tuple[TruncSeries, ...]
    U: tuple[TruncSeries, ...]
    caps: tuple[int, int]
    prec: int
    remainder: Residual


def weierstrass_prepare(P: TruncSeries, caps: tuple[int, int] | None = None) -> WeierstrassData:
    """Minimal polynomial W of T over O_E[[S]], and the cofactor U = (P(X) - S) / W.

    W = X^q - sum_i c_i(S) X^i where T^q = sum_i T^i c_i(P(T)). U comes from
    dividing the polynomial P(X) - S (X-degree below M_X) by the monic W, and
    the size of the remainder is reported.
    """
    _check_frobenius(P)
    fd = P.field
    q = fd.q
    M_S, M_X = caps if caps is not None else (P.M, q + P.M)
    tq = TruncSeries.monomial(fd, q + 1, q)
    expander = _Expander(P, M_S, fd.N)
    split = expander.split(list(tq.raw))
    prec = min([fd.N] + list(P.precisions[:expander.M_T]))
    W = [-_as_s_series(fd, split[i], [prec] * M_S) for i in range(q)] + [TruncSeries.one(fd, M_S)]

    D = min(P.M, M_X)
    G = [TruncSeries.from_elems(fd, [c], M_S) for c in P.coeffs[:D]]
    G[0] = G[0] - TruncSeries.variable(fd, M_S)
    U = [TruncSeries.zero(fd, M_S) for _ in range(max(0, D - q))]
    for k in range(D - 1, q - 1, -1):
        lead = G[k]
        U[k - q] = lead
        for i in range(q + 1):
            G[k - q + i] = G[k - q + i] - lead * W[i]
    remainder = min((compare(g, TruncSeries.zero(fd, M_S)) for g in G[:q]),
                    key=lambda r: (r.ok, r.precision))
    if U and not U[0].coeffs[0].is_unit():
        raise NotAUnitError("Weierstrass cofactor is not a unit")
    return WeierstrassData(tuple(W), tuple(U), (M_S, M_X), prec, remainder)


# --- Root-product oracle ---

def cyclotomic_root_product(h: TruncSeries, M: int | None = None) -> TruncSeries:
    """prod over zeta^p = 1 of h(zeta(1+T) - 1), computed over Q_p(zeta_p).

    h must be a polynomial over Q_p. The product lies in Z_p[[T]] and equals
    N(h)(P(T)) for P = (1+T)^p - 1.
    """
    fd = h.field
    if fd.f != 1 or fd.e != 1:
        raise ValueError("the root-product oracle works over Q_p")
    p = fd.p
    M = h.M if M is None else M
    e = p - 1
    zeta_field = field_make(p, 1, e, eis_poly=[math.comb(p, j + 1) for j in range(p)],
                            N=e * fd.N, series_order=fd.series_order)
    length = M + zeta_field.N
    embedded = TruncSeries(zeta_field, tuple(
        zeta_field.from_int(c.coords[0], e * c.prec) for c in h.padded(length).coeffs), 0)
    zeta = zeta_field.one() + zeta_field.uniformizer()
    product = None
    for k in range(p):
        z = zeta ** k
        g = TruncSeries.from_elems(zeta_field, [z - 1, z], length)
        factor = compose(embedded, g)
        product = factor if product is None else product * factor
    coeffs = []
    for c in product.coeffs[:M]:
        base = fd.from_int(c.coords[0], c.prec // e)
        if not (c - zeta_field.from_int(c.coords[0])).is_zero():
            raise PrecisionAmbiguousError("root product has a coefficient outside Z_p")
        coeffs.append(base)
    return TruncSeries(fd, tuple(coeffs), 0)
