"""Finite-precision checks that (P, {F_g}) lifts a Galois action with commuting Frobenius.

A candidate is a sample of labelled series with a partial multiplication
table. An Accept verdict means no violation was found on that sample at
the working precision; it is never a proof of liftability.
"""
from __future__ import annotations

import enum
import logging
import multiprocessing
import os
from dataclasses import dataclass, field as dc_field, replace
from typing import Iterable, Optional, Union

from normlift.errors import (
    ConstantTermNotSmallError,
    FieldMismatchError,
    MalformedGroupDataError,
    NoSmallFixedPointError,
    NotDistinguishedError,
    PrecisionAmbiguousError,
    PrecisionExhaustedError,
)
from normlift.newton import fixed_point
from normlift.padic_core import AtLeast, PadicElem, PadicFieldDesc
from normlift.series import (
    ResidueSeries,
    Residual,
    TruncSeries,
    compare,
    compose,
    reduce_mod_p,
    taylor_shift,
)

logger = logging.getLogger(__name__)

REPORT_HEADER = "consistent at precision; not a proof of liftability"
IDENTITY_LABEL = "1"


class Verdict(str, enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {Verdict.ACCEPT: 0, Verdict.REJECT: 3, Verdict.INCONCLUSIVE: 4}[self]


@dataclass(frozen=True)
class LiftSpec:
    """Candidate lift: P, a labelled sample {F_g} and a partial product table."""
    field: PadicFieldDesc
    P: TruncSeries
    elements: tuple[tuple[str, TruncSeries], ...]
    products: tuple[tuple[str, str, str], ...] = ()
    residue_action: tuple[tuple[str, ResidueSeries], ...] = ()

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.elements]

    def series(self, label: str) -> TruncSeries:
        for name, F in self.elements:
            if name == label:
                return F
        if label == IDENTITY_LABEL:
            return TruncSeries.variable(self.field, self.P.M)
        raise MalformedGroupDataError(f"unknown label {label!r}")

    def validate(self) -> None:
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise MalformedGroupDataError("labels are not unique")
        known = set(labels) | {IDENTITY_LABEL}
        for triple in self.products:
            missing = [x for x in triple if x not in known]
            if missing:
                raise MalformedGroupDataError(f"product {triple} references unknown labels {missing}")
        for label, _ in self.residue_action:
            if label not in known:
                raise MalformedGroupDataError(f"residue action for unknown label {label!r}")
        for series in [self.P] + [F for _, F in self.elements]:
            if series.field != self.field:
                raise FieldMismatchError(f"{series.field} vs {self.field}")
            if series.shift:
                raise MalformedGroupDataError("lift data must be power series")
        # every condition is read on the window of P
        for label, F in self.elements:
            if F.M < max(2, self.P.M):
                raise MalformedGroupDataError(
                    f"F_{label} is known below T^{F.M}, P below T^{self.P.M}")


def product_table(values: Iterable) -> tuple[tuple[str, str, str], ...]:
    """Every ordered pair (g, h) of the sample whose product is also in the sample."""
    values = list(values)
    table = []
    for g in values:
        for h in values:
            if g * h in values:
                table.append((str(g), str(h), str(g * h)))
    return tuple(table)


# --- Report ---

@dataclass(frozen=True)
class ConditionResidual:
    kind: str
    labels: tuple[str, ...]
    residual: Optional[Residual]
    error: str = ""
    fatal: bool = False

    @property
    def certified_mismatch(self) -> bool:
        return self.residual is not None and not self.residual.ok


@dataclass(frozen=True)
class CharacterEntry:
    label: str
    value: PadicElem
    unit: bool


@dataclass(frozen=True)
class CheckReport:
    verdict: Verdict
    reasons: tuple[str, ...]
    frobenius_reduction_ok: bool
    N: int
    M: int
    delta: int
    working_precision: int
    commutation: tuple[ConditionResidual, ...] = ()
    cocycle: tuple[ConditionResidual, ...] = ()
    cross: tuple[ConditionResidual, ...] = ()
    residue_mismatches: tuple[str, ...] = ()
    characters: tuple[CharacterEntry, ...] = ()
    character_homomorphism: tuple[ConditionResidual, ...] = ()
    collisions: tuple[tuple[str, str], ...] = ()
    kernel_violations: tuple[str, ...] = ()
    p1_valuation: Union[int, AtLeast, None] = None
    p1_nonzero: bool = False
    normalization_shift: Optional[PadicElem] = None
    header: str = dc_field(default=REPORT_HEADER)

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    def character(self, label: str) -> PadicElem:
        for entry in self.characters:
            if entry.label == label:
                return entry.value
        raise KeyError(label)


# --- Conditions ---

def _evaluate(spec: LiftSpec, kind: str, labels: tuple[str, ...]) -> ConditionResidual:
    """One condition; module level so worker processes can run it."""
    P = spec.P
    try:
        if kind == "commutation":
            F = spec.series(labels[0])
            residual = compare(compose(F, P), compose(P, F))
        elif kind == "cocycle":
            g, h, gh = (spec.series(x) for x in labels)
            residual = compare(compose(h, g), gh)
        elif kind == "cross":
            g, h, gh = (spec.series(x) for x in labels)
            residual = compare(compose(h, compose(g, P)), compose(P, gh))
        else:
            raise ValueError(f"unknown condition {kind!r}")
    except ConstantTermNotSmallError as exc:
        return ConditionResidual(kind, labels, None, f"constant term is a unit: {exc}", fatal=True)
    except (PrecisionExhaustedError, PrecisionAmbiguousError) as exc:
        return ConditionResidual(kind, labels, None, str(exc))
    return ConditionResidual(kind, labels, residual)


def _run_conditions(spec: LiftSpec, tasks: list[tuple[str, tuple[str, ...]]],
                    workers: int) -> list[ConditionResidual]:
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        logger.debug("checking %d conditions on %d worker processes", len(tasks), workers)
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            return pool.starmap(_evaluate, [(spec, kind, labels) for kind, labels in tasks])
    return [_evaluate(spec, kind, labels) for kind, labels in tasks]


def character(F: TruncSeries) -> PadicElem:
    """f_1 = F'(0)."""
    if F.shift or F.M < 2:
        raise MalformedGroupDataError("the character needs a power series known past T^1")
    return F.coeffs[1]


def conjugate_lift(spec: LiftSpec, a: PadicElem) -> LiftSpec:
    """Change variable T -> T + a: P -> P(T+a) - a and F_g -> F_g(T+a) - a."""
    def move(series: TruncSeries) -> TruncSeries:
        shifted = taylor_shift(series, a)
        return TruncSeries(spec.field, (shifted.coeffs[0] - a,) + shifted.coeffs[1:], 0)

    return replace(spec, P=move(spec.P), elements=tuple((label, move(F)) for label, F in spec.elements))


def normalize_lift(spec: LiftSpec) -> LiftSpec:
    """Move the small fixed point of P to 0; afterwards every F_g must fix 0 as well."""
    normalized, _ = normalize_with_shift(spec)
    return normalized


def normalize_with_shift(spec: LiftSpec) -> tuple[LiftSpec, PadicElem]:
    spec.validate()
    fd = spec.field
    a = fixed_point(spec.P)
    if spec.P.M > fd.q and not reduce_mod_p(spec.P).is_monomial(fd.q):
        raise NotDistinguishedError(f"P does not reduce to T^{fd.q}")
    if a.is_zero():
        result = spec
    else:
        logger.info("normalizing by the fixed point of valuation %s", a.valuation())
        result = conjugate_lift(spec, a)
    for label, F in result.elements:
        c0 = F.coeffs[0]
        if not c0.is_zero():
            raise MalformedGroupDataError(
                f"F_{label} does not fix the fixed point of P (constant term valuation {c0.valuation()})")
    return result, a


# --- Leading terms ---

@dataclass(frozen=True)
class LeadingTermEntry:
    label: str
    f1: PadicElem
    lowest_degree: Optional[int]
    constraint_ok: bool
    torsion_ok: bool
    degree_ok: bool


@dataclass(frozen=True)
class LeadingTermReport:
    k: Optional[int]
    pi_k: Optional[PadicElem]
    entries: tuple[LeadingTermEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.constraint_ok and e.torsion_ok and e.degree_ok for e in self.entries)


def leading_term_report(spec: LiftSpec) -> LeadingTermReport:
    """Compare the leading terms of P and each F_g.

    With P = pi_k T^k + ... and i the lowest degree of F_g - T, commuting
    forces f_1 pi_k = pi_k f_1^k, f_1^(k-1) = 1 when k > 1, and (k-1)(i-1) = 0.
    """
    spec.validate()
    P = spec.P
    k = next((j for j, c in enumerate(P.coeffs) if j > 0 and not c.is_zero()), None)
    pi_k = P.coeffs[k] if k is not None else None
    entries = []
    for label, F in spec.elements:
        f1 = character(F)
        moved = F - TruncSeries.variable(spec.field, F.M)
        i = moved.valuation_order()
        if k is None:
            entries.append(LeadingTermEntry(label, f1, i, True, True, True))
            continue
        constraint_ok = (f1 * pi_k).equals(pi_k * f1 ** k)
        torsion_ok = k == 1 or (f1 ** (k - 1)).equals(1)
        degree_ok = i is None or (k - 1) * (i - 1) == 0
        entries.append(LeadingTermEntry(label, f1, i, constraint_ok, torsion_ok, degree_ok))
    return LeadingTermReport(k, pi_k, tuple(entries))


# --- Driver ---

def check_lift(spec: LiftSpec, *, workers: int = 1) -> CheckReport:
    spec.validate()
    fd = spec.field
    N, M = fd.N, spec.P.M
    reasons: list[str] = []

    if M <= fd.q:
        raise MalformedGroupDataError(f"truncation T^{M} is too short to see T^{fd.q}")
    reduction_ok = reduce_mod_p(spec.P).is_monomial(fd.q)
    if not reduction_ok:
        reasons.append(f"P does not reduce to T^{fd.q}")
        return CheckReport(Verdict.REJECT, tuple(reasons), False, N, M, 0, N)

    residue_mismatches = []
    for label, expected in spec.residue_action:
        actual = reduce_mod_p(spec.series(label))
        window = min(len(actual.coeffs), len(expected.coeffs))
        if actual.coeffs[:window] != tuple(tuple(x % fd.p for x in c) for c in expected.coeffs[:window]):
            residue_mismatches.append(label)
    if residue_mismatches:
        reasons.append(f"residue action differs for {', '.join(residue_mismatches)}")

    tasks = [("commutation", (label,)) for label in spec.labels]
    tasks += [("cocycle", triple) for triple in spec.products]
    tasks += [("cross", triple) for triple in spec.products]
    results = _run_conditions(spec, tasks, workers)
    by_kind = {kind: tuple(r for r in results if r.kind == kind) for kind in ("commutation", "cocycle", "cross")}
    inconclusive = []
    for r in results:
        if r.certified_mismatch:
            reasons.append(f"{r.kind} {'/'.join(r.labels)} fails at T^{r.residual.index}"
                           f" with valuation {r.residual.valuation}")
        elif r.fatal:
            reasons.append(f"{r.kind} {'/'.join(r.labels)}: {r.error}")
        elif r.residual is None:
            inconclusive.append(f"{r.kind} {'/'.join(r.labels)}: {r.error}")

    characters: list[CharacterEntry] = []
    homomorphism: list[ConditionResidual] = []
    collisions: list[tuple[str, str]] = []
    kernel: list[str] = []
    shift = None
    p1_val: Union[int, AtLeast, None] = None
    p1_nonzero = False
    try:
        normalized, shift = normalize_with_shift(spec)
    except (MalformedGroupDataError, NoSmallFixedPointError) as exc:
        reasons.append(str(exc))
        normalized = None
    except (PrecisionExhaustedError, PrecisionAmbiguousError) as exc:
        inconclusive.append(f"normalization: {exc}")
        normalized = None

    if normalized is not None:
        for label, F in normalized.elements:
            f1 = character(F)
            entry = CharacterEntry(label, f1, f1.is_unit())
            characters.append(entry)
            if f1.val > 0 and not f1.is_zero():
                reasons.append(f"character of {label} is not a unit")
        values = {entry.label: entry.value for entry in characters}
        values.setdefault(IDENTITY_LABEL, fd.one())
        for g, h, gh in spec.products:
            d = values[g] * values[h] - values[gh]
            v = d.valuation()
            precision = min(d.prec, N)
            if isinstance(v, int) and v < precision:
                r = ConditionResidual("character", (g, h, gh), Residual(v, 0, precision))
                reasons.append(f"character is not multiplicative on {g}*{h}={gh}")
            else:
                r = ConditionResidual("character", (g, h, gh), Residual(AtLeast(precision), None, precision))
            homomorphism.append(r)
        for i, a in enumerate(characters):
            for b in characters[i + 1:]:
                if a.value.equals(b.value, N):
                    collisions.append((a.label, b.label))
        t = TruncSeries.variable(fd, M)
        for label, F in normalized.elements:
            if values[label].equals(1, N) and not compare(F, t).ok:
                kernel.append(label)
        p1 = normalized.P.coeffs[1].with_prec(N)
        p1_val = p1.valuation()
        p1_nonzero = not p1.is_zero()
        if not p1_nonzero:
            inconclusive.append("P'(0) vanishes at the working precision")

    residuals = [r.residual for r in results if r.residual is not None]
    residuals += [r.residual for r in homomorphism]
    working = min([N] + [r.precision for r in residuals])
    if working < 1:
        inconclusive.append("no certified digits remain after precision attrition")

    if reasons:
        verdict = Verdict.REJECT
    elif inconclusive:
        verdict = Verdict.INCONCLUSIVE
        reasons = inconclusive
    else:
        verdict = Verdict.ACCEPT
    logger.info("verdict %s (working precision %d of %d)", verdict.value, working, N)
    return CheckReport(
        verdict=verdict,
        reasons=tuple(reasons),
        frobenius_reduction_ok=True,
        N=N,
        M=M,
        delta=N - working,
        working_precision=working,
        commutation=by_kind["commutation"],
        cocycle=by_kind["cocycle"],
        cross=by_kind["cross"],
        residue_mismatches=tuple(residue_mismatches),
        characters=tuple(characters),
        character_homomorphism=tuple(homomorphism),
        collisions=tuple(collisions),
        kernel_violations=tuple(kernel),
        p1_valuation=p1_val,
        p1_nonzero=p1_nonzero,
        normalization_shift=shift,
    )
