"""JSON wire format.

Integers travel as decimal strings (plain JSON integers are accepted on
input). Reading is strict: unknown or missing keys raise SchemaError with a
JSON pointer to the offending value. Output is deterministic: sorted keys,
no timestamps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from normlift.errors import NormLiftError, SchemaError
from normlift.lift_checker import (
    CharacterEntry,
    CheckReport,
    ConditionResidual,
    LiftSpec,
    Verdict,
)
from normlift.lubin_log import LogSeries
from normlift.newton import NewtonPolygon
from normlift.padic_core import AtLeast, PadicElem, PadicFieldDesc, field_make
from normlift.series import Residual, ResidueSeries, TruncSeries

Json = Any


# --- Primitive readers ---

def _child(pointer: str, key: Union[str, int]) -> str:
    token = str(key).replace("~", "~0").replace("/", "~1")
    return f"{pointer}/{token}"


def read_int(value: Json, pointer: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(pointer, "expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise SchemaError(pointer, f"expected a decimal integer, got {value!r}")


def read_rational(value: Json, pointer: str) -> Fraction:
    if isinstance(value, str) and "/" in value:
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(pointer, f"expected a fraction n/d, got {value!r}") from None
    return Fraction(read_int(value, pointer))


def read_list(value: Json, pointer: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(pointer, f"expected an array, got {type(value).__name__}")
    return value


def read_object(value: Json, pointer: str, required: tuple[str, ...] = (),
                optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(pointer, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in required and key not in optional:
            raise SchemaError(_child(pointer, key), "unknown field")
    for key in required:
        if key not in value:
            raise SchemaError(_child(pointer, key), "missing required field")
    return value


def read_str(value: Json, pointer: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(pointer, f"expected a string, got {type(value).__name__}")
    return value


def _decimal(n: int) -> str:
    return str(n)


def _fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def valuation_to_json(v: Union[int, Fraction, AtLeast, None]) -> Optional[str]:
    if v is None:
        return None
    if isinstance(v, AtLeast):
        return f">={v.bound}"
    return str(v)


def _read_valuation(value: Json, pointer: str) -> Union[int, AtLeast, None]:
    if value is None:
        return None
    if isinstance(value, str) and value.startswith(">="):
        return AtLeast(read_int(value[2:], pointer))
    return read_int(value, pointer)


# --- Field ---

FIELD_KEYS = ("p", "N")
FIELD_OPTIONAL = ("f", "e", "unram_poly", "eis_poly", "series_order", "guard")


def field_to_json(fd: PadicFieldDesc) -> dict:
    eis = [_decimal(c[0]) if fd.f == 1 else [_decimal(x) for x in c] for c in fd.eis_poly]
    out = {
        "p": _decimal(fd.p),
        "f": _decimal(fd.f),
        "e": _decimal(fd.e),
        "eis_poly": eis,
        "N": _decimal(fd.N),
        "series_order": _decimal(fd.series_order),
        "guard": _decimal(fd.guard),
    }
    if fd.f > 1:
        out["unram_poly"] = [_decimal(c) for c in fd.unram_poly]
    return out


def field_from_json(data: Json, pointer: str = "/field", *, N: int | None = None,
                    series_order: int | None = None) -> PadicFieldDesc:
    """Build and validate a field; N and series_order override the document."""
    obj = read_object(data, pointer, FIELD_KEYS, FIELD_OPTIONAL)
    p = read_int(obj["p"], _child(pointer, "p"))
    f = read_int(obj.get("f", 1), _child(pointer, "f"))
    e = read_int(obj.get("e", 1), _child(pointer, "e"))
    unram = None
    if "unram_poly" in obj:
        ptr = _child(pointer, "unram_poly")
        unram = [read_int(c, _child(ptr, i)) for i, c in enumerate(read_list(obj["unram_poly"], ptr))]
    eis = None
    if "eis_poly" in obj:
        ptr = _child(pointer, "eis_poly")
        eis = []
        for i, c in enumerate(read_list(obj["eis_poly"], ptr)):
            cp = _child(ptr, i)
            if isinstance(c, list):
                eis.append([read_int(x, _child(cp, j)) for j, x in enumerate(c)])
            else:
                eis.append(read_int(c, cp))
    if N is None:
        N = read_int(obj["N"], _child(pointer, "N"))
    if series_order is None and "series_order" in obj:
        series_order = read_int(obj["series_order"], _child(pointer, "series_order"))
    guard = read_int(obj["guard"], _child(pointer, "guard")) if "guard" in obj else None
    kwargs: dict = {"guard": guard}
    if series_order is not None:
        kwargs["series_order"] = series_order
    try:
        return field_make(p, f, e, unram, eis, N, **kwargs)
    except ValueError as exc:
        raise SchemaError(pointer, str(exc)) from None


# --- Elements and series ---

def elem_to_json(x: PadicElem) -> dict:
    return {"coords": [_decimal(c) for c in x.coords], "prec": _decimal(x.prec)}


def elem_from_json(fd: PadicFieldDesc, data: Json, pointer: str) -> PadicElem:
    """An element object, or a bare integer or fraction meaning an exact value."""
    if isinstance(data, dict):
        obj = read_object(data, pointer, ("coords",), ("prec",))
        ptr = _child(pointer, "coords")
        coords = [read_int(c, _child(ptr, i)) for i, c in enumerate(read_list(obj["coords"], ptr))]
        if len(coords) != fd.degree:
            raise SchemaError(ptr, f"expected {fd.degree} coordinates, got {len(coords)}")
        prec = read_int(obj["prec"], _child(pointer, "prec")) if "prec" in obj else None
        return fd.element(coords, prec)
    value = read_rational(data, pointer)
    try:
        return fd.from_rational(value)
    except NormLiftError as exc:
        raise SchemaError(pointer, str(exc)) from None


def series_to_json(f: TruncSeries) -> dict:
    return {"coeffs": [elem_to_json(c) for c in f.coeffs], "shift": _decimal(f.shift)}


def series_from_json(fd: PadicFieldDesc, data: Json, pointer: str, M: int | None = None) -> TruncSeries:
    """A series object, or an array of coefficients (shift 0).

    M truncates; asking for more terms than the document holds is an error.
    """
    if isinstance(data, list):
        coeffs, shift = data, 0
    else:
        obj = read_object(data, pointer, ("coeffs",), ("shift",))
        coeffs = read_list(obj["coeffs"], _child(pointer, "coeffs"))
        shift = read_int(obj.get("shift", 0), _child(pointer, "shift"))
        pointer = _child(pointer, "coeffs")
    if M is not None:
        if M > len(coeffs):
            raise SchemaError(pointer, f"holds {len(coeffs)} coefficients, {M} requested")
        coeffs = coeffs[:M]
    elems = tuple(elem_from_json(fd, c, _child(pointer, i)) for i, c in enumerate(coeffs))
    return TruncSeries(fd, elems, shift)


def residue_from_json(fd: PadicFieldDesc, data: Json, pointer: str) -> ResidueSeries:
    obj = read_object(data, pointer, ("coeffs",), ("shift",))
    ptr = _child(pointer, "coeffs")
    coeffs = []
    for i, c in enumerate(read_list(obj["coeffs"], ptr)):
        cp = _child(ptr, i)
        if isinstance(c, list):
            values = [read_int(x, _child(cp, j)) % fd.p for j, x in enumerate(c)]
        else:
            values = [read_int(c, cp) % fd.p]
        if len(values) > fd.f:
            raise SchemaError(cp, f"residue coefficients have at most {fd.f} entries")
        coeffs.append(tuple(values) + (0,) * (fd.f - len(values)))
    return ResidueSeries(fd.p, tuple(coeffs), read_int(obj.get("shift", 0), _child(pointer, "shift")))


def residue_to_json(r: ResidueSeries) -> dict:
    return {"coeffs": [[_decimal(x) for x in c] for c in r.coeffs], "shift": _decimal(r.shift)}


# --- Documents ---

@dataclass(frozen=True)
class Document:
    """A decoded input document; absent parts are None."""
    field: PadicFieldDesc
    P: Optional[TruncSeries] = None
    spec: Optional[LiftSpec] = None
    h: Optional[TruncSeries] = None
    series: Optional[TruncSeries] = None


DOCUMENT_KEYS = ("field", "P", "elements", "products", "residue_action", "h", "series")


def decode_document(data: Json, *, require: tuple[str, ...] = ("field",),
                    N: int | None = None, M: int | None = None,
                    series_order: int | None = None) -> Document:
    obj = read_object(data, "", require, tuple(k for k in DOCUMENT_KEYS if k not in require))
    fd = field_from_json(obj["field"], "/field", N=N, series_order=series_order)

    def series_at(key: str) -> Optional[TruncSeries]:
        return series_from_json(fd, obj[key], f"/{key}", M) if key in obj else None

    P = series_at("P")
    spec = None
    if P is not None:
        spec = _spec_from_parts(fd, P, obj, M)
    elif any(k in obj for k in ("elements", "products", "residue_action")):
        raise SchemaError("/P", "lift data needs P")
    return Document(fd, P, spec, series_at("h"), series_at("series"))


def _spec_from_parts(fd: PadicFieldDesc, P: TruncSeries, obj: dict, M: int | None) -> LiftSpec:
    elements = []
    for i, item in enumerate(read_list(obj.get("elements", []), "/elements")):
        ptr = _child("/elements", i)
        entry = read_object(item, ptr, ("label", "F"))
        label = read_str(entry["label"], _child(ptr, "label"))
        F = series_from_json(fd, entry["F"], _child(ptr, "F"), M)
        if F.M < max(2, P.M):
            raise SchemaError(_child(ptr, "F"), f"holds {F.M} coefficients, P holds {P.M}")
        elements.append((label, F))
    products = []
    for i, item in enumerate(read_list(obj.get("products", []), "/products")):
        ptr = _child("/products", i)
        triple = read_list(item, ptr)
        if len(triple) != 3:
            raise SchemaError(ptr, "a product is [g, h, gh]")
        products.append(tuple(read_str(x, _child(ptr, j)) for j, x in enumerate(triple)))
    residues = []
    for i, item in enumerate(read_list(obj.get("residue_action", []), "/residue_action")):
        ptr = _child("/residue_action", i)
        entry = read_object(item, ptr, ("label", "series"))
        label = read_str(entry["label"], _child(ptr, "label"))
        residues.append((label, residue_from_json(fd, entry["series"], _child(ptr, "series"))))
    spec = LiftSpec(fd, P, tuple(elements), tuple(products), tuple(residues))
    try:
        spec.validate()
    except NormLiftError as exc:
        raise SchemaError("", str(exc)) from None
    return spec


def spec_to_json(spec: LiftSpec) -> dict:
    out = {
        "field": field_to_json(spec.field),
        "P": series_to_json(spec.P),
        "elements": [{"label": label, "F": series_to_json(F)} for label, F in spec.elements],
        "products": [list(t) for t in spec.products],
    }
    if spec.residue_action:
        out["residue_action"] = [{"label": label, "series": residue_to_json(r)}
                                 for label, r in spec.residue_action]
    return out


# --- Reports ---

def residual_to_json(r: Optional[Residual]) -> Optional[dict]:
    if r is None:
        return None
    return {
        "valuation": valuation_to_json(r.valuation),
        "index": None if r.index is None else _decimal(r.index),
        "precision": _decimal(r.precision),
        "ok": r.ok,
    }


def residual_from_json(data: Json, pointer: str) -> Optional[Residual]:
    if data is None:
        return None
    obj = read_object(data, pointer, ("valuation", "index", "precision", "ok"))
    index = obj["index"]
    return Residual(_read_valuation(obj["valuation"], _child(pointer, "valuation")),
                    None if index is None else read_int(index, _child(pointer, "index")),
                    read_int(obj["precision"], _child(pointer, "precision")))


def _condition_to_json(c: ConditionResidual) -> dict:
    return {"kind": c.kind, "labels": list(c.labels), "residual": residual_to_json(c.residual),
            "error": c.error, "fatal": c.fatal}


def _condition_from_json(data: Json, pointer: str) -> ConditionResidual:
    obj = read_object(data, pointer, ("kind", "labels", "residual", "error", "fatal"))
    labels = tuple(read_str(x, _child(_child(pointer, "labels"), i))
                   for i, x in enumerate(read_list(obj["labels"], _child(pointer, "labels"))))
    return ConditionResidual(read_str(obj["kind"], _child(pointer, "kind")), labels,
                             residual_from_json(obj["residual"], _child(pointer, "residual")),
                             read_str(obj["error"], _child(pointer, "error")), bool(obj["fatal"]))


REPORT_KEYS = ("header", "verdict", "reasons", "field", "frobenius_reduction_ok", "N", "M", "delta",
               "working_precision", "commutation", "cocycle", "cross", "residue_mismatches",
               "characters", "character_homomorphism", "collisions", "kernel_violations",
               "p1_valuation", "p1_nonzero", "normalization_shift")


def report_to_json(report: CheckReport, fd: PadicFieldDesc) -> dict:
    return {
        "header": report.header,
        "verdict": report.verdict.value,
        "reasons": list(report.reasons),
        "field": field_to_json(fd),
        "frobenius_reduction_ok": report.frobenius_reduction_ok,
        "N": _decimal(report.N),
        "M": _decimal(report.M),
        "delta": _decimal(report.delta),
        "working_precision": _decimal(report.working_precision),
        "commutation": [_condition_to_json(c) for c in report.commutation],
        "cocycle": [_condition_to_json(c) for c in report.cocycle],
        "cross": [_condition_to_json(c) for c in report.cross],
        "residue_mismatches": list(report.residue_mismatches),
        "characters": [{"label": c.label, "value": elem_to_json(c.value), "unit": c.unit}
                       for c in report.characters],
        "character_homomorphism": [_condition_to_json(c) for c in report.character_homomorphism],
        "collisions": [list(c) for c in report.collisions],
        "kernel_violations": list(report.kernel_violations),
        "p1_valuation": valuation_to_json(report.p1_valuation),
        "p1_nonzero": report.p1_nonzero,
        "normalization_shift": None if report.normalization_shift is None
        else elem_to_json(report.normalization_shift),
    }


def report_from_json(data: Json) -> CheckReport:
    obj = read_object(data, "", REPORT_KEYS)
    fd = field_from_json(obj["field"])
    try:
        verdict = Verdict(obj["verdict"])
    except ValueError:
        raise SchemaError("/verdict", f"unknown verdict {obj['verdict']!r}") from None

    def conditions(key: str) -> tuple[ConditionResidual, ...]:
        ptr = f"/{key}"
        return tuple(_condition_from_json(c, _child(ptr, i)) for i, c in enumerate(read_list(obj[key], ptr)))

    def strings(key: str) -> tuple[str, ...]:
        ptr = f"/{key}"
        return tuple(read_str(x, _child(ptr, i)) for i, x in enumerate(read_list(obj[key], ptr)))

    characters = []
    for i, item in enumerate(read_list(obj["characters"], "/characters")):
        ptr = _child("/characters", i)
        entry = read_object(item, ptr, ("label", "value", "unit"))
        characters.append(CharacterEntry(read_str(entry["label"], _child(ptr, "label")),
                                         elem_from_json(fd, entry["value"], _child(ptr, "value")),
                                         bool(entry["unit"])))
    collisions = tuple(tuple(read_str(x, _child(_child("/collisions", i), j)) for j, x in enumerate(pair))
                       for i, pair in enumerate(read_list(obj["collisions"], "/collisions")))
    shift = obj["normalization_shift"]
    return CheckReport(
        verdict=verdict,
        reasons=strings("reasons"),
        frobenius_reduction_ok=bool(obj["frobenius_reduction_ok"]),
        N=read_int(obj["N"], "/N"),
        M=read_int(obj["M"], "/M"),
        delta=read_int(obj["delta"], "/delta"),
        working_precision=read_int(obj["working_precision"], "/working_precision"),
        commutation=conditions("commutation"),
        cocycle=conditions("cocycle"),
        cross=conditions("cross"),
        residue_mismatches=strings("residue_mismatches"),
        characters=tuple(characters),
        character_homomorphism=conditions("character_homomorphism"),
        collisions=collisions,
        kernel_violations=strings("kernel_violations"),
        p1_valuation=_read_valuation(obj["p1_valuation"], "/p1_valuation"),
        p1_nonzero=bool(obj["p1_nonzero"]),
        normalization_shift=None if shift is None else elem_from_json(fd, shift, "/normalization_shift"),
        header=read_str(obj["header"], "/header"),
    )


def polygon_to_json(polygon: NewtonPolygon) -> dict:
    return {
        "vertices": [[_decimal(x), _fraction(y)] for x, y in polygon.vertices],
        "segments": [{"start": _decimal(s.start), "length": _decimal(s.length), "slope": _fraction(s.slope)}
                     for s in polygon.segments],
        "certified_degree": _decimal(polygon.certified_degree),
    }


def log_to_json(A: LogSeries) -> dict:
    return {
        "field": field_to_json(A.field),
        "pi1": elem_to_json(A.pi1),
        "prec": _decimal(A.prec),
        "coeffs": [{"shift": _decimal(c.shift), "unit": elem_to_json(c.unit)} for c in A.coeffs],
        "identity_residual": residual_to_json(A.identity_residual),
        "denominator_bound_ok": A.denominator_bound_ok(),
    }


# --- Text ---

def loads(text: str) -> Json:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps(payload: Json) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def render_human(payload: Json, indent: int = 0) -> str:
    """The same structure as indented text."""
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(payload, dict):
        for key in sorted(payload):
            value = payload[key]
            if _is_leaf(value):
                lines.append(f"{pad}{key}: {_leaf(value)}")
            else:
                lines.append(f"{pad}{key}:")
                lines.append(render_human(value, indent + 1))
    elif isinstance(payload, list):
        if all(_is_leaf(v) for v in payload):
            lines.append(f"{pad}[{', '.join(_leaf(v) for v in payload)}]")
        else:
            for value in payload:
                lines.append(f"{pad}-")
                lines.append(render_human(value, indent + 1))
    else:
        lines.append(f"{pad}{_leaf(payload)}")
    return "\n".join(line for line in lines if line)


def _is_leaf(value: Json) -> bool:
    if isinstance(value, dict):
        # elements print on one line
        return set(value) == {"coords", "prec"}
    if isinstance(value, list):
        return not value
    return True


def _leaf(value: Json) -> str:
    if isinstance(value, dict):
        coords = value["coords"]
        body = coords[0] if len(coords) == 1 else "[" + ", ".join(coords) + "]"
        return f"{body} (prec {value['prec']})"
    if isinstance(value, list):
        return "[]"
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)
