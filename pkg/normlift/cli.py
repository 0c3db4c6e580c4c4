"""Command line front end.

Every subcommand reads JSON (from --input, --json or stdin) or plain
options, and writes one JSON document on stdout. Diagnostics go to stderr.

Exit codes: 0 success or Accept, 2 usage or input error, 3 Reject,
4 precision-inconclusive.
"""
from __future__ import annotations

import argparse
import datetime
import logging
import pathlib
import random
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from normlift import APP_NAME, __version__
from normlift import codec
from normlift.errors import (
    NormLiftError,
    PrecisionAmbiguousError,
    PrecisionExhaustedError,
    SchemaError,
)
from normlift.lift_checker import character, check_lift, normalize_with_shift
from normlift.lubin_log import eigen_check, logarithm
from normlift.lubin_tate import cyclotomic_lift, default_frobenius, endomorphism, lubin_tate_lift
from normlift.newton import fixed_point, newton_polygon
from normlift.norm_op import norm_op
from normlift.padic_core import PadicFieldDesc, field_make
from normlift.series import TruncSeries, compare, compose, comp_inverse
from normlift.settings import (
    DEFAULTS,
    LOG_LEVELS,
    Settings,
    default_settings_path,
    load_settings,
    settings_items,
    update_settings,
)
from normlift.weights import (
    WeightVector,
    circulant_det,
    classify_weights,
    eigenvalue_product,
    search_singular_nonconstant,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REJECT = 3
EXIT_INCONCLUSIVE = 4

LOG_FORMAT = "%(name)s [%(levelname)s] %(message)s"

Payload = dict
Result = tuple[Payload, int]

_handler: Optional[logging.Handler] = None


class UsageError(Exception):
    """Bad option values that argparse cannot catch by itself."""


# --- Parsing helpers ---

def _int_list(text: str) -> list[int]:
    # Comma-separated, as '1,2,3'
    try:
        return [int(n.strip()) for n in text.split(",") if n.strip()]
    except ValueError:
        raise UsageError(f"Could not parse integers from '{text}'. "
                         "Please provide a comma-separated list of integers.") from None


def _rational_list(text: str) -> list[Fraction]:
    try:
        values = [Fraction(n.strip()) for n in text.split(",") if n.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"Could not parse numbers from '{text}'.") from None
    return [int(v) if v.denominator == 1 else v for v in values]


def _configure_logging(level_name: str, verbose: int) -> None:
    global _handler
    idx = LOG_LEVELS.index(level_name)
    level = getattr(logging, LOG_LEVELS[max(0, idx - verbose)])
    root = logging.getLogger(APP_NAME)
    if _handler is not None:
        root.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(_handler)
    root.setLevel(level)


def _read_input(args: argparse.Namespace) -> object:
    if args.json is not None:
        text = args.json
    elif args.input is not None:
        try:
            text = pathlib.Path(args.input).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"Could not read input file: {e}") from None
    else:
        text = sys.stdin.read()
    return codec.loads(text)


def _document(args: argparse.Namespace, require: tuple[str, ...]) -> codec.Document:
    return codec.decode_document(_read_input(args), require=require, N=args.N, M=args.M)


def _generator_field(args: argparse.Namespace, settings: Settings) -> PadicFieldDesc:
    unram_text, eis_text = getattr(args, "unram_poly", None), getattr(args, "eis_poly", None)
    unram = _int_list(unram_text) if unram_text else None
    eis = _int_list(eis_text) if eis_text else None
    N = args.N if args.N is not None else settings.precision
    M = args.M if args.M is not None else settings.series_order
    f, e = getattr(args, "f", 1), getattr(args, "e", 1)
    return field_make(args.p, f, e, unram, eis, N, series_order=M, guard=settings.guard_digits)


# --- Subcommands ---

def cmd_check(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field", "P"))
    workers = args.workers if args.workers is not None else settings.workers
    report = check_lift(doc.spec, workers=workers)
    return codec.report_to_json(report, doc.field), report.exit_code


def cmd_normalize(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field", "P"))
    normalized, a = normalize_with_shift(doc.spec)
    logger.info("normalization shift has valuation %s", a.valuation())
    return codec.spec_to_json(normalized), EXIT_OK


def cmd_lubin_tate(args: argparse.Namespace, settings: Settings) -> Result:
    fd = _generator_field(args, settings)
    if args.endomorphism is not None:
        f = default_frobenius(fd)
        series = endomorphism(f, args.endomorphism)
        return {"field": codec.field_to_json(fd), "series": codec.series_to_json(series)}, EXIT_OK
    if not args.multipliers:
        raise UsageError("lubin-tate needs --multipliers or --endomorphism")
    spec = lubin_tate_lift(fd, _int_list(args.multipliers))
    return codec.spec_to_json(spec), EXIT_OK


def cmd_cyclotomic(args: argparse.Namespace, settings: Settings) -> Result:
    fd = _generator_field(args, settings)
    spec = cyclotomic_lift(fd, _rational_list(args.exponents))
    return codec.spec_to_json(spec), EXIT_OK


def cmd_log(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field", "P"))
    A = logarithm(doc.P)
    payload = codec.log_to_json(A)
    payload["eigen"] = [
        {"label": label, "residual": codec.residual_to_json(eigen_check(A, F, character(F)))}
        for label, F in doc.spec.elements
    ]
    return payload, EXIT_OK


def cmd_norm(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field", "P"))
    h = doc.h if doc.h is not None else TruncSeries.variable(doc.field, doc.P.M)
    n = norm_op(h, doc.P, polynomial=args.polynomial)
    return {"field": codec.field_to_json(doc.field), "norm": codec.series_to_json(n)}, EXIT_OK


def cmd_fixed_point(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field", "P"))
    a = fixed_point(doc.P)
    return {"field": codec.field_to_json(doc.field), "fixed_point": codec.elem_to_json(a),
            "valuation": codec.valuation_to_json(a.valuation())}, EXIT_OK


def cmd_newton_polygon(args: argparse.Namespace, settings: Settings) -> Result:
    doc = _document(args, ("field",))
    f = doc.series if doc.series is not None else doc.P
    if f is None:
        raise SchemaError("/series", "missing required field")
    return codec.polygon_to_json(newton_polygon(f, args.degree_cap)), EXIT_OK


def _weights(args: argparse.Namespace) -> WeightVector:
    try:
        w = WeightVector.of(_int_list(args.weights))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.d is not None and args.d != w.d:
        raise UsageError(f"--d {args.d} does not match {w.d} weights")
    return w


def cmd_circulant(args: argparse.Namespace, settings: Settings) -> Result:
    w = _weights(args)
    payload = {"d": str(w.d), "weights": [str(a) for a in w.a], "determinant": str(circulant_det(w))}
    try:
        payload["class"] = classify_weights(w).value
    except NormLiftError as exc:
        logger.info("not classified: %s", exc)
    return payload, EXIT_OK


def cmd_classify_weights(args: argparse.Namespace, settings: Settings) -> Result:
    w = _weights(args)
    cls = classify_weights(w)
    return {"d": str(w.d), "weights": [str(a) for a in w.a], "class": cls.value,
            "determinant": str(circulant_det(w))}, EXIT_OK


def cmd_search_singular(args: argparse.Namespace, settings: Settings) -> Result:
    if args.d < 2 or args.bound < 1:
        raise UsageError("search-singular needs --d >= 2 and --bound >= 1")
    w = search_singular_nonconstant(args.d, args.bound)
    vector = None if w is None else [str(a) for a in w.a]
    return {"d": str(args.d), "bound": str(args.bound), "vector": vector}, EXIT_OK


# --- Self test ---

def _selftest_checks(rng: random.Random, count: int) -> list[tuple[str, bool, str]]:
    results = []
    for _ in range(count):
        p = rng.choice([2, 3, 5])
        fd = field_make(p, N=8, series_order=16)
        x = rng.randrange(1, p ** 8)
        y = rng.randrange(1, p ** 8) * p + 1
        ex, ey = fd.from_int(x), fd.from_int(y)
        ok = ((ex * ey) / ey).equals(ex)
        results.append((f"division p={p} x={x} y={y}", ok, ""))

        f = TruncSeries.from_ints(fd, [0, 1] + [rng.randrange(p ** 8) for _ in range(10)])
        g = comp_inverse(f)
        r = compare(compose(f, g), TruncSeries.variable(fd, f.M))
        results.append((f"reversion p={p}", r.ok, "" if r.ok else f"fails at T^{r.index}"))

        unit = rng.randrange(1, p ** 4)
        if unit % p == 0:
            unit += 1
        spec = cyclotomic_lift(fd, [1 + p, unit])
        report = check_lift(spec)
        results.append((f"cyclotomic lift p={p} exponents {1 + p},{unit}",
                        report.verdict.value == "Accept", "; ".join(report.reasons)))

        d = rng.choice([2, 3, 4, 5, 6])
        w = WeightVector(d, tuple(rng.randrange(5) for _ in range(d)))
        det = circulant_det(w)
        results.append((f"circulant {list(w.a)}", det == eigenvalue_product(w), str(det)))
    return results


def cmd_selftest(args: argparse.Namespace, settings: Settings) -> Result:
    seed = args.seed if args.seed is not None else settings.seed
    rng = random.Random(seed)
    checks = _selftest_checks(rng, args.count)
    failed = [name for name, ok, _ in checks if not ok]
    for name in failed:
        logger.warning("selftest failed: %s", name)
    payload = {
        "seed": str(seed),
        "checks": [{"name": name, "passed": ok, "detail": detail} for name, ok, detail in checks],
        "passed": not failed,
    }
    return payload, EXIT_OK if not failed else EXIT_REJECT


def cmd_config(args: argparse.Namespace, settings: Settings) -> Result:
    path = pathlib.Path(args.settings) if args.settings else default_settings_path()
    if args.set and args.show:
        raise UsageError("config takes either --set or --show")
    if args.set:
        changes = {}
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise UsageError(f"expected key=value, got '{item}'")
            changes[key.strip()] = value.strip()
        update_settings(path, changes)
    else:
        load_settings(path)
    return {"path": str(path), "settings": dict(settings_items(path))}, EXIT_OK


# --- Parser ---

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--settings", type=str, help="Path of the settings INI file.")
    common.add_argument("--format", choices=("json", "human"), help="Output format.")
    common.add_argument("--meta", action="store_true",
                        help="Add a 'meta' object (version, timestamp) to the output.")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="Lower the log level one step per use.")
    return common


def _input_options() -> argparse.ArgumentParser:
    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--input", type=str, help="JSON input file (default: standard input).")
    inputs.add_argument("--json", type=str, help="Inline JSON input.")
    inputs.add_argument("--N", type=int, help="Override the absolute precision N.")
    inputs.add_argument("--M", type=int, help="Truncate the input series at T^M.")
    return inputs


def _field_options(parser: argparse.ArgumentParser, ramified: bool = True) -> None:
    parser.add_argument("--p", type=int, required=True, help="Residue characteristic.")
    parser.add_argument("--N", type=int, help="Absolute precision (default: settings).")
    parser.add_argument("--M", type=int, help="Series truncation (default: settings).")
    if ramified:
        parser.add_argument("--f", type=int, default=1, help="Residue degree.")
        parser.add_argument("--e", type=int, default=1, help="Ramification index.")
        parser.add_argument("--unram-poly", type=str, help="Comma list, constant term first.")
        parser.add_argument("--eis-poly", type=str, help="Comma list, constant term first.")


COMMANDS: dict[str, Callable[[argparse.Namespace, Settings], Result]] = {
    "check": cmd_check,
    "normalize": cmd_normalize,
    "lubin-tate": cmd_lubin_tate,
    "cyclotomic": cmd_cyclotomic,
    "log": cmd_log,
    "norm": cmd_norm,
    "fixed-point": cmd_fixed_point,
    "newton-polygon": cmd_newton_polygon,
    "circulant": cmd_circulant,
    "classify-weights": cmd_classify_weights,
    "search-singular": cmd_search_singular,
    "selftest": cmd_selftest,
    "config": cmd_config,
}


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    inputs = _input_options()
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Truncated p-adic power series: "
                                     "lifts of Galois actions, norm operators and logarithms.")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, inputs], help="Check a lift candidate.")
    p.add_argument("--workers", type=int, help="Worker processes (0: one per CPU).")
    sub.add_parser("normalize", parents=[common, inputs], help="Move the fixed point of P to 0.")

    p = sub.add_parser("lubin-tate", parents=[common], help="Generate [a] or a Lubin-Tate lift.")
    _field_options(p)
    p.add_argument("--multipliers", type=str, help="Comma list of integers a for [a].")
    p.add_argument("--endomorphism", type=int, help="Emit the single series [a].")

    p = sub.add_parser("cyclotomic", parents=[common], help="Generate the cyclotomic lift.")
    _field_options(p, ramified=False)
    p.add_argument("--exponents", type=str, required=True, help="Comma list, e.g. 4,7,28 or 1/2.")

    sub.add_parser("log", parents=[common, inputs], help="Logarithm of P and eigen residuals.")
    p = sub.add_parser("norm", parents=[common, inputs], help="Norm operator N(h) (h defaults to T).")
    p.add_argument("--polynomial", action="store_true", help="Treat h and P as exact polynomials.")
    sub.add_parser("fixed-point", parents=[common, inputs], help="Small fixed point of P.")
    p = sub.add_parser("newton-polygon", parents=[common, inputs], help="Certified Newton polygon.")
    p.add_argument("--degree-cap", type=int, help="Ignore degrees above this.")

    for name, text in (("circulant", "Circulant determinant."), ("classify-weights", "Image of the weight map.")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--weights", type=str, required=True, help="Comma list of nonnegative integers.")
        p.add_argument("--d", type=int, help="Expected number of weights.")

    p = sub.add_parser("search-singular", parents=[common], help="Singular nonconstant weight vector.")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)

    p = sub.add_parser("selftest", parents=[common], help="Randomized consistency checks.")
    p.add_argument("--seed", type=int, help="Generator seed (default: settings).")
    p.add_argument("--count", type=int, default=3, help="Rounds of checks.")

    p = sub.add_parser("config", parents=[common], help="Show or update the settings file.")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help=f"Change a setting ({', '.join(DEFAULTS)}).")
    p.add_argument("--show", action="store_true", help="Print the settings (the default without --set).")
    return parser


def _exit_code(exc: NormLiftError) -> int:
    if isinstance(exc, (PrecisionExhaustedError, PrecisionAmbiguousError)):
        return EXIT_INCONCLUSIVE
    return EXIT_USAGE


def _load(args: argparse.Namespace) -> Settings:
    if args.settings:
        return load_settings(args.settings)
    path = default_settings_path()
    return load_settings(path) if path.exists() else Settings()


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = _load(args)
    except NormLiftError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(settings.log_level, args.verbose)
    if args.format is not None:
        settings = replace(settings, output_format=args.format)

    try:
        payload, code = COMMANDS[args.command](args, settings)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NormLiftError as e:
        print(f"Error: {e}", file=sys.stderr)
        return _exit_code(e)

    if args.meta:
        payload["meta"] = {
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
    if settings.output_format == "human":
        print(codec.render_human(payload))
    else:
        print(codec.dumps(payload))
    return code


def main() -> None:
    sys.exit(run())
