"""Command line front end.

Exit codes: 0 success, 1 validation or check failures, 2 parse or schema
errors, 3 evaluation errors (including missing fiber products).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl, fixtures, suite, transform
from .catcore import FiberedCategory, load_category_file, validate_category
from .errors import (
    BivariantError,
    ContextError,
    NotApplicable,
    ParseError,
    ResolveError,
    SchemaError,
)
from .targets import make_adapter
from .universal import UniversalTheory

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_EVAL = 0, 1, 2, 3

CHECKS = ("bivariant", "orientation", "grothendieck", "additivity")
DEFAULT_CHECKS = {"universal": ("bivariant", "orientation"),
                  "fiberwise": ("bivariant", "orientation", "grothendieck")}


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _bound(text: str):
    if text.lower() in ("none", "all", "inf"):
        return None
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("bound must be non-negative")
    return n


def _coeff_range(text: str):
    try:
        lo, hi = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI, e.g. --coeff-range=-2,2") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty coefficient range")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--category", required=True, metavar="FILE", help="category document (JSON)")
    common.add_argument("--fibered", action="store_true",
                        help="use the document's fibered section for labels")
    common.add_argument("--format", choices=("text", "json"), default="text")

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--max-source", type=_bound, default=2, metavar="N",
                        help="largest source object enumerated ('none' for no bound)")
    bounds.add_argument("--max-bundles", type=int, default=1, metavar="R")

    p = argparse.ArgumentParser(prog="bivariant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a category document")

    g = sub.add_parser("generators", parents=[common, bounds], help="list generators over a context")
    g.add_argument("--context", required=True, metavar="MORPHISM")
    g.set_defaults(max_bundles=0)

    for name, helptext in (("eval", "evaluate expressions"),
                           ("gamma", "apply the universal transformation to expressions")):
        e = sub.add_parser(name, parents=[common], help=helptext)
        src = e.add_mutually_exclusive_group(required=True)
        src.add_argument("--expr", metavar="FILE", help="file with one expression per line")
        src.add_argument("--text", metavar="EXPR", help="a single expression")
        e.add_argument("--target", default="fiberwise" if name == "gamma" else None,
                       help="target theory for gamma(...) and target values")
        if name == "gamma":
            e.add_argument("--order", choices=(transform.FORWARD, transform.REVERSE),
                           default=transform.FORWARD, help="fold order of the label operators")

    c = sub.add_parser("check", parents=[common, bounds], help="run the law suite")
    c.add_argument("--target", default="universal", help="universal or an adapter name")
    c.add_argument("--checks", default=None,
                   help="comma separated subset of " + ",".join(CHECKS) + " (or 'all')")
    c.add_argument("--cap", type=_bound, default=None, metavar="N",
                   help="instances per law before sampling")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--coeff-range", type=_coeff_range, default=(-2, 2), metavar="LO,HI")
    c.add_argument("--out", metavar="FILE", help="also write the JSON report here")

    f = sub.add_parser("genfixture", help="emit a generated category document")
    f.add_argument("name", choices=sorted(fixtures.GENERATORS))
    f.add_argument("--out", metavar="FILE")
    return p


# ----------------------------------------------------------------- helpers


def _load(args):
    try:
        cat = load_category_file(args.category)
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {args.category}: {exc.strerror or exc}") from None
    except (SchemaError, json.JSONDecodeError) as exc:
        raise _Fail(EXIT_PARSE, f"{args.category}: {exc}") from None
    if cat.name is None:
        cat.name = Path(args.category).stem
    if args.fibered:
        if cat.fibered is None:
            raise _Fail(EXIT_PARSE, f"{args.category} has no fibered section")
        fc = cat.fibered
    else:
        fc = FiberedCategory.trivial()
    return cat, fc


def _theory(name, cat, fc):
    if name in (None, "universal"):
        return UniversalTheory(cat, fc)
    try:
        return make_adapter(name, cat, fc)
    except NotApplicable as exc:
        raise _Fail(EXIT_EVAL, str(exc)) from None


def _expressions(args) -> list:
    if args.text is not None:
        return [args.text]
    try:
        lines = Path(args.expr).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {args.expr}: {exc.strerror or exc}") from None
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def _parse_one(text, cat):
    try:
        return dsl.parse_expression(text, cat)
    except ParseError as exc:
        pointer = ""
        if exc.position is not None:
            pointer = f"\n  {text}\n  {' ' * exc.position}^"
        raise _Fail(EXIT_PARSE, f"parse error: {exc}{pointer}") from None
    except (ResolveError, ContextError) as exc:
        raise _Fail(EXIT_PARSE, f"{type(exc).__name__}: {exc}\n  in: {text}") from None


def _eval_error(exc: BivariantError, text: str) -> _Fail:
    sub = getattr(exc, "subexpression", None)
    msg = f"{type(exc).__name__}: {exc}\n  in: {text}"
    if sub and sub != text:
        msg += f"\n  at: {sub}"
    return _Fail(EXIT_EVAL, msg)


def _emit(out, args, payload: dict, text: str):
    if args.format == "json":
        out.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------- commands


def cmd_validate(args, out) -> int:
    cat, fc = _load(args)
    report = validate_category(cat, fc if args.fibered else None)
    lines = [f"validate: {cat.name} ({len(cat.objects)} objects, {len(cat.morphisms)} morphisms)"]
    if not report.violations:
        lines.append("  no violations")
    for v in report.violations:
        lines.append(f"  {v.severity:<8} {v.code:<32} {v.message}")
        if v.witness:
            lines.append(f"           witness: {json.dumps(v.witness, sort_keys=True)}")
    lines.append(f"  result: {'ok' if report.ok else 'INVALID'} "
                 f"({len(report.errors)} errors, {len(report.warnings)} warnings)")
    _emit(out, args, {"category": cat.name, **report.to_dict()}, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_generators(args, out) -> int:
    cat, fc = _load(args)
    try:
        ctx = cat.resolve(args.context)
    except ResolveError as exc:
        raise _Fail(EXIT_PARSE, str(exc)) from None
    om = UniversalTheory(cat, fc)
    gens = om.generators(ctx, suite.SuiteBounds(args.max_source, args.max_bundles))
    src = "any" if args.max_source is None else args.max_source
    lines = [f"{len(gens)} generator(s) over {ctx} (sources <= {src}, labels <= {args.max_bundles})"]
    lines += [f"  {g.render()}" for g in gens]
    payload = {"category": cat.name, "context": ctx, "max_source": args.max_source,
               "max_bundles": args.max_bundles, "count": len(gens),
               "generators": [g.render() for g in gens]}
    _emit(out, args, payload, "\n".join(lines))
    return EXIT_OK


def _run_expressions(args, out, wrap_gamma: bool) -> int:
    cat, fc = _load(args)
    om = UniversalTheory(cat, fc)
    target = None if args.target is None else _theory(args.target, cat, fc)
    ev = dsl.Evaluator(om, target)
    results, lines, status = [], [], EXIT_OK
    for text in _expressions(args):
        node = _parse_one(text, cat)
        canonical = dsl.render(node)
        stable = _parse_one(canonical, cat) == node
        try:
            if wrap_gamma:
                if dsl.domain(node) == dsl.TARGET:
                    raise ContextError("gamma needs a universal element")
                value = transform.gamma(target, ev.evaluate(node, dsl.OM), args.order)
            else:
                value = ev.evaluate(node)
            rendered = ev.render(value)
        except BivariantError as exc:
            raise _eval_error(exc, text) from None
        if not stable:
            status = EXIT_FAIL
        results.append({"expression": text, "canonical": canonical, "round_trip": stable,
                        "value": rendered})
        lines.append(("gamma " if wrap_gamma else "") + canonical)
        lines.append(f"  = {rendered}")
        if not stable:
            lines.append("  round trip: MISMATCH")
    payload = {"category": cat.name, "target": args.target or "universal", "results": results}
    if wrap_gamma:
        payload["order"] = args.order
    _emit(out, args, payload, "\n".join(lines))
    return status


def cmd_eval(args, out) -> int:
    return _run_expressions(args, out, wrap_gamma=False)


def cmd_gamma(args, out) -> int:
    return _run_expressions(args, out, wrap_gamma=True)


def cmd_check(args, out) -> int:
    cat, fc = _load(args)
    theory = _theory(args.target, cat, fc)
    if args.checks is None:
        names = DEFAULT_CHECKS.get(args.target, DEFAULT_CHECKS["fiberwise"])
    elif args.checks == "all":
        names = CHECKS
    else:
        names = tuple(n.strip() for n in args.checks.split(",") if n.strip())
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise _Fail(EXIT_PARSE, f"unknown check(s): {', '.join(unknown)}")
    bounds = suite.SuiteBounds(args.max_source, args.max_bundles, tuple(args.coeff_range),
                               cap=args.cap, seed=args.seed)
    reports, skipped = [], []
    try:
        for name in names:
            if name == "bivariant":
                reports.append(suite.check_bivariant_axioms(cat, theory, bounds, fc))
            elif name == "orientation":
                reports.append(suite.check_orientation_axioms(cat, fc, theory, bounds))
            elif name == "grothendieck":
                reports.append(suite.check_grothendieck(cat, fc, theory, bounds))
            else:
                try:
                    reports.append(suite.check_additivity(cat, theory, bounds))
                except NotApplicable as exc:
                    skipped.append({"check": name, "status": "not-applicable", "reason": str(exc)})
    except BivariantError as exc:
        raise _Fail(EXIT_EVAL, f"{type(exc).__name__}: {exc}") from None
    ok = all(r.ok for r in reports)
    payload = {"category": cat.name, "target": theory.name, "bounds": bounds.to_dict(),
               "ok": ok, "reports": [r.to_dict() for r in reports], "not_applicable": skipped}
    text = "\n".join(r.to_text() for r in reports)
    for s in skipped:
        text += f"\n{s['check']}: not applicable ({s['reason']})"
    text += f"\noverall: {'PASS' if ok else 'FAIL'}"
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                                  encoding="utf-8")
    _emit(out, args, payload, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_genfixture(args, out) -> int:
    text = fixtures.generate(args.name)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "generators": cmd_generators, "eval": cmd_eval,
            "gamma": cmd_gamma, "check": cmd_check, "genfixture": cmd_genfixture}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one command and return its exit code."""
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        return COMMANDS[args.command](args, out)
    except _Fail as exc:
        err.write(f"error: {exc}\n")
        return exc.code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
