"""Command-line front end: analyze, search, monomials."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import search
from .certify import CertReport, ConsistencyError, NotAnticanonical, certify, fmt
from .quasismooth import boundary_curve, check_quasismooth
from .wps import (
    INDICES,
    NonIsolatedSingularities,
    Surface,
    WeightError,
    WeightSystem,
    enumerate_monomials,
    format_monomial,
    normalize_weights,
    parse_monomial,
    singular_points,
)

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2
REPORT_SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _coeff(text: str) -> tuple[tuple[int, ...], Fraction]:
    mono, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected a0,a1,a2,a3=p/q, got {text!r}")
    try:
        return parse_monomial(mono), Fraction(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _monomial(text: str) -> tuple[int, ...]:
    try:
        return parse_monomial(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _support(text: str) -> tuple[int, ...]:
    try:
        idx = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad support {text!r}: expected indices like 1,2,3") from None
    if any(i not in INDICES for i in idx):
        raise argparse.ArgumentTypeError(f"support indices must lie in 0..3: {text!r}")
    return idx


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kecert", description="Certify KE metrics and the absence of tigers on X_d in P(q0,q1,q2,q3).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="certify one surface")
    a.add_argument("weights", type=int, nargs=4, metavar="q")
    a.add_argument("--degree", type=int, help="inspect a non-anticanonical degree (no certification)")
    a.add_argument("--zero-coeff", type=_monomial, action="append", default=[], metavar="a0,a1,a2,a3",
                   help="set this monomial's coefficient to zero (exponents in input weight order)")
    a.add_argument("--coeff", type=_coeff, action="append", default=[], metavar="a0,a1,a2,a3=p/q",
                   help="fix this monomial's coefficient to a nonzero rational")
    a.add_argument("--mode", choices=("tiger", "ke", "both"), default="both")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--trace", action="store_true", help="print every derivation step")

    s = sub.add_parser("search", help="sweep weight systems up to a bound")
    s.add_argument("--max-weight", type=int, required=True)
    s.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    s.add_argument("--out", help="write to this file instead of stdout")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--quasismooth-only", action="store_true")

    m = sub.add_parser("monomials", help="list the monomials of a given degree")
    m.add_argument("weights", type=int, nargs=4, metavar="q")
    m.add_argument("--degree", type=int, required=True)
    m.add_argument("--support", type=_support, help="only these variables, e.g. 1,2,3")
    return p


# ------------------------------------------------------------------ rendering


def _order_note(raw: Sequence[int], q: Sequence[int]) -> str | None:
    if tuple(raw) == tuple(q):
        return None
    return f"weights reordered from ({','.join(map(str, raw))}) to ({','.join(map(str, q))}); monomials are in sorted order"


def report_dict(report: CertReport, mode: str = "both", note: str | None = None) -> dict:
    s = report.surface
    qs = report.quasismooth
    v = report.verdict
    out: dict = {
        "schema_version": REPORT_SCHEMA,
        "surface": {
            "weights": list(s.ws.q),
            "d": s.ws.d,
            "zeroed": [list(m) for m in sorted(s.zeroed, reverse=True)],
            "explicit": {",".join(map(str, m)): str(c) for m, c in s.explicit},
        },
        "note": note,
        "quasismooth": {"I": qs.cond_i.passed, "II": qs.cond_ii.passed, "III": qs.cond_iii.passed, "summary": qs.summary()},
        "applicable": report.applicable,
        "curves": [
            {"v": c.v, "support": [format_monomial(m) for m in c.support], "irreducible": str(c.irreducible),
             "smooth_off_sing": bool(c.smooth_outside_sing)}
            for c in report.curves
        ],
        "smooth": None,
        "singular": [],
        "verdict": {"assumptions": list(v.assumptions), "borderline": list(v.borderline), "reasons": list(v.reasons)},
        "trace": [t.as_dict() for t in report.trace],
    }
    if mode in ("tiger", "both"):
        out["verdict"]["tiger"] = v.tiger_free
        out["verdict"]["tiger_witness"] = v.tiger_witness
    if mode in ("ke", "both"):
        out["verdict"]["ke"] = v.ke
    sm = report.smooth
    if sm is not None:
        out["smooth"] = {
            "overall": fmt(sm.overall) if sm.ok else None,
            "strategies": [{"avoid": x.avoid, "projection": x.projection, "l": x.l, "bound": fmt(x.bound)} for x in sm.strategies],
            "boundary": [{"v": b.v, "bound": fmt(b.value)} for b in sm.boundary],
            "leftover": list(sm.leftover),
        }
    for b in report.singular:
        p = b.point
        entry: dict = {"point": p.label, "index": p.index, "count": p.count, "basic": fmt(b.basic), "best": fmt(b.best),
                       "refined": None, "lct_path": None}
        if b.refined:
            r = b.refined
            entry["refined"] = {"v": r.v, "m": r.m, "bprime": fmt(r.bprime), "bound": fmt(r.value)}
        if b.lct_path:
            lp = b.lct_path
            entry["lct_path"] = {"v": lp.v, "m": lp.m, "lct": fmt(lp.lct), "bprime": fmt(lp.bprime),
                                 "method": lp.method, "passed": lp.passed}
        out["singular"].append(entry)
    return out


def render_text(report: CertReport, mode: str = "both", trace: bool = False, note: str | None = None) -> str:
    s = report.surface
    v = report.verdict
    lines = [s.describe()]
    if note:
        lines.append(f"note: {note}")
    lines.append(f"quasi-smooth conditions I/II/III: {report.quasismooth.summary()}")
    if report.applicable:
        for c in report.curves:
            lines.append("  " + c.describe())
        sm = report.smooth
        if sm is not None and sm.ok:
            parts = [f"avoid x{x.avoid}, project from P{x.projection}, l={x.l}: {fmt(x.bound)}" for x in sm.strategies]
            parts += [f"boundary (x{b.v}=0): {fmt(b.value)}" for b in sm.boundary]
            lines.append(f"smooth points: {fmt(sm.overall)} via " + "; ".join(parts)
                         + f"; leftover {{{', '.join(sm.leftover) or 'none'}}}")
        else:
            lines.append("smooth points: no certified cover")
        for b in report.singular:
            line = f"{b.point.describe()}: chart estimate {fmt(b.basic)}"
            if b.refined:
                r = b.refined
                line += f"; refined along (x{r.v}=0): m={r.m}, B'={fmt(r.bprime)}, bound {fmt(r.value)}"
            if b.lct_path:
                lp = b.lct_path
                line += (f"; lct along (x{lp.v}=0) = {fmt(lp.lct)} ({lp.method}), B'={fmt(lp.bprime)}, "
                         f"{'pass' if lp.passed else 'fail'}")
            lines.append("  " + line)
    if mode in ("tiger", "both"):
        w = f" ({v.tiger_witness} is a tiger)" if v.tiger_witness else ""
        lines.append(f"verdict no-tiger: {v.tiger_free}{w}")
    if mode in ("ke", "both"):
        lines.append(f"verdict KE: {v.ke}")
    for b in v.borderline:
        lines.append(f"borderline: {b}")
    for r in v.reasons:
        lines.append(f"reason: {r}")
    for a in v.assumptions:
        lines.append(f"assumes: {a}")
    if trace:
        lines.append("trace:")
        lines.extend("  " + t.render() for t in report.trace)
    return "\n".join(lines) + "\n"


def _inspect(surface: Surface, note: str | None) -> str:
    """Degree other than the anticanonical one: report structure only."""
    lines = [f"{surface.describe()} (not anticanonical: inspection only, no certification)"]
    if note:
        lines.append(f"note: {note}")
    lines.append(f"monomials: {len(surface.support)}")
    lines.append(f"quasi-smooth conditions I/II/III: {check_quasismooth(surface).summary()}")
    try:
        pts = singular_points(surface)
        lines.append("singular points: " + (", ".join(p.describe() for p in pts) or "none"))
    except NonIsolatedSingularities as exc:
        lines.append(f"singular points: non-isolated ({exc})")
    for v in INDICES:
        lines.append("  " + boundary_curve(surface, v).describe())
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ commands


def cmd_analyze(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    try:
        ws = normalize_weights(args.weights, args.degree)
        explicit: dict = {}
        for m, c in args.coeff:
            if m in explicit:
                raise ValueError(f"--coeff given twice for {','.join(map(str, m))}")
            explicit[m] = c
        surface = Surface.from_weights(args.weights, ws.d, args.zero_coeff, explicit)
    except (WeightError, ValueError) as exc:
        hint = "" if list(args.weights) == sorted(args.weights) else " (monomials shown in sorted weight order)"
        print(f"error: {exc}{hint}", file=sys.stderr)
        return EXIT_USAGE
    note = _order_note(args.weights, ws.q)
    if not ws.anticanonical:
        if args.format == "json":
            print("error: --format json needs the anticanonical degree", file=sys.stderr)
            return EXIT_USAGE
        out.write(_inspect(surface, note))
        return EXIT_OK
    try:
        report = certify(surface)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except NotAnticanonical as exc:  # pragma: no cover - guarded above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        out.write(json.dumps(report_dict(report, args.mode, note), indent=1) + "\n")
    else:
        out.write(render_text(report, args.mode, args.trace, note))
    return EXIT_OK


def cmd_search(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    if args.max_weight < 1:
        print("error: --max-weight must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    results = search.run_batch(args.max_weight, args.quasismooth_only, args.jobs or os.cpu_count())
    if args.out:
        try:
            search.persist(results, args.out, args.format)
        except search.PersistError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"wrote {len(results)} candidates to {args.out}", file=sys.stderr)
    else:
        out.write(search.dumps(results, args.format))
    return EXIT_OK


def cmd_monomials(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    try:
        q = normalize_weights(args.weights).q
    except WeightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.degree < 0:
        print("error: --degree must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    note = _order_note(args.weights, q)
    if note:
        print(f"note: {note}", file=sys.stderr)
    mons = enumerate_monomials(WeightSystem(q, args.degree), args.degree, args.support)
    out.write(", ".join(format_monomial(m) for m in mons) + "\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    handler = {"analyze": cmd_analyze, "search": cmd_search, "monomials": cmd_monomials}[args.command]
    return handler(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
