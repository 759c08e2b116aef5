"""Command line front end.

Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 domain error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import harness, ifs, moments
from .expr import ParseError, parse_expr, parse_pvector
from .numerics import MWError, dyadic_grid, format_rational, is_dyadic, parse_rational
from .solutions import eval_solution, eval_solution_enclosed

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4
LEVEL_CAP = harness.GRID_LEVEL_CAP
DIGITS_CAP = 4096


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> tuple[Fraction, ...]:
    return tuple(_rational_arg(t) for t in text.split(","))


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _capped(cap: int, low: int = 0):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if not low <= value <= cap:
            raise argparse.ArgumentTypeError(f"must be in {low}..{cap}")
        return value
    return parse


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _float(x: Fraction) -> str:
    return repr(float(x))


def cmd_eval(args) -> int:
    s = parse_expr(args.expr)
    x = _parse_point(args.x)
    if is_dyadic(x) and args.digits is None:
        try:
            value = eval_solution(s, x)
        except MWError:
            value = None
        if value is not None:
            if args.format == "json":
                _emit(json.dumps({"x": format_rational(x), "value": format_rational(value)}, sort_keys=True) + "\n", None)
            else:
                print(format_rational(value))
            return EXIT_OK
    enc = eval_solution_enclosed(s, x, args.digits or 32)
    if args.format == "json":
        payload = {"x": format_rational(x), "lo": format_rational(enc.lo), "hi": format_rational(enc.hi),
                   "width": format_rational(enc.width), "quadrature_tol": enc.quadrature_tol}
        _emit(json.dumps(payload, sort_keys=True) + "\n", None)
    elif enc.is_exact:
        print(format_rational(enc.lo))
    else:
        print(str(enc))
    return EXIT_OK


def _parse_point(text: str) -> Fraction:
    try:
        x = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad point {text!r}", 0, text) from None
    return x


def cmd_table(args) -> int:
    s = parse_expr(args.expr)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x_num", "x_den", "value_num", "value_den", "value_float"])
    for x in dyadic_grid(args.level):
        try:
            v = eval_solution(s, x)
        except MWError:
            v = eval_solution_enclosed(s, x, args.digits).midpoint
        writer.writerow([x.numerator, x.denominator, v.numerator, v.denominator, _float(v)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    groups = harness.GROUPS if args.suite == "all" else (args.suite,)
    cfg = harness.PaperSuiteConfig(
        m_values=args.m, p_values=args.p, level=args.level, N=args.N,
        seed=args.seed, samples=args.samples, groups=groups, mutate=args.mutate,
    )
    report = harness.verify_paper_suite(cfg)
    _emit(report.to_json() if args.format == "json" else report.to_text(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_attractor(args) -> int:
    P = parse_pvector(args.P)
    A = ifs.attractor_approx(P, args.n)
    if args.format == "text":
        text = str(A) + "\n"
    else:
        text = "lo_num,lo_den,hi_num,hi_den\n" + "".join(row + "\n" for row in A.csv_rows())
    _emit(text, args.out)
    return EXIT_OK


def cmd_moments(args) -> int:
    s = parse_expr(args.expr)
    c = moments.sequence_moments(s, args.N)
    if args.limit:
        L = moments.limit_condition_partial_sums(c)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "L_num", "L_den", "L_float"])
        for n, v in enumerate(L):
            writer.writerow([n, v.numerator, v.denominator, _float(v)])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK
    table = moments.complete_monotonicity_table(c, args.K, args.Nmax)
    if args.format == "text":
        lines = ["c = " + ", ".join(moments.format_sequence(c))]
        if c.tolerance:
            lines.append(f"quadrature tolerance {c.tolerance:.3g}")
        for k, n, v in table.negative()[:10]:
            lines.append(f"Delta({k},{n}) = {format_rational(v)} < 0")
        lines.append(f"verdict: {table.verdict} ({table.tested})")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(table.to_csv(), args.out)
        print(f"verdict: {table.verdict} ({table.tested})", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwproblem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate an expression at a point")
    p.add_argument("expr")
    p.add_argument("x", help="point, e.g. 3/2^4, 1/3 or 0.9")
    p.add_argument("--digits", type=_capped(DIGITS_CAP, 1), default=None,
                   help="digit budget; forces the enclosure path (default 32 for non-dyadic x)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("table", help="tabulate an expression on the dyadic grid as CSV")
    p.add_argument("expr")
    p.add_argument("--level", type=_capped(LEVEL_CAP), default=8)
    p.add_argument("--digits", type=_capped(DIGITS_CAP, 1), default=32)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", choices=("all",) + harness.GROUPS, default="all")
    p.add_argument("--m", type=_int_list, default=(2, 3))
    p.add_argument("--p", type=_rational_list, default=(Fraction(1, 3), Fraction(1, 2), Fraction(3, 4)))
    p.add_argument("--level", type=_capped(LEVEL_CAP), default=8)
    p.add_argument("--N", type=_capped(256, 2), default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=_capped(100000, 0), default=200)
    p.add_argument("--mutate", choices=harness.MUTATIONS)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("attractor", help="intervals of the n-th attractor approximation")
    p.add_argument("P", help="m=2:K=2,3 or m=2:P=0,0,1/3,2/3")
    p.add_argument("n", type=_capped(64))
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("moments", help="difference table of the dyadic samples / moments")
    p.add_argument("expr")
    p.add_argument("--N", type=_capped(512), default=24)
    p.add_argument("--K", type=int)
    p.add_argument("--Nmax", type=int)
    p.add_argument("--limit", action="store_true", help="print L(n) instead of the table")
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_moments)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        if exc.text:
            print(f"  {exc.text}\n  {' ' * exc.position}^", file=sys.stderr)
        return EXIT_PARSE
    except MWError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
