"""Command-line front end.

Exit codes: 0 success, 1 verification failure or domain error, 2 usage,
file or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .atlas import check_atlas
from .errors import ParseError
from .grading import commutation_sign, parse_sign_table, realize_sign_rule, validate_commutation_factor
from .morphism import pullback
from .textio import format_session, read_atlas, read_morphism, read_session

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _order(value) -> str:
    return "inf" if value == math.inf else str(value)


def _load(args):
    sess = read_session(args.session, args.order)
    if not sess.series:
        raise _Usage(f"{args.session}: session contains no series")
    return sess


def cmd_mul(args) -> tuple[int, str]:
    sess = _load(args)
    product = sess.series[0]
    for s in sess.series[1:]:
        product = product * s
    return EXIT_OK, format_session(sess.header, [product])


def cmd_inv(args) -> tuple[int, str]:
    sess = _load(args)
    return EXIT_OK, format_session(sess.header, [s.inverse() for s in sess.series])


def cmd_pullback(args) -> tuple[int, str]:
    mf = read_morphism(args.morphism, args.order)
    sess = _load(args)
    if sess.signature != mf.morphism.target.signature:
        raise _Usage("session signature does not match the morphism target")
    images = [pullback(mf.morphism, s) for s in sess.series]
    return EXIT_OK, format_session(mf.source, images)


def cmd_decompose(args) -> tuple[int, str]:
    sess = _load(args)
    parts, comments = [], []
    for k, s in enumerate(sess.series, 1):
        for deg, comp in s.components().items():
            parts.append(comp)
            comments.append(f"series {k} degree {' '.join(map(str, deg.bits))}")
    return EXIT_OK, format_session(sess.header, parts, comments)


def cmd_approx(args) -> tuple[int, str]:
    sess = _load(args)
    return EXIT_OK, format_session(sess.header, [s.approximation(args.k) for s in sess.series])


def cmd_order(args) -> tuple[int, str]:
    sess = _load(args)
    lines = []
    for k, s in enumerate(sess.series, 1):
        if s.is_homogeneous():
            deg = " ".join(map(str, s.degree().bits)) or "-"
        else:
            deg = "inhomogeneous"
        lines.append(
            f"series {k}: j-adic {_order(s.j_adic_order())}, m-adic {_order(s.m_adic_order())}, degree {deg}"
        )
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_realize_signs(args) -> tuple[int, str]:
    table = parse_sign_table(Path(args.table).read_text(), args.table)
    if not validate_commutation_factor(table):
        return EXIT_FAIL, "FAIL table is not a symmetric sign table\n"
    assignment = realize_sign_rule(table)
    lines = [f"n = {assignment.n}"]
    for i, d in enumerate(assignment.degrees, 1):
        lines.append(f"sigma.{i} = " + " ".join(map(str, d.bits)))
    m = table.size
    bad = [
        (i, j)
        for i in range(1, m + 1)
        for j in range(1, m + 1)
        if commutation_sign(assignment.degrees[i - 1], assignment.degrees[j - 1]) != table(i, j)
    ]
    if bad:
        lines.append(f"FAIL sign rule violated at pair {bad[0]}")
        return EXIT_FAIL, "\n".join(lines) + "\n"
    lines.append(f"PASS sign rule reproduced on all {m * m} pairs")
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_check_atlas(args) -> tuple[int, str]:
    af = read_atlas(args.atlas, args.order)
    report = check_atlas(af.atlas, af.witnesses)
    return (EXIT_OK if report.passed else EXIT_FAIL), str(report) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, metavar="T", help="override the truncation order")
    common.add_argument("--output", metavar="FILE", help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="z2nsuper", description="Z_2^n-graded formal power series toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def session_cmd(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--session", required=True, metavar="FILE")
        p.set_defaults(func=func)
        return p

    session_cmd("mul", cmd_mul, "multiply the series of a session in order")
    session_cmd("inv", cmd_inv, "invert each series")
    p = session_cmd("pullback", cmd_pullback, "pull back each series along a morphism")
    p.add_argument("--morphism", required=True, metavar="FILE")
    session_cmd("decompose", cmd_decompose, "split each series into homogeneous components")
    p = session_cmd("approx", cmd_approx, "polynomial approximation to m-adic order k")
    p.add_argument("-k", type=int, required=True)
    session_cmd("order", cmd_order, "report J-adic and m-adic orders and degrees")

    p = sub.add_parser("realize-signs", parents=[common], help="realize a sign table as a grading")
    p.add_argument("table", metavar="TABLE")
    p.set_defaults(func=cmd_realize_signs)

    p = sub.add_parser("check-atlas", parents=[common], help="verify transitions, cocycles and sections")
    p.add_argument("atlas", metavar="ATLAS")
    p.set_defaults(func=cmd_check_atlas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        code, text = args.func(args)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    except (ParseError, _Usage, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
