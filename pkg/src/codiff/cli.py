"""Command-line driver: ``codiff {check,cohomology,miniversal,verify} FILE``.

Exit status is 0 on success, 2 when the mathematics rejects the input (not a
codifferential, not a deformation, no factorization), 1 on usage or parse
errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .coderiv import ResourceLimitError
from .deform import is_deformation
from .io import (NotCodifferentialError, ParseError, check_codifferential, parse_deformation,
                 parse_input, render_cohomology, run, run_cohomology, verify)

EXIT_OK, EXIT_USAGE, EXIT_REJECTED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="codiff", description="Deformations of algebras encoded as codifferentials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, order=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="algebra file, or - for standard input")
        p.add_argument("--weight-cap", type=int, help="override the file's weight_cap")
        if order:
            p.add_argument("--order", type=int, help="override the file's order")
            p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                           help="parameters from weight-2 classes only")
        p.add_argument("--format", choices=("text", "machine"), default="text")
        return p

    add("check", "test whether the operations define a codifferential", order=False)
    add("cohomology", "cohomology of the coderivation complex", order=False)
    add("miniversal", "truncated miniversal deformation")
    v = add("verify", "factor a given deformation through the miniversal one")
    v.add_argument("deformation", help="deformation file")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    out = sys.stdout
    try:
        inp = parse_input(_read(args.file))
        if args.weight_cap is not None:
            if args.weight_cap < max((p.arity for p in inp.parts), default=1):
                raise ValueError("--weight-cap is below the arity of a given operation")
            inp.weight_cap = args.weight_cap
        if getattr(args, "order", None) is not None:
            if args.order < 1:
                raise ValueError("--order must be positive")
            inp.order = args.order
        if getattr(args, "strict", None) is not None:
            inp.strict = args.strict
        if args.command == "check":
            check_codifferential(inp)
            out.write("result = codifferential\n" if args.format == "machine" else "ok: codifferential\n")
        elif args.command == "cohomology":
            out.write(render_cohomology(inp, run_cohomology(inp), args.format))
        elif args.command == "miniversal":
            out.write(run(inp).render(args.format))
        else:
            target = parse_deformation(_read(args.deformation), inp)
            if not is_deformation(target):
                print("rejected: the given deformation fails the Maurer-Cartan equation", file=sys.stderr)
                return EXIT_REJECTED
            report, res = verify(inp, target)
            if not res.success:
                print(f"rejected: no factorization found: {res.message}", file=sys.stderr)
                return EXIT_REJECTED
            if args.format == "machine":
                out.write("result = factors\n")
                for name in sorted(res.images):
                    img = res.images[name]
                    terms = " + ".join(f"{c} {target.base.names[i]}" for i, c in sorted(img.items()))
                    out.write(f"tau.{name} = {terms or '0'}\n")
            else:
                out.write("ok: the deformation is a push-out of the miniversal one\n")
                for name in sorted(res.images):
                    img = res.images[name]
                    terms = " + ".join(f"{c} {target.base.names[i]}" for i, c in sorted(img.items()))
                    out.write(f"  {name} -> {terms or '0'}\n")
    except NotCodifferentialError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_REJECTED
    except (ParseError, ValueError, OSError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
