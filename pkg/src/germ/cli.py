"""``germ`` command line: gen-layout, parse, run, check.

Exit codes: 0 success (or PASS), 1 FAIL/UNDECIDED, 2 usage, input or type errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .evi.check import check_spec, prepare
from .evi.spec import AllocationError, SpecError, SpecParseError, build_precondition, load_spec
from .interp import BreakpointDump, ThrowRaised, run_program
from .ipl.pretty import pretty
from .ipl.syntax import ParseError, parse_program
from .ipl.typecheck import DeclarationError, IplTypeError, typecheck
from .layout import LayoutParseError, Requirements, DEFAULT_SPECIALS, generate_layout, serialize_layout
from .mem import LayoutError
from .render import color_enabled, render_memory
from .report import build_report

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class _Usage(Exception):
    pass


def _err(msg: str) -> int:
    print(f"germ: {msg}", file=sys.stderr)
    return EXIT_ERROR


def _describe(exc: Exception, spec_path: Optional[Path] = None) -> str:
    """Distinct message per failure kind."""
    if isinstance(exc, SpecParseError):
        return f"spec parse error in {spec_path}: {exc}"
    if isinstance(exc, AllocationError):
        return f"allocation error: {exc}"
    if isinstance(exc, SpecError):
        return f"spec error: {exc}"
    if isinstance(exc, LayoutParseError):
        return f"layout parse error: {exc}"
    if isinstance(exc, ParseError):
        return f"program parse error: {exc}"
    if isinstance(exc, IplTypeError):
        return f"type error: {exc}"
    if isinstance(exc, FileNotFoundError):
        return f"file not found: {exc.filename}"
    return f"{type(exc).__name__}: {exc}"


_INPUT_ERRORS = (SpecError, LayoutParseError, LayoutError, ParseError, IplTypeError,
                 DeclarationError, OSError, UnicodeDecodeError)


def cmd_gen_layout(args: argparse.Namespace) -> int:
    if args.size < 1:
        return _err(f"--size must be positive, got {args.size}")
    specials = DEFAULT_SPECIALS + tuple(args.special or ())
    try:
        layout = generate_layout(Requirements(args.size, specials))
    except LayoutError as exc:
        return _err(f"invalid layout: {exc}")
    text = serialize_layout(layout)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            return _err(f"cannot write {args.output}: {exc.strerror}")
    return EXIT_OK


def cmd_parse(args: argparse.Namespace) -> int:
    try:
        source = Path(args.program).read_text(encoding="utf-8")
        program = parse_program(source)
        typed = None
        if args.spec is not None:
            typed = typecheck(program, prepare(load_spec(args.spec)).table)
    except _INPUT_ERRORS as exc:
        return _err(_describe(exc, Path(args.spec) if args.spec else None))
    if typed is not None:
        print(pretty(typed).rstrip("\n"))
    else:
        print(f"parsed {len(program.stmts)} top-level statements")
    return EXIT_OK


def _parse_bindings(pairs: Sequence[str], kinds: dict[str, str]) -> dict[str, object]:
    out: dict[str, object] = {}
    for pair in pairs:
        name, sep, raw = pair.partition("=")
        name, raw = name.strip(), raw.strip()
        if not sep or not name:
            raise _Usage(f"--bind expects sym=value, got {pair!r}")
        if name not in kinds:
            raise _Usage(f"unknown symbol {name!r}")
        if name in out:
            raise _Usage(f"symbol {name!r} bound twice")
        if kinds[name] == "bool":
            if raw not in ("true", "false"):
                raise _Usage(f"symbol {name!r} is bool, got {raw!r}")
            out[name] = raw == "true"
        else:
            if not raw.isdigit():
                raise _Usage(f"symbol {name!r} is nat, got {raw!r}")
            out[name] = int(raw)
    missing = [n for n in kinds if n not in out]
    if missing:
        raise _Usage(f"unbound symbol(s): {', '.join(missing)}")
    return out


def cmd_run(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    try:
        spec = load_spec(spec_path)
        ctx = prepare(spec, args.fuel)
        binding = _parse_bindings(args.bind or [], {n: s.kind for n, s in ctx.symbols.items()})
        pre, table = build_precondition(spec, ctx.layout, ctx.cfg, binding)
        program = typecheck(parse_program(spec.program_path.read_text(encoding="utf-8")), table)
        outcome = run_program(ctx.cfg, pre, program, args.brk)
    except _Usage as exc:
        return _err(str(exc))
    except _INPUT_ERRORS as exc:
        return _err(_describe(exc, spec_path))
    except ValueError as exc:  # breakpoint out of range
        return _err(str(exc))
    color = color_enabled(sys.stdout)
    for e in outcome.diagnostics:
        if isinstance(e, BreakpointDump):
            print(f"breakpoint after statement {e.index}:")
            print(render_memory(e.memory, table, color))
            print()
    for e in outcome.diagnostics:
        if not isinstance(e, BreakpointDump):
            print(f"diagnostic: {type(e).__name__} at {e.stmt}"
                  + (f": {e.reason}" if hasattr(e, "reason") else ""))
    if outcome.has(ThrowRaised):
        print("reverted: true")
    print("final memory:")
    print(render_memory(outcome.memory, table, color))
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    start = time.perf_counter()
    try:
        spec = load_spec(spec_path)
        ctx = prepare(spec, args.fuel)
        verdict = check_spec(ctx)
    except _INPUT_ERRORS as exc:
        return _err(_describe(exc, spec_path))
    report = build_report(str(spec_path), verdict, ctx.table, time.perf_counter() - start)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_text(color_enabled(sys.stdout)))
    return EXIT_OK if report.overall == "PASS" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="germ", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-layout", help="write a memory layout file")
    g.add_argument("--size", type=int, required=True, help="number of normal blocks")
    g.add_argument("--special", action="append", metavar="NAME",
                   help="extra special block (repeatable)")
    g.add_argument("-o", "--output", metavar="FILE", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen_layout)

    pa = sub.add_parser("parse", help="parse a program; typecheck and pretty-print with --spec")
    pa.add_argument("program")
    pa.add_argument("--spec", help="spec whose declarations typecheck the program")
    pa.set_defaults(func=cmd_parse)

    r = sub.add_parser("run", help="run a spec's program on concrete inputs")
    r.add_argument("--spec", required=True)
    r.add_argument("--bind", action="extend", nargs="+", metavar="SYM=VALUE")
    r.add_argument("--break", dest="brk", type=int, metavar="N",
                   help="dump memory after the N-th top-level statement")
    r.add_argument("--fuel", type=int, help="override the spec file's fuel")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="check a program against its spec")
    c.add_argument("--spec", required=True)
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.add_argument("--fuel", type=int, help="override the spec file's fuel")
    c.set_defaults(func=cmd_check)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "fuel", None) is not None and args.fuel < 0:
        return _err("--fuel must be a natural number")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
