"""Verification spec files and precondition building.

Format (UTF-8, line based, ``#`` starts a comment)::

    germ-spec v1
    layout <path>
    fuel <nat>
    program <path>
    var <ident> : <nat|bool> = <nat-literal|true|false|sym <name>>
    invariant <loop-label> : <assertion> {&& <assertion>}
    assert case <guard> : <assertion> {&& <assertion>}
    assert else : <assertion> {&& <assertion>}

Paths are relative to the spec file's directory.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from ..interp import ExecConfig, val_to_value
from ..ipl.typecheck import SymbolTable
from ..ipl.typed import BOOL, NAT, Lit, Ty, VBool, VNat
from ..layout import load_layout
from ..mem import LabelAddress, MemoryLayout, MemoryState, Value, allocate, m_init, write_dir
from .symbolic import Symbol, SymBool, SymNat

__all__ = [
    "SPEC_HEADER", "SpecError", "SpecParseError", "AllocationError", "SymInit", "VarDecl",
    "Reverted", "MemoryIsInit", "ReadEquals", "FrameExcept", "Assertion", "GAtom", "GAnd",
    "GOr", "Guard", "Case", "Spec", "parse_spec", "load_spec", "build_precondition",
    "render_assertion", "render_guard", "parse_assertions", "load_spec_layout",
]

SPEC_HEADER = "germ-spec v1"


class SpecError(ValueError):
    pass


class SpecParseError(SpecError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class AllocationError(SpecError):
    pass


@dataclass(frozen=True)
class SymInit:
    name: str


@dataclass(frozen=True)
class VarDecl:
    name: str
    ty: Ty
    init: Union[Lit, SymInit]


@dataclass(frozen=True)
class Reverted:
    pass


@dataclass(frozen=True)
class MemoryIsInit:
    pass


@dataclass(frozen=True)
class ReadEquals:
    var: str
    lit: Lit


@dataclass(frozen=True)
class FrameExcept:
    vars: tuple[str, ...]


Assertion = Union[Reverted, MemoryIsInit, ReadEquals, FrameExcept]


@dataclass(frozen=True)
class GAtom:
    sym: str
    test: str  # "zero" | "nonzero" | "true" | "false"


@dataclass(frozen=True)
class GAnd:
    left: "Guard"
    right: "Guard"


@dataclass(frozen=True)
class GOr:
    left: "Guard"
    right: "Guard"


Guard = Union[GAtom, GAnd, GOr]


@dataclass(frozen=True)
class Case:
    guard: Optional[Guard]  # None for the else case
    assertions: tuple[Assertion, ...]
    line: int = field(default=0, compare=False)

    @property
    def name(self) -> str:
        return "else" if self.guard is None else f"case {render_guard(self.guard)}"


@dataclass(frozen=True)
class Spec:
    layout_path: Path
    fuel: int
    program_path: Path
    vars: tuple[VarDecl, ...]
    cases: tuple[Case, ...]
    invariants: tuple[tuple[str, tuple[Assertion, ...]], ...] = ()

    @property
    def symbols(self) -> dict[str, Symbol]:
        """Symbols in order of first appearance, numbered from 0."""
        out: dict[str, Symbol] = {}
        for d in self.vars:
            if isinstance(d.init, SymInit):
                kind = "nat" if d.ty == NAT else "bool"
                out[d.init.name] = Symbol(len(out), d.init.name, kind)
        return out

    def var_type(self, name: str) -> Optional[Ty]:
        for d in self.vars:
            if d.name == name:
                return d.ty
        return None


# -- rendering --------------------------------------------------------------------------


def _lit_text(lit: Lit) -> str:
    if isinstance(lit, VBool):
        return "true" if lit.value else "false"
    return str(lit.value)


def render_assertion(a: Assertion) -> str:
    if isinstance(a, Reverted):
        return "reverted"
    if isinstance(a, MemoryIsInit):
        return "memory == init"
    if isinstance(a, ReadEquals):
        return f"read({a.var}) == {_lit_text(a.lit)}"
    return f"frame_except({', '.join(a.vars)})"


def render_guard(g: Guard) -> str:
    if isinstance(g, GAtom):
        return {"zero": f"{g.sym} == 0", "nonzero": f"{g.sym} != 0",
                "true": g.sym, "false": f"!{g.sym}"}[g.test]
    if isinstance(g, GAnd):
        parts = []
        for side in (g.left, g.right):
            text = render_guard(side)
            parts.append(f"({text})" if isinstance(side, GOr) else text)
        return " && ".join(parts)
    return f"{render_guard(g.left)} || {render_guard(g.right)}"


# -- parsing ------------------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(==|!=|\|\||&&|[!(),])|([A-Za-z_][A-Za-z0-9_']*)|([0-9]+))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokens(text: str, line: int) -> list[str]:
    out, i = [], 0
    text = text.rstrip()
    while i < len(text):
        m = _TOK.match(text, i)
        if m is None or m.end() == i:
            raise SpecParseError(line, f"unexpected text {text[i:].strip()!r}")
        out.append(m.group(m.lastindex))
        i = m.end()
    return out


class _Cursor:
    def __init__(self, toks: list[str], line: int):
        self.toks, self.i, self.line = toks, 0, line

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> str:
        tok = self.peek()
        if tok is None:
            raise SpecParseError(self.line, f"expected {what}, found end of line")
        self.i += 1
        return tok

    def take(self, want: str) -> str:
        tok = self.next(repr(want))
        if tok != want:
            raise SpecParseError(self.line, f"expected {want!r}, found {tok!r}")
        return tok

    def ident(self, what: str) -> str:
        tok = self.next(what)
        if not _IDENT.match(tok):
            raise SpecParseError(self.line, f"expected {what}, found {tok!r}")
        return tok

    def done(self) -> None:
        if self.peek() is not None:
            raise SpecParseError(self.line, f"unexpected {self.peek()!r}")


def _literal(tok: str, line: int) -> Lit:
    if tok == "true":
        return VBool(True)
    if tok == "false":
        return VBool(False)
    if tok.isdigit():
        return VNat(int(tok))
    raise SpecParseError(line, f"expected a literal, found {tok!r}")


def _assertion(cur: _Cursor) -> Assertion:
    tok = cur.next("an assertion")
    if tok == "reverted":
        return Reverted()
    if tok == "memory":
        cur.take("==")
        cur.take("init")
        return MemoryIsInit()
    if tok == "read":
        cur.take("(")
        name = cur.ident("a variable name")
        cur.take(")")
        cur.take("==")
        return ReadEquals(name, _literal(cur.next("a literal"), cur.line))
    if tok == "frame_except":
        cur.take("(")
        names = []
        if cur.peek() != ")":
            names.append(cur.ident("a variable name"))
            while cur.peek() == ",":
                cur.take(",")
                names.append(cur.ident("a variable name"))
        cur.take(")")
        return FrameExcept(tuple(names))
    raise SpecParseError(cur.line, f"unknown assertion {tok!r}")


def parse_assertions(text: str, line: int = 0) -> tuple[Assertion, ...]:
    cur = _Cursor(_tokens(text, line), line)
    out = [_assertion(cur)]
    while cur.peek() == "&&":
        cur.take("&&")
        out.append(_assertion(cur))
    cur.done()
    return tuple(out)


def _guard_atom(cur: _Cursor) -> GAtom:
    if cur.peek() == "!":
        cur.take("!")
        return GAtom(cur.ident("a symbol"), "false")
    sym = cur.ident("a symbol")
    if cur.peek() in ("==", "!="):
        op = cur.next("'==' or '!='")
        if cur.next("0") != "0":
            raise SpecParseError(cur.line, "nat symbols can only be compared with 0")
        return GAtom(sym, "zero" if op == "==" else "nonzero")
    return GAtom(sym, "true")


def _guard(cur: _Cursor) -> Guard:
    # && binds tighter than ||
    def conj() -> Guard:
        g: Guard = _guard_atom(cur)
        while cur.peek() == "&&":
            cur.take("&&")
            g = GAnd(g, _guard_atom(cur))
        return g

    g = conj()
    while cur.peek() == "||":
        cur.take("||")
        g = GOr(g, conj())
    return g


def _guard_atoms(g: Guard) -> list[GAtom]:
    if isinstance(g, GAtom):
        return [g]
    return _guard_atoms(g.left) + _guard_atoms(g.right)


def _split_colon(rest: str, line: int, what: str) -> tuple[str, str]:
    head, sep, tail = rest.partition(":")
    if not sep:
        raise SpecParseError(line, f"{what} needs ':' before its assertions")
    return head.strip(), tail.strip()


def parse_spec(text: str, base_dir: Union[str, Path] = ".") -> Spec:
    base = Path(base_dir)
    lines = [(i, raw.split("#", 1)[0].strip()) for i, raw in enumerate(text.splitlines(), 1)]
    lines = [(i, s) for i, s in lines if s]
    if not lines or lines[0][1] != SPEC_HEADER:
        raise SpecParseError(lines[0][0] if lines else 1, f"missing header {SPEC_HEADER!r}")
    single: dict[str, str] = {}
    vars_: list[VarDecl] = []
    cases: list[Case] = []
    invariants: list[tuple[str, tuple[Assertion, ...]]] = []
    sym_names: dict[str, str] = {}
    seen_else = False
    for line, s in lines[1:]:
        word, _, rest = s.partition(" ")
        rest = rest.strip()
        if word in ("layout", "fuel", "program"):
            if word in single:
                raise SpecParseError(line, f"duplicate {word!r} line")
            if not rest:
                raise SpecParseError(line, f"{word!r} needs a value")
            if word == "fuel" and not rest.isdigit():
                raise SpecParseError(line, f"fuel must be a natural number, got {rest!r}")
            single[word] = rest
        elif word == "var":
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(nat|bool)\s*=\s*(.+)", rest)
            if m is None:
                raise SpecParseError(line, "expected 'var <name> : <nat|bool> = <init>'")
            name, tyname, init_text = m.groups()
            ty = NAT if tyname == "nat" else BOOL
            if any(d.name == name for d in vars_):
                raise SpecParseError(line, f"variable {name!r} declared twice")
            sm = re.fullmatch(r"sym\s+([A-Za-z_][A-Za-z0-9_]*)", init_text.strip())
            if sm is not None:
                sym = sm.group(1)
                if sym in sym_names:
                    raise SpecParseError(line, f"symbol {sym!r} already used for {sym_names[sym]!r}")
                sym_names[sym] = name
                init: Union[Lit, SymInit] = SymInit(sym)
            else:
                init = _literal(init_text.strip(), line)
                if (ty == NAT) != isinstance(init, VNat):
                    raise SpecParseError(line, f"initializer of {name!r} does not match {tyname}")
            vars_.append(VarDecl(name, ty, init))
        elif word == "invariant":
            label, body = _split_colon(rest, line, "invariant")
            if not _IDENT.match(label):
                raise SpecParseError(line, f"bad loop label {label!r}")
            invariants.append((label, parse_assertions(body, line)))
        elif word == "assert":
            head, body = _split_colon(rest, line, "assert")
            assertions = parse_assertions(body, line)
            if head == "else":
                if seen_else:
                    raise SpecParseError(line, "duplicate else case")
                seen_else = True
                cases.append(Case(None, assertions, line))
            elif head.startswith("case"):
                cur = _Cursor(_tokens(head[4:], line), line)
                guard = _guard(cur)
                cur.done()
                cases.append(Case(guard, assertions, line))
            else:
                raise SpecParseError(line, "expected 'assert case <guard>' or 'assert else'")
        else:
            raise SpecParseError(line, f"unknown directive {word!r}")
    for key in ("layout", "fuel", "program"):
        if key not in single:
            raise SpecParseError(lines[-1][0], f"missing {key!r} line")
    kinds = {d.init.name: d.ty for d in vars_ if isinstance(d.init, SymInit)}
    names = {d.name: d.ty for d in vars_}
    for case in cases:
        if seen_else and case.guard is not None and case.line > next(
                c.line for c in cases if c.guard is None):
            raise SpecParseError(case.line, "case after the else case is unreachable")
        for atom in _guard_atoms(case.guard) if case.guard is not None else ():
            if atom.sym not in kinds:
                raise SpecParseError(case.line, f"undeclared symbol {atom.sym!r} in guard")
            is_nat = kinds[atom.sym] == NAT
            if is_nat != (atom.test in ("zero", "nonzero")):
                raise SpecParseError(case.line, f"guard test {render_guard(atom)!r} does not fit "
                                                f"the type of symbol {atom.sym!r}")
    all_assertions = [(c.line, c.assertions) for c in cases] + [(0, a) for _, a in invariants]
    for line, group in all_assertions:
        for a in group:
            for name in (a.vars if isinstance(a, FrameExcept) else
                         (a.var,) if isinstance(a, ReadEquals) else ()):
                if name not in names:
                    raise SpecParseError(line, f"assertion mentions undeclared variable {name!r}")
            if isinstance(a, ReadEquals) and (names[a.var] == NAT) != isinstance(a.lit, VNat):
                raise SpecParseError(line, f"literal in {render_assertion(a)!r} does not match "
                                           f"the type of {a.var!r}")
    return Spec(base / single["layout"], int(single["fuel"]), base / single["program"],
                tuple(vars_), tuple(cases), tuple(invariants))


def load_spec(path: Union[str, Path]) -> Spec:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), path.parent)


def load_spec_layout(spec: Spec) -> MemoryLayout:
    return load_layout(spec.layout_path)


def build_precondition(spec: Spec, layout: MemoryLayout, cfg: ExecConfig,
                       binding: Optional[dict[str, Union[int, bool]]] = None,
                       ) -> tuple[MemoryState, SymbolTable]:
    """Allocate and initialize one block per declared variable.

    Symbolic initializers become symbol data unless ``binding`` (symbol name
    to value) supplies a concrete value for them.
    """
    m = m_init(layout)
    table = SymbolTable()
    symbols = spec.symbols
    for d in spec.vars:
        addr = allocate(m, LabelAddress(0))
        if addr is None:
            raise AllocationError(f"no free block left for variable {d.name!r}")
        if isinstance(d.init, SymInit):
            sym = symbols[d.init.name]
            if binding is not None and d.init.name in binding:
                raw = binding[d.init.name]
                lit: Lit = VNat(raw) if d.ty == NAT else VBool(raw)
                v = val_to_value(cfg.env, cfg.blc, lit)
            else:
                data = SymNat(sym) if d.ty == NAT else SymBool(sym)
                v = Value(data, cfg.env, cfg.blc)
        else:
            v = val_to_value(cfg.env, cfg.blc, d.init)
        m = write_dir(m, addr, v)
        table.declare(d.name, addr, d.ty)
    return m, table
