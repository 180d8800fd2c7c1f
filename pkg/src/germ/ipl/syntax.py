"""Lexer, untyped AST and recursive-descent parser for the IPL surface syntax.

Grammar::

    program := stmt*
    stmt    := "if" "(" expr ")" block ("else" block)?
             | (ident ":")? "while" "(" expr ")" block
             | expr "=" expr ";"
             | "throw" ";" | "skip" ";"
    block   := "{" stmt* "}"
    expr    := and ("||" and)*
    and     := eq ("&&" eq)*
    eq      := add ("==" add)?
    add     := atom (("+" | "-") atom)*
    atom    := nat | "true" | "false" | ident | "(" expr ")"

The assignment target is parsed as a full expression so that non-variable
targets reach the typechecker and are rejected there with a type error.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

__all__ = [
    "Pos", "ParseError", "Token", "tokenize", "NumLit", "BoolLit", "Name", "BinOp",
    "IfStmt", "WhileStmt", "AssignStmt", "ThrowStmt", "SkipStmt", "Program",
    "parse_program", "parse_expr",
]


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class ParseError(SyntaxError):
    def __init__(self, message: str, pos: Pos):
        super().__init__(f"{pos}: {message}")
        self.message = message
        self.pos = pos
        self.lineno = pos.line
        self.offset = pos.col


KEYWORDS = {"if", "else", "while", "throw", "skip", "true", "false"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(\#|//)[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|\|\||&&|[(){};=+\-:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "kw", "op", "eof"
    text: str
    pos: Pos


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        pos = Pos(line, i - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, pos))
        elif kind in ("num", "op"):
            tokens.append(Token(kind, text, pos))
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return tokens


# -- untyped AST ---------------------------------------------------------------

_NOPOS = Pos(0, 0)


@dataclass(frozen=True)
class NumLit:
    value: int
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=_NOPOS, compare=False)


Expr = Union[NumLit, BoolLit, Name, BinOp]


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] = ()
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class WhileStmt:
    cond: Expr
    body: tuple["Stmt", ...]
    label: str
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class AssignStmt:
    target: Expr
    value: Expr
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class ThrowStmt:
    pos: Pos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class SkipStmt:
    pos: Pos = field(default=_NOPOS, compare=False)


Stmt = Union[IfStmt, WhileStmt, AssignStmt, ThrowStmt, SkipStmt]


@dataclass(frozen=True)
class Program:
    stmts: tuple[Stmt, ...]


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, allow_while: bool):
        self.toks = tokenize(source)
        self.i = 0
        self.allow_while = allow_while
        self.loop_count = 0
        self.labels: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.describe(self.tok)}", self.tok.pos)
        return self.advance()

    @staticmethod
    def describe(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def program(self) -> Program:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.stmt())
        return Program(tuple(stmts))

    def block(self) -> tuple[Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise ParseError("unterminated block, expected '}'", self.tok.pos)
            stmts.append(self.stmt())
        self.expect("}")
        return tuple(stmts)

    def stmt(self) -> Stmt:
        tok = self.tok
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            orelse: tuple[Stmt, ...] = ()
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return IfStmt(cond, then, orelse, tok.pos)
        if tok.kind == "ident" and self.peek().kind == "op" and self.peek().text == ":":
            self.advance()
            self.advance()
            if not self.at("while"):
                raise ParseError("a label must be followed by 'while'", self.tok.pos)
            return self.while_stmt(tok.text, tok.pos)
        if self.at("while"):
            return self.while_stmt(None, tok.pos)
        if self.at("throw") or self.at("skip"):
            self.advance()
            self.expect(";")
            return ThrowStmt(tok.pos) if tok.text == "throw" else SkipStmt(tok.pos)
        if tok.kind == "eof":
            raise ParseError("expected a statement, found end of input", tok.pos)
        target = self.expr()
        self.expect("=")
        value = self.expr()
        self.expect(";")
        return AssignStmt(target, value, tok.pos)

    def while_stmt(self, label: Optional[str], pos: Pos) -> WhileStmt:
        if not self.allow_while:
            raise ParseError("'while' is not part of the strict language", self.tok.pos)
        self.advance()
        self.loop_count += 1
        label = label or f"loop{self.loop_count}"
        if label in self.labels:
            raise ParseError(f"duplicate loop label {label!r}", pos)
        self.labels.add(label)
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        return WhileStmt(cond, self.block(), label, pos)

    def expr(self) -> Expr:
        left = self.and_expr()
        while self.at("||"):
            op = self.advance()
            left = BinOp("||", left, self.and_expr(), op.pos)
        return left

    def and_expr(self) -> Expr:
        left = self.eq_expr()
        while self.at("&&"):
            op = self.advance()
            left = BinOp("&&", left, self.eq_expr(), op.pos)
        return left

    def eq_expr(self) -> Expr:
        left = self.add_expr()
        if self.at("=="):
            op = self.advance()
            left = BinOp("==", left, self.add_expr(), op.pos)
        return left

    def add_expr(self) -> Expr:
        left = self.atom()
        while self.at("+") or self.at("-"):
            op = self.advance()
            left = BinOp(op.text, left, self.atom(), op.pos)
        return left

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return NumLit(int(tok.text), tok.pos)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.pos)
        if tok.kind == "ident":
            self.advance()
            return Name(tok.text, tok.pos)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"expected an expression, found {self.describe(tok)}", tok.pos)


def parse_program(source: str, allow_while: bool = True) -> Program:
    """Parse IPL source. ``allow_while=False`` restricts to the loop-free core."""
    return _Parser(source, allow_while).program()


def parse_expr(source: str) -> Expr:
    p = _Parser(source, True)
    e = p.expr()
    if p.tok.kind != "eof":
        raise ParseError(f"unexpected {p.describe(p.tok)} after expression", p.tok.pos)
    return e
