"""Render typed trees back to surface syntax."""
from __future__ import annotations

from .typed import (Assign, Binop, Bop, Const, If, Seq, Snil, Throw, TypedExpr, TypedStmt,
                    VBool, Var, While, flatten)

__all__ = ["pretty", "pretty_expr"]

_LEVEL = {Bop.OR_BOOL: 1, Bop.AND_BOOL: 2, Bop.EQ_NAT: 3, Bop.PLUS_NAT: 4, Bop.SUB_NAT: 4}
_ATOM = 5


def _level(e: TypedExpr) -> int:
    return _LEVEL[e.bop] if isinstance(e, Binop) else _ATOM


def pretty_expr(e: TypedExpr) -> str:
    if isinstance(e, Const):
        if isinstance(e.lit, VBool):
            return "true" if e.lit.value else "false"
        return str(e.lit.value)
    if isinstance(e, Var):
        return e.name
    level = _LEVEL[e.bop]
    left = pretty_expr(e.left)
    right = pretty_expr(e.right)
    # left-associative operators; '==' does not chain at all
    if _level(e.left) < level or (e.bop is Bop.EQ_NAT and _level(e.left) <= level):
        left = f"({left})"
    if _level(e.right) <= level:
        right = f"({right})"
    return f"{left} {e.bop.symbol} {right}"


class _Printer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.loops = 0

    def block(self, s: TypedStmt, depth: int) -> None:
        for item in flatten(s):
            self.stmt(item, depth)

    def stmt(self, s: TypedStmt, depth: int) -> None:
        pad = "    " * depth
        if isinstance(s, Snil):
            self.lines.append(pad + "skip;")
        elif isinstance(s, Throw):
            self.lines.append(pad + "throw;")
        elif isinstance(s, Assign):
            self.lines.append(f"{pad}{s.lhs.name} = {pretty_expr(s.rhs)};")
        elif isinstance(s, If):
            self.lines.append(f"{pad}if ({pretty_expr(s.cond)}) {{")
            self.block(s.then, depth + 1)
            if flatten(s.orelse):
                self.lines.append(pad + "} else {")
                self.block(s.orelse, depth + 1)
            self.lines.append(pad + "}")
        elif isinstance(s, While):
            self.loops += 1
            label = "" if s.label == f"loop{self.loops}" else f"{s.label}: "
            self.lines.append(f"{pad}{label}while ({pretty_expr(s.cond)}) {{")
            self.block(s.body, depth + 1)
            self.lines.append(pad + "}")
        elif isinstance(s, Seq):
            self.block(s, depth)
        else:
            raise TypeError(f"not a statement: {s!r}")


def pretty(stmt: TypedStmt) -> str:
    p = _Printer()
    p.block(stmt, 0)
    if not p.lines:
        p.lines.append("skip;")
    return "\n".join(p.lines) + "\n"
