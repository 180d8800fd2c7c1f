"""Typechecking: resolve names against a symbol table and build typed trees."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ..mem import LabelAddress
from . import syntax as S
from .typed import (BOOL, NAT, Assign, Binop, Bop, Const, If, Throw, Ty, TypedExpr,
                    TypedStmt, VBool, VNat, Var, While, seq_of, Snil)

__all__ = [
    "SymbolTable", "DeclarationError", "IplTypeError", "ConditionTypeError",
    "OperandTypeError", "AssignTypeError", "LvalueError", "UnknownIdentError",
    "typecheck", "typecheck_expr",
]


class DeclarationError(ValueError):
    pass


class IplTypeError(TypeError):
    def __init__(self, message: str, pos: Optional[S.Pos] = None):
        where = f"{pos}: " if pos is not None and pos.line else ""
        super().__init__(where + message)
        self.message = message
        self.pos = pos


class ConditionTypeError(IplTypeError):
    pass


class OperandTypeError(IplTypeError):
    pass


class AssignTypeError(IplTypeError):
    pass


class LvalueError(IplTypeError):
    pass


class UnknownIdentError(IplTypeError):
    pass


@dataclass(frozen=True)
class _Entry:
    label: LabelAddress
    ty: Ty


class SymbolTable:
    """Variable name -> (label, type). Injective on labels."""

    def __init__(self) -> None:
        self._entries: dict[str, _Entry] = {}
        self._by_label: dict[LabelAddress, str] = {}

    def declare(self, name: str, label: LabelAddress, ty: Ty) -> None:
        if name in self._entries:
            raise DeclarationError(f"variable {name!r} declared twice")
        if label in self._by_label:
            raise DeclarationError(f"label {label} already bound to {self._by_label[label]!r}")
        if ty not in (NAT, BOOL):
            raise DeclarationError(f"variable {name!r} must be nat or bool, got {ty}")
        self._entries[name] = _Entry(label, ty)
        self._by_label[label] = name

    def lookup(self, name: str) -> Optional[tuple[LabelAddress, Ty]]:
        entry = self._entries.get(name)
        return None if entry is None else (entry.label, entry.ty)

    def name_of(self, label: LabelAddress) -> Optional[str]:
        return self._by_label.get(label)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def items(self) -> list[tuple[str, LabelAddress, Ty]]:
        return [(n, e.label, e.ty) for n, e in self._entries.items()]


def typecheck_expr(e: S.Expr, table: SymbolTable) -> TypedExpr:
    if isinstance(e, S.NumLit):
        return Const(VNat(e.value))
    if isinstance(e, S.BoolLit):
        return Const(VBool(e.value))
    if isinstance(e, S.Name):
        found = table.lookup(e.name)
        if found is None:
            raise UnknownIdentError(f"unknown identifier {e.name!r}", e.pos)
        label, ty = found
        return Var(e.name, label, ty)
    if isinstance(e, S.BinOp):
        bop = Bop.from_symbol(e.op)
        left = typecheck_expr(e.left, table)
        right = typecheck_expr(e.right, table)
        for side, which in ((left, "left"), (right, "right")):
            if side.res_ty != bop.operand_ty:
                raise OperandTypeError(
                    f"{which} operand of {bop.symbol!r} has type {side.res_ty}, "
                    f"expected {bop.operand_ty}", e.pos)
        return Binop(bop, left, right)
    raise TypeError(f"not an expression node: {e!r}")


def _cond(e: S.Expr, table: SymbolTable, what: str, pos: S.Pos) -> TypedExpr:
    cond = typecheck_expr(e, table)
    if cond.res_ty != BOOL:
        raise ConditionTypeError(f"{what} condition must be bool, got {cond.res_ty}", pos)
    return cond


def _stmt(s: S.Stmt, table: SymbolTable) -> TypedStmt:
    if isinstance(s, S.SkipStmt):
        return Snil()
    if isinstance(s, S.ThrowStmt):
        return Throw()
    if isinstance(s, S.IfStmt):
        cond = _cond(s.cond, table, "if", s.pos)
        return If(cond, _block(s.then, table), _block(s.orelse, table))
    if isinstance(s, S.WhileStmt):
        cond = _cond(s.cond, table, "while", s.pos)
        return While(cond, _block(s.body, table), s.label)
    if isinstance(s, S.AssignStmt):
        lhs = typecheck_expr(s.target, table)
        if not isinstance(lhs, Var):
            raise LvalueError("assignment target must be a variable", s.pos)
        rhs = typecheck_expr(s.value, table)
        if rhs.res_ty != lhs.res_ty:
            raise AssignTypeError(
                f"cannot assign {rhs.res_ty} to {lhs.name!r} of type {lhs.res_ty}", s.pos)
        return Assign(lhs, rhs)
    raise TypeError(f"not a statement node: {s!r}")


def _block(stmts: tuple[S.Stmt, ...], table: SymbolTable) -> TypedStmt:
    return seq_of([_stmt(s, table) for s in stmts])


def typecheck(program: S.Program, table: SymbolTable) -> TypedStmt:
    """Typed tree for ``program``; raises an IplTypeError subclass on rejection."""
    return _block(program.stmts, table)
