"""Well-typed IPL trees.

Expressions carry two type indices: ``cur_ty`` (the type of the syntactic
form) and ``res_ty`` (the type after evaluation). A variable of type nat at
label ``a`` has ``cur_ty = TVid(a)`` and ``res_ty = TNat``. Constructors
validate the indices, so an ill-typed tree cannot be built.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from ..mem import LabelAddress

__all__ = [
    "TNat", "TBool", "TVid", "Ty", "NAT", "BOOL", "VNat", "VBool", "Lit", "lit_type",
    "Bop", "Const", "Var", "Binop", "TypedExpr", "If", "Assign", "Seq", "Snil",
    "Throw", "While", "TypedStmt", "InvariantError", "seq_of", "flatten",
]


class InvariantError(TypeError):
    """A typed-tree constructor received inconsistent type indices."""


@dataclass(frozen=True)
class TNat:
    def __str__(self) -> str:
        return "nat"


@dataclass(frozen=True)
class TBool:
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class TVid:
    label: Optional[LabelAddress]

    def __str__(self) -> str:
        return f"vid({self.label})"


Ty = Union[TNat, TBool, TVid]
NAT = TNat()
BOOL = TBool()


@dataclass(frozen=True)
class VNat:
    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, int) or self.value < 0:
            raise InvariantError(f"VNat needs a natural number, got {self.value!r}")


@dataclass(frozen=True)
class VBool:
    value: bool

    def __post_init__(self) -> None:
        if not isinstance(self.value, bool):
            raise InvariantError(f"VBool needs a boolean, got {self.value!r}")


Lit = Union[VNat, VBool]


def lit_type(lit: Lit) -> Ty:
    return NAT if isinstance(lit, VNat) else BOOL


class Bop(enum.Enum):
    EQ_NAT = ("==", NAT, BOOL)
    PLUS_NAT = ("+", NAT, NAT)
    SUB_NAT = ("-", NAT, NAT)
    OR_BOOL = ("||", BOOL, BOOL)
    AND_BOOL = ("&&", BOOL, BOOL)

    def __init__(self, symbol: str, operand_ty: Ty, result_ty: Ty):
        self.symbol = symbol
        self.operand_ty = operand_ty
        self.result_ty = result_ty

    @classmethod
    def from_symbol(cls, symbol: str) -> Bop:
        for bop in cls:
            if bop.symbol == symbol:
                return bop
        raise KeyError(symbol)


def _fill(node, cur: Ty, res: Ty) -> None:
    for name, want in (("cur_ty", cur), ("res_ty", res)):
        got = getattr(node, name)
        if got is None:
            object.__setattr__(node, name, want)
        elif got != want:
            raise InvariantError(f"{type(node).__name__}: {name} is {got}, expected {want}")


@dataclass(frozen=True)
class Const:
    lit: Lit
    cur_ty: Optional[Ty] = None
    res_ty: Optional[Ty] = None

    def __post_init__(self) -> None:
        t = lit_type(self.lit)
        _fill(self, t, t)


@dataclass(frozen=True)
class Var:
    name: str
    label: Optional[LabelAddress]
    declared_ty: Ty
    cur_ty: Optional[Ty] = None
    res_ty: Optional[Ty] = None

    def __post_init__(self) -> None:
        if isinstance(self.declared_ty, TVid):
            raise InvariantError("a variable cannot be declared with an address type")
        _fill(self, TVid(self.label), self.declared_ty)


@dataclass(frozen=True)
class Binop:
    bop: Bop
    left: "TypedExpr"
    right: "TypedExpr"
    cur_ty: Optional[Ty] = None
    res_ty: Optional[Ty] = None

    def __post_init__(self) -> None:
        for side in (self.left, self.right):
            if side.res_ty != self.bop.operand_ty:
                raise InvariantError(
                    f"operator {self.bop.symbol} needs {self.bop.operand_ty} operands, got {side.res_ty}")
        _fill(self, self.bop.result_ty, self.bop.result_ty)


TypedExpr = Union[Const, Var, Binop]


def _need_bool(cond: TypedExpr, what: str) -> None:
    if cond.res_ty != BOOL:
        raise InvariantError(f"{what} condition has type {cond.res_ty}, expected bool")


@dataclass(frozen=True)
class If:
    cond: TypedExpr
    then: "TypedStmt"
    orelse: "TypedStmt"

    def __post_init__(self) -> None:
        _need_bool(self.cond, "if")


@dataclass(frozen=True)
class Assign:
    lhs: Var
    rhs: TypedExpr

    def __post_init__(self) -> None:
        if not isinstance(self.lhs, Var):
            raise InvariantError("assignment target must be a variable")
        if self.rhs.res_ty != self.lhs.res_ty:
            raise InvariantError(f"cannot assign {self.rhs.res_ty} to {self.lhs.res_ty} variable")


@dataclass(frozen=True)
class Seq:
    first: "TypedStmt"
    second: "TypedStmt"


@dataclass(frozen=True)
class Snil:
    pass


@dataclass(frozen=True)
class Throw:
    pass


@dataclass(frozen=True)
class While:
    cond: TypedExpr
    body: "TypedStmt"
    label: str = field(default="loop1")

    def __post_init__(self) -> None:
        _need_bool(self.cond, "while")


TypedStmt = Union[If, Assign, Seq, Snil, Throw, While]


def seq_of(stmts: list[TypedStmt]) -> TypedStmt:
    """Fold a statement list: ``[]`` is Snil, a single statement stands alone,
    longer lists become a right-nested Seq chain closed by Snil."""
    if not stmts:
        return Snil()
    if len(stmts) == 1:
        return stmts[0]
    out: TypedStmt = Snil()
    for s in reversed(stmts):
        out = Seq(s, out)
    return out


def flatten(s: TypedStmt) -> list[TypedStmt]:
    """Statements along the right spine of a Seq chain (inverse of seq_of)."""
    out = []
    while isinstance(s, Seq):
        out.append(s.first)
        s = s.second
    if not isinstance(s, Snil):
        out.append(s)
    return out
