"""The toy imperative language: syntax, typed trees, typechecking, printing."""
from .pretty import pretty, pretty_expr
from .syntax import ParseError, Pos, Program, parse_expr, parse_program
from .typecheck import (AssignTypeError, ConditionTypeError, DeclarationError, IplTypeError,
                        LvalueError, OperandTypeError, SymbolTable, UnknownIdentError,
                        typecheck, typecheck_expr)
from .typed import (BOOL, NAT, Assign, Binop, Bop, Const, If, InvariantError, Seq, Snil,
                    TBool, Throw, TNat, TVid, TypedExpr, TypedStmt, VBool, VNat, Var, While,
                    flatten, seq_of)

__all__ = [
    "pretty", "pretty_expr", "ParseError", "Pos", "Program", "parse_expr", "parse_program",
    "AssignTypeError", "ConditionTypeError", "DeclarationError", "IplTypeError",
    "LvalueError", "OperandTypeError", "SymbolTable", "UnknownIdentError", "typecheck",
    "typecheck_expr", "BOOL", "NAT", "Assign", "Binop", "Bop", "Const", "If",
    "InvariantError", "Seq", "Snil", "TBool", "Throw", "TNat", "TVid", "TypedExpr",
    "TypedStmt", "VBool", "VNat", "Var", "While", "flatten", "seq_of",
]
