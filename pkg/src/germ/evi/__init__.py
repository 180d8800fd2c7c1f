"""Symbolic execution and triple checking against spec files."""
from .check import (Fail, Pass, PathVerdict, Prepared, Undecided, Verdict, check_spec,
                    check_triple, check_with_invariant, prepare, witness_for)
from .spec import (AllocationError, Spec, SpecError, SpecParseError, build_precondition,
                   load_spec, parse_spec)
from .symbolic import (BoolIs, NatIsSucc, NatIsZero, PathCondition, PathResult, Symbol,
                       SymBool, SymMemory, SymNat, SymNatSucc, SymTerm, concretize,
                       embed_concrete, sym_exec)

__all__ = [
    "Fail", "Pass", "PathVerdict", "Prepared", "Undecided", "Verdict", "check_spec",
    "check_triple", "check_with_invariant", "prepare", "witness_for", "AllocationError",
    "Spec", "SpecError", "SpecParseError", "build_precondition", "load_spec", "parse_spec",
    "BoolIs", "NatIsSucc", "NatIsZero", "PathCondition", "PathResult", "Symbol", "SymBool",
    "SymMemory", "SymNat", "SymNatSucc", "SymTerm", "concretize", "embed_concrete", "sym_exec",
]
