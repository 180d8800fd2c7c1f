"""Symbolic execution of typed IPL programs over memories with symbolic slots.

A symbolic memory is an ordinary ``MemoryState`` whose slots may hold the
symbolic data variants defined here. All memory operations apply unchanged.

Branch conditions are split on demand: when a condition does not reduce to
a concrete boolean, the leftmost boolean symbol, or the leftmost
``n == 0`` test on a nat symbol, is destructed into its two cases. The
pinned value is substituted into the whole memory and the condition is
evaluated again. Anything the atom language cannot decide stops the path
as undecided.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

from ..interp import (BOP_HELPERS, ExecConfig, Event, FuelExhausted, SilentReadFailure,
                      StmtId, ThrowRaised, reverted, throw_set, val_to_value)
from ..ipl.typed import (Assign, Binop, Bop, Const, If, Seq, Snil, Throw, TypedExpr,
                         TypedStmt, Var, While)
from ..mem import (Bool, Data, Env, Blc, MemoryState, Nat, Policy, THROW_LABEL, THROW_SET,
                   Value, default_policy, init_mem, read_chck, write_chck, write_dir)

__all__ = [
    "Symbol", "SymBool", "SymNat", "SymNatSucc", "SymTerm", "SymMemory", "BoolIs",
    "NatIsZero", "NatIsSucc", "Atom", "PathCondition", "PathResult", "SymState",
    "SymbolicMachine", "is_symbolic", "data_kind", "known_nonzero", "apply_bop",
    "sym_expr_r", "substitute", "concretize", "embed_concrete", "sym_exec", "eq3",
    "symbols_in",
]

SymMemory = MemoryState


@dataclass(frozen=True, order=True)
class Symbol:
    id: int
    name: str = field(compare=False)
    kind: str = field(compare=False)  # "nat" | "bool"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SymBool:
    sym: Symbol


@dataclass(frozen=True)
class SymNat:
    sym: Symbol


@dataclass(frozen=True)
class SymNatSucc:
    """The nat symbol ``sym`` after it has been split off zero."""

    sym: Symbol


@dataclass(frozen=True)
class SymTerm:
    bop: Bop
    left: Data
    right: Data


SYMBOLIC = (SymBool, SymNat, SymNatSucc, SymTerm)


def is_symbolic(d: object) -> bool:
    return isinstance(d, SYMBOLIC)


def data_kind(d: object) -> str:
    """``"nat"``/``"bool"`` for data carrying a value, the class name otherwise."""
    if isinstance(d, Nat) and d.value is not None:
        return "nat"
    if isinstance(d, Bool) and d.value is not None:
        return "bool"
    if isinstance(d, SymBool):
        return "bool"
    if isinstance(d, (SymNat, SymNatSucc)):
        return "nat"
    if isinstance(d, SymTerm):
        return "bool" if d.bop.result_ty == Bop.EQ_NAT.result_ty else "nat"
    return type(d).__name__


def known_nonzero(d: object) -> bool:
    if isinstance(d, Nat):
        return d.value is not None and d.value > 0
    if isinstance(d, SymNatSucc):
        return True
    if isinstance(d, SymTerm) and d.bop is Bop.PLUS_NAT:
        return known_nonzero(d.left) or known_nonzero(d.right)
    return False


def symbols_in(d: object) -> set[Symbol]:
    if isinstance(d, (SymBool, SymNat, SymNatSucc)):
        return {d.sym}
    if isinstance(d, SymTerm):
        return symbols_in(d.left) | symbols_in(d.right)
    return set()


def _operand_kind(bop: Bop) -> str:
    return "nat" if bop in (Bop.EQ_NAT, Bop.PLUS_NAT, Bop.SUB_NAT) else "bool"


def apply_bop(bop: Bop, a: Data, b: Data) -> Optional[Data]:
    """Data-level helper. ``None`` exactly when the concrete helper fails for
    every instantiation of the symbols."""
    if not is_symbolic(a) and not is_symbolic(b):
        out = BOP_HELPERS[bop](Value(a), Value(b))
        return None if out is None else out.data
    want = _operand_kind(bop)
    if data_kind(a) != want or data_kind(b) != want:
        return None
    if bop is Bop.OR_BOOL:
        for x, y in ((a, b), (b, a)):
            if x == Bool(True):
                return Bool(True)
            if x == Bool(False):
                return y
    elif bop is Bop.AND_BOOL:
        for x, y in ((a, b), (b, a)):
            if x == Bool(False):
                return Bool(False)
            if x == Bool(True):
                return y
    elif bop is Bop.EQ_NAT:
        if a == b:
            return Bool(True)
        if (a == Nat(0) and known_nonzero(b)) or (b == Nat(0) and known_nonzero(a)):
            return Bool(False)
    return SymTerm(bop, a, b)


def sym_apply(bop: Bop, a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    if a is None or b is None:
        return None
    if not is_symbolic(a.data) and not is_symbolic(b.data):
        return BOP_HELPERS[bop](a, b)
    d = apply_bop(bop, a.data, b.data)
    return None if d is None else Value(d, a.env, a.blc)


def sym_expr_r(m: MemoryState, env: Env, blc: Blc, e: TypedExpr,
               policy: Policy = default_policy) -> Optional[Value]:
    if isinstance(e, Const):
        return val_to_value(env, blc, e.lit)
    if isinstance(e, Var):
        return None if e.label is None else read_chck(m, env, blc, e.label, policy)
    if isinstance(e, Binop):
        return sym_apply(e.bop, sym_expr_r(m, env, blc, e.left, policy),
                         sym_expr_r(m, env, blc, e.right, policy))
    raise TypeError(f"not a typed expression: {e!r}")


# -- substitution -------------------------------------------------------------------


def _subst_data(d: Data, mapping: dict[Symbol, Data]) -> Data:
    if isinstance(d, (SymBool, SymNat, SymNatSucc)):
        return mapping.get(d.sym, d)
    if isinstance(d, SymTerm):
        left = _subst_data(d.left, mapping)
        right = _subst_data(d.right, mapping)
        if left is d.left and right is d.right:
            return d
        out = apply_bop(d.bop, left, right)
        assert out is not None, "substitution preserves operand kinds"
        return out
    return d


def substitute(m: MemoryState, mapping: dict[Symbol, Data]) -> MemoryState:
    if not mapping:
        return m
    slots = []
    for v in m.slots:
        d = _subst_data(v.data, mapping)
        slots.append(v if d is v.data else Value(d, v.env, v.blc))
    return MemoryState(m.layout, tuple(slots))


def concretize(m: MemoryState, binding: dict[Symbol, Union[int, bool]]) -> MemoryState:
    """Replace every symbol by its bound value. Unbound symbols raise KeyError."""
    mapping: dict[Symbol, Data] = {}
    for v in m.slots:
        for sym in symbols_in(v.data):
            value = binding[sym]
            mapping[sym] = Bool(bool(value)) if sym.kind == "bool" else Nat(int(value))
    for v in m.slots:
        d = v.data
        if isinstance(d, SymNatSucc) and binding[d.sym] < 1:
            raise ValueError(f"{d.sym} is known nonzero but bound to {binding[d.sym]}")
    return substitute(m, mapping)


def embed_concrete(sm: SymMemory) -> Optional[MemoryState]:
    if any(is_symbolic(v.data) for v in sm.slots):
        return None
    return sm


def eq3(d1: Data, d2: Data) -> Optional[bool]:
    """Three-valued equality of possibly symbolic data."""
    if d1 == d2:
        return True
    if not is_symbolic(d1) and not is_symbolic(d2):
        return False
    if data_kind(d1) != data_kind(d2):
        return False
    if (d1 == Nat(0) and known_nonzero(d2)) or (d2 == Nat(0) and known_nonzero(d1)):
        return False
    return None


# -- path conditions -----------------------------------------------------------------


@dataclass(frozen=True)
class BoolIs:
    sym: Symbol
    value: bool

    def key(self) -> tuple[int, int]:
        return (self.sym.id, 0 if self.value else 1)

    def __str__(self) -> str:
        return self.sym.name if self.value else f"!{self.sym.name}"


@dataclass(frozen=True)
class NatIsZero:
    sym: Symbol

    def key(self) -> tuple[int, int]:
        return (self.sym.id, 0)

    def __str__(self) -> str:
        return f"{self.sym.name} == 0"


@dataclass(frozen=True)
class NatIsSucc:
    sym: Symbol

    def key(self) -> tuple[int, int]:
        return (self.sym.id, 1)

    def __str__(self) -> str:
        return f"{self.sym.name} != 0"


Atom = Union[BoolIs, NatIsZero, NatIsSucc]


@dataclass(frozen=True)
class PathCondition:
    atoms: tuple[Atom, ...] = ()

    def add(self, atom: Atom) -> PathCondition:
        for other in self.atoms:
            if other.sym == atom.sym:
                if other == atom:
                    return self
                raise ValueError(f"contradictory atoms {other} and {atom}")
        return PathCondition(tuple(sorted(self.atoms + (atom,), key=lambda a: a.key())))

    def sort_key(self) -> tuple[tuple[int, int], ...]:
        return tuple(a.key() for a in self.atoms)

    def value_of(self, sym: Symbol) -> Optional[Atom]:
        for a in self.atoms:
            if a.sym == sym:
                return a
        return None

    def holds(self, binding: dict[Symbol, Union[int, bool]]) -> bool:
        for a in self.atoms:
            v = binding[a.sym]
            if isinstance(a, BoolIs) and bool(v) != a.value:
                return False
            if isinstance(a, NatIsZero) and v != 0:
                return False
            if isinstance(a, NatIsSucc) and v == 0:
                return False
        return True

    def __str__(self) -> str:
        return " && ".join(str(a) for a in self.atoms) or "true"


# -- execution -------------------------------------------------------------------------


@dataclass(frozen=True)
class SymState:
    memory: MemoryState
    pc: PathCondition = PathCondition()
    events: tuple[Event, ...] = ()
    undecided: Optional[str] = None

    def log(self, event: Event) -> SymState:
        return replace(self, events=self.events + (event,))

    def refine(self, atom: Atom) -> SymState:
        if isinstance(atom, BoolIs):
            pinned: Data = Bool(atom.value)
        elif isinstance(atom, NatIsZero):
            pinned = Nat(0)
        else:
            pinned = SymNatSucc(atom.sym)
        return replace(self, memory=substitute(self.memory, {atom.sym: pinned}),
                       pc=self.pc.add(atom))


@dataclass(frozen=True)
class PathResult:
    condition: PathCondition
    memory: MemoryState
    reverted: bool
    diagnostics: tuple[Event, ...] = ()
    undecided: Optional[str] = None

    @property
    def fuel_exhausted(self) -> bool:
        return any(isinstance(e, FuelExhausted) for e in self.diagnostics)


def _split_atom(d: Data) -> Optional[tuple[Atom, Atom]]:
    if isinstance(d, SymBool):
        return BoolIs(d.sym, True), BoolIs(d.sym, False)
    if isinstance(d, SymTerm):
        if d.bop is Bop.EQ_NAT:
            for x, y in ((d.left, d.right), (d.right, d.left)):
                if isinstance(x, SymNat) and y == Nat(0):
                    return NatIsZero(x.sym), NatIsSucc(x.sym)
        return _split_atom(d.left) or _split_atom(d.right)
    return None


class SymbolicMachine:
    """Mirror of the concrete interpreter that forks instead of choosing."""

    def __init__(self, cfg: ExecConfig):
        self.cfg = cfg

    def branch(self, st: SymState, cond: TypedExpr,
               sid: StmtId) -> list[tuple[SymState, Optional[bool]]]:
        """Evaluate ``cond`` on every refinement of ``st`` that decides it.

        ``None`` as outcome means the condition was unreadable (the statement
        is skipped) or, when ``state.undecided`` is set, that it could not be
        decided at all.
        """
        cfg = self.cfg
        v = sym_expr_r(st.memory, cfg.env, cfg.blc, cond, cfg.policy)
        if v is None:
            return [(st.log(SilentReadFailure(sid, "condition could not be evaluated")), None)]
        d = v.data
        if isinstance(d, Bool):
            if d.value is None:
                return [(st.log(SilentReadFailure(sid, "condition holds no data")), None)]
            return [(st, d.value)]
        if data_kind(d) != "bool":
            return [(st.log(SilentReadFailure(sid, "condition is not a boolean value")), None)]
        split = _split_atom(d)
        if split is None:
            reason = f"cannot decide branch condition at statement {_sid_text(sid)}"
            return [(replace(st, undecided=reason), None)]
        out = []
        for atom in split:
            out.extend(self.branch(st.refine(atom), cond, sid))
        return out

    def exec(self, fuel: int, st: SymState, s: TypedStmt, sid: StmtId) -> list[SymState]:
        if st.undecided is not None:
            return [st]
        if fuel == 0:
            return [st.log(FuelExhausted(sid))]
        m = st.memory
        if throw_set(m):
            return [replace(st, memory=reverted(m))]
        k = fuel - 1
        if isinstance(s, Snil):
            return [st]
        if isinstance(s, Throw):
            return [replace(st.log(ThrowRaised(sid)), memory=write_dir(m, THROW_LABEL, THROW_SET))]
        if isinstance(s, Seq):
            out = []
            for st1 in self.exec(k, st, s.first, sid + (0,)):
                out.extend(self.exec(k, st1, s.second, sid + (1,)))
            return out
        if isinstance(s, If):
            out = []
            for st1, taken in self.branch(st, s.cond, sid):
                if taken is None:
                    out.append(st1)
                else:
                    out.extend(self.exec(k, st1, s.then if taken else s.orelse,
                                         sid + (int(not taken),)))
            return out
        if isinstance(s, Assign):
            return [self._assign(st, s, sid)]
        if isinstance(s, While):
            return self._while(fuel, st, s, sid)
        raise TypeError(f"not a typed statement: {s!r}")

    def _assign(self, st: SymState, s: Assign, sid: StmtId) -> SymState:
        cfg = self.cfg
        v = sym_expr_r(st.memory, cfg.env, cfg.blc, s.rhs, cfg.policy)
        if v is None:
            return st.log(SilentReadFailure(sid, "right-hand side could not be evaluated"))
        if s.lhs.label is None:
            return st.log(SilentReadFailure(sid, "assignment target has no address"))
        ok, out = write_chck(st.memory, cfg.env, cfg.blc, s.lhs.label, v, cfg.policy)
        if not ok:
            return st.log(SilentReadFailure(sid, "write refused by policy"))
        return replace(st, memory=out)

    def _while(self, fuel: int, st: SymState, s: While, sid: StmtId) -> list[SymState]:
        out: list[SymState] = []
        work = deque([(fuel, st)])
        while work:
            fuel, st = work.popleft()
            if st.undecided is not None:
                out.append(st)
                continue
            if fuel == 0:
                out.append(st.log(FuelExhausted(sid)))
                continue
            if throw_set(st.memory):
                out.append(replace(st, memory=reverted(st.memory)))
                continue
            for st1, taken in self.branch(st, s.cond, sid):
                if taken is None:
                    out.append(st1)
                elif fuel - 1 == 0:
                    out.append(st1.log(FuelExhausted(sid)))
                elif not taken:
                    out.append(st1)
                else:
                    for st2 in self.exec(fuel - 2, st1, s.body, sid + (0,)):
                        work.append((fuel - 2, st2))
        return out

    def finish(self, states: Iterable[SymState]) -> list[PathResult]:
        """Normalize thrown paths and sort into canonical order."""
        results = []
        for st in states:
            thrown = throw_set(st.memory)
            memory = init_mem(st.memory) if thrown else st.memory
            results.append(PathResult(st.pc, memory, thrown, st.events, st.undecided))
        results.sort(key=lambda r: r.condition.sort_key())
        return results


def sym_exec(cfg: ExecConfig, sm: SymMemory, s: TypedStmt,
             pc: PathCondition = PathCondition()) -> list[PathResult]:
    machine = SymbolicMachine(cfg)
    return machine.finish(machine.exec(cfg.fuel, SymState(sm, pc), s, ()))


def _sid_text(sid: StmtId) -> str:
    return "s" + "".join(f".{i}" for i in sid) if sid else "s"
