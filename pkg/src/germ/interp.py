"""Fuel-bounded concrete interpreter for typed IPL programs.

Failures never raise: a statement whose operands cannot be read or written
leaves the memory unchanged. Diagnostics record those silent outcomes so
callers can see them without changing the result.

Once the throw flag is set, every later statement returns the reverted
memory (initial memory with the flag still raised). ``run_program`` clears
the flag at the end, so a thrown run ends in exactly ``m_init``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .ipl.typed import (Assign, Binop, Bop, Const, If, Seq, Snil, Throw, TypedExpr,
                        TypedStmt, VBool, VNat, Var, While, Lit)
from .mem import (Access, Blc, Bool, DEFAULT_ENV, Env, LabelAddress, MemoryState, Nat,
                  Occupation, Policy, THROW_LABEL, THROW_SET, Value, default_policy,
                  init_mem, read_chck, read_dir, write_chck, write_dir)

__all__ = [
    "ExecConfig", "ExecOutcome", "FuelExhausted", "SilentReadFailure", "ThrowRaised",
    "BreakpointDump", "Event", "StmtId", "val_to_value", "expr_l", "expr_r", "eqb_val",
    "plus_val", "sub_val", "orb_val", "andb_val", "BOP_HELPERS", "exec_stmt", "run_program",
    "throw_set", "reverted", "top_level_ids", "DEFAULT_BLC",
]

StmtId = tuple[int, ...]
DEFAULT_BLC = Blc(Access.PUBLIC, Occupation.OCCUPIED)


@dataclass(frozen=True)
class ExecConfig:
    fuel: int
    env: Env = DEFAULT_ENV
    blc: Blc = DEFAULT_BLC
    policy: Policy = default_policy

    def __post_init__(self) -> None:
        if self.fuel < 0:
            raise ValueError("fuel must be a natural number")


@dataclass(frozen=True)
class FuelExhausted:
    stmt: StmtId


@dataclass(frozen=True)
class SilentReadFailure:
    stmt: StmtId
    reason: str


@dataclass(frozen=True)
class ThrowRaised:
    stmt: StmtId


@dataclass(frozen=True)
class BreakpointDump:
    index: int
    memory: MemoryState


Event = Union[FuelExhausted, SilentReadFailure, ThrowRaised, BreakpointDump]


@dataclass(frozen=True)
class ExecOutcome:
    memory: MemoryState
    diagnostics: tuple[Event, ...] = field(default=())

    def has(self, kind: type) -> bool:
        return any(isinstance(e, kind) for e in self.diagnostics)


# -- values and expressions --------------------------------------------------------


def val_to_value(env: Env, blc: Blc, lit: Lit) -> Optional[Value]:
    if isinstance(lit, VNat):
        return Value(Nat(lit.value), env, blc)
    if isinstance(lit, VBool):
        return Value(Bool(lit.value), env, blc)
    return None


def expr_l(e: TypedExpr) -> Optional[LabelAddress]:
    if isinstance(e, Var):
        return e.label
    return None


def _nats(a: Optional[Value], b: Optional[Value]) -> Optional[tuple[int, int]]:
    if a is None or b is None:
        return None
    if not (isinstance(a.data, Nat) and isinstance(b.data, Nat)):
        return None
    if a.data.value is None or b.data.value is None:
        return None
    return a.data.value, b.data.value


def _bools(a: Optional[Value], b: Optional[Value]) -> Optional[tuple[bool, bool]]:
    if a is None or b is None:
        return None
    if not (isinstance(a.data, Bool) and isinstance(b.data, Bool)):
        return None
    if a.data.value is None or b.data.value is None:
        return None
    return a.data.value, b.data.value


# Helper results take env/blc from the left operand.

def eqb_val(a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    pair = _nats(a, b)
    return None if pair is None else Value(Bool(pair[0] == pair[1]), a.env, a.blc)


def plus_val(a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    pair = _nats(a, b)
    return None if pair is None else Value(Nat(pair[0] + pair[1]), a.env, a.blc)


def sub_val(a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    pair = _nats(a, b)
    return None if pair is None else Value(Nat(max(pair[0] - pair[1], 0)), a.env, a.blc)


def orb_val(a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    pair = _bools(a, b)
    return None if pair is None else Value(Bool(pair[0] or pair[1]), a.env, a.blc)


def andb_val(a: Optional[Value], b: Optional[Value]) -> Optional[Value]:
    pair = _bools(a, b)
    return None if pair is None else Value(Bool(pair[0] and pair[1]), a.env, a.blc)


BOP_HELPERS = {
    Bop.EQ_NAT: eqb_val,
    Bop.PLUS_NAT: plus_val,
    Bop.SUB_NAT: sub_val,
    Bop.OR_BOOL: orb_val,
    Bop.AND_BOOL: andb_val,
}


def expr_r(m: MemoryState, env: Env, blc: Blc, e: TypedExpr,
           policy: Policy = default_policy) -> Optional[Value]:
    if isinstance(e, Const):
        return val_to_value(env, blc, e.lit)
    if isinstance(e, Var):
        if e.label is None:
            return None
        return read_chck(m, env, blc, e.label, policy)
    if isinstance(e, Binop):
        left = expr_r(m, env, blc, e.left, policy)
        right = expr_r(m, env, blc, e.right, policy)
        return BOP_HELPERS[e.bop](left, right)
    raise TypeError(f"not a typed expression: {e!r}")


# -- statements ------------------------------------------------------------------------


def throw_set(m: MemoryState) -> bool:
    return read_dir(m, THROW_LABEL).data == Bool(True)


def reverted(m: MemoryState) -> MemoryState:
    """Initial memory with the throw flag still raised."""
    return write_dir(init_mem(m), THROW_LABEL, THROW_SET)


def top_level_ids(s: TypedStmt) -> list[StmtId]:
    """Statement ids of the top-level statements, in execution order."""
    ids: list[StmtId] = []
    sid: StmtId = ()
    while isinstance(s, Seq):
        ids.append(sid + (0,))
        s, sid = s.second, sid + (1,)
    if not isinstance(s, Snil):
        ids.append(sid)
    return ids


class _Machine:
    def __init__(self, cfg: ExecConfig, breakpoints: Optional[dict[StmtId, int]] = None):
        self.cfg = cfg
        self.events: list[Event] = []
        self.breakpoints = breakpoints or {}

    def exec(self, fuel: int, m: MemoryState, s: TypedStmt, sid: StmtId) -> MemoryState:
        out = self._step(fuel, m, s, sid)
        if sid in self.breakpoints:
            self.events.append(BreakpointDump(self.breakpoints[sid], out))
        return out

    def _cond(self, m: MemoryState, cond: TypedExpr, sid: StmtId) -> Optional[bool]:
        cfg = self.cfg
        v = expr_r(m, cfg.env, cfg.blc, cond, cfg.policy)
        if v is None:
            self.events.append(SilentReadFailure(sid, "condition could not be evaluated"))
            return None
        if not isinstance(v.data, Bool):
            # typed programs reach this only through uninitialized blocks
            self.events.append(SilentReadFailure(sid, "condition is not a boolean value"))
            return None
        if v.data.value is None:
            self.events.append(SilentReadFailure(sid, "condition holds no data"))
            return None
        return v.data.value

    def _step(self, fuel: int, m: MemoryState, s: TypedStmt, sid: StmtId) -> MemoryState:
        if fuel == 0:
            self.events.append(FuelExhausted(sid))
            return m
        if throw_set(m):
            return reverted(m)
        k = fuel - 1
        if isinstance(s, Snil):
            return m
        if isinstance(s, Throw):
            self.events.append(ThrowRaised(sid))
            return write_dir(m, THROW_LABEL, THROW_SET)
        if isinstance(s, Seq):
            m1 = self.exec(k, m, s.first, sid + (0,))
            return self.exec(k, m1, s.second, sid + (1,))
        if isinstance(s, If):
            taken = self._cond(m, s.cond, sid)
            if taken is None:
                return m
            return self.exec(k, m, s.then if taken else s.orelse, sid + (int(not taken),))
        if isinstance(s, Assign):
            return self._assign(m, s, sid)
        if isinstance(s, While):
            return self._while(fuel, m, s, sid)
        raise TypeError(f"not a typed statement: {s!r}")

    def _assign(self, m: MemoryState, s: Assign, sid: StmtId) -> MemoryState:
        cfg = self.cfg
        v = expr_r(m, cfg.env, cfg.blc, s.rhs, cfg.policy)
        if v is None:
            self.events.append(SilentReadFailure(sid, "right-hand side could not be evaluated"))
            return m
        addr = expr_l(s.lhs)
        if addr is None:
            self.events.append(SilentReadFailure(sid, "assignment target has no address"))
            return m
        ok, out = write_chck(m, cfg.env, cfg.blc, addr, v, cfg.policy)
        if not ok:
            self.events.append(SilentReadFailure(sid, "write refused by policy"))
        return out

    def _while(self, fuel: int, m: MemoryState, s: While, sid: StmtId) -> MemoryState:
        # Iterative form of If(cond, Seq(body, While), Snil) with the same fuel use.
        while True:
            if fuel == 0:
                self.events.append(FuelExhausted(sid))
                return m
            if throw_set(m):
                return reverted(m)
            taken = self._cond(m, s.cond, sid)
            if taken is None:
                return m
            k = fuel - 1
            if k == 0:
                self.events.append(FuelExhausted(sid))
                return m
            if not taken:
                return m
            m = self.exec(k - 1, m, s.body, sid + (0,))
            fuel = k - 1


def exec_stmt(cfg: ExecConfig, m: MemoryState, s: TypedStmt) -> MemoryState:
    """One run of the interpreter with ``cfg.fuel``; no revert normalization."""
    return _Machine(cfg).exec(cfg.fuel, m, s, ())


def run_program(cfg: ExecConfig, m: MemoryState, s: TypedStmt,
                breakpoint: Optional[int] = None) -> ExecOutcome:
    """Run ``s`` and normalize a thrown result to ``m_init``.

    ``breakpoint=N`` snapshots the memory after the N-th top-level statement.
    """
    m.layout.check_label(THROW_LABEL)
    breaks: dict[StmtId, int] = {}
    if breakpoint is not None:
        ids = top_level_ids(s)
        if not 1 <= breakpoint <= len(ids):
            raise ValueError(f"breakpoint {breakpoint} outside 1..{len(ids)}")
        breaks[ids[breakpoint - 1]] = breakpoint
    machine = _Machine(cfg, breaks)
    out = machine.exec(cfg.fuel, m, s, ())
    if throw_set(out):
        out = init_mem(out)
    return ExecOutcome(out, tuple(machine.events))
