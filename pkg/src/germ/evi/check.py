"""Hoare-triple checking of IPL programs against spec files.

``check_triple`` runs the program symbolically from the built precondition
and judges every path against the first guarded case it satisfies.
``check_with_invariant`` splits a program around one top-level loop into
three obligations (head, step, tail), each discharged the same way.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from ..interp import ExecConfig, reverted, val_to_value
from ..ipl.syntax import parse_program
from ..ipl.typecheck import SymbolTable, typecheck
from ..ipl.typed import NAT, TypedStmt, While, flatten, seq_of
from ..mem import Bool, MemoryLayout, Nat, MemoryState, Value, m_init, read_dir, write_dir
from .spec import (Assertion, Case, FrameExcept, GAnd, GAtom, Guard, MemoryIsInit, ReadEquals,
                   Reverted, Spec, SpecError, build_precondition, load_spec_layout,
                   render_assertion)
from .symbolic import (BoolIs, NatIsZero, PathCondition, PathResult, Symbol,
                       SymBool, SymNat, SymNatSucc, SymState, SymbolicMachine, eq3, substitute,
                       sym_exec, symbols_in)

__all__ = [
    "Pass", "Fail", "Undecided", "Outcome", "PathVerdict", "Verdict", "Prepared", "prepare",
    "check_triple", "check_with_invariant", "check_spec", "witness_for", "eval_guard",
]


@dataclass(frozen=True)
class Pass:
    status = "PASS"


@dataclass(frozen=True)
class Fail:
    assertion: str
    witness: tuple[tuple[str, Union[int, bool]], ...]
    status = "FAIL"


@dataclass(frozen=True)
class Undecided:
    reason: str
    status = "UNDECIDED"


Outcome = Union[Pass, Fail, Undecided]


@dataclass(frozen=True)
class PathVerdict:
    obligation: str  # "triple" | "head" | "step" | "tail"
    path: PathResult
    matched: Optional[str]
    outcomes: tuple[tuple[str, Optional[bool]], ...]
    result: Outcome

    @property
    def status(self) -> str:
        return self.result.status

    @property
    def condition(self) -> str:
        return str(self.path.condition)


@dataclass(frozen=True)
class Verdict:
    paths: tuple[PathVerdict, ...]

    @property
    def overall(self) -> str:
        statuses = {p.status for p in self.paths}
        if statuses <= {"PASS"}:
            return "PASS"
        return "FAIL" if "FAIL" in statuses else "UNDECIDED"

    def obligations(self) -> list[str]:
        return list(dict.fromkeys(p.obligation for p in self.paths))

    def obligation_status(self, name: str) -> str:
        return Verdict(tuple(p for p in self.paths if p.obligation == name)).overall


@dataclass(frozen=True)
class Prepared:
    spec: Spec
    layout: MemoryLayout
    cfg: ExecConfig
    pre: MemoryState
    table: SymbolTable = field(compare=False)
    program: TypedStmt
    symbols: dict[str, Symbol] = field(compare=False)


def prepare(spec: Spec, fuel: Optional[int] = None) -> Prepared:
    """Load the layout and program and build the symbolic precondition.

    Raises the loader's own errors: OSError, LayoutParseError, ParseError,
    IplTypeError or SpecError.
    """
    layout = load_spec_layout(spec)
    cfg = ExecConfig(spec.fuel if fuel is None else fuel)
    pre, table = build_precondition(spec, layout, cfg)
    source = spec.program_path.read_text(encoding="utf-8")
    program = typecheck(parse_program(source), table)
    return Prepared(spec, layout, cfg, pre, table, program, spec.symbols)


# -- three-valued evaluation -----------------------------------------------------------


def _and3(values: Iterable[Optional[bool]]) -> Optional[bool]:
    out: Optional[bool] = True
    for v in values:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _or3(values: Iterable[Optional[bool]]) -> Optional[bool]:
    out: Optional[bool] = False
    for v in values:
        if v is True:
            return True
        if v is None:
            out = None
    return out


def _value_eq3(a: Value, b: Value) -> Optional[bool]:
    if a.env != b.env or a.blc != b.blc:
        return False
    return eq3(a.data, b.data)


def eval_guard(g: Guard, pc: PathCondition, symbols: dict[str, Symbol]) -> Optional[bool]:
    if isinstance(g, GAtom):
        atom = pc.value_of(symbols[g.sym])
        if atom is None:
            return None
        if g.test in ("true", "false"):
            return atom.value == (g.test == "true")
        return isinstance(atom, NatIsZero) == (g.test == "zero")
    parts = (eval_guard(g.left, pc, symbols), eval_guard(g.right, pc, symbols))
    return _and3(parts) if isinstance(g, GAnd) else _or3(parts)


def _pc_mapping(pc: PathCondition) -> dict:
    out = {}
    for a in pc.atoms:
        if isinstance(a, BoolIs):
            out[a.sym] = Bool(a.value)
        elif isinstance(a, NatIsZero):
            out[a.sym] = Nat(0)
        else:
            out[a.sym] = SymNatSucc(a.sym)
    return out


def _eval_assertion(ctx: Prepared, a: Assertion, path: PathResult) -> Optional[bool]:
    if isinstance(a, Reverted):
        return path.reverted
    mem = path.memory
    if isinstance(a, MemoryIsInit):
        return _and3(_value_eq3(x, y) for x, y in zip(mem.slots, m_init(ctx.layout).slots))
    if isinstance(a, ReadEquals):
        label, _ = ctx.table.lookup(a.var)
        expected = val_to_value(ctx.cfg.env, ctx.cfg.blc, a.lit)
        return _value_eq3(read_dir(mem, label), expected)
    if isinstance(a, FrameExcept):
        pre = substitute(ctx.pre, _pc_mapping(path.condition))
        skip = {ctx.table.lookup(name)[0] for name in a.vars}
        labels = [*ctx.layout.labels, *ctx.layout.reserved_labels]
        return _and3(_value_eq3(read_dir(mem, lab), read_dir(pre, lab))
                     for lab in labels if lab not in skip)
    raise TypeError(f"not an assertion: {a!r}")


def witness_for(pc: PathCondition, symbols: Iterable[Symbol]) -> tuple[tuple[str, Union[int, bool]], ...]:
    """Minimal instantiation: pinned values kept, free booleans false, free nats 1."""
    out = []
    for sym in sorted(set(symbols) | {a.sym for a in pc.atoms}):
        atom = pc.value_of(sym)
        if sym.kind == "bool":
            out.append((sym.name, atom.value if atom is not None else False))
        else:
            out.append((sym.name, 0 if isinstance(atom, NatIsZero) else 1))
    return tuple(out)


def _precheck(path: PathResult) -> Optional[Undecided]:
    if path.undecided is not None:
        return Undecided(path.undecided)
    if path.fuel_exhausted:
        return Undecided("fuel exhausted before the program finished")
    return None


def _symbols_of(ctx: Prepared, path: PathResult, extra: Iterable[Symbol]) -> set[Symbol]:
    syms = set(ctx.symbols.values()) | set(extra)
    for v in path.memory.slots:
        syms |= symbols_in(v.data)
    return syms


def _judge_post(ctx: Prepared, path: PathResult, obligation: str,
                extra: Iterable[Symbol] = ()) -> PathVerdict:
    early = _precheck(path)
    if early is not None:
        return PathVerdict(obligation, path, None, (), early)
    chosen: Optional[Case] = None
    for i, case in enumerate(ctx.spec.cases, 1):
        g = True if case.guard is None else eval_guard(case.guard, path.condition, ctx.symbols)
        if g is None:
            reason = f"path condition does not decide the guard of {case.name}"
            return PathVerdict(obligation, path, None, (), Undecided(reason))
        if g:
            chosen = case
            break
    if chosen is None:
        return PathVerdict(obligation, path, None, (),
                           Undecided("no case matches the path and there is no else case"))
    outcomes = tuple((render_assertion(a), _eval_assertion(ctx, a, path))
                     for a in chosen.assertions)
    return PathVerdict(obligation, path, chosen.name, outcomes,
                       _combine(outcomes, path, _symbols_of(ctx, path, extra)))


def _combine(outcomes: tuple[tuple[str, Optional[bool]], ...], path: PathResult,
             symbols: set[Symbol]) -> Outcome:
    for text, value in outcomes:
        if value is False:
            return Fail(text, witness_for(path.condition, symbols))
    for text, value in outcomes:
        if value is None:
            return Undecided(f"cannot decide {text} on this path")
    return Pass()


def _clause_text(clause: tuple[Assertion, ...]) -> str:
    return " && ".join(render_assertion(a) for a in clause)


def _judge_invariant(ctx: Prepared, path: PathResult, clauses: list[tuple[Assertion, ...]],
                     obligation: str, extra: Iterable[Symbol] = ()) -> PathVerdict:
    if path.reverted:
        # a thrown path never reaches the loop again; it must meet the postcondition
        return _judge_post(ctx, path, obligation, extra)
    early = _precheck(path)
    if early is not None:
        return PathVerdict(obligation, path, "invariant", (), early)
    outcomes = tuple((_clause_text(c), _and3(_eval_assertion(ctx, a, path) for a in c))
                     for c in clauses)
    holds = _or3(v for _, v in outcomes)
    if holds is True:
        result: Outcome = Pass()
    elif holds is False:
        text = " || ".join(f"({t})" if len(clauses) > 1 else t for t, _ in outcomes)
        result = Fail(text, witness_for(path.condition, _symbols_of(ctx, path, extra)))
    else:
        result = Undecided("cannot decide the invariant on this path")
    return PathVerdict(obligation, path, "invariant", outcomes, result)


# -- entry points ------------------------------------------------------------------------


def check_triple(spec: Union[Spec, Prepared], fuel: Optional[int] = None) -> Verdict:
    ctx = spec if isinstance(spec, Prepared) else prepare(spec, fuel)
    paths = sym_exec(ctx.cfg, ctx.pre, ctx.program)
    return Verdict(tuple(_judge_post(ctx, p, "triple") for p in paths))


def _clause_state(ctx: Prepared, clause: tuple[Assertion, ...], label: str, index: int,
                  next_id: int) -> tuple[MemoryState, list[Symbol]]:
    """A memory satisfying ``clause``: pinned reads written, framed variables
    kept at their precondition values, everything else fresh."""
    m = m_init(ctx.layout) if any(isinstance(a, MemoryIsInit) for a in clause) else ctx.pre
    pinned = {a.var: a.lit for a in clause if isinstance(a, ReadEquals)}
    frames = [set(a.vars) for a in clause if isinstance(a, FrameExcept)]
    names = [name for name, _, _ in ctx.table.items()]
    free = set.intersection(*frames) if frames else set(names)
    fresh: list[Symbol] = []
    for name, addr, ty in ctx.table.items():
        if name in pinned:
            m = write_dir(m, addr, val_to_value(ctx.cfg.env, ctx.cfg.blc, pinned[name]))
        elif name in free:
            kind = "nat" if ty == NAT else "bool"
            sym = Symbol(next_id + len(fresh), f"{name}@{label}.{index}", kind)
            fresh.append(sym)
            data = SymNat(sym) if kind == "nat" else SymBool(sym)
            m = write_dir(m, addr, Value(data, ctx.cfg.env, ctx.cfg.blc))
    if any(isinstance(a, Reverted) for a in clause):
        m = reverted(m)
    return m, fresh


def _split_program(program: TypedStmt, label: str) -> tuple[TypedStmt, While, TypedStmt]:
    stmts = flatten(program)
    for i, s in enumerate(stmts):
        if isinstance(s, While) and s.label == label:
            return seq_of(stmts[:i]), s, seq_of(stmts[i + 1:])
    raise SpecError(f"no top-level loop labelled {label!r}")


def check_with_invariant(spec: Union[Spec, Prepared], label: Optional[str] = None,
                         clauses: Optional[list[tuple[Assertion, ...]]] = None,
                         fuel: Optional[int] = None) -> Verdict:
    """Check head, step and tail obligations of the loop ``label``.

    Clauses default to the spec file's invariant lines for that label and form a
    disjunction. Without any invariant this is ``check_triple``.
    """
    ctx = spec if isinstance(spec, Prepared) else prepare(spec, fuel)
    if label is None:
        labels = list(dict.fromkeys(lab for lab, _ in ctx.spec.invariants))
        if not labels:
            return check_triple(ctx)
        if len(labels) > 1:
            raise SpecError(f"invariants given for several loops: {', '.join(labels)}")
        label = labels[0]
    if clauses is None:
        clauses = [c for lab, c in ctx.spec.invariants if lab == label]
    if not clauses:
        return check_triple(ctx)
    head, loop, tail = _split_program(ctx.program, label)
    cfg = ctx.cfg
    verdicts: list[PathVerdict] = []

    for path in sym_exec(cfg, ctx.pre, head):
        verdicts.append(_judge_invariant(ctx, path, clauses, "head"))

    next_id = len(ctx.symbols)
    starts = []
    for i, clause in enumerate(clauses, 1):
        mem, fresh = _clause_state(ctx, clause, label, i, next_id)
        next_id += len(fresh)
        starts.append((mem, fresh))

    machine = SymbolicMachine(cfg)
    for mem, fresh in starts:
        step_states: list[SymState] = []
        tail_states: list[SymState] = []
        for st, taken in machine.branch(SymState(mem), loop.cond, ()):
            if st.undecided is not None:
                step_states.append(st)
            elif taken is True:
                step_states.extend(machine.exec(cfg.fuel, st, loop.body, (0,)))
            else:
                tail_states.extend(machine.exec(cfg.fuel, st, tail, ()))
        for path in machine.finish(step_states):
            verdicts.append(_judge_invariant(ctx, path, clauses, "step", fresh))
        for path in machine.finish(tail_states):
            verdicts.append(_judge_post(ctx, path, "tail", fresh))
    order = {"head": 0, "step": 1, "tail": 2}
    verdicts.sort(key=lambda v: order[v.obligation])
    return Verdict(tuple(verdicts))


def check_spec(spec: Union[Spec, Prepared], fuel: Optional[int] = None) -> Verdict:
    """Triple check, or the loop obligations when the spec file has invariants."""
    ctx = spec if isinstance(spec, Prepared) else prepare(spec, fuel)
    if ctx.spec.invariants:
        return check_with_invariant(ctx)
    return check_triple(ctx)
