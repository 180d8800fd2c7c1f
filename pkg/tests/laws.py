"""Memory-law checkers shared by the unit and acceptance suites.

Each checker returns a list of failure descriptions; empty means the law held.
The search oracle is a plain index scan over the slot tuple, written without
any of the label machinery it checks.
"""
from __future__ import annotations

import operator
import random
from fractions import Fraction
from typing import Callable, Iterable, Optional

from germ.mem import (Access, Arr, Blc, Bool, CompositeVal, Env, Float, FunPtr, LabelAddress,
                      LexDomain, LexScope, MemoryLayout, MemoryState, Nat, Occupation, Str,
                      Undef, V_INIT, Value, VarPtr, address_offset, address_srch, allocate,
                      default_policy, empty_srch, free_mem, infor_check, m_init,
                      map_label_to_nat, map_label_to_slot, map_nat_to_label, map_slot_to_label,
                      read_chck, read_dir, read_low, write_chck, write_dir, write_low)

ENVS = [Env(s, d) for s in LexScope for d in LexDomain]
BLCS = [Blc(a, o) for a in Access for o in Occupation]


def sample_values() -> list[Value]:
    data = [Undef(), Nat(None), Nat(0), Nat(1), Nat(7), Bool(None), Bool(True), Bool(False),
            Float(Fraction(1, 3)), Str("x"), VarPtr(LabelAddress(1)),
            FunPtr(LabelAddress(2), (V_INIT,)), Arr(LabelAddress(0), "nat", V_INIT, 2),
            CompositeVal(LabelAddress(3), None)]
    out = [V_INIT]
    for i, d in enumerate(data):
        out.append(Value(d, ENVS[i % len(ENVS)], BLCS[i % len(BLCS)]))
    return out


VALUES = sample_values()


def random_memory(layout: MemoryLayout, rng: random.Random, writes: int = 12) -> MemoryState:
    m = m_init(layout)
    for _ in range(writes):
        m = write_low(m, rng.randrange(layout.slot_count), rng.choice(VALUES))
    return m


def oracle_search(m: MemoryState, start: int, keep: Callable[[Value], bool]) -> Optional[int]:
    base = len(m.layout.special_names)
    for i in range(start, m.layout.normal_count):
        if keep(m.slots[base + i]):
            return i
    return None


def check_inversion(layout: MemoryLayout) -> list[str]:
    bad = []
    for a in layout.labels:
        if map_slot_to_label(layout, map_label_to_slot(layout, a)) != a:
            bad.append(f"slot round trip {a}")
        if map_nat_to_label(layout, map_label_to_nat(layout, a)) != a:
            bad.append(f"nat round trip {a}")
    for s in range(layout.special_count, layout.slot_count):
        if map_label_to_slot(layout, map_slot_to_label(layout, s)) != s:
            bad.append(f"label round trip slot {s}")
    for s in range(layout.special_count):
        if layout.is_pure_special(s) and map_slot_to_label(layout, s) is not None:
            bad.append(f"pure special slot {s} has a label")
    return bad


def check_read(m: MemoryState, a: LabelAddress) -> list[str]:
    if read_dir(m, a) != read_low(m, map_label_to_slot(m.layout, a)):
        return [f"read_dir disagrees with read_low at {a}"]
    return []


def check_update_frame(m: MemoryState, a: LabelAddress, b: LabelAddress, v: Value) -> list[str]:
    bad = []
    m2 = write_dir(m, a, v)
    if read_dir(m2, a) != v:
        bad.append(f"update at {a}")
    if b != a and read_dir(m2, b) != read_dir(m, b):
        bad.append(f"frame: write {a} changed {b}")
    s, t = map_label_to_slot(m.layout, a), map_label_to_slot(m.layout, b)
    m3 = write_low(m, s, v)
    if m3 != m2:
        bad.append(f"write_dir differs from write_low at {a}")
    if t != s and read_low(m3, t) != read_low(m, t):
        bad.append(f"low frame: slot {s} changed slot {t}")
    return bad


def check_gating(m: MemoryState, a: LabelAddress, v: Value, env: Env, blc: Blc,
                 policy=default_policy) -> list[str]:
    bad = []
    allowed = infor_check(policy, env, blc)
    got = read_chck(m, env, blc, a, policy)
    if (got is None) == allowed:
        bad.append(f"read_chck gating at {a} allowed={allowed}")
    if allowed and got != read_dir(m, a):
        bad.append(f"read_chck value at {a}")
    ok, m2 = write_chck(m, env, blc, a, v, policy)
    if ok != allowed:
        bad.append(f"write_chck flag at {a}")
    if not allowed and m2 != m:
        bad.append(f"refused write_chck changed memory at {a}")
    if allowed and m2 != write_dir(m, a, v):
        bad.append(f"write_chck differs from write_dir at {a}")
    return bad


OFFSETS = [("add", operator.add), ("sub", lambda x, y: x - y), ("mul", operator.mul),
           ("const", lambda x, y: y)]


def check_offset(layout: MemoryLayout, a: LabelAddress, off: int) -> list[str]:
    bad = []
    for name, f in OFFSETS:
        want = f(a.index, off)
        expected = LabelAddress(want) if 0 <= want < layout.normal_count else None
        if address_offset(layout, a, f, off) != expected:
            bad.append(f"offset {name} {a} {off}")
    return bad


def _filters(m: MemoryState, rng: random.Random) -> Iterable[tuple[str, Callable[[Value], bool]]]:
    target = rng.choice(VALUES)
    yield "true", lambda v: True
    yield "false", lambda v: False
    yield "is-init", lambda v: v == V_INIT
    yield "not-init", lambda v: v != V_INIT
    yield "equals-sample", lambda v: v == target


def check_search(m: MemoryState, start: LabelAddress, rng: random.Random) -> list[str]:
    bad = []
    for name, keep in _filters(m, rng):
        probes = 0

        def counted(v: Value) -> bool:
            nonlocal probes
            probes += 1
            return keep(v)

        got = address_srch(m, start, counted)
        want = oracle_search(m, start.index, keep)
        if (got.index if got is not None else None) != want:
            bad.append(f"search {name} from {start}: got {got}, want {want}")
        if probes > m.layout.normal_count + 1:
            bad.append(f"search {name} probed {probes} times")
    if address_srch(m, start, lambda v: True) != start:
        bad.append(f"constant-true search from {start}")
    if address_srch(m, start, lambda v: False) is not None:
        bad.append(f"constant-false search from {start}")
    want = oracle_search(m, start.index, lambda v: v == V_INIT)
    got = empty_srch(m, start)
    if (got.index if got is not None else None) != want:
        bad.append(f"empty_srch from {start}")
    if allocate(m, start) != got:
        bad.append(f"allocate differs from empty_srch at {start}")
    return bad


def exhaustive_laws(layout: MemoryLayout, seed: int = 0) -> tuple[int, list[str]]:
    """Every label and label pair of ``layout`` against a few memories."""
    rng = random.Random(seed)
    bad = check_inversion(layout)
    cases = 1
    memories = [m_init(layout), random_memory(layout, rng), random_memory(layout, rng, 40)]
    labels = layout.labels
    for m in memories:
        for a in labels:
            bad += check_read(m, a)
            bad += check_search(m, a, rng)
            for off in range(0, layout.normal_count + 2):
                bad += check_offset(layout, a, off)
            for env in ENVS:
                for blc in BLCS:
                    bad += check_gating(m, a, rng.choice(VALUES), env, blc)
            cases += 3
            for b in labels:
                bad += check_update_frame(m, a, b, rng.choice(VALUES))
                cases += 1
    return cases, bad


def random_laws(layout: MemoryLayout, n: int, seed: int = 1) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    bad = check_inversion(layout)
    m = random_memory(layout, rng, 60)
    labels = layout.labels
    for i in range(n):
        if i % 50 == 0:
            m = random_memory(layout, rng, rng.randrange(200))
        a, b = rng.choice(labels), rng.choice(labels)
        v = rng.choice(VALUES)
        kind = i % 5
        if kind == 0:
            bad += check_update_frame(m, a, b, v)
        elif kind == 1:
            bad += check_read(m, a)
            bad += check_gating(m, a, v, rng.choice(ENVS), rng.choice(BLCS))
        elif kind == 2:
            bad += check_offset(layout, a, rng.randrange(layout.normal_count + 5))
        elif kind == 3:
            bad += check_search(m, a, rng)
        else:
            m2 = free_mem(a, m)
            if read_dir(m2, a) != V_INIT or (b != a and read_dir(m2, b) != read_dir(m, b)):
                bad.append(f"free_mem law at {a}")
    return n, bad


def isolation_run(layout: MemoryLayout, ops: int, seed: int) -> list[str]:
    """Random label-addressed operations; pure special slots must never change."""
    rng = random.Random(seed)
    m = random_memory(layout, rng, 0)
    pure = [s for s in range(layout.special_count) if layout.is_pure_special(s)]
    # give pure specials distinctive contents first so a stray write would show
    for s in pure:
        m = write_low(m, s, Value(Str(f"special-{s}"), ENVS[1], BLCS[0]))
    before = [m.slots[s] for s in pure]
    targets = list(layout.labels) + list(layout.reserved_labels)
    bad = []
    for i in range(ops):
        a = rng.choice(targets)
        op = rng.randrange(6)
        if op == 0:
            read_dir(m, a)
        elif op == 1:
            m = write_dir(m, a, rng.choice(VALUES))
        elif op == 2:
            _, m = write_chck(m, rng.choice(ENVS), rng.choice(BLCS), a, rng.choice(VALUES))
        elif op == 3:
            m = free_mem(a, m)
        elif op == 4:
            start = rng.choice(layout.labels)
            got = allocate(m, start)
            if got is not None:
                m = write_dir(m, got, rng.choice(VALUES[1:]))
        else:
            empty_srch(m, rng.choice(layout.labels))
        now = [m.slots[s] for s in pure]
        if now != before:
            bad.append(f"operation {i} ({op} at {a}) changed a pure special slot")
            break
    return bad
