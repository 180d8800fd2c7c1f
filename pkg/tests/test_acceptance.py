"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line."""
import dataclasses
import itertools
import json
import subprocess
import sys
import time

import pytest

import evi_corpus as E
import ipl_corpus
import laws
from test_ipl import tc
from germ.evi import build_precondition, check_triple, check_with_invariant, load_spec, prepare
from germ.interp import ExecConfig, FuelExhausted, ThrowRaised, run_program
from germ.ipl import pretty
from germ.layout import Requirements, generate_layout, layout100, layout16, serialize_layout
from germ.mem import (Blc, Access, LabelAddress, MemoryState, Nat, Occupation, V_INIT, Value,
                      allocate, m_init, value_dec)

L16 = layout16()


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
                  + (f" ({detail})" if detail else ""))
        assert ok, detail
    return emit


def test_criterion_1_memory_laws(verdict):
    start = time.perf_counter()
    cases16, bad16 = laws.exhaustive_laws(L16)
    cases100, bad100 = laws.random_laws(layout100(), 10_000, seed=2024)
    elapsed = time.perf_counter() - start
    bad = bad16 + bad100
    verdict(1, "memory-law suite", not bad and cases100 == 10_000 and elapsed < 10.0,
            f"{cases16} exhaustive + {cases100} random cases, {len(bad)} failures, {elapsed:.2f}s")


def test_criterion_2_isolation(verdict):
    layouts = [L16, layout100(), generate_layout(Requirements(8, ("m_0xinit", "m_a", "m_throw", "m_b")))]
    bad = []
    runs = 0
    for layout in layouts:
        for seed in range(10):
            bad += laws.isolation_run(layout, 1000, seed)
            runs += 1
    verdict(2, "special-slot isolation", not bad, f"{runs} runs of 1000 ops, {len(bad)} failures")


def test_criterion_3_generator_determinism(verdict):
    ok = True
    for size, ref in ((16, layout16()), (100, layout100())):
        first = serialize_layout(ref).encode("utf-8")
        ok &= all(serialize_layout(generate_layout(Requirements(size))).encode("utf-8") == first
                  for _ in range(100))
    verdict(3, "generator determinism", ok, "100 regenerations each of layout16 and layout100")


def test_criterion_4_typechecker_corpus(verdict):
    rejected = 0
    for source, error in ipl_corpus.ILL_TYPED:
        try:
            tc(source)
        except error:
            rejected += 1
        except Exception:
            pass
    accepted = round_trip = 0
    for source in ipl_corpus.WELL_TYPED:
        tree = tc(source)
        accepted += 1
        round_trip += tc(pretty(tree)) == tree and pretty(tc(pretty(tree))) == pretty(tree)
    n_ill, n_well = len(ipl_corpus.ILL_TYPED), len(ipl_corpus.WELL_TYPED)
    ok = n_ill >= 20 and n_well >= 20 and rejected == n_ill and accepted == round_trip == n_well
    verdict(4, "typechecker corpus", ok,
            f"{rejected}/{n_ill} rejected, {accepted}/{n_well} accepted, {round_trip} round-trips")


def test_criterion_5_pledge_end_to_end(verdict):
    cmd = [sys.executable, "-m", "germ.cli", "check", "--spec", str(E.SPECS / "pledge.germ"),
           "--json"]
    start = time.perf_counter()
    proc = subprocess.run(cmd, capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    report = json.loads(proc.stdout)
    paths = report["paths"]
    reverted_init = all(
        p["reverted"] and {a["assertion"]: a["outcome"] for a in p["assertions"]}
        == {"reverted": "pass", "memory == init": "pass"} for p in paths[:3])
    last = {a["assertion"]: a["outcome"] for a in paths[-1]["assertions"]} if paths else {}
    ok = (proc.returncode == 0 and report["overall"] == "PASS" and len(paths) == 4
          and all(p["status"] == "PASS" for p in paths)
          and [p["condition"] for p in paths] == ["n == 0", "n != 0 && b1",
                                                   "n != 0 && !b1 && b2", "n != 0 && !b1 && !b2"]
          and reverted_init and last.get("read(refnd) == true") == "pass"
          and not paths[-1]["reverted"] and elapsed < 1.0)
    verdict(5, "pledge end-to-end", ok,
            f"exit {proc.returncode}, {len(paths)} paths, {report['overall']}, {elapsed:.2f}s")


def test_criterion_6_differential_soundness(verdict):
    checked = skipped = 0
    bad = []
    programs = 0
    for path in E.CORPUS:
        if len(load_spec(path).symbols) > 4:
            continue
        c, s, b = E.spec_differential(path)
        checked, skipped, bad, programs = checked + c, skipped + s, bad + b, programs + 1
    for source in ipl_corpus.WELL_TYPED:
        c, s, b = E.generated_differential(tc(source))
        checked, skipped, bad, programs = checked + c, skipped + s, bad + b, programs + 1
    verdict(6, "differential soundness", not bad and checked > 0,
            f"{programs} programs, {checked} bindings compared, {skipped} on undecided paths, "
            f"{len(bad)} mismatches")


def corpus_runs():
    """(program, precondition) pairs over spec programs and the typechecker corpus."""
    for path in E.CORPUS:
        ctx = prepare(load_spec(path))
        for binding in E.bindings(ctx.symbols):
            by_name = {s.name: v for s, v in binding.items()}
            yield ctx.program, build_precondition(ctx.spec, ctx.layout, ctx.cfg, by_name)[0]
    spec = E.generated_spec()
    for source in ipl_corpus.WELL_TYPED:
        for combo in itertools.product((0, 1), (False, True)):
            binding = {"n": combo[0], "b": combo[1], "c": not combo[1], "d": combo[1]}
            yield tc(source), build_precondition(spec, L16, ExecConfig(1), binding)[0]


def test_criterion_7_fuel_semantics(verdict):
    zero_ok = mono_ok = True
    terminating = runs = 0
    for program, pre in corpus_runs():
        runs += 1
        zero = run_program(ExecConfig(0), pre, program)
        zero_ok &= zero.memory == pre
        least = next((k for k in range(1, 80)
                      if not run_program(ExecConfig(k), pre, program).has(FuelExhausted)), None)
        if least is None:
            continue
        terminating += 1
        base = run_program(ExecConfig(least), pre, program).memory
        mono_ok &= all(run_program(ExecConfig(k), pre, program).memory == base
                       for k in range(least + 1, least + 25))
    verdict(7, "fuel semantics", zero_ok and mono_ok and terminating > 0,
            f"{runs} runs, {terminating} terminating")


def test_criterion_8_throw_revert(verdict):
    fresh = m_init(generate_layout(Requirements(16)))
    thrown = bad = 0
    for program, pre in corpus_runs():
        for fuel in (4, 8, 16, 32, 64):
            out = run_program(ExecConfig(fuel), pre, program)
            if out.has(ThrowRaised):
                thrown += 1
                same = len(out.memory.slots) == len(fresh.slots) and all(
                    value_dec(x, y) for x, y in zip(out.memory.slots, fresh.slots))
                bad += not same
    verdict(8, "throw and revert", bad == 0 and thrown > 0,
            f"{thrown} thrown runs, {bad} not equal to m_init")


def test_criterion_9_loop_obligations(verdict):
    spec = load_spec(E.SPECS / "flag_loop.germ")
    v = check_with_invariant(spec)
    parts = {o: v.obligation_status(o) for o in ("head", "step", "tail")}
    unrolled = check_triple(prepare(dataclasses.replace(spec, invariants=()), 16))
    weak = check_with_invariant(load_spec(E.SPECS / "flag_loop_weak.germ"))
    ok = (all(s == "PASS" for s in parts.values()) and unrolled.overall == v.overall == "PASS"
          and weak.obligation_status("step") == "FAIL" and weak.overall == "FAIL")
    verdict(9, "loop obligations", ok,
            ", ".join(f"{o} {s}" for o, s in parts.items())
            + f", unrolled at fuel 16: {unrolled.overall}, weakened step: "
            f"{weak.obligation_status('step')}")


def test_criterion_10_capacity(verdict):
    occupied = Value(Nat(1), blc=Blc(Access.PUBLIC, Occupation.OCCUPIED))
    specials = m_init(L16).slots[:L16.special_count]
    n = L16.normal_count
    wrong = 0
    for mask in range(1 << n):
        normals = tuple(occupied if mask >> i & 1 else V_INIT for i in range(n))
        m = MemoryState(L16, specials + normals)
        got = allocate(m, LabelAddress(0))
        first_free = next((i for i in range(n) if not mask >> i & 1), None)
        expected = None if first_free is None else LabelAddress(first_free)
        wrong += got != expected
    verdict(10, "allocation capacity", wrong == 0, f"{1 << n} occupancy patterns, {wrong} wrong")
