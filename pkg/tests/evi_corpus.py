"""Concrete oracle for the symbolic engine: enumerate bindings and compare paths."""
import itertools
from pathlib import Path

from germ.evi import (PathCondition, Spec, build_precondition, concretize, load_spec, prepare,
                      sym_exec)
from germ.evi.spec import SymInit, VarDecl
from germ.interp import ExecConfig, FuelExhausted, run_program
from germ.ipl import BOOL, NAT, VBool, VNat
from germ.layout import layout16

import ipl_corpus

SPECS = Path(__file__).resolve().parent.parent / "specs"
CORPUS = sorted(SPECS.glob("*.germ"))


def bindings(symbols):
    """Every total binding over {0,1} for nats and {false,true} for bools."""
    syms = sorted(symbols.values())
    domains = [(0, 1) if s.kind == "nat" else (False, True) for s in syms]
    for combo in itertools.product(*domains):
        yield dict(zip(syms, combo))


def differential(spec, layout, cfg, program, symbols):
    """Return (checked, skipped, mismatches) over the exhaustive binding sweep."""
    pre, _ = build_precondition(spec, layout, cfg)
    paths = sym_exec(cfg, pre, program)
    checked = skipped = 0
    bad = []
    for binding in bindings(symbols):
        hits = [p for p in paths if p.condition.holds(binding)]
        if len(hits) != 1:
            bad.append((binding, f"{len(hits)} paths satisfied"))
            continue
        path = hits[0]
        if path.undecided is not None:
            skipped += 1
            continue
        by_name = {s.name: v for s, v in binding.items()}
        concrete_pre, _ = build_precondition(spec, layout, cfg, by_name)
        out = run_program(cfg, concrete_pre, program)
        if concretize(path.memory, binding) != out.memory:
            bad.append((binding, "memory differs"))
        elif path.fuel_exhausted != out.has(FuelExhausted):
            bad.append((binding, "fuel exhaustion differs"))
        checked += 1
    return checked, skipped, bad


def spec_differential(path):
    ctx = prepare(load_spec(path))
    return differential(ctx.spec, ctx.layout, ctx.cfg, ctx.program, ctx.symbols)


# generated programs use the ipl_corpus declarations; n, b, c, d are symbolic
SYMBOLIC = {"n": "n", "b": "b", "c": "c", "d": "d"}


def generated_spec(fuel=24):
    decls = []
    for name, ty in ipl_corpus.DECLS:
        if name in SYMBOLIC:
            init = SymInit(SYMBOLIC[name])
        else:
            init = VNat(1) if ty == NAT else VBool(False)
        decls.append(VarDecl(name, ty, init))
    return Spec(SPECS / "layout16.layout", fuel, SPECS / "none.ipl", tuple(decls), (), ())


def generated_differential(program, fuel=24):
    spec = generated_spec(fuel)
    return differential(spec, layout16(), ExecConfig(fuel), program, spec.symbols)


def paths_for(program, fuel=24):
    spec = generated_spec(fuel)
    cfg = ExecConfig(fuel)
    pre, _ = build_precondition(spec, layout16(), cfg)
    return sym_exec(cfg, pre, program), spec.symbols


__all__ = ["CORPUS", "SPECS", "bindings", "differential", "spec_differential",
           "generated_differential", "paths_for", "PathCondition", "BOOL"]
