"""Check reports: a human-readable text form and a JSON form with the same fields."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Union

from .evi.check import Fail, Undecided, Verdict
from .ipl.typecheck import SymbolTable
from .render import render_memory

__all__ = ["AssertionRecord", "PathRecord", "Report", "build_report"]

_OUTCOME = {True: "pass", False: "fail", None: "unknown"}


@dataclass(frozen=True)
class AssertionRecord:
    assertion: str
    outcome: str  # "pass" | "fail" | "unknown"


@dataclass(frozen=True)
class PathRecord:
    obligation: str
    condition: str
    status: str
    matched: Optional[str]
    reverted: bool
    assertions: tuple[AssertionRecord, ...]
    failed: Optional[str]
    witness: Optional[tuple[tuple[str, Union[int, bool]], ...]]
    reason: Optional[str]
    diagnostics: tuple[str, ...]
    memory: str


@dataclass(frozen=True)
class Report:
    spec: str
    overall: str
    paths: tuple[PathRecord, ...]
    diagnostics: tuple[str, ...]
    elapsed_seconds: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        paths = []
        for p in d["paths"]:
            witness = p["witness"]
            paths.append(PathRecord(
                obligation=p["obligation"], condition=p["condition"], status=p["status"],
                matched=p["matched"], reverted=p["reverted"],
                assertions=tuple(AssertionRecord(**a) for a in p["assertions"]),
                failed=p["failed"],
                witness=None if witness is None else tuple((k, v) for k, v in witness),
                reason=p["reason"], diagnostics=tuple(p["diagnostics"]), memory=p["memory"]))
        return cls(d["spec"], d["overall"], tuple(paths), tuple(d["diagnostics"]),
                   float(d["elapsed_seconds"]))

    def to_text(self, color: bool = False) -> str:
        def mark(status: str) -> str:
            if not color:
                return status
            code = {"PASS": "32", "FAIL": "31"}.get(status, "33")
            return f"\x1b[{code}m{status}\x1b[0m"

        lines = [f"spec: {self.spec}"]
        for i, p in enumerate(self.paths, 1):
            lines.append(f"path {i} [{p.obligation}] {p.condition}: {mark(p.status)}")
            if p.matched is not None:
                lines.append(f"  matched: {p.matched}")
            lines.append(f"  reverted: {str(p.reverted).lower()}")
            for a in p.assertions:
                lines.append(f"  assert {a.assertion}: {a.outcome}")
            if p.failed is not None:
                lines.append(f"  failed: {p.failed}")
            if p.witness is not None:
                lines.append("  witness: " + ", ".join(f"{k}={str(v).lower()}"
                                                       for k, v in p.witness))
            if p.reason is not None:
                lines.append(f"  reason: {p.reason}")
            for d in p.diagnostics:
                lines.append(f"  diagnostic: {d}")
            lines.append("  memory:")
            lines.extend("    " + row for row in p.memory.splitlines())
        for d in self.diagnostics:
            lines.append(f"diagnostic: {d}")
        lines.append(f"overall: {mark(self.overall)} ({len(self.paths)} paths, "
                     f"{self.elapsed_seconds:.3f}s)")
        return "\n".join(lines)


def _event_text(e: object) -> str:
    name = type(e).__name__
    fields = {k: v for k, v in vars(e).items() if k != "memory"}
    inner = ", ".join(f"{k}={v}" for k, v in fields.items())
    return f"{name}({inner})"


def build_report(spec_name: str, verdict: Verdict, table: Optional[SymbolTable],
                 elapsed: float, diagnostics: tuple[str, ...] = ()) -> Report:
    paths = []
    for pv in verdict.paths:
        result = pv.result
        paths.append(PathRecord(
            obligation=pv.obligation,
            condition=pv.condition,
            status=pv.status,
            matched=pv.matched,
            reverted=pv.path.reverted,
            assertions=tuple(AssertionRecord(t, _OUTCOME[v]) for t, v in pv.outcomes),
            failed=result.assertion if isinstance(result, Fail) else None,
            witness=result.witness if isinstance(result, Fail) else None,
            reason=result.reason if isinstance(result, Undecided) else None,
            diagnostics=tuple(_event_text(e) for e in pv.path.diagnostics),
            memory=render_memory(pv.path.memory, table)))
    return Report(spec_name, verdict.overall, tuple(paths), diagnostics, round(elapsed, 6))
