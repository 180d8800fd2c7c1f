"""Text rendering of memory states: one line per block, special blocks first."""
from __future__ import annotations

import os
from typing import Optional

from .evi.symbolic import SymBool, SymNat, SymNatSucc, SymTerm
from .ipl.typecheck import SymbolTable
from .mem import Bool, MemoryState, Nat, V_INIT, Value

__all__ = ["render_data", "render_value", "render_memory", "color_enabled"]


def color_enabled(stream) -> bool:
    """ANSI color unless ``GERM_COLOR=0``; ``GERM_COLOR=1`` forces it on."""
    setting = os.environ.get("GERM_COLOR")
    if setting == "0":
        return False
    if setting == "1":
        return True
    return hasattr(stream, "isatty") and stream.isatty()


def render_data(d: object) -> str:
    if isinstance(d, Nat):
        return "Nat None" if d.value is None else f"Nat (Some {d.value})"
    if isinstance(d, Bool):
        return "Bool None" if d.value is None else f"Bool (Some {str(d.value).lower()})"
    if isinstance(d, SymBool):
        return f"Bool (Some {d.sym.name})"
    if isinstance(d, SymNat):
        return f"Nat (Some {d.sym.name})"
    if isinstance(d, SymNatSucc):
        return f"Nat (Some {d.sym.name}) [nonzero]"
    if isinstance(d, SymTerm):
        return f"({_term(d.left)} {d.bop.symbol} {_term(d.right)})"
    return type(d).__name__


def _term(d: object) -> str:
    if isinstance(d, Nat) and d.value is not None:
        return str(d.value)
    if isinstance(d, Bool) and d.value is not None:
        return str(d.value).lower()
    if isinstance(d, (SymBool, SymNat)):
        return d.sym.name
    if isinstance(d, SymNatSucc):
        return f"{d.sym.name}[nonzero]"
    return render_data(d)


def render_value(v: Value) -> str:
    if v == V_INIT:
        return "initData"
    env, blc = v.env, v.blc
    return (f"{render_data(v.data)} {env.lex_scope.value} {env.lex_domain.value} "
            f"{blc.access.value} {blc.occupation.value}")


def render_memory(m: MemoryState, table: Optional[SymbolTable] = None,
                  color: bool = False) -> str:
    """Table of block name -> value; normal blocks holding a variable are
    annotated with its name."""
    layout = m.layout
    names = {}
    if table is not None:
        names = {layout.special_count + label.index: name for name, label, _ in table.items()}
    rows = []
    for s, v in enumerate(m.slots):
        line = f"{layout.slot_name(s)} := {render_value(v)};"
        if s in names:
            line += f"  # {names[s]}"
        if color and v != V_INIT:
            line = f"\x1b[1m{line}\x1b[0m"
        rows.append(line)
    return "\n".join(rows)
