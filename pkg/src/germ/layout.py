"""Layout descriptors: generate them from requirements, write and read them.

File format (UTF-8, one directive per line, ``#`` starts a comment)::

    germ-layout v1
    normal 16
    special m_0xinit
    special m_throw
    reserved _0xthrow -> m_throw
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .mem import LayoutError, MemoryLayout, THROW_LABEL

__all__ = [
    "Requirements", "LayoutParseError", "DEFAULT_SPECIALS", "DEFAULT_RESERVED",
    "generate_layout", "serialize_layout", "parse_layout", "load_layout", "layout16",
    "layout100",
]

HEADER = "germ-layout v1"
DEFAULT_SPECIALS = ("m_0xinit", "m_throw")
DEFAULT_RESERVED = ((THROW_LABEL.name, "m_throw"),)


class LayoutParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class Requirements:
    """What a user asks of the generator. Size counts normal blocks only."""

    normal_count: int
    special_names: tuple[str, ...] = DEFAULT_SPECIALS
    reserved: tuple[tuple[str, str], ...] = field(default=DEFAULT_RESERVED)


def generate_layout(req: Requirements) -> MemoryLayout:
    """Build the layout for ``req``. Invalid requirements raise LayoutError."""
    specials = tuple(req.special_names)
    reserved = tuple((label, target) for label, target in req.reserved)
    # a default reservation only applies when its special block was requested
    if req.reserved == DEFAULT_RESERVED:
        reserved = tuple(r for r in reserved if r[1] in specials)
    return MemoryLayout(req.normal_count, specials, reserved)


def serialize_layout(layout: MemoryLayout) -> str:
    lines = [HEADER, f"normal {layout.normal_count}"]
    lines += [f"special {name}" for name in layout.special_names]
    lines += [f"reserved {label} -> {target}" for label, target in layout.reserved]
    return "\n".join(lines) + "\n"


def parse_layout(text: str) -> MemoryLayout:
    normal: int | None = None
    specials: list[str] = []
    reserved: list[tuple[int, str, str]] = []
    header_seen = False
    last_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != HEADER:
                raise LayoutParseError(lineno, f"expected header {HEADER!r}, got {line!r}")
            header_seen = True
            continue
        words = line.split()
        key = words[0]
        if key == "normal":
            if len(words) != 2 or not words[1].isdigit():
                raise LayoutParseError(lineno, "expected 'normal <count>'")
            if normal is not None:
                raise LayoutParseError(lineno, "duplicate 'normal' directive")
            normal = int(words[1])
            if normal < 1:
                raise LayoutParseError(lineno, "normal block count must be positive")
        elif key == "special":
            if len(words) != 2:
                raise LayoutParseError(lineno, "expected 'special <name>'")
            if words[1] in specials:
                raise LayoutParseError(lineno, f"duplicate special block name {words[1]!r}")
            specials.append(words[1])
            _validate(lineno, 1, specials, [])
        elif key == "reserved":
            if len(words) != 4 or words[2] != "->":
                raise LayoutParseError(lineno, "expected 'reserved <label> -> <special-name>'")
            reserved.append((lineno, words[1], words[3]))
        else:
            raise LayoutParseError(lineno, f"unknown directive {key!r}")
    if not header_seen:
        raise LayoutParseError(last_line, "missing header")
    if normal is None:
        raise LayoutParseError(last_line, "missing 'normal <count>' directive")
    for i, (lineno, _, _) in enumerate(reserved):
        _validate(lineno, normal, specials, [(lab, tgt) for _, lab, tgt in reserved[:i + 1]])
    return MemoryLayout(normal, tuple(specials), tuple((lab, tgt) for _, lab, tgt in reserved))


def _validate(lineno: int, normal: int, specials: list[str], reserved: list[tuple[str, str]]) -> None:
    try:
        MemoryLayout(normal, tuple(specials), tuple(reserved))
    except LayoutError as exc:
        raise LayoutParseError(lineno, str(exc)) from None


def load_layout(path: str | Path) -> MemoryLayout:
    return parse_layout(Path(path).read_text(encoding="utf-8"))


def layout16() -> MemoryLayout:
    return generate_layout(Requirements(16))


def layout100() -> MemoryLayout:
    return generate_layout(Requirements(100))
