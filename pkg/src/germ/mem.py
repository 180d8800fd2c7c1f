"""Fixed-size formal memory: layouts, values and the memory-management API.

A memory is an immutable array of value slots. Special slots come first (in
declaration order) and are reachable only through the low-level operations;
normal slots are addressed through label addresses ``_0x00000000`` .. which
map bijectively onto them. Reserved labels (``_0xthrow``) are the one
exception: they name a special block that the interpreter needs to write.

Every operation is a pure function. Writes return a new state.
"""
from __future__ import annotations

import enum
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

__all__ = [
    "LexScope", "LexDomain", "Env", "Access", "Occupation", "Blc",
    "Undef", "Nat", "Bool", "Float", "Str", "Arr", "VarPtr", "ParPtr", "FunPtr",
    "StmtVal", "CompositeType", "CompositeVal", "Data", "Value",
    "LabelAddress", "ReservedLabel", "Label", "SlotIndex", "MemoryLayout",
    "MemoryState", "AddressError", "LayoutError",
    "DEFAULT_ENV", "V_INIT", "THROW_LABEL", "THROW_CLEAR", "THROW_SET",
    "m_init", "map_label_to_slot", "map_slot_to_label", "map_label_to_nat",
    "map_nat_to_label", "read_low", "read_dir", "infor_check", "default_policy",
    "read_chck", "write_low", "write_dir", "write_chck", "address_offset",
    "address_srch", "value_dec", "empty_srch", "alloc_chck", "allocate",
    "free_mem", "set_all", "init_mem",
]


class LayoutError(ValueError):
    """A layout violates one of its structural invariants."""


class AddressError(LookupError):
    """An address or slot index does not belong to the layout."""


# -- environment and block information ------------------------------------


class LexScope(enum.Enum):
    LOAD = "load"
    LOCAL = "local"


class LexDomain(enum.Enum):
    GLOBAL = "global"
    BLOCK = "block"


class Access(enum.Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class Occupation(enum.Enum):
    OCCUPIED = "occupied"
    VACANT = "vacant"


@dataclass(frozen=True)
class Env:
    lex_scope: LexScope = LexScope.LOAD
    lex_domain: LexDomain = LexDomain.GLOBAL


@dataclass(frozen=True)
class Blc:
    access: Access = Access.PUBLIC
    occupation: Occupation = Occupation.VACANT


# -- addresses --------------------------------------------------------------

_HEX_LABEL = re.compile(r"_0x([0-9A-F]{8})\Z")


@dataclass(frozen=True, order=True)
class LabelAddress:
    """Label of the normal block at ``index``."""

    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise AddressError(f"label index must be a natural number, got {self.index!r}")
        if self.index > 0xFFFFFFFF:
            raise AddressError(f"label index {self.index} does not fit in 8 hex digits")

    @property
    def name(self) -> str:
        return f"_0x{self.index:08X}"

    @classmethod
    def parse(cls, text: str) -> LabelAddress:
        match = _HEX_LABEL.match(text)
        if match is None:
            raise AddressError(f"not a label address: {text!r}")
        return cls(int(match.group(1), 16))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class ReservedLabel:
    """A label bound to an engine-reserved special block."""

    name: str

    def __str__(self) -> str:
        return self.name


Label = Union[LabelAddress, ReservedLabel]
SlotIndex = int

THROW_LABEL = ReservedLabel("_0xthrow")


# -- data -------------------------------------------------------------------


@dataclass(frozen=True)
class Undef:
    """Initialized block that records no data."""


@dataclass(frozen=True)
class Nat:
    value: Optional[int] = None


@dataclass(frozen=True)
class Bool:
    value: Optional[bool] = None


@dataclass(frozen=True)
class Float:
    # inert placeholder: storable and comparable, never computed with
    value: Optional[Fraction] = None


@dataclass(frozen=True)
class Str:
    value: Optional[str] = None


@dataclass(frozen=True)
class Arr:
    base: LabelAddress
    elem_type: str
    init_value: "Value"
    length: int


@dataclass(frozen=True)
class VarPtr:
    target: Optional[LabelAddress] = None


@dataclass(frozen=True)
class ParPtr:
    target: Optional[LabelAddress] = None


@dataclass(frozen=True)
class FunPtr:
    target: Optional[LabelAddress] = None
    args: Optional[tuple["Value", ...]] = None


@dataclass(frozen=True)
class StmtVal:
    handle: object


@dataclass(frozen=True)
class CompositeType:
    name: LabelAddress
    members: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class CompositeVal:
    type_name: LabelAddress
    members: Optional[tuple["Value", ...]] = None


Data = Union[Undef, Nat, Bool, Float, Str, Arr, VarPtr, ParPtr, FunPtr,
             StmtVal, CompositeType, CompositeVal]


@dataclass(frozen=True)
class Value:
    data: Data
    env: Env = Env()
    blc: Blc = Blc()


DEFAULT_ENV = Env()
V_INIT = Value(Undef(), DEFAULT_ENV, Blc(Access.PUBLIC, Occupation.VACANT))
THROW_CLEAR = Value(Bool(False), DEFAULT_ENV, Blc(Access.PUBLIC, Occupation.OCCUPIED))
THROW_SET = Value(Bool(True), DEFAULT_ENV, Blc(Access.PUBLIC, Occupation.OCCUPIED))

# values restored into reserved blocks by init_mem
RESERVED_DEFAULTS: dict[str, Value] = {THROW_LABEL.name: THROW_CLEAR}

# -- layout -------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class MemoryLayout:
    """Static shape of a memory space.

    ``reserved`` pairs a reserved label name with the special block it is
    bound to, e.g. ``(("_0xthrow", "m_throw"),)``.
    """

    normal_count: int
    special_names: tuple[str, ...] = ()
    reserved: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "special_names", tuple(self.special_names))
        object.__setattr__(self, "reserved", tuple(tuple(r) for r in self.reserved))
        if isinstance(self.normal_count, bool) or not isinstance(self.normal_count, int):
            raise LayoutError("normal block count must be an integer")
        if self.normal_count < 1:
            raise LayoutError(f"normal block count must be positive, got {self.normal_count}")
        if self.normal_count > 0x100000000:
            raise LayoutError("normal block count exceeds the 32-bit label space")
        seen: set[str] = set()
        for name in self.special_names:
            if not _IDENT.match(name):
                raise LayoutError(f"malformed special block name {name!r}")
            if name in seen:
                raise LayoutError(f"duplicate special block name {name!r}")
            seen.add(name)
        bound: set[str] = set()
        labels: set[str] = set()
        for label, special in self.reserved:
            if not _IDENT.match(label) or _HEX_LABEL.match(label):
                raise LayoutError(f"malformed reserved label {label!r}")
            if label in labels:
                raise LayoutError(f"duplicate reserved label {label!r}")
            if special not in seen:
                raise LayoutError(f"reserved label {label!r} bound to unknown special block {special!r}")
            if special in bound:
                raise LayoutError(f"special block {special!r} bound to more than one reserved label")
            labels.add(label)
            bound.add(special)

    @property
    def special_count(self) -> int:
        return len(self.special_names)

    @property
    def slot_count(self) -> int:
        return len(self.special_names) + self.normal_count

    @property
    def labels(self) -> list[LabelAddress]:
        return [LabelAddress(i) for i in range(self.normal_count)]

    @property
    def reserved_labels(self) -> list[ReservedLabel]:
        return [ReservedLabel(label) for label, _ in self.reserved]

    def special_slot(self, name: str) -> SlotIndex:
        try:
            return self.special_names.index(name)
        except ValueError:
            raise AddressError(f"no special block named {name!r}") from None

    def reserved_target(self, label: ReservedLabel) -> str:
        for name, special in self.reserved:
            if name == label.name:
                return special
        raise AddressError(f"layout has no reserved label {label.name!r}")

    def is_pure_special(self, s: SlotIndex) -> bool:
        """True for special slots with no reserved label bound to them."""
        bound = {special for _, special in self.reserved}
        return s < self.special_count and self.special_names[s] not in bound

    def slot_name(self, s: SlotIndex) -> str:
        self.check_slot(s)
        if s < self.special_count:
            return self.special_names[s]
        return f"m_0x{s - self.special_count:08X}"

    def check_slot(self, s: SlotIndex) -> None:
        if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < self.slot_count:
            raise AddressError(f"slot index {s!r} out of range for {self.slot_count} slots")

    def check_label(self, a: Label) -> None:
        if isinstance(a, LabelAddress):
            if a.index >= self.normal_count:
                raise AddressError(f"label {a.name} out of range for {self.normal_count} normal blocks")
        elif isinstance(a, ReservedLabel):
            self.reserved_target(a)
        else:
            raise AddressError(f"not a label: {a!r}")


# -- memory state -------------------------------------------------------------


@dataclass(frozen=True)
class MemoryState:
    layout: MemoryLayout
    slots: tuple[Value, ...]

    def __post_init__(self) -> None:
        if len(self.slots) != self.layout.slot_count:
            raise LayoutError(
                f"memory has {len(self.slots)} slots, layout requires {self.layout.slot_count}")

    @classmethod
    def filled(cls, layout: MemoryLayout, v: Value) -> MemoryState:
        return cls(layout, (v,) * layout.slot_count)

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, s: SlotIndex) -> Value:
        return read_low(self, s)


def m_init(layout: MemoryLayout) -> MemoryState:
    """The initial memory: ``v_init`` everywhere, reserved blocks at their defaults."""
    return init_mem(MemoryState.filled(layout, V_INIT))


# -- map operations -------------------------------------------------------------


def map_label_to_slot(layout: MemoryLayout, a: Label) -> SlotIndex:
    layout.check_label(a)
    if isinstance(a, ReservedLabel):
        return layout.special_slot(layout.reserved_target(a))
    return layout.special_count + a.index


def map_slot_to_label(layout: MemoryLayout, s: SlotIndex) -> Optional[Label]:
    layout.check_slot(s)
    if s >= layout.special_count:
        return LabelAddress(s - layout.special_count)
    special = layout.special_names[s]
    for label, target in layout.reserved:
        if target == special:
            return ReservedLabel(label)
    return None


def map_label_to_nat(layout: MemoryLayout, a: LabelAddress) -> int:
    if not isinstance(a, LabelAddress):
        raise AddressError(f"{a} has no natural-number image")
    layout.check_label(a)
    return a.index


def map_nat_to_label(layout: MemoryLayout, n: int) -> Optional[LabelAddress]:
    if 0 <= n < layout.normal_count:
        return LabelAddress(n)
    return None


# -- read ------------------------------------------------------------------------

Policy = Callable[[Env, Blc], bool]


def read_low(m: MemoryState, s: SlotIndex) -> Value:
    m.layout.check_slot(s)
    return m.slots[s]


def read_dir(m: MemoryState, a: Label) -> Value:
    return read_low(m, map_label_to_slot(m.layout, a))


def default_policy(env: Env, blc: Blc) -> bool:
    return blc.access is Access.PUBLIC


def infor_check(policy: Policy, env: Env, blc: Blc) -> bool:
    return bool(policy(env, blc))


def read_chck(m: MemoryState, env: Env, blc: Blc, a: Label,
              policy: Policy = default_policy) -> Optional[Value]:
    if not infor_check(policy, env, blc):
        return None
    return read_dir(m, a)


# -- write -------------------------------------------------------------------------


def write_low(m: MemoryState, s: SlotIndex, v: Value) -> MemoryState:
    m.layout.check_slot(s)
    return MemoryState(m.layout, m.slots[:s] + (v,) + m.slots[s + 1:])


def write_dir(m: MemoryState, a: Label, v: Value) -> MemoryState:
    return write_low(m, map_label_to_slot(m.layout, a), v)


def write_chck(m: MemoryState, env: Env, blc: Blc, a: Label, v: Value,
               policy: Policy = default_policy) -> tuple[bool, MemoryState]:
    """Gated write. ``(False, m)`` means the policy refused; ``m`` is untouched."""
    if not infor_check(policy, env, blc):
        m.layout.check_label(a)
        return False, m
    return True, write_dir(m, a, v)


# -- search ------------------------------------------------------------------------


def address_offset(layout: MemoryLayout, a: LabelAddress,
                   f_off: Callable[[int, int], int], offset: int) -> Optional[LabelAddress]:
    return map_nat_to_label(layout, f_off(map_label_to_nat(layout, a), offset))


def address_srch(m: MemoryState, start: LabelAddress,
                 filter_: Callable[[Value], bool]) -> Optional[LabelAddress]:
    """First label at or after ``start`` whose stored value passes ``filter_``.

    Scans by +1 offsets over normal blocks only; at most ``normal_count``
    probes, so the search always terminates.
    """
    current: Optional[LabelAddress] = start
    m.layout.check_label(start)
    while current is not None:
        if filter_(read_dir(m, current)):
            return current
        current = address_offset(m.layout, current, operator.add, 1)
    return None


def value_dec(v0: Value, v1: Value) -> bool:
    return v0 == v1


def empty_srch(m: MemoryState, start: LabelAddress) -> Optional[LabelAddress]:
    return address_srch(m, start, lambda v: value_dec(V_INIT, v))


def alloc_chck(v: Value) -> bool:
    return value_dec(v, V_INIT)


def allocate(m: MemoryState, start: LabelAddress,
             check: Callable[[Value], bool] = alloc_chck) -> Optional[LabelAddress]:
    """Find a block to allocate. The memory is not modified; the caller writes."""
    return address_srch(m, start, check)


def free_mem(a: Label, m: MemoryState) -> MemoryState:
    return write_dir(m, a, V_INIT)


# -- initialize ----------------------------------------------------------------------


def set_all(m: MemoryState, v: Value) -> MemoryState:
    return MemoryState.filled(m.layout, v)


def init_mem(m: MemoryState) -> MemoryState:
    out = set_all(m, V_INIT)
    for label in m.layout.reserved_labels:
        default = RESERVED_DEFAULTS.get(label.name, V_INIT)
        out = write_low(out, map_label_to_slot(m.layout, label), default)
    return out
