"""Abstract states: a polyhedron plus register and address mappings.

Register variables, address variables and value variables are kept disjoint.
``delta`` maps an address variable to the variable holding the word stored
there; an address may have no value binding.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, Mapping, Optional

from .poly import Polyhedron, var


class VarGen:
    """Source of globally fresh polyhedron variables for one analysis run."""

    def __init__(self, start: int = 1):
        self._next = start

    def __call__(self) -> int:
        v = self._next
        self._next += 1
        return v

    fresh = __call__

    @property
    def issued(self) -> int:
        return self._next - 1


class Alias(enum.Enum):
    EQUIVALENT = "equivalent"
    OVERLAPPING = "overlapping"
    INDEPENDENT = "independent"


class VarClass(enum.Enum):
    REGISTER = "register"
    ADDRESS = "address"
    VALUE = "value"
    OTHER = "other"


@dataclass(frozen=True)
class AbstractState:
    p: Polyhedron
    m: Mapping[str, int] = field(default_factory=dict)
    delta: Mapping[int, int] = field(default_factory=dict)
    addrs: FrozenSet[int] = frozenset()
    # comparison witness kind of a register variable ("lt" or "opaque");
    # absent means the register holds a plain value
    kinds: Mapping[int, str] = field(default_factory=dict)

    @classmethod
    def initial(cls) -> "AbstractState":
        return cls(Polyhedron.top())

    @classmethod
    def bottom(cls) -> "AbstractState":
        return _BOTTOM_STATE

    @property
    def is_bottom(self) -> bool:
        return self.p.is_empty()

    def bound_vars(self) -> set:
        return set(self.m.values()) | set(self.addrs) | set(self.delta.values())

    def var_class(self, v: int) -> VarClass:
        if v in self.addrs:
            return VarClass.ADDRESS
        if v in self.delta.values():
            return VarClass.VALUE
        if v in self.m.values():
            return VarClass.REGISTER
        return VarClass.OTHER

    def with_p(self, p: Polyhedron) -> "AbstractState":
        if p.is_empty():
            return _BOTTOM_STATE
        return replace(self, p=p)

    def bind(self, reg: str, v: int, kind: Optional[str] = None) -> "AbstractState":
        """``m[reg:v]``; ``kind`` tags ``v`` as a comparison witness."""
        m = dict(self.m)
        m[reg] = v
        kinds = self.kinds
        if kind is not None:
            kinds = dict(kinds)
            kinds[v] = kind
        return replace(self, m=m, kinds=kinds)

    def __str__(self):
        return dump(self)


_BOTTOM_STATE = AbstractState(Polyhedron.bottom())


def _reg_key(name: str):
    mo = re.match(r"([a-z_@]*)(\d*)(.*)", name)
    prefix, num, rest = mo.groups()
    return (prefix, int(num) if num else -1, rest)


def dump(s: AbstractState) -> str:
    """Polyhedron block, then the register and address mappings."""
    if s.is_bottom:
        return "bottom"
    regs = ", ".join(f"{r}->x{s.m[r]}" for r in sorted(s.m, key=_reg_key))
    mem = ", ".join(f"x{a}->x{s.delta[a]}" if a in s.delta else f"x{a}->?"
                    for a in sorted(s.addrs))
    return f"{s.p}\nm: {regs}\ndelta: {mem}"


# --------------------------------------------------------------------------
# aliasing


def equivalent(p: Polyhedron, x1: int, x2: int) -> bool:
    return x1 == x2 or p.entails((var(x1) - var(x2)).eq(0))


def alias(s: AbstractState, x1: int, x2: int) -> Alias:
    if equivalent(s.p, x1, x2):
        return Alias.EQUIVALENT
    if s.p.intersect(Polyhedron([(var(x1) - var(x2)).eq(0)])).is_empty():
        return Alias.INDEPENDENT
    return Alias.OVERLAPPING


def is_consistent(s: AbstractState) -> bool:
    """No two distinct address variables are equivalent."""
    if s.is_bottom:
        return True
    addrs = sorted(s.addrs)
    return not any(equivalent(s.p, a, b)
                   for i, a in enumerate(addrs) for b in addrs[i + 1:])


def lookup_equivalent_address(s: AbstractState, reg: str) -> Optional[int]:
    v = s.m.get(reg)
    if v is None or s.is_bottom:
        return None
    for a in sorted(s.addrs):
        if equivalent(s.p, a, v):
            return a
    return None


# --------------------------------------------------------------------------
# merge / unify / gc


def merge(s: AbstractState, x1: int, x2: int, gen: VarGen) -> AbstractState:
    """Collapse the equivalent address variable ``x2`` into ``x1``.

    The value of ``x1`` becomes the hull of both stored values and ``x2`` is
    rebound to a fresh value variable.
    """
    if x1 == x2 or x1 not in s.addrs or x2 not in s.addrs:
        raise ValueError("merge needs two distinct address variables")
    if not equivalent(s.p, x1, x2):
        raise ValueError(f"x{x1} and x{x2} are not equivalent")
    v1, v2, v3 = gen(), gen(), gen()
    d1 = s.delta.get(x1)
    d2 = s.delta.get(x2)
    p = s.p
    p1 = p.rename({d2: v2}) if d2 is not None else p
    p2 = p.rename({d1: v1}) if d1 is not None else p
    p2 = p2.project(set(p2.dims) - {x2})
    if d2 is not None and d1 is not None:
        p2 = p2.rename({d2: d1})
    delta = dict(s.delta)
    delta[x2] = v3
    return replace(s, p=p1.hull(p2), delta=delta)


def _equivalent_pair(s: AbstractState):
    addrs = sorted(s.addrs)
    for i, a in enumerate(addrs):
        for b in addrs[i + 1:]:
            if equivalent(s.p, a, b):
                return a, b
    return None


def unify(s: AbstractState, gen: VarGen) -> AbstractState:
    """Merge equivalent address variables until the state is consistent."""
    if s.is_bottom:
        return s
    while True:
        pair = _equivalent_pair(s)
        if pair is None:
            return s
        a, b = pair
        # keep the bound value when only one side has one
        if a not in s.delta and b in s.delta:
            a, b = b, a
        s = gc(merge(s, a, b, gen))


def gc(s: AbstractState) -> AbstractState:
    """Project away variables not reachable from the mappings.

    Address bindings whose address variable ends up unconstrained carry no
    usable information and are dropped as well.
    """
    if s.is_bottom:
        return s
    p = s.p
    bound = s.bound_vars()
    if not set(p.dims) <= bound:
        p = p.project(bound)
    live = p.vars
    dead = {a for a in s.addrs if a not in live}
    if not dead and p is s.p:
        return s
    delta, addrs = s.delta, s.addrs
    if dead:
        addrs = frozenset(a for a in s.addrs if a not in dead)
        gone = {s.delta[a] for a in dead if a in s.delta}
        delta = {a: v for a, v in s.delta.items() if a not in dead}
        p = p.project(set(p.dims) - dead - gone)
    return replace(s, p=p, delta=delta, addrs=addrs)


def rename_state(s: AbstractState, subst: Mapping[int, int], gen: VarGen) -> AbstractState:
    """Simultaneously rename variables in ``p`` and both mappings.

    Variables that already carry a target name and are not renamed away are
    first moved to fresh names.
    """
    subst = {a: b for a, b in subst.items() if a != b}
    if not subst or s.is_bottom:
        return s
    occupied = set(s.p.dims) | s.bound_vars()
    clash = (occupied & set(subst.values())) - set(subst)
    full = {v: gen() for v in sorted(clash)}
    full.update(subst)
    f = lambda v: full.get(v, v)
    return AbstractState(
        s.p.rename(full),
        {r: f(v) for r, v in s.m.items()},
        {f(a): f(v) for a, v in s.delta.items()},
        frozenset(f(a) for a in s.addrs),
        {f(v): k for v, k in s.kinds.items()},
    )
