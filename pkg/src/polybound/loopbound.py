"""Max and total loop bounds from virtual counter registers.

Each loop gets ``rm`` (back-edge traversals since the last entry) and each
nested loop also gets ``rt`` (back-edge traversals over the whole run).  On
the exit edges of an inner loop whose parent is outermost, ``rt`` is capped
by the triangular sum derived from a linear relation between the two ``rm``
counters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .poly import UNBOUNDED, LinExpr, Polyhedron, var
from .program import CFG, Edge, LoopInfo
from .state import AbstractState, VarGen, gc
from .transfer import assign

UNKNOWN = "unknown"
Bound = Union[int, float, str]  # integer, math.inf (unbounded) or UNKNOWN


def rm_name(loop: LoopInfo) -> str:
    return f"rm@{loop.header}"


def rt_name(loop: LoopInfo) -> str:
    return f"rt@{loop.header}"


def total(A, B, C, M: int) -> Optional[int]:
    """``sum(max(0, floor((C - B*i) / A)) for i in range(M))``; None if A <= 0."""
    A, B, C = Fraction(A), Fraction(B), Fraction(C)
    if A <= 0 or M < 0:
        return None
    return sum(max(0, math.floor((C - B * i) / A)) for i in range(M))


def relations(p: Polyhedron, x1: int, x2: int) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """All ``A*x1 + B*x2 <= C`` with ``A > 0`` in the shadow on {x1, x2}."""
    if p.is_empty():
        return []
    out = []
    for c in p.project({x1, x2}).constraints:
        t = dict(c.terms)
        # "le" stores sum(t) <= constant; "eq" gives both directions
        forms = [(t, c.constant)]
        if c.relation == "eq":
            forms.append(({v: -k for v, k in t.items()}, -c.constant))
        for terms, const in forms:
            a = Fraction(terms.get(x1, 0))
            if a > 0:
                out.append((a, Fraction(terms.get(x2, 0)), Fraction(const)))
    return out


def relation(p: Polyhedron, x1: int, x2: int, M: Optional[int] = None):
    """Relation ``(A, B, C)`` between ``x1`` and ``x2``, or None.

    With ``M`` the candidate giving the smallest :func:`total` is chosen.
    """
    cands = relations(p, x1, x2)
    if not cands:
        return None
    if M is None:
        return min(cands, key=lambda r: (r[0], abs(r[1]), r[2]))
    return min(cands, key=lambda r: (total(*r, M), r[0], abs(r[1]), r[2]))


@dataclass
class TotalDiagnostic:
    relation: Tuple[Fraction, Fraction, Fraction]
    M: int
    bound: int


class LoopCounters:
    """Edge hooks maintaining the virtual counters of every loop."""

    def __init__(self, cfg: CFG, loops: List[LoopInfo]):
        self.cfg = cfg
        self.loops = {l.header: l for l in loops}
        self.entries: Dict[Edge, List[LoopInfo]] = {}
        self.backs: Dict[Edge, List[LoopInfo]] = {}
        self.exits: Dict[Edge, List[LoopInfo]] = {}
        for l in loops:
            for e in l.entry_edges:
                self.entries.setdefault(e, []).append(l)
            for e in l.back_edges:
                self.backs.setdefault(e, []).append(l)
            for e in l.exit_edges:
                self.exits.setdefault(e, []).append(l)
        # innermost loops first on shared exit edges
        for lst in self.exits.values():
            lst.sort(key=lambda l: len(l.body))
        self.diagnostics: Dict[int, TotalDiagnostic] = {}
        # max counters of strictly nested loops are dead on the enclosing
        # loop's entry and back edges (they are reset on re-entry)
        self.nested: Dict[int, List[str]] = {
            l.header: [rm_name(k) for k in loops if k is not l and k.body < l.body]
            for l in loops}

    def has_total(self, loop: LoopInfo) -> bool:
        return loop.parent is not None

    def capped(self, loop: LoopInfo) -> bool:
        """Whether the exit hook bounds ``rt`` of this loop."""
        return loop.parent is not None and self.loops[loop.parent].parent is None

    def registers(self) -> List[str]:
        out = []
        for l in self.loops.values():
            out.append(rm_name(l))
            if self.has_total(l):
                out.append(rt_name(l))
        return out

    def initial(self, s: AbstractState, gen: VarGen) -> AbstractState:
        for r in self.registers():
            s = assign(s, r, LinExpr({}, 0), gen)
        return s

    def on_edge(self, edge: Edge, s: AbstractState, gen: VarGen) -> AbstractState:
        if s.is_bottom:
            return s
        for l in self.exits.get(edge, ()):
            if self.capped(l):
                s = hook_exit_total(s, l, self.loops[l.parent], gen, self.diagnostics)
        for l in [*self.backs.get(edge, ()), *self.entries.get(edge, ())]:
            s = forget(s, self.nested[l.header])
        for l in self.backs.get(edge, ()):
            s = hook_iter_max(s, l, gen)
            if self.has_total(l):
                s = hook_iter_total(s, l, gen)
        for l in self.entries.get(edge, ()):
            s = hook_entry_max(s, l, gen)
        return s


def forget(s: AbstractState, regs: List[str]) -> AbstractState:
    if not any(r in s.m for r in regs):
        return s
    m = {r: v for r, v in s.m.items() if r not in regs}
    return gc(replace(s, m=m))


def _increment(s: AbstractState, reg: str, gen: VarGen) -> AbstractState:
    v = s.m.get(reg)
    return assign(s, reg, None if v is None else var(v) + 1, gen)


def hook_entry_max(s: AbstractState, loop: LoopInfo, gen: VarGen) -> AbstractState:
    return assign(s, rm_name(loop), LinExpr({}, 0), gen)


def hook_iter_max(s: AbstractState, loop: LoopInfo, gen: VarGen) -> AbstractState:
    return _increment(s, rm_name(loop), gen)


def hook_iter_total(s: AbstractState, loop: LoopInfo, gen: VarGen) -> AbstractState:
    return _increment(s, rt_name(loop), gen)


def hook_exit_total(s: AbstractState, inner: LoopInfo, outer: LoopInfo, gen: VarGen,
                    diagnostics: Optional[dict] = None) -> AbstractState:
    xi, xo, xt = (s.m.get(rm_name(inner)), s.m.get(rm_name(outer)), s.m.get(rt_name(inner)))
    if s.is_bottom or None in (xi, xo, xt):
        return s
    top = s.p.maximize(var(xo))
    if top is None or top == UNBOUNDED:
        return s
    # the outer counter at this exit is 0-based, so M = max + 1 iterations
    M = math.floor(top) + 1
    rel = relation(s.p, xi, xo, M)
    if rel is None:
        return s
    t = total(*rel, M)
    if diagnostics is not None:
        diagnostics[inner.header] = TotalDiagnostic(rel, M, t)
    return s.with_p(s.p.add_constraints([var(xt) <= t]))


# --------------------------------------------------------------------------
# report


@dataclass
class LoopBound:
    loop: LoopInfo
    max_bound: Bound
    total_bound: Bound
    relation: Optional[Tuple[Fraction, Fraction, Fraction]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.loop.name


@dataclass
class BoundReport:
    loops: List[LoopBound]

    def __iter__(self):
        return iter(self.loops)

    def by_name(self, name: str) -> LoopBound:
        for b in self.loops:
            if b.name == name:
                return b
        raise KeyError(name)


def _as_bound(value) -> Bound:
    if value is None:
        return UNKNOWN
    if value == UNBOUNDED:
        return math.inf
    return max(0, math.floor(value))


def _max_over(states: List[AbstractState], reg: str):
    best = None
    for s in states:
        v = s.m.get(reg)
        if v is None:
            return None
        hi = s.p.maximize(var(v))
        if hi == UNBOUNDED:
            return UNBOUNDED
        if best is None or hi > best:
            best = hi
    return best


def format_bound(b: Bound) -> str:
    if b == math.inf:
        return "unbounded"
    return str(b)


def report(result, loops: Optional[List[LoopInfo]] = None) -> BoundReport:
    """Bounds read off the states on each loop's exit edges."""
    loops = loops if loops is not None else result.loops
    counters = result.hooks if isinstance(result.hooks, LoopCounters) else None
    out = []
    for l in sorted(loops, key=lambda l: l.header):
        notes = []
        exits = [result.state(e) for e in l.exit_edges]
        exits = [s for s in exits if not s.is_bottom]
        header_reached = not result.node_input(l.header).is_bottom
        if not header_reached:
            mx = 0
            notes.append("loop is unreachable")
        elif not exits:
            mx = UNKNOWN
            notes.append("no exit edge is reachable")
        else:
            mx = _as_bound(_max_over(exits, rm_name(l)))
        rel = None
        if l.parent is None:
            tot = mx
        elif not header_reached:
            tot = 0
        elif not exits:
            tot = UNKNOWN
        else:
            tot = _as_bound(_max_over(exits, rt_name(l)))
            if counters is not None and l.header in counters.diagnostics:
                rel = counters.diagnostics[l.header].relation
            if tot == math.inf and rel is None:
                tot = UNKNOWN
                notes.append("no relation between inner and outer counters")
        out.append(LoopBound(l, mx, tot, rel, notes))
    return BoundReport(out)


def bounds_for(text: str, **kwargs) -> BoundReport:
    """Parse, analyze and report in one call."""
    from .fixpoint import analyze
    from .program import load

    cfg, loops = load(text)
    return report(analyze(cfg, loops, LoopCounters(cfg, loops), **kwargs))
