"""Concrete interpreter used as a soundness oracle for the analysis.

Arithmetic is on ideal integers.  EQ and LT store the difference of their
operands, tagged with the comparison kind so that branches can consult the
comparison outcome: after EQ a register is true when the operands differ,
after LT when the difference is negative, otherwise when it is nonzero.
The loop counters of :class:`~polybound.loopbound.LoopCounters` are mirrored
as ordinary registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .poly import Polyhedron, var
from .program import CFG, Edge, LoopInfo
from .loopbound import LoopCounters, rm_name, rt_name

Valuation = Tuple[FrozenSet[Tuple[str, int]], FrozenSet[Tuple[int, int]]]


@dataclass
class ConcreteResult:
    edge_values: Dict[Edge, Set[Valuation]] = field(default_factory=dict)
    # per loop header: largest back-edge count within one execution, and the
    # number of back-edge traversals over the whole run
    max_iterations: Dict[int, int] = field(default_factory=dict)
    total_iterations: Dict[int, int] = field(default_factory=dict)
    steps: int = 0
    halted: Optional[str] = None  # reason a trace stopped early
    truncated: bool = False

    def merge(self, other: "ConcreteResult") -> None:
        for e, vals in other.edge_values.items():
            self.edge_values.setdefault(e, set()).update(vals)
        for h, k in other.max_iterations.items():
            self.max_iterations[h] = max(self.max_iterations.get(h, 0), k)
        for h, k in other.total_iterations.items():
            self.total_iterations[h] = max(self.total_iterations.get(h, 0), k)
        self.steps += other.steps
        self.truncated = self.truncated or other.truncated


class _Halt(Exception):
    pass


def run(cfg: CFG, loops: List[LoopInfo], inputs: Optional[Mapping[str, int]] = None,
        step_cap: int = 100_000, counters: bool = True) -> ConcreteResult:
    """Execute one trace, recording the valuation seen on every edge."""
    res = ConcreteResult()
    regs: Dict[str, int] = dict(inputs or {})
    tags: Dict[str, str] = {}
    mem: Dict[int, int] = {}
    hooks = LoopCounters(cfg, loops) if counters else None
    if hooks is not None:
        for r in hooks.registers():
            regs[r] = 0
    count = {l.header: 0 for l in loops}
    for l in loops:
        res.max_iterations[l.header] = 0
        res.total_iterations[l.header] = 0

    def read(r):
        if r not in regs:
            raise _Halt(f"read of undefined register {r}")
        return regs[r]

    def traverse(e: Edge):
        for l in hooks.backs.get(e, ()) if hooks else ():
            count[l.header] += 1
            res.total_iterations[l.header] += 1
            res.max_iterations[l.header] = max(res.max_iterations[l.header], count[l.header])
        for l in hooks.entries.get(e, ()) if hooks else ():
            count[l.header] = 0
        if hooks is not None:
            for l in [*hooks.backs.get(e, ()), *hooks.entries.get(e, ())]:
                for r in hooks.nested[l.header]:
                    regs.pop(r, None)
            for l in hooks.backs.get(e, ()):
                regs[rm_name(l)] = regs.get(rm_name(l), 0) + 1
                if hooks.has_total(l):
                    regs[rt_name(l)] = regs.get(rt_name(l), 0) + 1
            for l in hooks.entries.get(e, ()):
                regs[rm_name(l)] = 0
        vals = (frozenset(regs.items()), frozenset(mem.items()))
        res.edge_values.setdefault(e, set()).add(vals)
        return e.dst

    node = traverse(cfg.entry_edge)
    try:
        while node != cfg.exit:
            if res.steps >= step_cap:
                res.truncated = True
                break
            res.steps += 1
            ins = cfg.instruction(node)
            succ = {e.kind: e for e in cfg.succ[node]}
            op = ins.op
            if ins.is_binop:
                rd, ra, rb = ins.regs
                a, b = read(ra), read(rb)
                if op == "ADD":
                    v = a + b
                elif op in ("SUB", "EQ", "LT"):
                    v = a - b
                elif op == "MUL":
                    v = a * b
                elif op == "AND":
                    v = a & b
                elif op == "OR":
                    v = a | b
                else:
                    v = a ^ b
                regs[rd] = v
                if op in ("EQ", "LT"):
                    tags[rd] = op
                else:
                    tags.pop(rd, None)
                node = traverse(succ["next"])
            elif ins.is_branch:
                rc = ins.regs[0]
                v = read(rc)
                truth = v < 0 if tags.get(rc) == "LT" else v != 0
                taken = truth if op == "BNZ" else not truth
                node = traverse(succ["taken" if taken else "fall"])
            elif op == "LOADI":
                regs[ins.regs[0]] = ins.imm
                tags.pop(ins.regs[0], None)
                node = traverse(succ["next"])
            elif op == "LOAD":
                rd, ra = ins.regs
                a = read(ra)
                if a not in mem:
                    raise _Halt(f"load from undefined address {a}")
                regs[rd] = mem[a]
                tags.pop(rd, None)
                node = traverse(succ["next"])
            elif op == "STORE":
                ra, rv = ins.regs
                mem[read(ra)] = read(rv)
                node = traverse(succ["next"])
            else:  # HALT
                node = traverse(succ["next"])
    except _Halt as exc:
        res.halted = f"L{node}: {exc}"
    return res


# --------------------------------------------------------------------------
# soundness check


@dataclass
class Violation:
    edge: Edge
    valuation: Valuation
    reason: str

    def __str__(self):
        regs = ", ".join(f"{r}={v}" for r, v in sorted(self.valuation[0]))
        mem = ", ".join(f"[{a}]={v}" for a, v in sorted(self.valuation[1]))
        return f"{self.edge}: {self.reason} ({regs}; {mem})"


def satisfies(s, regs: Mapping[str, int], mem: Mapping[int, int]) -> bool:
    """Whether some choice of the address variables matches this valuation.

    Register variables take the register values.  Each address variable
    either names a defined address, in which case its value variable takes
    the stored word, or lies outside the defined addresses.
    """
    if s.is_bottom:
        return False
    cons = []
    for r, v in s.m.items():
        if r in regs:
            cons.append(var(v).eq(regs[r]))
    p = s.p.add_constraints(cons) if cons else s.p
    if p.is_empty():
        return False
    addrs = sorted(s.addrs)
    defined = sorted(mem)
    gaps = []  # maximal integer intervals holding no defined address
    lo = None
    for a in defined:
        gaps.append((lo, a - 1))
        lo = a + 1
    gaps.append((lo, None))

    def search(p: Polyhedron, i: int) -> bool:
        if i == len(addrs):
            return True
        a = addrs[i]
        lo_a, hi_a = p.minimize(var(a)), p.maximize(var(a))
        for c in defined:
            if c < lo_a or c > hi_a:
                continue
            extra = [var(a).eq(c)]
            if a in s.delta:
                extra.append(var(s.delta[a]).eq(mem[c]))
            q = p.add_constraints(extra)
            if not q.is_empty() and search(q, i + 1):
                return True
        for g_lo, g_hi in gaps:
            if g_lo is not None and g_hi is not None and g_lo > g_hi:
                continue
            if g_hi is not None and g_hi < lo_a or g_lo is not None and g_lo > hi_a:
                continue
            extra = []
            if g_lo is not None:
                extra.append(var(a) >= g_lo)
            if g_hi is not None:
                extra.append(var(a) <= g_hi)
            q = p.add_constraints(extra) if extra else p
            if not q.is_empty() and search(q, i + 1):
                return True
        return False

    return search(p, 0)


def check_soundness(result, concrete: ConcreteResult) -> List[Violation]:
    """Concrete valuations that escape the abstract state of their edge."""
    out = []
    for e, vals in concrete.edge_values.items():
        s = result.state(e)
        for val in sorted(vals, key=lambda v: (sorted(v[0]), sorted(v[1]))):
            regs, mem = dict(val[0]), dict(val[1])
            if s.is_bottom:
                out.append(Violation(e, val, "edge is unreachable in the analysis"))
            elif not satisfies(s, regs, mem):
                out.append(Violation(e, val, "valuation outside the edge polyhedron"))
    return out
