"""Abstract transformers for each instruction, plus the state join/widening."""

from __future__ import annotations

from dataclasses import replace
from typing import Dict, List, Optional, Tuple

from .poly import UNBOUNDED, LinExpr, Polyhedron, var
from .program import Instruction
from .state import (Alias, AbstractState, VarGen, alias, equivalent, gc,
                    lookup_equivalent_address, rename_state, unify)

LT, OPAQUE = "lt", "opaque"


def _finish(s: AbstractState, gen: VarGen) -> AbstractState:
    if s.is_bottom:
        return AbstractState.bottom()
    return unify(gc(s), gen)


def _operand(s: AbstractState, reg: str, gen: VarGen) -> Tuple[AbstractState, int]:
    """Variable of ``reg``, binding a fresh one when the register is unset."""
    v = s.m.get(reg)
    if v is None:
        v = gen()
        s = s.bind(reg, v)
    return s, v


def _constant(p: Polyhedron, v: int):
    hi = p.maximize(var(v))
    if hi is None or hi == UNBOUNDED:
        return None
    lo = p.minimize(var(v))
    return hi if lo == hi else None


def assign(s: AbstractState, reg: str, expr: Optional[LinExpr], gen: VarGen,
           kind: Optional[str] = None) -> AbstractState:
    """``m[reg: x]`` for fresh x, constrained by ``x = expr`` when given."""
    if s.is_bottom:
        return s
    x = gen()
    p = s.p
    if expr is not None:
        p = p.add_constraints([(var(x) - expr).eq(0)])
    return s.with_p(p).bind(reg, x, kind)


def update_binop(ins: Instruction, s: AbstractState, gen: VarGen) -> AbstractState:
    if s.is_bottom:
        return s
    rd, ra, rb = ins.regs
    s, a = _operand(s, ra, gen)
    s, b = _operand(s, rb, gen)
    expr, kind = None, None
    if ins.op == "ADD":
        expr = var(a) + var(b)
    elif ins.op in ("SUB", "EQ", "LT"):
        # comparisons keep the difference as a witness, tagged for branches
        expr = var(a) - var(b)
        kind = LT if ins.op == "LT" else None
    elif ins.op == "MUL":
        ca = _constant(s.p, a)
        cb = _constant(s.p, b) if ca is None else None
        if ca is not None and ca.denominator == 1:
            expr = var(b) * int(ca)
        elif cb is not None and cb.denominator == 1:
            expr = var(a) * int(cb)
    return _finish(assign(s, rd, expr, gen, kind), gen)


def update_loadi(ins: Instruction, s: AbstractState, gen: VarGen) -> AbstractState:
    (rd,) = ins.regs
    return _finish(assign(s, rd, LinExpr({}, ins.imm), gen), gen)


def branch_filters(ins: Instruction, s: AbstractState):
    """Constraints (taken, not_taken) for a conditional branch; None = nothing."""
    x = s.m.get(ins.regs[0])
    if x is None:
        return None, None
    kind = s.kinds.get(x)
    if kind == OPAQUE:
        return None, None
    if kind == LT:
        true, false = var(x) <= -1, var(x) >= 0
    else:
        true, false = None, var(x).eq(0)
    return (true, false) if ins.op == "BNZ" else (false, true)


def update_branch(ins: Instruction, s: AbstractState, gen: VarGen):
    if s.is_bottom:
        return s, s
    out = []
    for c in branch_filters(ins, s):
        t = s if c is None else s.with_p(s.p.add_constraints([c]))
        out.append(_finish(t, gen))
    return tuple(out)


def update_load(ins: Instruction, s: AbstractState, gen: VarGen) -> AbstractState:
    if s.is_bottom:
        return s
    rd, ra = ins.regs
    a = lookup_equivalent_address(s, ra)
    expr = var(s.delta[a]) if a is not None and a in s.delta else None
    return _finish(assign(s, rd, expr, gen), gen)


def _replace(s: AbstractState, a: int, value: int, gen: VarGen) -> AbstractState:
    x = gen()
    delta = dict(s.delta)
    delta[a] = x
    p = s.p.add_constraints([(var(x) - var(value)).eq(0)])
    return replace(s, p=p, delta=delta)


def _create(s: AbstractState, addr: int, value: int, gen: VarGen) -> AbstractState:
    xa, xv = gen(), gen()
    delta = dict(s.delta)
    delta[xa] = xv
    p = s.p.add_constraints([(var(xa) - var(addr)).eq(0), (var(xv) - var(value)).eq(0)])
    return replace(s, p=p, delta=delta, addrs=s.addrs | {xa})


def update_store(ins: Instruction, s: AbstractState, gen: VarGen) -> AbstractState:
    if s.is_bottom:
        return s
    ra, rv = ins.regs
    s, addr = _operand(s, ra, gen)
    s, value = _operand(s, rv, gen)
    cur = s
    # weak updates of every may-alias (but not must-alias) location
    for a in sorted(s.addrs):
        if a in cur.addrs and alias(cur, a, cur.m[ra]) is Alias.OVERLAPPING:
            cur = join(_replace(cur, a, cur.m[rv], gen), cur, gen)
    addr, value = cur.m[ra], cur.m[rv]
    hit = lookup_equivalent_address(cur, ra)
    if hit is not None:
        cur = _replace(cur, hit, value, gen)
    else:
        cur = _create(cur, addr, value, gen)
    return _finish(cur, gen)


def transfer(ins: Instruction, s: AbstractState, gen: VarGen) -> Dict[str, AbstractState]:
    """Out-states keyed by edge kind ("next", or "taken"/"fall" for branches)."""
    if ins.is_branch:
        taken, fall = update_branch(ins, s, gen)
        return {"taken": taken, "fall": fall}
    if ins.is_binop:
        return {"next": update_binop(ins, s, gen)}
    if ins.op == "LOADI":
        return {"next": update_loadi(ins, s, gen)}
    if ins.op == "LOAD":
        return {"next": update_load(ins, s, gen)}
    if ins.op == "STORE":
        return {"next": update_store(ins, s, gen)}
    return {"next": s}  # HALT


# --------------------------------------------------------------------------
# join


def _same_location(p12: Polyhedron, p1: Polyhedron, p2: Polyhedron, x1: int, x2: int) -> bool:
    if not p12.is_empty():
        return equivalent(p12, x1, x2)
    # disjoint inputs: fall back to both sides pinning the same constant
    c1 = _constant(p1, x1)
    return c1 is not None and c1 == _constant(p2, x2)


def match_addresses(s1: AbstractState, s2: AbstractState) -> List[Tuple[int, int]]:
    """Greedy one-to-one pairing of address variables denoting the same cell."""
    pairs = [(a, a) for a in sorted(s1.addrs & s2.addrs)]
    left = sorted(s1.addrs - s2.addrs)
    right = sorted(s2.addrs - s1.addrs)
    if left and right:
        p12 = s1.p.intersect(s2.p)
        for x1 in left:
            for x2 in right:
                if _same_location(p12, s1.p, s2.p, x1, x2):
                    pairs.append((x1, x2))
                    right.remove(x2)
                    break
    return pairs


def align(s1: AbstractState, s2: AbstractState, gen: VarGen) -> AbstractState:
    """Rename ``s1`` so matched locations use the variable names of ``s2``."""
    subst = {}
    for x1, x2 in match_addresses(s1, s2):
        subst[x1] = x2
        if x1 in s1.delta and x2 in s2.delta:
            subst[s1.delta[x1]] = s2.delta[x2]
    for r in sorted(s1.m.keys() & s2.m.keys()):
        subst.setdefault(s1.m[r], s2.m[r])
    # a variable must not receive two names
    seen, clean = set(), {}
    for k, v in subst.items():
        if v not in seen:
            clean[k] = v
            seen.add(v)
    return rename_state(s1, clean, gen)


def _combine(s1: AbstractState, s2: AbstractState, gen: VarGen, widening: bool,
             guarded: bool = False) -> AbstractState:
    if s1.is_bottom:
        return s2
    if s2.is_bottom:
        return s1
    s1, s2 = gc(s1), gc(s2)
    a1 = align(s1, s2, gen)
    if widening:
        p = a1.p.widen(s2.p, s2.bound_vars() if guarded else None)
    else:
        p = a1.p.hull(s2.p)

    m, kinds = {}, {}
    for r in sorted(a1.m.keys() | s2.m.keys()):
        v1, v2 = a1.m.get(r), s2.m.get(r)
        v = v2 if v1 == v2 else gen()
        m[r] = v
        k1 = a1.kinds.get(v1) if v1 is not None else None
        k2 = s2.kinds.get(v2) if v2 is not None else None
        if v1 is None or v2 is None:
            k = k1 or k2
        else:
            k = k1 if k1 == k2 else OPAQUE
        if k is not None:
            kinds[v] = k
    delta = {}
    for a in a1.addrs | s2.addrs:
        d1, d2 = a1.delta.get(a) if a in a1.addrs else None, s2.delta.get(a) if a in s2.addrs else None
        if a in a1.addrs and a in s2.addrs and d1 is not None and d1 == d2:
            delta[a] = d1
        elif d1 is not None or d2 is not None:
            delta[a] = gen()
    out = AbstractState(p, m, delta, frozenset(a1.addrs | s2.addrs), kinds)
    return _finish(out, gen)


def join(s1: AbstractState, s2: AbstractState, gen: VarGen) -> AbstractState:
    return _combine(s1, s2, gen, widening=False)


def widen_state(s1: AbstractState, s2: AbstractState, gen: VarGen,
                guarded: bool = False) -> AbstractState:
    """``s1`` is the previous state, ``s2`` the new one.

    ``guarded`` also keeps octagonal bounds that are stable between the two
    (see :meth:`Polyhedron.widen`).
    """
    return _combine(s1, s2, gen, widening=True, guarded=guarded)


def states_equal(s1: AbstractState, s2: AbstractState, gen: VarGen) -> bool:
    """Equality up to renaming of variables bound to the same locations."""
    if s1.is_bottom or s2.is_bottom:
        return s1.is_bottom and s2.is_bottom
    s1, s2 = gc(s1), gc(s2)
    if s1.m.keys() != s2.m.keys() or len(s1.addrs) != len(s2.addrs):
        return False
    a1 = align(s1, s2, gen)
    if a1.m != s2.m or a1.addrs != s2.addrs or a1.delta != s2.delta:
        return False
    if {r: a1.kinds.get(v) for r, v in a1.m.items()} != {r: s2.kinds.get(v) for r, v in s2.m.items()}:
        return False
    return a1.p.includes(s2.p) and s2.p.includes(a1.p)
