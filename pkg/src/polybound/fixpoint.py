"""Worklist fixpoint over edge states with widening at loop headers."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Protocol

from .program import CFG, Edge, LoopInfo
from .state import AbstractState, VarGen
from .transfer import join, states_equal, transfer, widen_state


class EdgeHooks(Protocol):
    def initial(self, s: AbstractState, gen: VarGen) -> AbstractState: ...

    def on_edge(self, edge: Edge, s: AbstractState, gen: VarGen) -> AbstractState: ...


@dataclass
class AnalysisResult:
    cfg: CFG
    loops: List[LoopInfo]
    edge_states: Dict[Edge, AbstractState]
    header_states: Dict[int, AbstractState]
    iterations: int
    stabilized: bool
    gen: VarGen
    hooks: Optional[EdgeHooks] = None
    narrowed: bool = False

    def state(self, edge: Edge) -> AbstractState:
        return self.edge_states.get(edge, AbstractState.bottom())

    def node_input(self, node: int) -> AbstractState:
        acc = AbstractState.bottom()
        for e in self.cfg.pred[node]:
            acc = join(acc, self.state(e), self.gen)
        return acc

    @property
    def exit_state(self) -> AbstractState:
        return self.node_input(self.cfg.exit)


@dataclass
class _Engine:
    cfg: CFG
    loops: List[LoopInfo]
    hooks: Optional[EdgeHooks]
    gen: VarGen
    delay: int = 2
    guarded: int = 8
    check: Optional[Callable[[str, AbstractState], None]] = None
    edge_states: Dict[Edge, AbstractState] = field(default_factory=dict)
    header_in: Dict[int, AbstractState] = field(default_factory=dict)
    visits: Dict[int, int] = field(default_factory=dict)
    header_entry: Dict[int, AbstractState] = field(default_factory=dict)

    def __post_init__(self):
        self.headers = {l.header: l for l in self.loops}
        self.restarted = False

    def state(self, e: Edge) -> AbstractState:
        return self.edge_states.get(e, AbstractState.bottom())

    def _join(self, a, b):
        out = join(a, b, self.gen)
        if self.check:
            self.check("join", out)
        return out

    def joined_input(self, node: int) -> AbstractState:
        acc = AbstractState.bottom()
        for e in self.cfg.pred[node]:
            acc = self._join(acc, self.state(e))
        return acc

    def ascending_input(self, node: int) -> AbstractState:
        if node not in self.headers:
            return self.joined_input(node)
        loop = self.headers[node]
        entry = AbstractState.bottom()
        for e in loop.entry_edges:
            entry = self._join(entry, self.state(e))
        prev = self.header_in.get(node)
        seen = self.header_entry.get(node)
        if prev is None or seen is None or not states_equal(seen, entry, self.gen):
            # new entry context (an enclosing loop moved on): restart this
            # loop from its entry state, as in the recursive strategy
            self.header_entry[node] = entry
            self.visits[node] = 1
            self.header_in[node] = entry
            self.restarted = True
            return entry
        new = entry
        for e in loop.back_edges:
            new = self._join(new, self.state(e))
        k = self.visits[node] + 1
        self.visits[node] = k
        if k <= self.delay:
            out = self._join(prev, new)
        else:
            # the first few widenings keep stable octagonal bounds
            out = widen_state(prev, new, self.gen, guarded=k <= self.delay + self.guarded)
            if self.check:
                self.check("widen", out)
        self.header_in[node] = out
        return out

    def outputs(self, node: int, s: AbstractState) -> Dict[Edge, AbstractState]:
        ins = self.cfg.instruction(node)
        res = transfer(ins, s, self.gen)
        if self.check:
            for t in res.values():
                self.check(ins.op, t)
        out = {}
        for e in self.cfg.succ[node]:
            t = res[e.kind]
            if self.hooks is not None and not t.is_bottom:
                t = self.hooks.on_edge(e, t, self.gen)
            out[e] = t
        return out

    def seed(self):
        e = self.cfg.entry_edge
        s = AbstractState.initial()
        if self.hooks is not None:
            s = self.hooks.initial(s, self.gen)
            s = self.hooks.on_edge(e, s, self.gen)
        self.edge_states[e] = s


def analyze(cfg: CFG, loops: List[LoopInfo], hooks: Optional[EdgeHooks] = None, *,
            widening_delay: int = 2, guarded_widenings: int = 8, narrowing: bool = True,
            max_iterations: Optional[int] = None, order: str = "rpo",
            gen: Optional[VarGen] = None,
            check: Optional[Callable[[str, AbstractState], None]] = None) -> AnalysisResult:
    """Compute an abstract state for every edge.

    ``order`` is "rpo" (priority by reverse postorder) or "fifo".  ``check``
    is called with every state produced by a transfer, join or widening.
    """
    gen = gen or VarGen()
    cap = max_iterations if max_iterations is not None else 10 * len(cfg.edges)
    eng = _Engine(cfg, loops, hooks, gen, widening_delay, guarded_widenings, check)
    eng.seed()

    rank = {v: i for i, v in enumerate(cfg.rpo())}
    if order == "rpo":
        heap: list = [(rank[1], 1)]
        pop = lambda: heapq.heappop(heap)[1]
        push = lambda v: heapq.heappush(heap, (rank[v], v))
        # after the loop body, so the back edges are recomputed first
        late = {l.header: max(rank[e.src] for e in l.back_edges) + 0.5 for l in loops}
        push_late = lambda v: heapq.heappush(heap, (late[v], v))
        pending = lambda: bool(heap)
    elif order == "fifo":
        queue = deque([1])
        pop, push, pending = queue.popleft, queue.append, lambda: bool(queue)
        push_late = push
    else:
        raise ValueError(f"unknown order {order!r}")
    queued = {1}

    iterations = 0
    while pending():
        if iterations >= cap:
            return AnalysisResult(cfg, loops, eng.edge_states, eng.header_in,
                                  iterations, False, gen, hooks)
        node = pop()
        queued.discard(node)
        iterations += 1
        eng.restarted = False
        s = eng.ascending_input(node)
        if eng.restarted:
            # back edges were ignored on this visit; come back for them
            queued.add(node)
            push_late(node)
        for e, t in eng.outputs(node, s).items():
            if states_equal(eng.state(e), t, gen):
                continue
            eng.edge_states[e] = t
            if e.dst != cfg.exit and e.dst not in queued:
                queued.add(e.dst)
                push(e.dst)

    result = AnalysisResult(cfg, loops, eng.edge_states, eng.header_in,
                            iterations, True, gen, hooks)
    if narrowing:
        result = narrow(result, check=check)
    return result


def narrow(result: AnalysisResult, check=None) -> AnalysisResult:
    """One descending pass in reverse postorder, headers joining their inputs."""
    cfg = result.cfg
    eng = _Engine(cfg, result.loops, result.hooks, result.gen, check=check)
    eng.edge_states = dict(result.edge_states)
    eng.seed()
    header_in = dict(result.header_states)
    iterations = result.iterations
    for node in cfg.rpo():
        if node in (0, cfg.exit):
            continue
        iterations += 1
        s = eng.joined_input(node)
        if node in eng.headers:
            header_in[node] = s
        eng.edge_states.update(eng.outputs(node, s))
    return AnalysisResult(cfg, result.loops, eng.edge_states, header_in, iterations,
                          result.stabilized, result.gen, result.hooks, narrowed=True)


def recompute(result: AnalysisResult) -> Dict[Edge, AbstractState]:
    """Edge states obtained by re-evaluating every node once from its inputs.

    Headers take ``widen(header_state, join of inputs)`` as in the ascending
    phase; used to check the fixpoint property.
    """
    eng = _Engine(result.cfg, result.loops, result.hooks, result.gen)
    eng.edge_states = dict(result.edge_states)
    out = {}
    for node in result.cfg.rpo():
        if node in (0, result.cfg.exit):
            continue
        s = eng.joined_input(node)
        if node in eng.headers and node in result.header_states:
            s = widen_state(result.header_states[node], s, result.gen)
        out.update(eng.outputs(node, s))
    return out
