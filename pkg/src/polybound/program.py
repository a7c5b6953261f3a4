"""Toy ISA parsing, instruction graph, dominators and natural loops.

Instructions are numbered from 1. Node 0 is a virtual entry with a single
edge into instruction 1, and node ``n + 1`` is a virtual exit collecting
HALT and fall-off-the-end edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple

BINOPS = ("ADD", "SUB", "MUL", "EQ", "LT", "AND", "OR", "XOR")
BRANCHES = ("BNZ", "BZ")
OPCODES = BINOPS + BRANCHES + ("LOADI", "LOAD", "STORE", "HALT")
NUM_REGS = 32
ENTRY = 0


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class IrreducibleError(ValueError):
    pass


@dataclass(frozen=True)
class Instruction:
    index: int
    op: str
    regs: Tuple[str, ...] = ()
    imm: Optional[int] = None
    target: Optional[int] = None
    line: int = 0

    @property
    def is_branch(self) -> bool:
        return self.op in BRANCHES

    @property
    def is_binop(self) -> bool:
        return self.op in BINOPS

    def __str__(self):
        ops = list(self.regs)
        if self.op == "LOADI":
            ops.append(str(self.imm))
        elif self.is_branch:
            ops.insert(0, f"L{self.target}")
        return f"{self.op} {', '.join(ops)}".rstrip()


@dataclass
class Program:
    instructions: List[Instruction]
    labels: Dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def __getitem__(self, index: int) -> Instruction:
        """1-based access."""
        if not 1 <= index <= len(self.instructions):
            raise IndexError(index)
        return self.instructions[index - 1]

    def label_of(self, index: int) -> Optional[str]:
        names = sorted(k for k, v in self.labels.items() if v == index)
        return names[0] if names else None


_REG = re.compile(r"r(\d+)$", re.I)
_INT = re.compile(r"[+-]?\d+$")
_LABEL = re.compile(r"@([A-Za-z_][\w.]*)$")


def _reg(tok: str, line: int) -> str:
    mo = _REG.match(tok)
    if not mo or int(mo.group(1)) >= NUM_REGS:
        raise ParseError(f"bad register {tok!r}", line)
    return f"r{int(mo.group(1))}"


def parse(text: str) -> Program:
    raw = []  # (line, op, operand tokens)
    labels: Dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        while line.startswith("@"):
            head, sep, rest = line.partition(":")
            if not sep or not _LABEL.match(head.strip()):
                raise ParseError(f"malformed label {line!r}", lineno)
            name = head.strip()[1:]
            if name in labels:
                raise ParseError(f"duplicate label @{name}", lineno)
            labels[name] = len(raw) + 1
            line = rest.strip()
        if not line:
            continue
        op, _, rest = line.partition(" ")
        op = op.upper()
        if op not in OPCODES:
            raise ParseError(f"unknown opcode {op!r}", lineno)
        toks = [t.strip() for t in rest.split(",")] if rest.strip() else []
        if any(not t for t in toks):
            raise ParseError("empty operand", lineno)
        raw.append((lineno, op, toks))
    if not raw:
        raise ParseError("no instructions")

    out = []
    for index, (lineno, op, toks) in enumerate(raw, 1):
        arity = {"LOADI": 2, "LOAD": 2, "STORE": 2, "HALT": 0}.get(op, 2 if op in BRANCHES else 3)
        if len(toks) != arity:
            raise ParseError(f"{op} takes {arity} operands, got {len(toks)}", lineno)
        if op == "LOADI":
            if not _INT.match(toks[1]):
                raise ParseError(f"bad integer {toks[1]!r}", lineno)
            out.append(Instruction(index, op, (_reg(toks[0], lineno),), imm=int(toks[1]), line=lineno))
        elif op in BRANCHES:
            cond = _reg(toks[1], lineno)
            mo = _LABEL.match(toks[0])
            if mo:
                if mo.group(1) not in labels:
                    raise ParseError(f"unknown label @{mo.group(1)}", lineno)
                target = labels[mo.group(1)]
            else:
                target = _resolve_register_target(raw, index, _reg(toks[0], lineno), labels, lineno)
            out.append(Instruction(index, op, (cond,), target=target, line=lineno))
        else:
            out.append(Instruction(index, op, tuple(_reg(t, lineno) for t in toks), line=lineno))
    return Program(out, labels)


def _resolve_register_target(raw, index, treg, labels, lineno) -> int:
    """Constant branch target held in ``treg``.

    Scans backward along straight-line code for ``LOADI treg c``; gives up at
    a label (another path may reach the branch) or any other write of treg.
    """
    targets = set(labels.values())
    j = index - 1
    while j >= 1 and j + 1 not in targets:
        ln, op, toks = raw[j - 1]
        if op in BRANCHES:
            break
        if op == "LOADI" and _reg(toks[0], ln) == treg:
            return int(toks[1])
        if op in BINOPS + ("LOAD",) and _reg(toks[0], ln) == treg:
            break
        j -= 1
    raise ParseError(f"cannot resolve branch target held in {treg}", lineno)


# --------------------------------------------------------------------------
# graph


class Edge(NamedTuple):
    src: int
    dst: int
    kind: str  # entry, next, taken, fall

    def __str__(self):
        return f"({_node_name(self.src)},{_node_name(self.dst)})"


def _node_name(n: int) -> str:
    return "entry" if n == ENTRY else f"L{n}"


@dataclass
class CFG:
    program: Program
    edges: List[Edge]

    def __post_init__(self):
        self.n = len(self.program)
        self.exit = self.n + 1
        self.succ: Dict[int, List[Edge]] = {v: [] for v in self.nodes}
        self.pred: Dict[int, List[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            self.succ[e.src].append(e)
            self.pred[e.dst].append(e)

    @property
    def nodes(self) -> range:
        return range(0, self.n + 2)

    @property
    def entry_edge(self) -> Edge:
        return self.succ[ENTRY][0]

    def instruction(self, node: int) -> Optional[Instruction]:
        return self.program[node] if 1 <= node <= self.n else None

    def node_name(self, node: int) -> str:
        if node == self.exit:
            return "exit"
        return _node_name(node)

    def edge_name(self, e: Edge) -> str:
        tag = f" {e.kind}" if e.kind in ("taken", "fall") else ""
        return f"({self.node_name(e.src)},{self.node_name(e.dst)}){tag}"

    def rpo(self) -> List[int]:
        seen, order = set(), []
        stack = [(ENTRY, iter(self.succ[ENTRY]))]
        seen.add(ENTRY)
        while stack:
            node, it = stack[-1]
            for e in it:
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append((e.dst, iter(self.succ[e.dst])))
                    break
            else:
                stack.pop()
                order.append(node)
        return order[::-1]


def build_cfg(prog: Program) -> CFG:
    n = len(prog)
    exit_node = n + 1
    edges = [Edge(ENTRY, 1, "entry")]
    for ins in prog:
        i = ins.index
        if ins.op == "HALT":
            edges.append(Edge(i, exit_node, "next"))
        elif ins.is_branch:
            if ins.target is None or not 1 <= ins.target <= exit_node:
                raise ParseError(f"branch target {ins.target} out of range", ins.line)
            edges.append(Edge(i, ins.target, "taken"))
            edges.append(Edge(i, i + 1, "fall"))
        else:
            edges.append(Edge(i, i + 1, "next"))
    cfg = CFG(prog, edges)
    reached = set(cfg.rpo())
    for ins in prog:
        if ins.index not in reached:
            raise ParseError("unreachable instruction", ins.line)
    return cfg


def dominators(cfg: CFG) -> Dict[int, FrozenSet[int]]:
    """Dominator sets of reachable nodes, iterating over reverse postorder."""
    order = cfg.rpo()
    pos = {v: i for i, v in enumerate(order)}
    idom = {ENTRY: ENTRY}

    def intersect(a, b):
        while a != b:
            while pos[a] > pos[b]:
                a = idom[a]
            while pos[b] > pos[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for v in order[1:]:
            preds = [e.src for e in cfg.pred[v] if e.src in idom]
            new = preds[0]
            for u in preds[1:]:
                new = intersect(u, new)
            if idom.get(v) != new:
                idom[v] = new
                changed = True

    dom: Dict[int, FrozenSet[int]] = {}
    for v in order:
        chain, u = {v}, v
        while u != ENTRY:
            u = idom[u]
            chain.add(u)
        dom[v] = frozenset(chain)
    return dom


@dataclass(frozen=True)
class LoopInfo:
    header: int
    back_edges: Tuple[Edge, ...]
    entry_edges: Tuple[Edge, ...]
    exit_edges: Tuple[Edge, ...]
    body: FrozenSet[int]
    parent: Optional[int] = None  # header of the enclosing loop
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label or f"L{self.header}"


def find_loops(cfg: CFG, dom: Optional[Dict[int, FrozenSet[int]]] = None) -> List[LoopInfo]:
    """Natural loops, innermost last; raises IrreducibleError."""
    if dom is None:
        dom = dominators(cfg)
    _check_reducible(cfg, dom)
    back: Dict[int, List[Edge]] = {}
    for e in cfg.edges:
        if e.src in dom and e.dst in dom[e.src] and e.dst != ENTRY:
            back.setdefault(e.dst, []).append(e)

    bodies = {}
    for h, bes in back.items():
        body = {h}
        work = [e.src for e in bes if e.src != h]
        while work:
            v = work.pop()
            if v not in body:
                body.add(v)
                work.extend(e.src for e in cfg.pred[v])
        bodies[h] = frozenset(body)

    loops = []
    for h in sorted(bodies, key=lambda h: (-len(bodies[h]), h)):
        body = bodies[h]
        enclosing = [g for g in bodies if g != h and body < bodies[g]]
        parent = min(enclosing, key=lambda g: len(bodies[g])) if enclosing else None
        loops.append(LoopInfo(
            header=h,
            back_edges=tuple(back[h]),
            entry_edges=tuple(e for e in cfg.pred[h] if e not in back[h]),
            exit_edges=tuple(e for v in sorted(body) for e in cfg.succ[v] if e.dst not in body),
            body=body,
            parent=parent,
            label=cfg.program.label_of(h),
        ))
    return loops


def _check_reducible(cfg: CFG, dom) -> None:
    # every retreating edge of a DFS must be a back-edge
    on_stack, done = {ENTRY}, set()
    stack = [(ENTRY, iter(cfg.succ[ENTRY]))]
    while stack:
        node, it = stack[-1]
        for e in it:
            if e.dst in on_stack:
                if e.dst not in dom[e.src]:
                    raise IrreducibleError(
                        f"irreducible loop: edge {cfg.edge_name(e)} enters a cycle "
                        f"bypassing {cfg.node_name(e.dst)}")
            elif e.dst not in done:
                on_stack.add(e.dst)
                stack.append((e.dst, iter(cfg.succ[e.dst])))
                break
        else:
            stack.pop()
            on_stack.discard(node)
            done.add(node)


def load(text: str):
    """Parse and build the graph; returns (cfg, loops)."""
    cfg = build_cfg(parse(text))
    return cfg, find_loops(cfg)
