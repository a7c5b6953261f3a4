import pytest

from polybound.concrete import check_soundness, run, satisfies
from polybound.fixpoint import analyze
from polybound.loopbound import LoopCounters
from polybound.poly import Polyhedron, var
from polybound.program import load
from polybound.state import AbstractState

from conftest import corpus_inputs, corpus_names, corpus_text


def trace(text, inputs=None):
    cfg, loops = load(text)
    return cfg, loops, run(cfg, loops, inputs)


def test_iteration_counts():
    _, loops, res = trace(corpus_text("triangular"))
    outer, inner = loops
    assert res.max_iterations[outer.header] == 10
    assert res.max_iterations[inner.header] == 9
    assert res.total_iterations[inner.header] == 45
    assert res.halted is None and not res.truncated


def test_comparison_tags_drive_branches():
    # LT true when negative; EQ true when the operands differ
    _, _, res = trace("LOADI r1, 3\nLOADI r2, 5\nLT r3, r2, r1\nBNZ @t, r3\nLOADI r9, 1\n@t: HALT\n")
    vals = {dict(v[0]).get("r9") for vals in res.edge_values.values() for v in vals}
    assert 1 in vals
    _, _, res = trace("LOADI r1, 3\nEQ r3, r1, r1\nBNZ @t, r3\nLOADI r9, 1\n@t: HALT\n")
    vals = {dict(v[0]).get("r9") for vals in res.edge_values.values() for v in vals}
    assert 1 in vals


def test_memory_semantics():
    _, _, res = trace("LOADI r1, 1000\nLOADI r2, 7\nSTORE r1, r2\nLOAD r3, r1\nHALT\n")
    final = [v for e, vs in res.edge_values.items() if e.src == 5 for v in vs]
    regs, mem = dict(final[0][0]), dict(final[0][1])
    assert regs["r3"] == 7 and mem == {1000: 7}


def test_undefined_reads_halt_trace():
    _, _, res = trace("LOAD r3, r1\nHALT\n")
    assert res.halted and "undefined register" in res.halted
    _, _, res = trace("LOADI r1, 5\nLOAD r3, r1\nHALT\n")
    assert "undefined address" in res.halted


def test_step_cap_truncates():
    cfg, loops = load("LOADI r1, 1\n@l: BNZ @l, r1\nHALT\n")
    res = run(cfg, loops, step_cap=50)
    assert res.truncated and res.steps == 50


def test_satisfies_searches_address_choices():
    # one abstract cell at an address in [1000, 1001] holding 4
    s = AbstractState(Polyhedron([var(1) >= 1000, var(1) <= 1001, var(2).eq(4)]),
                      {}, {1: 2}, frozenset([1]))
    assert satisfies(s, {}, {1001: 4})
    assert satisfies(s, {}, {1001: 5})  # cell may sit at 1000, outside memory
    assert not satisfies(s, {}, {1000: 5, 1001: 5})


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_is_sound(name):
    text = corpus_text(name)
    cfg, loops = load(text)
    res = analyze(cfg, loops, LoopCounters(cfg, loops))
    for inputs in corpus_inputs(text):
        conc = run(cfg, loops, inputs)
        assert check_soundness(res, conc) == []
