import pytest

from polybound.program import (IrreducibleError, ParseError, build_cfg, dominators,
                               find_loops, load, parse)

from conftest import corpus_text

IRREDUCIBLE = """
        LOADI r1, 1
        BNZ @b, r1
@a:     ADD r2, r2, r1
@b:     ADD r3, r3, r1
        BNZ @a, r1
        HALT
"""


def test_parse_operands_and_labels():
    prog = parse("@top: LOADI R1, -4  # comment\n ADD r2, r1, r1\n BNZ @top, r2\n")
    assert len(prog) == 3
    assert prog[1].op == "LOADI" and prog[1].regs == ("r1",) and prog[1].imm == -4
    assert prog[2].regs == ("r2", "r1", "r1")
    assert prog[3].target == 1
    assert prog.labels == {"top": 1}


def test_register_branch_target_resolves_through_loadi():
    prog = parse(corpus_text("worked"))
    assert prog[7].op == "BNZ" and prog[7].target == 9


def test_label_after_last_instruction_is_exit():
    cfg, loops = load("LOADI r1, 0\nBZ @end, r1\nLOADI r2, 1\n@end:\n")
    assert (2, cfg.exit, "taken") in [(e.src, e.dst, e.kind) for e in cfg.edges]
    assert loops == []


@pytest.mark.parametrize("text,line", [
    ("LOADI r1, 1\nFROB r1\n", 2),
    ("LOADI r1\n", 1),
    ("ADD r1, r2, r40\n", 1),
    ("BNZ @nowhere, r1\n", 1),
    ("@x:\n@x: HALT\n", 2),
    ("LOADI r1, 1.5\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == line


def test_empty_program_rejected():
    with pytest.raises(ParseError):
        parse("# nothing here\n")


def test_unresolvable_register_target():
    with pytest.raises(ParseError):
        parse("ADD r4, r1, r2\nBNZ r4, r1\nHALT\n")


def test_cfg_edges_and_rpo():
    cfg = build_cfg(parse(corpus_text("worked")))
    assert cfg.exit == 10
    kinds = {(e.src, e.dst): e.kind for e in cfg.edges}
    assert kinds[(7, 9)] == "taken" and kinds[(7, 8)] == "fall"
    assert kinds[(0, 1)] == "entry"
    order = cfg.rpo()
    assert order[0] == 0 and order.index(7) < order.index(8) < order.index(9)


def test_dominators_of_nested_loops():
    cfg, loops = load(corpus_text("triangular"))
    dom = dominators(cfg)
    assert {4, 7} <= dom[9]
    assert 9 not in dom[11]


def test_nested_loop_structure():
    _, loops = load(corpus_text("triangular"))
    outer, inner = loops
    assert (outer.name, inner.name) == ("outer", "inner")
    assert inner.parent == outer.header and outer.parent is None
    assert inner.body < outer.body
    assert [e.src for e in inner.back_edges] == [10]
    assert {e.dst for e in outer.exit_edges} == {13}


def test_irreducible_cfg_rejected():
    with pytest.raises(IrreducibleError):
        find_loops(build_cfg(parse(IRREDUCIBLE)))
