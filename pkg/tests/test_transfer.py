from polybound.poly import UNBOUNDED, var
from polybound.program import parse
from polybound.state import AbstractState, VarGen, is_consistent
from polybound.transfer import join, match_addresses, states_equal, transfer, widen_state


def execute(text, gen, s=None, edge="next"):
    s = s or AbstractState.initial()
    for ins in parse(text).instructions:
        out = transfer(ins, s, gen)
        s = out.get(edge, out.get("fall"))
    return s


def value(s, reg):
    v = s.m[reg]
    return s.p.minimize(var(v)), s.p.maximize(var(v))


def test_arithmetic(gen):
    s = execute("LOADI r1, 4\nLOADI r2, 5\nADD r3, r1, r2\nSUB r4, r1, r2\nMUL r5, r1, r2\n", gen)
    assert value(s, "r3") == (9, 9)
    assert value(s, "r4") == (-1, -1)
    assert value(s, "r5") == (20, 20)


def test_nonlinear_ops_forget(gen):
    s = execute("MUL r3, r1, r2\nAND r4, r1, r1\n", gen)
    assert s.p.maximize(var(s.m["r3"])) is UNBOUNDED
    assert s.p.maximize(var(s.m["r4"])) is UNBOUNDED


def test_lt_branch_filters(gen):
    s = execute("LT r3, r1, r2\n", gen)
    (ins,) = parse("BNZ @x, r3\n@x:").instructions
    out = transfer(ins, s, gen)
    assert out["taken"].p.maximize(var(out["taken"].m["r3"])) == -1
    assert out["fall"].p.minimize(var(out["fall"].m["r3"])) == 0
    r1, r2 = out["taken"].m["r1"], out["taken"].m["r2"]
    assert out["taken"].p.maximize(var(r1) - var(r2)) == -1


def test_eq_branch_only_filters_zero_side(gen):
    s = execute("EQ r3, r1, r2\n", gen)
    (ins,) = parse("BZ @x, r3\n@x:").instructions
    out = transfer(ins, s, gen)
    t = out["taken"]
    assert t.p.maximize(var(t.m["r1"]) - var(t.m["r2"])) == 0
    assert out["fall"].p.maximize(var(out["fall"].m["r3"])) is UNBOUNDED


def test_branch_on_constant_prunes(gen):
    s = execute("LOADI r1, 0\n", gen)
    (ins,) = parse("BNZ @x, r1\n@x:").instructions
    out = transfer(ins, s, gen)
    assert not out["fall"].is_bottom
    # the plain-value filter only constrains the zero side
    assert not out["taken"].is_bottom


def test_store_then_load_is_strong(gen):
    s = execute("LOADI r1, 1000\nLOADI r2, 7\nSTORE r1, r2\nLOADI r2, 0\nLOAD r3, r1\n", gen)
    assert value(s, "r3") == (7, 7)
    assert len(s.addrs) == 1


def test_store_overwrite_replaces(gen):
    s = execute("LOADI r1, 1000\nLOADI r2, 7\nSTORE r1, r2\nLOADI r2, 8\nSTORE r1, r2\nLOAD r3, r1\n", gen)
    assert value(s, "r3") == (8, 8)


def test_store_through_may_alias_is_weak(gen):
    # r5 is 1000 or 1001; the cell at 1000 may or may not be overwritten
    s = execute("LOADI r1, 1000\nLOADI r2, 7\nSTORE r1, r2\n", gen)
    s = execute("ADD r5, r1, r9\n", gen, s)
    v = s.m["r9"]
    s = s.with_p(s.p.add_constraints([var(v) >= 0, var(v) <= 1]))
    s = execute("LOADI r6, 3\nSTORE r5, r6\nLOAD r3, r1\n", gen, s)
    assert value(s, "r3") == (3, 7)
    assert is_consistent(s)


def test_load_of_unknown_cell_is_unconstrained(gen):
    s = execute("LOADI r1, 1000\nLOAD r3, r1\n", gen)
    assert s.p.maximize(var(s.m["r3"])) is UNBOUNDED


def test_join_matches_same_constant_address(gen):
    s1 = execute("LOADI r3, 1000\nLOADI r1, 4\nSTORE r3, r1\n", gen)
    s2 = execute("LOADI r3, 1000\nLOADI r1, 5\nSTORE r3, r1\n", gen)
    assert len(match_addresses(s1, s2)) == 1
    j = join(s1, s2, gen)
    assert len(j.addrs) == 1
    j = execute("LOAD r6, r3\n", gen, j)
    assert value(j, "r6") == (4, 5)
    assert value(j, "r1") == (4, 5)


def test_join_mismatched_registers_get_fresh_vars(gen):
    s1 = execute("LOADI r1, 1\n", gen)
    s2 = execute("LOADI r2, 2\n", gen)
    j = join(s1, s2, gen)
    assert set(j.m) == {"r1", "r2"}
    # unset on one side means any value there
    assert value(j, "r1") == (-UNBOUNDED, UNBOUNDED)


def test_join_with_bottom_is_identity(gen):
    s = execute("LOADI r1, 1\n", gen)
    assert join(AbstractState.bottom(), s, gen) is s
    assert join(s, AbstractState.bottom(), gen) is s


def test_widening_drops_growing_bound(gen):
    s1 = execute("LOADI r1, 0\n", gen)
    s2 = join(s1, execute("LOADI r1, 1\n", gen), gen)
    w = widen_state(s1, s2, gen)
    assert value(w, "r1") == (0, UNBOUNDED)


def test_states_equal_up_to_renaming():
    g = VarGen()
    a = execute("LOADI r1, 1000\nLOADI r2, 3\nSTORE r1, r2\n", g)
    b = execute("LOADI r1, 1000\nLOADI r2, 3\nSTORE r1, r2\n", g)
    c = execute("LOADI r1, 1000\nLOADI r2, 4\nSTORE r1, r2\n", g)
    assert states_equal(a, b, g)
    assert not states_equal(a, c, g)
    assert states_equal(AbstractState.bottom(), AbstractState.bottom(), g)
