from polybound.poly import Polyhedron, var
from polybound.state import (Alias, AbstractState, VarClass, alias, dump, equivalent, gc,
                             is_consistent, lookup_equivalent_address, merge, rename_state,
                             unify)


def state(cons, m=None, delta=None, addrs=()):
    return AbstractState(Polyhedron(cons), m or {}, delta or {}, frozenset(addrs))


def test_alias_classes():
    s = state([var(1).eq(1000), var(2).eq(1000), var(3) >= 999, var(3) <= 1001, var(4).eq(7)])
    assert alias(s, 1, 2) is Alias.EQUIVALENT
    assert alias(s, 1, 3) is Alias.OVERLAPPING
    assert alias(s, 1, 4) is Alias.INDEPENDENT


def test_var_classes_and_lookup():
    s = state([var(1).eq(1000), var(2).eq(4), var(3).eq(1000)],
              m={"r1": 3}, delta={1: 2}, addrs=[1])
    assert s.var_class(1) is VarClass.ADDRESS
    assert s.var_class(2) is VarClass.VALUE
    assert s.var_class(3) is VarClass.REGISTER
    assert lookup_equivalent_address(s, "r1") == 1
    assert lookup_equivalent_address(s, "r9") is None


def test_merge_hulls_stored_values(gen):
    for _ in range(10):
        gen()
    s = state([var(1).eq(1000), var(2).eq(1000), var(3).eq(4), var(4).eq(5)],
              delta={1: 3, 2: 4}, addrs=[1, 2])
    assert not is_consistent(s)
    t = merge(s, 1, 2, gen)
    assert t.p.minimize(var(3)) == 4 and t.p.maximize(var(3)) == 5
    u = unify(gc(t), gen)
    assert is_consistent(u)


def test_unify_keeps_one_address(gen):
    for _ in range(10):
        gen()
    s = state([var(1).eq(1000), var(2).eq(1000), var(3).eq(4), var(4).eq(5), var(5).eq(1000)],
              m={"r3": 5}, delta={1: 3, 2: 4}, addrs=[1, 2])
    u = unify(s, gen)
    assert len(u.addrs) == 1
    (a,) = u.addrs
    assert equivalent(u.p, a, 5)
    v = u.delta[a]
    assert (u.p.minimize(var(v)), u.p.maximize(var(v))) == (4, 5)


def test_gc_projects_unbound_and_drops_free_addresses():
    s = state([var(1).eq(3), var(2) <= var(1), var(9).eq(1)], m={"r1": 1}, delta={7: 8}, addrs=[7])
    t = gc(s)
    assert set(t.p.dims) <= {1}
    assert t.addrs == frozenset() and t.delta == {}


def test_rename_state_moves_clashing_targets(gen):
    for _ in range(10):
        gen()
    s = state([var(1).eq(1), var(2).eq(2)], m={"r1": 1, "r2": 2})
    t = rename_state(s, {1: 2}, gen)
    assert t.m["r1"] == 2
    assert t.m["r2"] != 2
    assert t.p.maximize(var(2)) == 1 and t.p.maximize(var(t.m["r2"])) == 2


def test_dump_format():
    s = state([var(1).eq(1000), var(2).eq(4), var(3).eq(1000)],
              m={"r10": 3, "r2": 2}, delta={1: 2}, addrs=[1])
    text = dump(s)
    assert "m: r2->x2, r10->x3" in text
    assert "delta: x1->x2" in text
    assert dump(AbstractState.bottom()) == "bottom"
