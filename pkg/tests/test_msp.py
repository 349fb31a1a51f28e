import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from martsel import _linalg as la
from martsel.generate import generate_text
from martsel.lp import strict_barycentric
from martsel.msp import (
    ContractError,
    Solution,
    assemble_measure,
    backward_pass,
    forward_pass,
    one_step_decompose,
    solve,
    solution_json,
    verify_solution,
)
from martsel.polyhedra import FGSet, contains, conv_union, ri_point
from martsel.tree import EventTree, Instance, Node, parse_instance

from helpers import planted, random_fgset

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def binomial():
    return parse_instance((FIXTURES / "binomial.json").read_text())


@pytest.fixture
def binomial_bad():
    return parse_instance((FIXTURES / "binomial_unsolvable.json").read_text())


def seg(a, b):
    return FGSet(1, ((a,), (b,)))


# backward pass


def test_backward_binomial(binomial):
    state = backward_pass(binomial)
    assert state.solvable
    assert state.Y["r"].set == seg(F(1, 2), 2)
    assert state.W["r"] == FGSet.point((1,))


def test_backward_unsolvable_at_root(binomial_bad):
    state = backward_pass(binomial_bad)
    assert not state.solvable
    assert state.Y["r"].set == seg(2, 3)
    assert state.failing_node == "r" and state.failing_time == 0
    assert state.W["r"].is_empty


def test_horizon_zero_is_solvable():
    tree = EventTree({"r": Node("r", 0, None, F(1))}, 0)
    G = FGSet(2, ((0, 0), (1, 0)), ((0, 1),))
    inst = Instance(2, tree, {"r": G})
    state, sol = solve(inst)
    assert state.solvable
    assert sol.x == {"r": ri_point(G)} and sol.q == {}


def test_emptiness_propagates_upward():
    # root -> a -> {b, c}; a's children sit on one side of G(a)
    tree = EventTree({
        "r": Node("r", 0, None, F(1)),
        "a": Node("a", 1, "r", F(1)),
        "b": Node("b", 2, "a", F(1, 2)),
        "c": Node("c", 2, "a", F(1, 2)),
    }, 2)
    sets = {"r": FGSet.point((0,)), "a": FGSet.point((0,)), "b": FGSet.point((1,)), "c": FGSet.point((2,))}
    state = backward_pass(Instance(1, tree, sets))
    assert state.W["a"].is_empty and state.W["r"].is_empty
    assert "r" not in state.Y
    assert state.failing_node == "a" and state.failing_time == 1


# one-step decomposition


def test_decompose_single_child():
    W = FGSet(2, ((0, 0), (2, 0), (0, 2)))
    Y = conv_union([W], ["v"])
    x = (F(1, 2), F(1, 2))
    assert one_step_decompose(x, [("v", W)], Y) == [("v", F(1), x)]


def test_decompose_forced_by_singletons():
    kids = [("u", FGSet.point((2,))), ("d", FGSet.point((F(1, 2),)))]
    Y = conv_union([s for _, s in kids], [t for t, _ in kids])
    out = one_step_decompose((1,), kids, Y)
    assert out == [("u", F(1, 3), (F(2),)), ("d", F(2, 3), (F(1, 2),))]


def test_decompose_two_segments():
    kids = [("a", seg(2, 3)), ("b", seg(0, F(1, 2)))]
    Y = conv_union([s for _, s in kids], ["a", "b"])
    out = one_step_decompose((1,), kids, Y)
    qs = [q for _, q, _ in out]
    assert all(q > 0 for q in qs) and sum(qs) == 1
    assert la.lin_comb(qs, [p for _, _, p in out], 1) == (1,)
    for (tag, S), (_, _, p) in zip(kids, out):
        assert contains(S, p, "relative_interior")


def test_decompose_rejects_boundary_point():
    kids = [("a", seg(0, 1)), ("b", seg(1, 2))]
    Y = conv_union([s for _, s in kids], ["a", "b"])
    with pytest.raises(ContractError):
        one_step_decompose((0,), kids, Y)


def test_decompose_with_unbounded_children():
    kids = [("a", FGSet(2, ((0, 0),), ((1, 0),))), ("b", FGSet(2, ((0, 1),), ((0, 1), (-1, 0))))]
    Y = conv_union([s for _, s in kids], ["a", "b"])
    for x in [(F(5), F(1, 2)), (F(-3), F(7)), (F(1, 3), F(1, 3))]:
        if not contains(Y.set, x, "ri"):
            continue
        out = one_step_decompose(x, kids, Y)
        qs = [q for _, q, _ in out]
        assert all(q > 0 for q in qs) and sum(qs) == 1
        assert la.lin_comb(qs, [p for _, _, p in out], 2) == x
        assert all(contains(S, p, "ri") for (_, S), (_, _, p) in zip(kids, out))


# forward pass and measure


def test_forward_binomial(binomial):
    state, sol = solve(binomial)
    assert sol.x["r"] == (1,)
    assert sol.q[("r", "u")] == F(1, 3) and sol.q[("r", "d")] == F(2, 3)
    assert verify_solution(binomial, sol) == []


def test_forward_refuses_unsolvable(binomial_bad):
    with pytest.raises(ContractError):
        forward_pass(binomial_bad, backward_pass(binomial_bad))


def test_measure_binomial(binomial):
    _, sol = solve(binomial)
    m = assemble_measure(binomial, sol)
    assert m.Q == {"u": F(1, 3), "d": F(2, 3)}
    assert m.z["u"] == F(2, 3) and m.z["d"] == F(4, 3)
    assert m.expected_density == 1 and m.total_Q == 1 and m.ok
    assert sol.gamma(binomial, "r", "d") == F(4, 3)


def test_measure_identity_density(binomial):
    sol = Solution({"r": (1,), "u": (1,), "d": (1,)}, {("r", "u"): F(1, 2), ("r", "d"): F(1, 2)})
    m = assemble_measure(binomial, sol)
    assert all(z == 1 for z in m.z.values())
    assert m.Q == {"u": F(1, 2), "d": F(1, 2)}


def test_three_level_random_instances_verify():
    checked = 0
    for seed in range(40):
        inst = parse_instance(generate_text(seed, "solvable-biased", horizon=3))
        state, sol = solve(inst)
        assert state.solvable
        assert verify_solution(inst, sol) == []
        m = assemble_measure(inst, sol)
        assert m.ok
        checked += 1
    assert checked == 40


# verifier


def test_verify_reports_bad_weights(binomial):
    _, sol = solve(binomial)
    bad = Solution(dict(sol.x), {("r", "u"): F(1, 3), ("r", "d"): F(1, 3)})
    msgs = [str(f) for f in verify_solution(binomial, bad)]
    assert any("q sums 2/3" in m for m in msgs)


def test_verify_reports_boundary_selector():
    tree = EventTree({"r": Node("r", 0, None, F(1))}, 0)
    inst = Instance(1, tree, {"r": seg(0, 1)})
    failures = verify_solution(inst, Solution({"r": (F(0),)}, {}))
    assert [f.check for f in failures] == ["ri"]
    assert "ri membership" in str(failures[0])


def test_verify_reports_broken_martingale(binomial):
    sol = Solution({"r": (1,), "u": (2,), "d": (F(1, 2),)}, {("r", "u"): F(1, 2), ("r", "d"): F(1, 2)})
    assert [f.check for f in verify_solution(binomial, sol)] == ["martingale"]


# structural properties


def test_w_inside_closure_of_g():
    for seed in range(30):
        inst = parse_instance(generate_text(seed, "adversarial"))
        state = backward_pass(inst)
        for u, W in state.W.items():
            if not W.is_empty:
                assert all(contains(inst.sets[u], v) for v in W.vertices)


def test_verified_external_solutions_imply_solvable():
    rng = random.Random(77)
    for _ in range(30):
        inst, sol = planted(rng, rng.randint(1, 3), rng.randint(1, 3))
        assert verify_solution(inst, sol) == []
        assert backward_pass(inst).solvable


def test_enlarging_sets_keeps_solvable():
    rng = random.Random(78)
    for _ in range(20):
        inst, _ = planted(rng, rng.randint(1, 3), rng.randint(1, 3))
        bigger = {}
        for u, G in inst.sets.items():
            # symmetric additions keep the vertex mean, so the planted x stays in ri
            extra = []
            for v in G.vertices:
                e = tuple(F(rng.randint(-2, 2)) for _ in v)
                extra += [la.add(v, e), la.sub(v, e)]
            bigger[u] = FGSet(G.dim, G.vertices + tuple(extra), G.rays)
        assert backward_pass(Instance(inst.dim, inst.tree, bigger)).solvable


def test_inclusion_property_small():
    rng = random.Random(5)
    for _ in range(15):
        d = rng.randint(1, 3)
        family = [(i, random_fgset(rng, d)) for i in range(rng.randint(1, 4))]
        Y = conv_union([s for _, s in family], [t for t, _ in family])
        x = ri_point(Y.set)
        out = one_step_decompose(x, family, Y)
        qs = [q for _, q, _ in out]
        assert all(q > 0 for q in qs) and sum(qs) == 1
        assert la.lin_comb(qs, [p for _, _, p in out], d) == x


def test_single_valued_matches_per_node_test():
    rng = random.Random(6)
    for _ in range(40):
        inst, sol = planted(rng, rng.randint(1, 2), rng.randint(1, 3), singletons=1.0)
        if rng.random() < 0.5:
            leaf = inst.tree.leaves[0]
            sets = dict(inst.sets)
            sets[leaf] = FGSet.point(la.add(sol.x[leaf], (F(1),) * inst.dim))
            inst = Instance(inst.dim, inst.tree, sets)
        values = {u: inst.sets[u].vertices[0] for u in inst.tree.order}
        per_node = all(
            strict_barycentric(values[u], [values[v] for v in inst.tree.children[u]]) is not None
            for u in inst.tree.internal
        )
        assert backward_pass(inst).solvable == per_node


def test_threads_do_not_change_output():
    for seed in (3, 8, 12):
        inst = parse_instance(generate_text(seed, "solvable-biased"))
        a = solve(inst, threads=1)
        b = solve(inst, threads=4)
        assert solution_json(inst, a[1], a[0]) == solution_json(inst, b[1], b[0])
