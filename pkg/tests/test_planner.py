import random

import pytest

from conftest import brute_force_min_execution_cost, random_connected_network
from tensornet.errors import TooLargeError
from tensornet.execution import ExecutionPlan, plan_cost, run
from tensornet.fields import GF, RATIONAL
from tensornet.network import Network
from tensornet.planner import (
    Objective,
    PlanRequest,
    Strategy,
    greedy_plan,
    normalize,
    optimal_plan,
)
from tensornet.tensor import Mode, Tensor


def chain_network(field=RATIONAL):
    """A(2x3) B(3x4) C(4x5) sharing k1, k2; boundary {i, j}."""

    def mat(rid, cid, nr, nc):
        return Tensor.from_function(
            (Mode(rid, nr), Mode(cid, nc)), field, lambda ij: ij[0] + 2 * ij[1] + 1
        )

    return Network(
        {"i": 2, "k1": 3, "k2": 4, "j": 5},
        {"A": ("i", "k1"), "B": ("k1", "k2"), "C": ("k2", "j")},
        {"A": mat("i", "k1", 2, 3), "B": mat("k1", "k2", 3, 4), "C": mat("k2", "j", 4, 5)},
        {"i", "j"},
        field,
    )


def test_single_vertex_empty_plan():
    t = Tensor((Mode("i", 2),), [1, 2], RATIONAL)
    net = Network({"i": 2}, {"v": ("i",)}, {"v": t}, {"i"}, RATIONAL)
    plan, report = optimal_plan(PlanRequest(net))
    assert plan.steps == () and report.max_cost == 0


def test_chain_optimal_is_left_association():
    net = chain_network()
    plan, report = optimal_plan(PlanRequest(net))
    assert report.max_cost == 40
    assert plan.steps == (("A", "B"), ("A+B", "C"))
    # exhaustive check over all binary executions
    assert brute_force_min_execution_cost(net) == 40


def test_strassen_four_vertex_bound_network():
    # alpha, beta with both inputs attached; boundary is the rank mode
    from tensornet.builders.matmul import strassen_components

    f = RATIONAL
    alpha, beta, _ = strassen_components(f)
    ones2x2 = Tensor.ones(f, (Mode("i1", 2), Mode("k1", 2)))
    ones2x2b = Tensor.ones(f, (Mode("k2", 2), Mode("j1", 2)))
    net = Network(
        {"i1": 2, "k1": 2, "k2": 2, "j1": 2, "l": 7},
        {
            "alpha": ("i1", "k1", "l"),
            "beta": ("k2", "j1", "l"),
            "X1": ("i1", "k1"),
            "X2": ("k2", "j1"),
        },
        {"alpha": alpha, "beta": beta, "X1": ones2x2, "X2": ones2x2b},
        {"l"},
        f,
    )
    plan, report = optimal_plan(PlanRequest(net))
    assert report.max_cost == 28
    assert brute_force_min_execution_cost(net) == 28


def test_optimal_matches_brute_force_small_corpus():
    rng = random.Random(12)
    f = GF(101)
    for _ in range(60):
        net = random_connected_network(rng, f, rng.randint(2, 5))
        plan, report = optimal_plan(PlanRequest(net))
        assert report.max_cost == brute_force_min_execution_cost(net)
        got, _ = run(net, plan)
        assert got == net.value()


def test_optimal_invariant_under_relabeling():
    rng = random.Random(13)
    f = GF(101)
    for _ in range(15):
        net = random_connected_network(rng, f, rng.randint(2, 5))
        _, report = optimal_plan(PlanRequest(net))
        mapping = {v: f"w{9 - i}" for i, v in enumerate(net.vertices())}
        relabeled = Network(
            net.edges,
            {mapping[v]: ms for v, ms in net.incidence.items()},
            {mapping[v]: t for v, t in net.tensors.items()},
            net.boundary,
            f,
        )
        _, report2 = optimal_plan(PlanRequest(relabeled))
        assert report.max_cost == report2.max_cost


def test_exact_bound_enforced():
    rng = random.Random(14)
    net = random_connected_network(rng, GF(7), 6)
    with pytest.raises(TooLargeError):
        optimal_plan(PlanRequest(net, exact_bound=5))


def test_two_vertex_greedy():
    rng = random.Random(15)
    net = random_connected_network(rng, GF(7), 2)
    plan, _ = greedy_plan(PlanRequest(net, Strategy.GREEDY))
    assert plan.steps == (("v0", "v1"),)


def test_greedy_never_beats_optimal():
    rng = random.Random(16)
    f = GF(101)
    for _ in range(40):
        net = random_connected_network(rng, f, rng.randint(2, 6))
        _, opt = optimal_plan(PlanRequest(net))
        gplan, grep = greedy_plan(PlanRequest(net, Strategy.GREEDY))
        assert grep.max_cost >= opt.max_cost
        got, _ = run(net, gplan)
        assert got == net.value()


def test_greedy_chain_within_worst_pairing():
    net = chain_network()
    _, report = greedy_plan(PlanRequest(net, Strategy.GREEDY))
    assert report.max_cost <= 60


def test_greedy_matches_optimal_on_shipped_builders():
    # regression: every shipped builder network with <= 8 vertices
    f = GF(101)
    from tensornet.builders import (
        fft_network,
        kruskal_network,
        matmul_network,
        ryser_network,
        wht_network,
    )

    cases = [
        matmul_network(2, f)[0],
        fft_network(2, f)[0],
        wht_network(3, f)[0],
        ryser_network(3, f)[0],
        kruskal_network(2, 2, 2, f)[0],
    ]
    for snet in cases:
        net = snet.network
        if len(net.incidence) > 8:
            continue
        bound = _bind_placeholders(snet, f)
        _, opt = optimal_plan(PlanRequest(bound))
        _, grd = greedy_plan(PlanRequest(bound, Strategy.GREEDY))
        assert grd.max_cost == opt.max_cost


def _bind_placeholders(snet, field):
    net = snet.network
    for v in snet.socket_vertices:
        modes = tuple(Mode(e, net.edges[e]) for e in net.incidence[v])
        net = net.replace_tensor(v, Tensor.ones(field, modes))
    return net


def test_greedy_fft_recovers_sweep_cost():
    f = GF(65537)
    snet, prescribed = fft_cost_case(f, 6)
    bound = _bind_placeholders(snet, f)
    _, grd = greedy_plan(PlanRequest(bound, Strategy.GREEDY))
    assert grd.max_cost == 2**7 == plan_cost(snet.network, prescribed).max_cost


def fft_cost_case(field, k):
    from tensornet.builders import fft_network

    return fft_network(k, field)


def test_total_work_objective():
    net = chain_network()
    _, rep_max = optimal_plan(PlanRequest(net, objective=Objective.MAX_STEP))
    _, rep_sum = optimal_plan(PlanRequest(net, objective=Objective.TOTAL_WORK))
    assert rep_sum.total_work <= rep_max.total_work


def test_disconnected_networks_planned_per_component():
    f = RATIONAL
    t1 = Tensor((Mode("a", 2),), [1, 2], f)
    t2 = Tensor((Mode("a", 2),), [3, 4], f)
    t3 = Tensor((Mode("b", 3),), [1, 1, 1], f)
    net = Network(
        {"a": 2, "b": 3},
        {"u": ("a",), "v": ("a",), "w": ("b",)},
        {"u": t1, "v": t2, "w": t3},
        {"b"},
        f,
    )
    plan, _ = optimal_plan(PlanRequest(net))
    got, _ = run(net, plan)
    assert got == net.value()


# -- normalize -----------------------------------------------------------------


def test_normalize_three_set_becomes_binary():
    net = chain_network()
    plan = ExecutionPlan([("A", "B", "C")])
    before = plan_cost(net, plan).max_cost
    out = normalize(plan, net)
    assert out.is_binary()
    assert plan_cost(net, out).max_cost <= before
    assert run(net, out)[0] == net.value()


def test_normalize_keeps_already_good_plans():
    net = chain_network()
    plan = ExecutionPlan([("A", "B"), ("A+B", "C")])
    assert normalize(plan, net).steps == plan.steps


def test_normalize_rewrites_nonadjacent_pair():
    net = chain_network()
    plan = ExecutionPlan([("A", "C"), ("A+C", "B")])
    before = plan_cost(net, plan).max_cost
    out = normalize(plan, net)
    after = plan_cost(net, out).max_cost
    assert after <= before
    sim_net = net
    for W in out.steps:
        assert len(W) == 2
        assert sim_net.adjacent(W[0], W[1])
        sim_net = sim_net.contract(W)
    assert run(net, out)[0] == net.value()


def test_normalize_random_plans_never_increase_cost():
    rng = random.Random(17)
    f = GF(101)
    from tensornet.network import merged_vertex_id

    for _ in range(40):
        net = random_connected_network(rng, f, rng.randint(2, 5))
        ids = net.vertices()
        steps = []
        while len(ids) > 1:
            k = rng.randint(2, min(3, len(ids)))
            W = rng.sample(ids, k)
            steps.append(tuple(W))
            for v in W:
                ids.remove(v)
            ids.append(merged_vertex_id(W))
        plan = ExecutionPlan(steps)
        before = plan_cost(net, plan).max_cost
        out = normalize(plan, net)
        assert plan_cost(net, out).max_cost <= before
        assert run(net, out)[0] == net.value()
