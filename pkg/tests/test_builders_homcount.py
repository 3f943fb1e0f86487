import math
import random

import pytest

from tensornet.builders.homcount import (
    BranchDecomposition,
    bind_pform,
    branch_decomposition_search,
    branchwidth_evaluation,
    pform_network,
)
from tensornet.errors import InvalidDecompositionError
from tensornet.fields import GF, RATIONAL
from tensornet.oracle import PformOracle
from tensornet.patterns import PatternGraph
from tensornet.planner import PlanRequest, optimal_plan
from tensornet.execution import run


def random_host(rng, n, k=2):
    def nest(depth):
        if depth == k:
            return rng.randint(0, 1)
        return [nest(depth + 1) for _ in range(n)]

    return nest(0)


# -- pform networks ------------------------------------------------------------


def test_pform_k3_on_triangle_host():
    f = RATIONAL
    spec, snet = pform_network(PatternGraph.clique(3), 3, f)
    adj = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    net = bind_pform(snet, [adj] * 3, f)
    assert net.value().data[0] == 6


def test_pform_k4_all_ones_n2():
    f = RATIONAL
    spec, snet = pform_network(PatternGraph.clique(4), 2, f)
    ones = [[1, 1], [1, 1]]
    assert bind_pform(snet, [ones] * 6, f).value().data[0] == 16


def test_pform_hyperclique_all_ones_n2():
    f = RATIONAL
    spec, snet = pform_network(PatternGraph.hyperclique(4, 3), 2, f)
    ones = [[[1, 1], [1, 1]], [[1, 1], [1, 1]]]
    assert bind_pform(snet, [ones] * 4, f).value().data[0] == 16


def test_pform_random_hosts_match_oracle():
    rng = random.Random(60)
    f = RATIONAL
    for P in (PatternGraph.clique(3), PatternGraph.path(4), PatternGraph.cycle(5)):
        for n in (2, 3):
            spec, snet = pform_network(P, n, f)
            hosts = [random_host(rng, n) for _ in P.hyperedges]
            net = bind_pform(snet, hosts, f)
            plan, _ = optimal_plan(PlanRequest(net))
            got, _ = run(net, plan)
            assert got.data[0] == PformOracle(P, n, f).evaluate(hosts)


# -- branch decomposition search ----------------------------------------------


def test_branchwidth_of_cliques():
    for n in range(3, 8):
        bd = branch_decomposition_search(PatternGraph.clique(n))
        assert bd.width == math.ceil(2 * n / 3)
        assert bd.optimal
        bd.validate()


def test_branchwidth_of_hyperclique():
    bd = branch_decomposition_search(PatternGraph.hyperclique(4, 3))
    assert bd.width == 4 and bd.optimal


def test_branchwidth_small_patterns():
    assert branch_decomposition_search(PatternGraph.path(4)).width == 2
    assert branch_decomposition_search(PatternGraph.cycle(5)).width == 2
    assert branch_decomposition_search(PatternGraph(2, ((0, 1),))).width == 0


def test_branchwidth_matches_tree_enumeration_oracle():
    # exhaustive check over all leaf-labeled cubic trees for small patterns
    from tensornet.lowerbound import enumerate_socket_trees

    for P in (PatternGraph.clique(4), PatternGraph.path(4), PatternGraph.cycle(4)):
        edges = P.hyperedges
        best = None
        for tree in enumerate_socket_trees([str(e) for e in edges]):
            width = 0
            for e in tree.sorted_edges():
                left, right = tree.bipartition(e)
                lv = set(v for t in left for v in eval(t))
                rv = set(v for t in right for v in eval(t))
                width = max(width, len(lv & rv))
            best = width if best is None else min(best, width)
        assert branch_decomposition_search(P).width == best


def test_greedy_fallback_flags_nonoptimal():
    P = PatternGraph.clique(6)
    bd = branch_decomposition_search(P, exact_limit=10)
    assert not bd.optimal
    assert bd.width >= 4  # cannot beat the true branchwidth
    bd.validate()


def test_edge_widths_annotated():
    bd = branch_decomposition_search(PatternGraph.clique(4))
    assert max(bd.edge_widths.values()) == bd.width
    leaf_edges = [e for e in bd.edges() if any(x in bd.leaf_map for x in e)]
    for e in leaf_edges:
        leaf = next(x for x in e if x in bd.leaf_map)
        assert bd.edge_widths[e] == 2  # every K4 edge shares both endpoints


# -- evaluation along a decomposition ---------------------------------------------


def test_eval_k3_width2_decomposition():
    f = RATIONAL
    P = PatternGraph.clique(3)
    bd = branch_decomposition_search(P)
    adj = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert branchwidth_evaluation(P, bd, [adj] * 3, f) == 6


def test_eval_path_hosts():
    f = RATIONAL
    rng = random.Random(61)
    P = PatternGraph.path(4)
    bd = branch_decomposition_search(P)
    for n in (2, 3, 4):
        hosts = [random_host(rng, n) for _ in P.hyperedges]
        got = branchwidth_evaluation(P, bd, hosts, f)
        assert got == PformOracle(P, n, f).evaluate(hosts)


def test_eval_k4_binary_hosts():
    f = RATIONAL
    rng = random.Random(62)
    P = PatternGraph.clique(4)
    bd = branch_decomposition_search(P)
    hosts = [random_host(rng, 2) for _ in P.hyperedges]
    assert branchwidth_evaluation(P, bd, hosts, f) == PformOracle(P, 2, f).evaluate(hosts)


def test_eval_rejects_hypergraphs():
    P = PatternGraph.hyperclique(4, 3)
    bd = branch_decomposition_search(P)
    with pytest.raises(InvalidDecompositionError):
        branchwidth_evaluation(P, bd, [None] * 4, RATIONAL)


def test_eval_intermediate_order_never_exceeds_width():
    # instrumented via the assertion inside the evaluator; a run without
    # AssertionError is the check
    f = GF(101)
    rng = random.Random(63)
    for P in (PatternGraph.clique(4), PatternGraph.cycle(5)):
        bd = branch_decomposition_search(P)
        n = 3
        hosts = [random_host(rng, n) for _ in P.hyperedges]
        got = branchwidth_evaluation(P, bd, hosts, f)
        assert got == PformOracle(P, n, f).evaluate(hosts)
