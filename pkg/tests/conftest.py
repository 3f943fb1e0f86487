"""Shared brute-force helpers; independent of the library's fast paths."""

import itertools
import random

from tensornet.fields import GF
from tensornet.network import Network
from tensornet.tensor import Mode, Tensor


def naive_matmul(A, B, field):
    n, r, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = field.zero
            for k in range(r):
                acc = field.add(acc, field.mul(field.coerce(A[i][k]), field.coerce(B[k][j])))
            row.append(acc)
        out.append(row)
    return out


def random_matrix(rng, field, n, m):
    return [[field.random(rng) for _ in range(m)] for _ in range(n)]


def brute_force_min_execution_cost(net: Network):
    """Min over ALL binary executions (adjacent or not) of the max step cost.

    Pure enumeration with memoization on the multiset of merged groups;
    no connectivity or adjacency assumptions, so it is a true independent
    oracle for the planner.
    """
    base = sorted(net.incidence)
    index = {v: i for i, v in enumerate(base)}
    groups0 = frozenset(frozenset((index[v],)) for v in base)
    vmodes = {index[v]: set(net.incidence[v]) for v in base}
    boundary = set(net.boundary)

    def group_modes(group):
        out = set()
        for i in group:
            out |= vmodes[i]
        return out

    all_vertices = frozenset(range(len(base)))

    def result_modes(group):
        inside = group_modes(group)
        outside = group_modes(all_vertices - group)
        return {e for e in inside if e in boundary or e in outside}

    memo = {}

    def best(groups):
        if len(groups) == 1:
            return 0
        if groups in memo:
            return memo[groups]
        best_cost = None
        glist = sorted(groups, key=sorted)
        for a, b in itertools.combinations(glist, 2):
            cost = 1
            for e in result_modes(a) | result_modes(b):
                cost *= net.edges[e]
            rest = (groups - {a, b}) | {a | b}
            sub = best(rest)
            total = max(cost, sub)
            if best_cost is None or total < best_cost:
                best_cost = total
        memo[groups] = best_cost
        return best_cost

    return best(groups0)


def random_connected_network(rng, field, nv, max_length=3, boundary_prob=0.25):
    """Connected loopless network with a spanning tree plus extra hyperedges."""
    names = [f"v{i}" for i in range(nv)]
    edges = {}
    incidence = {v: [] for v in names}

    def new_edge(members):
        e = f"e{len(edges)}"
        edges[e] = rng.randint(2, max_length)
        for v in members:
            incidence[v].append(e)

    for i in range(1, nv):
        new_edge([names[i], names[rng.randrange(i)]])
    for _ in range(rng.randint(0, nv)):
        k = rng.randint(2, min(3, nv))
        new_edge(rng.sample(names, k))
    boundary = {e for e in edges if rng.random() < boundary_prob}
    tensors = {}
    for v in names:
        modes = tuple(Mode(e, edges[e]) for e in sorted(incidence[v]))
        tensors[v] = Tensor.from_function(modes, field, lambda _: field.random(rng))
    return Network(edges, incidence, tensors, boundary, field)
