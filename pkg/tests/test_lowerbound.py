import math
import random

import pytest

from tensornet.errors import TooManyLeavesError
from tensornet.fields import GF, RATIONAL
from tensornet.lowerbound import (
    SocketTree,
    balanced_edge,
    closed_form_bound,
    coarse_tensor,
    enumerate_socket_trees,
    formify,
    socket_labels,
    socket_width,
    tree_width,
)
from tensornet.network import MapSpec
from tensornet.oracle import (
    DeterminantOracle,
    KruskalOracle,
    MatmulOracle,
    PermanentOracle,
    PformOracle,
)
from tensornet.patterns import PatternGraph
from tensornet.tensor import Mode, Tensor


def test_formify_matmul_becomes_trilinear_form():
    spec = MatmulOracle(2, 2, 2, RATIONAL).map_spec()
    form = formify(spec)
    assert form.is_form and form.arity == 3
    assert form.tensor() == spec.tensor()


def test_formify_is_identity_on_forms():
    spec = PermanentOracle(3, RATIONAL).map_spec()
    assert formify(spec) is spec


def test_formify_kruskal_socket_count():
    spec = KruskalOracle((2, 2), 2, RATIONAL).map_spec()
    assert formify(spec).arity == 3


def test_coarse_tensor_perm3():
    ct = coarse_tensor(PermanentOracle(3, RATIONAL).map_spec())
    assert ct.shape == (3, 3, 3)
    assert sum(1 for v in ct.data if v == 1) == 6
    assert all(v in (0, 1) for v in ct.data)


def test_coarse_tensor_det3_signs():
    ct = coarse_tensor(DeterminantOracle(3, RATIONAL).map_spec())
    # sign (-1)^(n - cycles): identity +1, transpositions -1, 3-cycles +1
    assert ct.entry({"E01": 0, "E02": 1, "E03": 2}) == 1
    assert ct.entry({"E01": 1, "E02": 0, "E03": 2}) == -1
    assert ct.entry({"E01": 1, "E02": 2, "E03": 0}) == 1
    assert sorted(v for v in ct.data if v != 0) == [-1, -1, -1, 1, 1, 1]


def test_coarse_tensor_matmul_form():
    ct = coarse_tensor(formify(MatmulOracle(2, 2, 2, RATIONAL).map_spec()))
    assert ct.shape == (4, 4, 4)


def test_enumeration_counts():
    for m, want in ((3, 1), (4, 3), (5, 15), (6, 105), (7, 945)):
        labels = [f"L{i}" for i in range(m)]
        trees = list(enumerate_socket_trees(labels))
        assert len(trees) == want
        # all distinct as edge sets, all leaves present, internal degree 3
        assert len({t.edges for t in trees}) == want
        for t in trees[:10]:
            adj = t.adjacency()
            for node, nbrs in adj.items():
                assert len(nbrs) == (1 if node in t.leaves else 3)


def test_enumeration_bounds():
    with pytest.raises(TooManyLeavesError):
        list(enumerate_socket_trees([f"L{i}" for i in range(10)]))
    with pytest.raises(TooManyLeavesError):
        list(enumerate_socket_trees(["only"]))


def test_tree_width_perm3_star():
    spec = PermanentOracle(3, RATIONAL).map_spec()
    (tree,) = enumerate_socket_trees(socket_labels(spec))
    assert tree_width(spec, tree) == 3  # >= C(3,1) at the balanced edge


def test_tree_width_rank_one_tensor():
    f = RATIONAL
    spec = MapSpec(
        "ones",
        ((Mode("x", 3),), (Mode("y", 3),), (Mode("z", 3),)),
        (),
        f,
        lambda: Tensor.ones(f, (Mode("x", 3), Mode("y", 3), Mode("z", 3))),
    )
    for tree in enumerate_socket_trees(socket_labels(spec)):
        assert tree_width(spec, tree) == 1


def test_tree_width_invariant_under_internal_relabeling():
    spec = PermanentOracle(4, RATIONAL).map_spec()
    trees = list(enumerate_socket_trees(socket_labels(spec)))
    for tree in trees:
        renamed = SocketTree(
            tree.leaves,
            tuple(
                frozenset(f"m{x}" if str(x).startswith("n") else x for x in e)
                for e in tree.edges
            ),
        )
        assert tree_width(spec, tree) == tree_width(spec, renamed)


def test_socket_width_perm3():
    cert = socket_width(PermanentOracle(3, RATIONAL).map_spec())
    assert cert.socket_width == 3
    assert cert.socket_width >= closed_form_bound("perm", n=3)


def test_socket_width_perm4():
    cert = socket_width(PermanentOracle(4, RATIONAL).map_spec())
    assert cert.socket_width >= closed_form_bound("perm", n=4) == 6
    assert cert.socket_width == 6  # exact value, reported


def test_socket_width_det_equals_perm_width_small():
    for n in (3, 4):
        wd = socket_width(DeterminantOracle(n, RATIONAL).map_spec()).socket_width
        wp = socket_width(PermanentOracle(n, RATIONAL).map_spec()).socket_width
        assert wd >= closed_form_bound("det", n=n)
        assert wp >= closed_form_bound("perm", n=n)
        assert wd == wp


def test_socket_width_k4_form():
    spec = PformOracle(PatternGraph.clique(4), 2, RATIONAL).map_spec()
    cert = socket_width(spec)
    assert cert.socket_width == 8 == 2 ** 3  # n^bw(K4)
    assert cert.socket_width >= closed_form_bound(
        "pform", pattern=PatternGraph.clique(4), n=2
    )


def test_socket_width_k3_form():
    spec = PformOracle(PatternGraph.clique(3), 2, RATIONAL).map_spec()
    assert socket_width(spec).socket_width == 4  # n^bw(K3) = 2^2


def test_socket_width_hyperclique_form():
    spec = PformOracle(PatternGraph.hyperclique(4, 3), 2, RATIONAL).map_spec()
    cert = socket_width(spec)
    assert cert.socket_width == 16  # n^4: hypercliques have branchwidth v


def test_socket_width_kruskal():
    spec = KruskalOracle((2, 2, 2), 2, RATIONAL).map_spec()
    cert = socket_width(spec)
    assert cert.socket_width >= closed_form_bound("kruskal", l=3, n=2, r=2) == 8


def test_socket_width_equals_on_formified_map():
    spec = MatmulOracle(2, 2, 2, RATIONAL).map_spec()
    assert socket_width(spec).socket_width == socket_width(formify(spec)).socket_width


def test_socket_width_per_field():
    # ranks over subfields can only drop; GF(2) and GF(101) reported separately
    for field in (RATIONAL, GF(2), GF(101)):
        cert = socket_width(PermanentOracle(3, field).map_spec())
        assert cert.socket_width <= 3
        assert cert.field == field
    assert socket_width(PermanentOracle(3, GF(101)).map_spec()).socket_width == 3


def test_socket_width_logs_all_trees():
    cert = socket_width(PermanentOracle(4, RATIONAL).map_spec(), log_trees=True)
    assert len(cert.per_tree_log) == 3
    assert min(w for _, w in cert.per_tree_log) == cert.socket_width


def test_witness_edge_ranks_cover_every_edge():
    cert = socket_width(PermanentOracle(4, RATIONAL).map_spec())
    assert len(cert.witness_edge_ranks) == len(cert.witness_tree.edges)
    assert max(r for _, _, r in cert.witness_edge_ranks) == cert.socket_width


def test_balanced_edge_caterpillar():
    # 4-leaf caterpillar: the central edge splits 2 + 2
    tree = SocketTree(
        ("A", "B", "C", "D"),
        (
            frozenset(("A", "n0")),
            frozenset(("B", "n0")),
            frozenset(("n0", "n1")),
            frozenset(("C", "n1")),
            frozenset(("D", "n1")),
        ),
    )
    e = balanced_edge(tree)
    left, right = tree.bipartition(e)
    assert {len(left), len(right)} == {2}


def test_balanced_edge_star():
    tree = next(enumerate_socket_trees(["A", "B", "C"]))
    e = balanced_edge(tree)
    left, right = tree.bipartition(e)
    assert min(len(left), len(right)) == 1  # 1 >= ceil(3/3)


def test_balanced_edge_nine_leaves():
    rng = random.Random(70)
    labels = [f"L{i}" for i in range(9)]
    trees = list(enumerate_socket_trees(labels))
    for tree in rng.sample(trees, 25):
        e = balanced_edge(tree)
        left, right = tree.bipartition(e)
        assert 3 <= min(len(left), len(right)) <= 4


def test_closed_form_values():
    assert closed_form_bound("perm", n=6) == 15  # C(6,2)
    assert closed_form_bound("pform", pattern=PatternGraph.clique(4), n=3) == 27
    assert closed_form_bound("kruskal", l=3, n=2, r=5) == 20
    assert closed_form_bound("det", n=4) == math.comb(4, 2)


def test_closed_form_vs_computed_widths():
    f = RATIONAL
    for n in (3, 4):
        assert (
            socket_width(PermanentOracle(n, f).map_spec()).socket_width
            >= closed_form_bound("perm", n=n)
        )
    for P, n in ((PatternGraph.clique(3), 2), (PatternGraph.path(4), 2)):
        assert (
            socket_width(PformOracle(P, n, f).map_spec()).socket_width
            >= closed_form_bound("pform", pattern=P, n=n)
        )
    for (l, n, r) in ((2, 2, 2), (3, 2, 2)):
        assert (
            socket_width(KruskalOracle((n,) * l, r, f).map_spec()).socket_width
            >= closed_form_bound("kruskal", l=l, n=n, r=r)
        )
