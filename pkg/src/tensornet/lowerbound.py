"""Socket trees and exact socket-width certificates.

The socket-width of a map is the min over all socket trees (unrooted cubic
trees whose leaves are the sockets) of the max over tree edges of the rank
of the coarse tensor's flattening along that edge's leaf bipartition.  It
lower-bounds the max step cost of every network execution evaluating the
map, which makes the exhaustively computed value here a certificate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

from .errors import TooLargeError, TooManyLeavesError
from .fields import Field, field_tag
from .network import MapSpec
from .patterns import PatternGraph
from .tensor import Mode, Tensor, matrix_rank, mode_key

ENUMERATION_LIMIT = 9
COARSE_BOUND = 2**24


def formify(spec: MapSpec) -> MapSpec:
    """Turn the output socket into an input socket; identity on forms."""
    if spec.is_form:
        return spec
    return MapSpec(
        name=f"{spec.name}.form",
        input_sockets=tuple(spec.input_sockets) + (tuple(spec.output_socket),),
        output_socket=(),
        field=spec.field,
        base_tensor=spec.base_tensor,
    )


def socket_labels(spec: MapSpec):
    labels = [f"E{j + 1:02d}" for j in range(spec.arity)]
    if not spec.is_form:
        labels.append("OUT")
    return labels


def coarse_tensor(spec: MapSpec) -> Tensor:
    """T(A): one mode per socket, fine modes grouped row-major (sorted ids)."""
    volume = 1
    for sock in list(spec.input_sockets) + [spec.output_socket]:
        for m in sock:
            volume *= m.length
    if volume > COARSE_BOUND:
        raise TooLargeError(f"coarse tensor volume {volume} exceeds {COARSE_BOUND}")
    t = spec.tensor()
    order = []
    merged = []
    sockets = list(spec.input_sockets)
    if not spec.is_form:
        sockets.append(tuple(spec.output_socket))
    for label, sock in zip(socket_labels(spec), sockets):
        ids = sorted((m.id for m in sock), key=mode_key)
        order.extend(ids)
        vol = 1
        for m in sock:
            vol *= m.length
        merged.append(Mode(label, vol))
    permuted = t.permuted(order)
    return Tensor(tuple(merged), permuted.data, spec.field)


@dataclass(frozen=True)
class SocketTree:
    """Unrooted tree, sockets at the leaves, internal vertices of degree 3."""

    leaves: tuple
    edges: tuple  # of frozenset pairs

    def adjacency(self):
        adj = {}
        for e in self.edges:
            a, b = tuple(e)
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        return adj

    def side_leaves(self, edge, endpoint):
        """Leaves in the component of `endpoint` after removing `edge`."""
        (a, b) = tuple(edge)
        other = b if endpoint == a else a
        adj = self.adjacency()
        seen = {endpoint}
        stack = [endpoint]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt == other and cur == endpoint:
                    continue
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return tuple(l for l in self.leaves if l in seen)

    def bipartition(self, edge):
        a, b = tuple(edge)
        left = set(self.side_leaves(edge, a))
        right = tuple(l for l in self.leaves if l not in left)
        return tuple(sorted(left)), tuple(sorted(right))

    def sorted_edges(self):
        return sorted(self.edges, key=lambda e: tuple(sorted(e)))

    def render(self):
        """Parenthesized leaf notation, rooted next to the first leaf."""
        if len(self.leaves) == 1:
            return self.leaves[0]
        adj = self.adjacency()
        first = self.leaves[0]
        root = adj[first][0]

        def rec(node, parent):
            if node in self.leaves:
                return node
            parts = [rec(n, node) for n in adj[node] if n != parent]
            return "(" + ",".join(parts) + ")"

        if root == first:  # two-leaf tree
            return f"({self.leaves[0]},{self.leaves[1]})"
        parts = [first] + [rec(n, root) for n in adj[root] if n != first]
        return "(" + ",".join(parts) + ")"


def enumerate_socket_trees(labels):
    """Every unrooted leaf-labeled cubic tree exactly once, (2m-5)!! of them.

    Trees are grown by subdividing each edge in turn with the next leaf;
    labels beyond the enumeration limit are refused.
    """
    labels = list(labels)
    m = len(labels)
    if m < 2:
        raise TooManyLeavesError("need at least two sockets")
    if m > ENUMERATION_LIMIT:
        raise TooManyLeavesError(f"{m} leaves exceeds the exhaustive bound {ENUMERATION_LIMIT}")
    if m == 2:
        yield SocketTree(tuple(labels), (frozenset(labels),))
        return
    base = [
        (frozenset((labels[0], "n0")), frozenset((labels[1], "n0")), frozenset((labels[2], "n0")))
    ]
    counter = 1
    trees = base
    for leaf in labels[3:]:
        new_trees = []
        node = f"n{counter}"
        counter += 1
        for edges in trees:
            for i, e in enumerate(edges):
                a, b = tuple(e)
                rest = edges[:i] + edges[i + 1 :]
                new_trees.append(
                    rest
                    + (frozenset((a, node)), frozenset((node, b)), frozenset((node, leaf)))
                )
        trees = new_trees
    for edges in trees:
        yield SocketTree(tuple(labels), tuple(edges))


def tree_width(spec: MapSpec, tree: SocketTree, _cache=None) -> int:
    """Max over tree edges of the flattening rank along the edge bipartition."""
    coarse = coarse_tensor(spec)
    cache = _cache if _cache is not None else {}
    return max(
        _edge_rank(coarse, tree.bipartition(e), cache) for e in tree.sorted_edges()
    )


def _edge_rank(coarse: Tensor, bipartition, cache):
    left, right = bipartition
    key = min(left, right)
    if key not in cache:
        cache[key] = matrix_rank(coarse.flatten(set(key)))
    return cache[key]


@dataclass(frozen=True)
class WidthCertificate:
    map_id: str
    field: Field
    socket_width: int
    witness_tree: SocketTree
    witness_edge_ranks: tuple  # ((left labels, right labels, rank), ...)
    per_tree_log: tuple = ()

    def to_json(self):
        return {
            "version": 1,
            "map": self.map_id,
            "field": field_tag(self.field),
            "socket_width": self.socket_width,
            "witness_tree": self.witness_tree.render(),
            "edge_ranks": [
                {"left": list(l), "right": list(r), "rank": k}
                for (l, r, k) in self.witness_edge_ranks
            ],
            "trees": [
                {"tree": t.render(), "width": w} for (t, w) in self.per_tree_log
            ] or None,
        }


def socket_width(spec: MapSpec, log_trees: bool = False) -> WidthCertificate:
    """Exact socket-width with a witness tree.

    Enumerates every socket tree; a tree is abandoned as soon as one of its
    edges reaches the best width seen so far (its max cannot improve the
    min), which leaves the returned minimum exact.
    """
    labels = socket_labels(spec)
    coarse = coarse_tensor(spec)
    cache = {}
    best = None
    best_tree = None
    log = []
    for tree in enumerate_socket_trees(labels):
        width = 0
        abandoned = False
        for e in tree.sorted_edges():
            rank = _edge_rank(coarse, tree.bipartition(e), cache)
            width = max(width, rank)
            if best is not None and width >= best and not log_trees:
                abandoned = True
                break
        if log_trees:
            log.append((tree, width))
        if not abandoned and (best is None or width < best):
            best, best_tree = width, tree
    ranks = tuple(
        (*best_tree.bipartition(e), _edge_rank(coarse, best_tree.bipartition(e), cache))
        for e in best_tree.sorted_edges()
    )
    return WidthCertificate(
        map_id=spec.name,
        field=spec.field,
        socket_width=best,
        witness_tree=best_tree,
        witness_edge_ranks=ranks,
        per_tree_log=tuple(log),
    )


def balanced_edge(tree: SocketTree):
    """An edge whose smaller side holds at least ceil(n/3) leaves."""
    n = len(tree.leaves)
    want = math.ceil(n / 3)
    for e in tree.sorted_edges():
        left, right = tree.bipartition(e)
        if min(len(left), len(right)) >= want:
            return e
    raise AssertionError("no balanced edge; the balanced-edge claim is violated")


def closed_form_bound(family: str, **params) -> int:
    """The paper's closed-form lower bounds, for cross-checking widths."""
    if family in ("permanent", "determinant", "perm", "det"):
        n = params["n"]
        return math.comb(n, math.ceil(n / 3))
    if family == "pform":
        pattern: PatternGraph = params["pattern"]
        n = params["n"]
        from .builders.homcount import branch_decomposition_search

        return n ** branch_decomposition_search(pattern).width
    if family == "kruskal":
        l, n, r = params["l"], params["n"], params["r"]
        return max(n**l, n ** math.ceil(l / 2) * r)
    raise ValueError(f"unknown family {family!r}")
