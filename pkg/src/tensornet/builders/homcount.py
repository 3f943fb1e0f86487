"""Homomorphism-counting forms, branch decompositions, and their evaluator.

`pform_network` realizes the P-linear form naively: one copy tensor per
pattern vertex forces all occurrences of that vertex to agree.
`branch_decomposition_search` finds a minimum-width branch decomposition by
iterative deepening over a subset memo (exact up to `exact_limit` edges,
greedy with a non-optimality flag beyond).  `branchwidth_evaluation` runs
the decomposition bottom-up, contracting sibling tensors over their shared
crossing vertices; intermediate tensors never exceed the decomposition
width in order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from ..errors import InvalidDecompositionError
from ..fields import Field
from ..network import MapSpec, Network, SocketedNetwork, realize
from ..oracle import PformOracle
from ..patterns import PatternGraph
from ..tensor import Mode, Tensor


# -- the naive P-form realization ---------------------------------------------


def pform_network(pattern: PatternGraph, n: int, field: Field):
    """MapSpec and naive-core realization of the P-linear form of order n."""
    oracle = PformOracle(pattern, n, field)
    edges = {}
    incidence, tensors = {}, {}
    for v in pattern.vertices():
        ids = [
            oracle.socket_mode_id(e, v) for e in pattern.hyperedges if v in e
        ]
        for mid in ids:
            edges[mid] = n
        incidence[f"eq{v}"] = tuple(ids)
        tensors[f"eq{v}"] = Tensor.delta(field, ids, n)
    boundary = set(edges)
    core = Network(edges, incidence, tensors, boundary, field)
    spec = oracle.map_spec()
    snet = realize(spec, core, check="auto")
    snet.meta.update(
        {
            "pattern": pattern,
            "n": n,
            "generator": {
                "name": "pform",
                "params": {"pattern": pattern.name, "n": n},
            },
        }
    )
    return spec, snet


def bind_pform(snet: SocketedNetwork, hosts, field: Field) -> Network:
    """Bind host tensors (nested lists, one per hyperedge in sorted order)."""
    pattern = snet.meta["pattern"]
    n = snet.meta["n"]
    oracle = PformOracle(pattern, n, field)
    inputs = []
    for j, edge in enumerate(pattern.hyperedges):
        modes = tuple(Mode(oracle.socket_mode_id(edge, v), n) for v in edge)

        def fn(idx, host=hosts[j]):
            entry = host
            for i in idx:
                entry = entry[i]
            return entry

        inputs.append(Tensor.from_function(modes, field, fn))
    return snet.bind(inputs)


# -- branch decompositions ------------------------------------------------------


@dataclass
class BranchDecomposition:
    """Unrooted tree with degree-1/3 nodes; leaves carry the hyperedges."""

    pattern: PatternGraph
    adjacency: dict  # node id -> tuple of neighbor ids
    leaf_map: dict  # leaf node id -> hyperedge (sorted tuple)
    width: int
    edge_widths: dict = dc_field(default_factory=dict)  # frozenset{a,b} -> int
    optimal: bool = True

    def edges(self):
        seen = set()
        for a, nbrs in self.adjacency.items():
            for b in nbrs:
                e = frozenset((a, b))
                if e not in seen:
                    seen.add(e)
                    yield e

    def leaves_beyond(self, a, b):
        """Leaf nodes on b's side of the edge {a, b}."""
        out = []
        stack = [(a, b)]
        while stack:
            prev, node = stack.pop()
            if node in self.leaf_map:
                out.append(node)
            for nxt in self.adjacency[node]:
                if nxt != prev:
                    stack.append((node, nxt))
        return out

    def validate(self):
        if set(self.leaf_map.values()) != set(self.pattern.hyperedges):
            raise InvalidDecompositionError("leaves do not map onto the hyperedges")
        if len(self.leaf_map) != self.pattern.num_edges:
            raise InvalidDecompositionError("leaf map is not a bijection")
        for node, nbrs in self.adjacency.items():
            want = 1 if node in self.leaf_map else 3
            if len(self.adjacency) == 1:
                want = 0
            if len(self.adjacency) == 2:
                want = 1
            if len(nbrs) != want:
                raise InvalidDecompositionError(f"node {node} has degree {len(nbrs)}")


def _crossing_count(mask, vertex_masks):
    width = 0
    for mv in vertex_masks:
        inside = mask & mv
        if inside and inside != mv:
            width += 1
    return width


def _crossing_set(mask, vertex_masks):
    out = []
    for v, mv in enumerate(vertex_masks):
        inside = mask & mv
        if inside and inside != mv:
            out.append(v)
    return out


def branch_decomposition_search(
    pattern: PatternGraph, exact_limit: int = 22, seed: int = 0
) -> BranchDecomposition:
    """Minimum-width branch decomposition.

    Exact (iterative deepening over the subset relation, memoized) while
    2^edges stays tractable; a greedy bisection fallback beyond flags the
    result non-optimal.
    """
    m = pattern.num_edges
    vertex_masks = [0] * pattern.num_vertices
    for i, e in enumerate(pattern.hyperedges):
        for v in e:
            vertex_masks[v] |= 1 << i
    if m == 1:
        return _assemble(pattern, (0,), vertex_masks)
    if m == 2:
        return _assemble(pattern, ((0,), (1,)), vertex_masks)
    if m > exact_limit:
        return _greedy_decomposition(pattern, vertex_masks, seed)

    full = (1 << m) - 1
    bc = _crossing_counts(full, vertex_masks)
    lower = max(bc[1 << i] for i in range(m))
    for w in range(lower, pattern.num_vertices + 1):
        feasible = [mask for mask in range(1, full) if bc[mask] <= w]
        feasible_set = set(feasible)
        by_popcount = sorted(feasible, key=lambda s: (abs(2 * s.bit_count() - m)))
        memo = {}

        def solve(S):
            if S.bit_count() == 1:
                return (S.bit_length() - 1,)
            if S in memo:
                return memo[S]
            memo[S] = None  # fail closed on re-entry
            low = S & -S
            candidates = [
                T
                for T in feasible_set
                if T & ~S == 0 and T != S and T & low and (S ^ T) in feasible_set
            ]
            candidates.sort(
                key=lambda T: (
                    max(bc[T], bc[S ^ T]),
                    abs(2 * T.bit_count() - S.bit_count()),
                    T,
                )
            )
            for T in candidates:
                left = solve(T)
                if left is None:
                    continue
                right = solve(S ^ T)
                if right is None:
                    continue
                memo[S] = (left, right)
                return memo[S]
            return None

        for S in by_popcount:
            if not S & 1:
                continue
            comp = full ^ S
            if comp not in feasible_set:
                continue
            left = solve(S)
            if left is None:
                continue
            right = solve(comp)
            if right is None:
                continue
            return _assemble(pattern, (left, right), vertex_masks)
    raise AssertionError("no decomposition found up to the vertex count")


def _crossing_counts(full, vertex_masks):
    """Boundary size of every edge subset; vectorized when the range is big."""
    if full >= 1 << 16:
        import numpy as np

        masks = np.arange(full + 1, dtype=np.int64)
        acc = np.zeros(full + 1, dtype=np.int16)
        for mv in vertex_masks:
            inside = masks & mv
            acc += ((inside != 0) & (inside != mv)).astype(np.int16)
        return acc
    return [_crossing_count(mask, vertex_masks) for mask in range(full + 1)]


def _greedy_decomposition(pattern, vertex_masks, seed):
    rng = random.Random(seed)

    def split(indices):
        if len(indices) == 1:
            return (indices[0],)
        idx = list(indices)
        best = None
        if len(idx) <= 14:
            for bits in range(1, 1 << (len(idx) - 1)):
                sub = tuple(idx[j] for j in range(len(idx)) if (bits >> j) & 1)
                key = _split_key(sub, indices, vertex_masks)
                if best is None or key < best[0]:
                    best = (key, sub)
        else:
            for _ in range(500):
                size = rng.randint(max(1, len(idx) // 3), max(1, 2 * len(idx) // 3))
                sub = tuple(sorted(rng.sample(idx, size)))
                key = _split_key(sub, indices, vertex_masks)
                if best is None or key < best[0]:
                    best = (key, sub)
        chosen = set(best[1])
        left = tuple(sorted(chosen))
        right = tuple(sorted(set(indices) - chosen))
        return (split(left), split(right))

    shape = split(tuple(range(pattern.num_edges)))
    return _assemble(pattern, shape, vertex_masks, optimal=False)


def _split_key(sub, indices, vertex_masks):
    mask = 0
    for i in sub:
        mask |= 1 << i
    rest = 0
    for i in indices:
        if i not in sub:
            rest |= 1 << i
    return (
        max(_crossing_count(mask, vertex_masks), _crossing_count(rest, vertex_masks)),
        abs(len(sub) * 2 - len(indices)),
    )


def _assemble(pattern, shape, vertex_masks, optimal=True) -> BranchDecomposition:
    """Build the unrooted tree from the nested split structure."""
    adjacency = {}
    leaf_map = {}
    counter = itertools.count()

    def build(node_shape):
        name = f"t{next(counter)}"
        adjacency[name] = []
        if len(node_shape) == 1 and isinstance(node_shape[0], int):
            leaf_map[name] = pattern.hyperedges[node_shape[0]]
            return name
        left = build(node_shape[0])
        right = build(node_shape[1])
        adjacency[name] += [left, right]
        adjacency[left].append(name)
        adjacency[right].append(name)
        return name

    if len(shape) == 1 and isinstance(shape[0], int):
        root = build(shape)
        bd = BranchDecomposition(pattern, {root: ()}, leaf_map, 0, {}, optimal)
        return bd
    left = build(shape[0])
    right = build(shape[1])
    adjacency[left].append(right)
    adjacency[right].append(left)
    adjacency = {a: tuple(n) for a, n in adjacency.items()}
    bd = BranchDecomposition(pattern, adjacency, leaf_map, 0, {}, optimal)
    # annotate widths
    edge_index = {e: i for i, e in enumerate(pattern.hyperedges)}
    width = 0
    for e in bd.edges():
        a, b = tuple(e)
        mask = 0
        for leaf in bd.leaves_beyond(a, b):
            mask |= 1 << edge_index[bd.leaf_map[leaf]]
        w = _crossing_count(mask, vertex_masks)
        bd.edge_widths[e] = w
        width = max(width, w)
    bd.width = width
    bd.validate()
    return bd


# -- evaluation along a branch decomposition ---------------------------------------


def branchwidth_evaluation(
    pattern: PatternGraph, bd: BranchDecomposition, hosts, field: Field
):
    """Value of the P-linear form (graphs only) along a branch decomposition.

    Roots the decomposition by subdividing the lexicographically first tree
    edge, then computes each node's tensor over its crossing vertices by
    contracting the two child tensors over the vertices they share and are
    done with.  Orders never exceed the decomposition width.
    """
    if pattern.uniformity != 2:
        raise InvalidDecompositionError("evaluation is implemented for graphs (k=2)")
    bd.validate()
    if bd.pattern != pattern:
        raise InvalidDecompositionError("decomposition belongs to a different pattern")
    hosts = {e: hosts[i] for i, e in enumerate(pattern.hyperedges)}
    if pattern.num_edges == 1:
        (edge,) = pattern.hyperedges
        f = field
        total = f.zero
        for i in range(len(hosts[edge])):
            for j in range(len(hosts[edge])):
                total = f.add(total, f.coerce(hosts[edge][i][j]))
        return total

    # root by subdividing the first edge
    first = min(bd.edges(), key=lambda e: tuple(sorted(e)))
    ra, rb = sorted(first)

    # children structure: walk from the two subdivision endpoints outward
    def subtree_leaves(node, parent):
        out = set()
        stack = [(node, parent)]
        while stack:
            cur, par = stack.pop()
            if cur in bd.leaf_map:
                out.add(bd.leaf_map[cur])
            for nxt in bd.adjacency[cur]:
                if nxt != par:
                    stack.append((nxt, cur))
        return out

    all_vertices = set()
    occurrences = {}
    for e in pattern.hyperedges:
        for v in e:
            occurrences.setdefault(v, set()).add(e)
            all_vertices.add(v)

    def crossing(leaves):
        outside = set(pattern.hyperedges) - leaves
        out = set()
        for v in all_vertices:
            occ = occurrences[v]
            if occ & leaves and occ & outside:
                out.add(v)
        return out

    width = bd.width

    def tensor_at(node, parent) -> Tensor:
        leaves = subtree_leaves(node, parent)
        cset = sorted(crossing(leaves))
        if node in bd.leaf_map:
            edge = bd.leaf_map[node]
            x1, x2 = edge
            host = hosts[edge]
            n = len(host)
            f = field
            keep = [v for v in edge if v in cset]
            modes = tuple(Mode(f"hv{v}", n) for v in keep)

            def fn(idx):
                lookup = dict(zip((f"hv{v}" for v in keep), idx))
                total = f.zero
                free = [v for v in edge if v not in cset]
                for assign in itertools.product(range(n), repeat=len(free)):
                    pos = dict(lookup)
                    pos.update(zip((f"hv{v}" for v in free), assign))
                    total = f.add(
                        total, f.coerce(host[pos[f"hv{x1}"]][pos[f"hv{x2}"]])
                    )
                return total

            t = Tensor.from_function(modes, f, fn)
        else:
            kids = [nb for nb in bd.adjacency[node] if nb != parent]
            ty = tensor_at(kids[0], node)
            tz = tensor_at(kids[1], node)
            t = _contract_siblings(ty, tz, cset, field)
        if t.order > width:
            raise AssertionError(
                f"intermediate order {t.order} exceeds decomposition width {width}"
            )
        return t

    left = tensor_at(ra, rb)
    right = tensor_at(rb, ra)
    result = _contract_siblings(left, right, [], field)
    return result.data[0]


def _contract_siblings(ty: Tensor, tz: Tensor, keep_vertices, field: Field) -> Tensor:
    """Sum the shared modes not kept; pointwise on shared kept modes."""
    keep_ids = {f"hv{v}" for v in keep_vertices}
    y_ids = set(m.id for m in ty.modes)
    z_ids = set(m.id for m in tz.modes)
    shared = y_ids & z_ids
    sum_ids = sorted(shared - keep_ids)
    out_ids = sorted((y_ids | z_ids) & keep_ids)
    lengths = {m.id: m.length for m in ty.modes}
    lengths.update({m.id: m.length for m in tz.modes})
    out_modes = tuple(Mode(i, lengths[i]) for i in out_ids)
    f = field

    def fn(idx):
        pos = dict(zip(out_ids, idx))
        total = f.zero
        for assign in itertools.product(*[range(lengths[i]) for i in sum_ids]):
            full = dict(pos)
            full.update(zip(sum_ids, assign))
            term = f.mul(
                ty.entry({m.id: full[m.id] for m in ty.modes}),
                tz.entry({m.id: full[m.id] for m in tz.modes}),
            )
            total = f.add(total, term)
        return total

    return Tensor.from_function(out_modes, f, fn)
