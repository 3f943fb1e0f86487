"""Uniform hypergraph patterns for homomorphism-counting forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class PatternGraph:
    """k-uniform hypergraph on vertices 0..v-1 with sorted-tuple hyperedges."""

    num_vertices: int
    hyperedges: tuple
    name: str = "P"

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.hyperedges))
        object.__setattr__(self, "hyperedges", edges)
        if not edges:
            raise ValueError("pattern needs at least one hyperedge")
        sizes = {len(e) for e in edges}
        if len(sizes) != 1:
            raise ValueError(f"pattern is not uniform: edge sizes {sorted(sizes)}")
        k = sizes.pop()
        if k < 2:
            raise ValueError("hyperedges need at least two vertices")
        for e in edges:
            if len(set(e)) != len(e):
                raise ValueError(f"hyperedge {e} repeats a vertex")
            if any(not 0 <= x < self.num_vertices for x in e):
                raise ValueError(f"hyperedge {e} out of range")
        if self.num_vertices < k:
            raise ValueError("fewer vertices than the uniformity")

    @property
    def uniformity(self):
        return len(self.hyperedges[0])

    @property
    def num_edges(self):
        return len(self.hyperedges)

    def vertices(self):
        return range(self.num_vertices)

    @classmethod
    def clique(cls, n):
        return cls(n, tuple(itertools.combinations(range(n), 2)), name=f"K{n}")

    @classmethod
    def path(cls, n):
        return cls(n, tuple((i, i + 1) for i in range(n - 1)), name=f"P{n}")

    @classmethod
    def cycle(cls, n):
        edges = tuple((i, (i + 1) % n) for i in range(n))
        return cls(n, edges, name=f"C{n}")

    @classmethod
    def hyperclique(cls, v, k):
        return cls(v, tuple(itertools.combinations(range(v), k)), name=f"K{v}^{k}")

    @classmethod
    def from_edge_list(cls, text, name="P"):
        """Parse whitespace-separated vertex labels, one hyperedge per line."""
        edges = []
        labels = {}
        for line in text.splitlines():
            line = line.split("#")[0].strip()
            if not line:
                continue
            edge = []
            for tok in line.split():
                if tok not in labels:
                    labels[tok] = len(labels)
                edge.append(labels[tok])
            edges.append(tuple(edge))
        return cls(len(labels), tuple(edges), name=name)

    def named(self):
        return self.name


NAMED_PATTERNS = {
    "K3": PatternGraph.clique(3),
    "K4": PatternGraph.clique(4),
    "K5": PatternGraph.clique(5),
    "K6": PatternGraph.clique(6),
    "K7": PatternGraph.clique(7),
    "P4": PatternGraph.path(4),
    "C5": PatternGraph.cycle(5),
    "K4^3": PatternGraph.hyperclique(4, 3),
}
