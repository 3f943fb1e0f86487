"""Hypergraph tensor networks: incidence, boundary, contraction, value.

A network is a hypergraph whose vertices carry tensors and whose hyperedges
are modes; a subset of the modes is the boundary.  Socket vertices may carry
``None`` as a placeholder tensor: cost analysis is data-oblivious and works
on incidence alone, while evaluation demands every tensor be set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    ArityMismatchError,
    DegenerateNetworkError,
    EmptySubsetError,
    ShapeMismatchError,
    SocketMismatchError,
    TooLargeError,
    UnboundSocketError,
    ValidationError,
    ValueMismatchError,
)
from .fields import Field, PrimeField, Float64Field
from .tensor import Mode, Tensor, mode_key

#: direct summation refuses networks with more grid positions than this
DESK_BOUND = 2**24


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: object

    def __str__(self):
        return f"{self.kind}({self.subject})"


def merged_vertex_id(vertex_ids) -> str:
    """Deterministic id of a contraction result: sorted '+' concatenation."""
    return "+".join(sorted(str(v) for v in vertex_ids))


class Network:
    """Immutable-by-convention tensor network."""

    def __init__(self, edges, incidence, tensors, boundary, field: Field):
        #: mode id -> length
        self.edges = dict(edges)
        #: vertex id -> tuple of incident mode ids (sorted)
        self.incidence = {v: tuple(sorted(ms, key=mode_key)) for v, ms in incidence.items()}
        #: vertex id -> Tensor or None (socket placeholder)
        self.tensors = dict(tensors)
        self.boundary = frozenset(boundary)
        self.field = field

    # -- small accessors ---------------------------------------------------

    def vertices(self):
        return sorted(self.incidence)

    def mode(self, e):
        return Mode(e, self.edges[e])

    def vertices_on(self, e):
        return [v for v, ms in self.incidence.items() if e in ms]

    def is_loop(self, e):
        return e not in self.boundary and len(self.vertices_on(e)) == 1

    def loops_at(self, v):
        counts = self._incidence_counts()
        return [e for e in self.incidence[v] if e not in self.boundary and counts[e] == 1]

    def _incidence_counts(self):
        counts = dict.fromkeys(self.edges, 0)
        for ms in self.incidence.values():
            for e in ms:
                counts[e] += 1
        return counts

    def adjacent(self, u, v):
        return bool(set(self.incidence[u]) & set(self.incidence[v]))

    def vertex_volume(self, v):
        vol = 1
        for e in self.incidence[v]:
            vol *= self.edges[e]
        return vol

    def replace_tensor(self, v, tensor):
        """New network with vertex v's tensor swapped (shape must match)."""
        if tensor is not None:
            _check_tensor_shape(self, v, tensor)
        tensors = dict(self.tensors)
        tensors[v] = tensor
        return Network(self.edges, self.incidence, tensors, self.boundary, self.field)

    # -- structural operations ----------------------------------------------

    def validate(self):
        """Report-style invariant check; returns a list of violations."""
        out = []
        counts = self._incidence_counts()
        for e, c in sorted(counts.items(), key=lambda kv: mode_key(kv[0])):
            if c == 0:
                out.append(Violation("Degenerate", e))
        for v in self.vertices():
            for e in self.incidence[v]:
                if e not in self.edges:
                    out.append(Violation("UnknownEdge", (v, e)))
            t = self.tensors.get(v)
            if t is None:
                continue
            want = {e: self.edges[e] for e in self.incidence[v]}
            have = {m.id: m.length for m in t.modes}
            if want != have or t.field != self.field:
                out.append(Violation("ShapeMismatch", v))
        for e in self.boundary:
            if e not in self.edges:
                out.append(Violation("UnknownEdge", ("boundary", e)))
        return out

    def require_valid(self):
        violations = self.validate()
        if violations:
            if any(v.kind == "Degenerate" for v in violations):
                raise DegenerateNetworkError("; ".join(map(str, violations)))
            raise ValidationError("; ".join(map(str, violations)))

    def induced(self, W):
        """The induced subnetwork D[W]; cut and boundary modes stay boundary."""
        W = set(W)
        if not W:
            raise EmptySubsetError("induced network needs a nonempty vertex set")
        if not W <= set(self.incidence):
            raise KeyError(f"unknown vertices {sorted(W - set(self.incidence))}")
        sub_edges = {}
        for v in W:
            for e in self.incidence[v]:
                sub_edges[e] = self.edges[e]
        outside = set()
        for v, ms in self.incidence.items():
            if v not in W:
                outside.update(ms)
        boundary = {e for e in sub_edges if e in self.boundary or e in outside}
        return Network(
            sub_edges,
            {v: self.incidence[v] for v in W},
            {v: self.tensors[v] for v in W},
            boundary,
            self.field,
        )

    def contraction_cost(self, W):
        """Product of the lengths of every edge of D[W], boundary included."""
        W = set(W)
        if not W:
            raise EmptySubsetError("contraction needs a nonempty vertex set")
        cost = 1
        seen = set()
        for v in W:
            for e in self.incidence[v]:
                if e not in seen:
                    seen.add(e)
                    cost *= self.edges[e]
        return cost

    def contract(self, W):
        """Replace D[W] by a single vertex carrying its value."""
        W = set(W)
        sub = self.induced(W)
        new_tensor = sub.value()
        new_id = merged_vertex_id(W)
        kept = {e for e in self.edges if e not in sub.edges or e in sub.boundary}
        incidence = {v: ms for v, ms in self.incidence.items() if v not in W}
        incidence[new_id] = tuple(sorted(sub.boundary, key=mode_key))
        tensors = {v: t for v, t in self.tensors.items() if v not in W}
        tensors[new_id] = new_tensor
        return Network(
            {e: self.edges[e] for e in kept}, incidence, tensors, self.boundary, self.field
        )

    # -- reference evaluation -------------------------------------------------

    def value(self) -> Tensor:
        """Direct summation over all non-boundary positions (Eq. semantics).

        Exponential reference path; refuses grids beyond DESK_BOUND.  The
        inner product/sum is vectorized but term-for-term identical to the
        naive sum.
        """
        self.require_valid()
        for v, t in self.tensors.items():
            if t is None:
                raise UnboundSocketError(f"vertex {v} has no tensor bound")
        edge_ids = sorted(self.edges, key=mode_key)
        grid = 1
        for e in edge_ids:
            grid *= self.edges[e]
        if grid > DESK_BOUND:
            raise TooLargeError(f"{grid} positions exceeds desk bound {DESK_BOUND}")
        axis = {e: i for i, e in enumerate(edge_ids)}

        int_path = isinstance(self.field, PrimeField) and self.field.modulus < 2**31
        if int_path:
            dtype = np.int64
        elif isinstance(self.field, Float64Field):
            dtype = np.float64
        else:
            dtype = object
        p = self.field.modulus if isinstance(self.field, PrimeField) else None

        acc = None
        for v in self.vertices():
            t = self.tensors[v]
            order = sorted(range(t.order), key=lambda i: axis[t.modes[i].id])
            arr = np.asarray(t.data, dtype=dtype).reshape([m.length for m in t.modes])
            arr = arr.transpose(order)
            shape = [1] * len(edge_ids)
            for i in order:
                shape[axis[t.modes[i].id]] = t.modes[i].length
            arr = arr.reshape(shape)
            acc = arr if acc is None else acc * arr
            if int_path:
                acc %= p
        if acc is None:
            raise EmptySubsetError("cannot evaluate a network with no vertices")
        sum_axes = tuple(axis[e] for e in edge_ids if e not in self.boundary)
        res = acc.sum(axis=sum_axes) if sum_axes else acc
        if p is not None:
            res = res % p
        out_ids = [e for e in edge_ids if e in self.boundary]
        out_modes = tuple(Mode(e, self.edges[e]) for e in out_ids)
        flat = np.asarray(res).reshape(-1)
        return Tensor(out_modes, flat.tolist(), self.field)


def _check_tensor_shape(net, v, tensor):
    want = {e: net.edges[e] for e in net.incidence[v]}
    have = {m.id: m.length for m in tensor.modes}
    if want != have:
        raise ShapeMismatchError(f"vertex {v}: incidence {want} vs tensor {have}")
    if tensor.field != net.field:
        raise ShapeMismatchError(f"vertex {v}: tensor field {tensor.field} != {net.field}")


@dataclass(frozen=True)
class MapSpec:
    """A multilinear map: socket structure plus a base-tensor producer.

    `input_sockets` and `output_socket` partition the fine modes of the
    map's tensor; `base_tensor` is a thunk (normally oracle-backed)
    producing that tensor on demand.
    """

    name: str
    input_sockets: tuple
    output_socket: tuple
    field: Field
    base_tensor: object = dc_field(repr=False, default=None)

    def __post_init__(self):
        seen = set()
        for sock in list(self.input_sockets) + [self.output_socket]:
            for m in sock:
                if m.id in seen:
                    raise SocketMismatchError(f"mode {m.id!r} appears in two sockets")
                seen.add(m.id)
        if not all(len(s) for s in self.input_sockets):
            raise SocketMismatchError("input sockets must be nonempty")

    @property
    def arity(self):
        return len(self.input_sockets)

    @property
    def is_form(self):
        return len(self.output_socket) == 0

    def all_modes(self):
        out = []
        for sock in self.input_sockets:
            out.extend(sock)
        out.extend(self.output_socket)
        return tuple(out)

    def socket_mode_ids(self):
        return frozenset(m.id for m in self.all_modes())

    def socket_volume(self, k):
        """Volume of input socket k, or of the output socket for k == arity."""
        sock = self.output_socket if k == self.arity else self.input_sockets[k]
        vol = 1
        for m in sock:
            vol *= m.length
        return vol

    def tensor(self) -> Tensor:
        t = self.base_tensor() if callable(self.base_tensor) else self.base_tensor
        if t is None:
            raise ValueMismatchError(f"map {self.name} has no base tensor producer")
        return t


class SocketedNetwork:
    """A realization: a core network plus one socket vertex per input."""

    def __init__(self, network: Network, socket_vertices, spec: MapSpec = None, meta=None):
        self.network = network
        self.socket_vertices = tuple(socket_vertices)
        self.spec = spec
        self.meta = dict(meta or {})

    @property
    def output_modes(self):
        return self.network.boundary

    def socket_modes(self, k):
        return self.network.incidence[self.socket_vertices[k]]

    def is_bound(self):
        return all(self.network.tensors[v] is not None for v in self.socket_vertices)

    def bind(self, inputs) -> Network:
        """Attach one tensor per socket; returns a plain evaluable network."""
        inputs = list(inputs)
        if len(inputs) != len(self.socket_vertices):
            raise ArityMismatchError(
                f"{len(inputs)} inputs for {len(self.socket_vertices)} sockets"
            )
        net = self.network
        for v, t in zip(self.socket_vertices, inputs):
            want = {e: net.edges[e] for e in net.incidence[v]}
            have = {m.id: m.length for m in t.modes}
            if want != have:
                raise ShapeMismatchError(f"socket {v}: expected modes {want}, got {have}")
            net = net.replace_tensor(v, t)
        return net

    def bound_or_placeholder(self):
        return self.network

    def core(self) -> Network:
        """The non-socket subnetwork D*, with all socket modes on the boundary."""
        core_vertices = [v for v in self.network.vertices() if v not in self.socket_vertices]
        return self.network.induced(core_vertices)


def realize(spec: MapSpec, core: Network, check="auto") -> SocketedNetwork:
    """Attach socket vertices to a core network computing the map's tensor.

    Checks that the core's boundary is exactly the union of the sockets and
    (at desk scale) that its value equals the base tensor; `check` may be
    True, False, or "auto" (verify when the summation grid is small enough).
    """
    socket_ids = spec.socket_mode_ids()
    if frozenset(core.boundary) != socket_ids:
        raise SocketMismatchError(
            f"core boundary {sorted(map(str, core.boundary))} != sockets "
            f"{sorted(map(str, socket_ids))}"
        )
    for m in spec.all_modes():
        if core.edges.get(m.id) != m.length:
            raise SocketMismatchError(f"mode {m.id!r} has wrong length in the core")
    if check == "auto":
        grid = 1
        for length in core.edges.values():
            grid *= length
        tensor_volume = 1
        for m in spec.all_modes():
            tensor_volume *= m.length
        check = grid <= 2**18 and tensor_volume <= 2**13
    if check:
        expected = spec.tensor()
        got = core.value()
        if got != expected:
            raise ValueMismatchError(f"core value does not realize map {spec.name}")
    return _attach_sockets(spec, core)


def _attach_sockets(spec: MapSpec, core: Network, check_incident=True) -> SocketedNetwork:
    """Socket attachment without the value check (used by power_network)."""
    edges = dict(core.edges)
    incidence = dict(core.incidence)
    tensors = dict(core.tensors)
    names = []
    width = len(str(max(1, spec.arity)))
    for k, sock in enumerate(spec.input_sockets):
        name = f"X{k + 1:0{width}d}" if spec.arity > 9 else f"X{k + 1}"
        if name in incidence:
            raise SocketMismatchError(f"vertex id {name} already used by the core")
        names.append(name)
        incidence[name] = tuple(sorted((m.id for m in sock), key=mode_key))
        tensors[name] = None
    if check_incident:
        counts = {}
        for v, ms in core.incidence.items():
            for e in ms:
                counts[e] = counts.get(e, 0) + 1
        for k, sock in enumerate(spec.input_sockets):
            for m in sock:
                if counts.get(m.id, 0) < 1:
                    raise SocketMismatchError(
                        f"socket mode {m.id!r} touches no non-socket vertex"
                    )
    boundary = frozenset(m.id for m in spec.output_socket)
    net = Network(edges, incidence, tensors, boundary, core.field)
    return SocketedNetwork(net, names, spec=spec)


def socket_tensor(socket_modes, values, field) -> Tensor:
    """Build a socket input from flat values in canonical (sorted-id) order."""
    modes = tuple(sorted(socket_modes, key=lambda m: mode_key(m.id)))
    return Tensor(modes, values, field)


def random_network(rng, field, max_vertices=6, max_length=3, allow_boundary=True):
    """Seeded random small network for property tests and the CLI corpus."""
    nv = rng.randint(1, max_vertices)
    names = [f"v{i}" for i in range(nv)]
    edges = {}
    incidence = {v: [] for v in names}

    def new_edge(members):
        e = f"e{len(edges)}"
        edges[e] = rng.randint(1, max_length)
        for v in members:
            incidence[v].append(e)
        return e

    # random spanning tree keeps the network connected
    for i in range(1, nv):
        new_edge([names[i], names[rng.randrange(i)]])
    for _ in range(rng.randint(0, nv)):
        k = rng.randint(1, min(3, nv))
        members = rng.sample(names, k)
        new_edge(set(members))
    boundary = set()
    if allow_boundary:
        for e in list(edges):
            if rng.random() < 0.3:
                boundary.add(e)
    # a loop is a non-boundary edge on exactly one vertex; leave a few in
    tensors = {}
    for v in names:
        modes = tuple(Mode(e, edges[e]) for e in sorted(incidence[v], key=mode_key))
        tensors[v] = Tensor.from_function(modes, field, lambda _: field.random(rng))
    return Network(edges, incidence, tensors, boundary, field)
