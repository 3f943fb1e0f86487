"""Kruskal operator networks: sum of r rank-one outer products of l matrices.

The l inputs split into two halves that Kronecker vertically into the two
factors of one rectangular matrix product.  Every input keeps private column
bits joined to the shared inner bus by identity vertices (sockets must stay
disjoint), and an odd l is padded with a constant all-ones single-row panel
on the right bus, which adds one always-zero output bit.
"""

from __future__ import annotations

from ..execution import ExecutionPlan, plan_cost
from ..fields import Field
from ..kronpow import copy_id
from ..network import MapSpec, Network, SocketedNetwork, merged_vertex_id, realize
from ..oracle import KruskalOracle
from ..tensor import Mode, Tensor, refine
from .matmul import _absorb, _log_ceil, _rect_frame, _require_strassen
from .matmul import _digits_to_int, _int_to_digits


def kruskal_network(l: int, n: int, r: int, field: Field, c: int = 2, d: int = 7):
    """Network and plan for the l-linear n-uniform Kruskal operator."""
    _require_strassen(c, d)
    if l < 1:
        raise ValueError("l must be positive")
    tn = _log_ceil(n, c)
    tr = _log_ceil(r, c)
    padded = l % 2 == 1
    left_count = (l + 1) // 2
    right_count = l - left_count  # real panels on the right side
    ta = left_count * tn
    tc = right_count * tn + (1 if padded else 0)
    tb = tr
    frame = _rect_frame(ta, tb, tc, field, c=c)
    edges = dict(frame.core.edges)
    incidence = dict(frame.core.incidence)
    tensors = dict(frame.core.tensors)

    # panel t: row bits are a slice of the frame's left/right row bits,
    # column bits are private and identity-joined onto the shared bus
    panel_rows, panel_cols, panel_bus = {}, {}, {}
    for t in range(1, l + 1):
        left = t <= left_count
        slot = t - 1 if left else t - 1 - left_count
        row_prefix = "i1" if left else "j1"
        out_prefix = "i2" if left else "j2"
        rows = [copy_id(row_prefix, slot * tn + b) for b in range(1, tn + 1)]
        outs = [copy_id(out_prefix, slot * tn + b) for b in range(1, tn + 1)]
        bus_prefix = "k1" if left else "k2"
        cols = []
        bus_ids = []
        for b in range(1, tr + 1):
            private = f"a{t:02d}c{b:02d}"
            cols.append(private)
            edges[private] = c
            bus_name = f"bus{t:02d}.{b:02d}"
            incidence[bus_name] = (private, copy_id(bus_prefix, b))
            tensors[bus_name] = Tensor.identity(field, c, private, copy_id(bus_prefix, b))
            bus_ids.append(bus_name)
        panel_rows[t] = rows
        panel_cols[t] = cols
        panel_bus[t] = bus_ids
        _ = outs
    if padded:
        # constant single-row all-ones panel: occupies the last right row
        # bit, sits directly on the bus (it is not a socket)
        pad_row = copy_id("j1", tc)
        pad_modes = (pad_row,) + tuple(copy_id("k2", b) for b in range(1, tb + 1))
        incidence["pad"] = pad_modes
        tensors["pad"] = Tensor.from_function(
            tuple(Mode(m, c) for m in pad_modes),
            field,
            lambda idx: 1 if idx[0] == 0 else 0,
        )

    boundary = set()
    for t in range(1, l + 1):
        boundary.update(panel_rows[t])
        boundary.update(panel_cols[t])
    out_ids = [copy_id("i2", b) for b in range(1, ta + 1)] + [
        copy_id("j2", b) for b in range(1, tc + 1)
    ]
    boundary.update(out_ids)
    core = Network(edges, incidence, tensors, boundary, field)

    N = c**tn

    def base_tensor():
        coarse = KruskalOracle((N,) * l, c**tr, field).base_tensor()
        splits = {}
        for t in range(1, l + 1):
            splits[f"a{t}_i"] = [Mode(m, c) for m in panel_rows[t]]
            splits[f"a{t}_j"] = [Mode(m, c) for m in panel_cols[t]]
            left = t <= left_count
            slot = t - 1 if left else t - 1 - left_count
            out_prefix = "i2" if left else "j2"
            splits[f"y{t}"] = [
                Mode(copy_id(out_prefix, slot * tn + b), c) for b in range(1, tn + 1)
            ]
        fine = refine(coarse.canonical(), splits)
        if padded:
            phantom = Tensor((Mode(copy_id("j2", tc), c),), [1] + [0] * (c - 1), field)
            fine = fine.outer(phantom)
        return fine

    spec = MapSpec(
        name=f"kruskal(l={l},n={n},r={r})",
        input_sockets=tuple(
            tuple(Mode(m, c) for m in panel_rows[t] + panel_cols[t])
            for t in range(1, l + 1)
        ),
        output_socket=tuple(Mode(m, c) for m in out_ids),
        field=field,
        base_tensor=base_tensor,
    )
    snet = realize(spec, core, check="auto")

    steps = []
    sides = {True: [], False: []}
    for t in range(1, l + 1):
        cur = _absorb(steps, snet.socket_vertices[t - 1], panel_bus[t])
        sides[t <= left_count].append(cur)
    left = sides[True][0]
    for other in sides[True][1:]:
        steps.append((left, other))
        left = merged_vertex_id(steps[-1])
    left = _absorb(steps, left, frame.left_passthrough)
    right_parts = sides[False] + (["pad"] if padded else [])
    right = right_parts[0]
    for other in right_parts[1:]:
        steps.append((right, other))
        right = merged_vertex_id(steps[-1])
    right = _absorb(steps, right, frame.right_passthrough)
    right = _absorb(steps, right, frame.sum_identities)
    steps += frame.chain_steps(left, right)
    plan = ExecutionPlan(steps)
    report = plan_cost(snet.network, plan)
    extra = (ta - frame.k) + (tb - frame.k) + (tc - frame.k)
    claimed = max(d**frame.k * c ** (2 + extra), c ** (ta + tb), c ** (tc + tb + 1))
    if report.max_cost > claimed:
        raise AssertionError(f"kruskal cost {report.max_cost} > bound {claimed}")
    snet.meta.update(
        {
            "l": l,
            "logical_n": n,
            "logical_r": r,
            "claimed_bound": claimed,
            "generator": {"name": "kruskal", "params": {"l": l, "n": n, "r": r}},
        }
    )
    return snet, plan


def bind_kruskal(snet: SocketedNetwork, matrices, field: Field) -> Network:
    l = snet.meta["l"]
    if len(matrices) != l:
        raise ValueError(f"expected {l} matrices")
    inputs = []
    for t, matrix in enumerate(matrices, start=1):
        sock = sorted(snet.socket_modes(t - 1))
        rows = [m for m in sock if not str(m).startswith(f"a{t:02d}c")]
        cols = [m for m in sock if str(m).startswith(f"a{t:02d}c")]
        tn_bits, tr_bits = len(rows), len(cols)
        modes = tuple(Mode(m, 2) for m in rows) + tuple(Mode(m, 2) for m in cols)

        def fn(idx, matrix=matrix, tn_bits=tn_bits):
            row = _digits_to_int(idx[:tn_bits], 2)
            col = _digits_to_int(idx[tn_bits:], 2)
            if row < len(matrix) and col < len(matrix[0]):
                return matrix[row][col]
            return 0

        inputs.append(Tensor.from_function(modes, field, fn))
    return snet.bind(inputs)


def read_kruskal_result(snet: SocketedNetwork, t: Tensor):
    """Logical order-l output tensor as nested lists (pad bit sliced at 0)."""
    l, n = snet.meta["l"], snet.meta["logical_n"]
    spec = snet.spec
    order = [m.id for m in spec.output_socket]
    ordered = t.permuted(order)
    tn = _log_ceil(n, 2)

    def read(prefix_digits, depth):
        if depth == l:
            idx = []
            for d in prefix_digits:
                idx.extend(_int_to_digits(d, tn, 2))
            if len(idx) < len(order):  # phantom pad bit
                idx.append(0)
            return ordered.data[ordered._offset(tuple(idx))]
        return [read(prefix_digits + [i], depth + 1) for i in range(n)]

    return read([], 0)
