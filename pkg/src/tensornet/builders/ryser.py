"""Ryser's permanent algorithm as a star-shaped tensor network.

n subset-incidence matrices of shape 2^n x n share one length-2^n mode; the
first matrix carries the inclusion-exclusion signs.  Socket i holds row i of
the input matrix.  The execution does the n matrix-vector products first
(cost 2^n * n each) and then joins the resulting length-2^n vectors
pointwise (cost 2^n each), so the permanent runs within the O(2^n n) regime.
"""

from __future__ import annotations

from ..execution import ExecutionPlan, plan_cost
from ..fields import Field
from ..network import MapSpec, Network, SocketedNetwork, merged_vertex_id, realize
from ..oracle import PermanentOracle
from ..tensor import Mode, Tensor


def ryser_network(n: int, field: Field):
    if n < 1:
        raise ValueError("n must be positive")
    subsets = 2**n
    edges = {"S": subsets}
    incidence, tensors = {}, {}
    for i in range(1, n + 1):
        row_mode = f"r{i:02d}"
        edges[row_mode] = n

        def fn(idx, signed=(i == 1)):
            s, j = idx
            if not (s >> j) & 1:
                return 0
            if signed and (n - bin(s).count("1")) % 2 == 1:
                return -1
            return 1

        name = f"M{i:02d}"
        incidence[name] = ("S", row_mode)
        tensors[name] = Tensor.from_function((Mode("S", subsets), Mode(row_mode, n)), field, fn)
    boundary = {f"r{i:02d}" for i in range(1, n + 1)}
    core = Network(edges, incidence, tensors, boundary, field)

    def base_tensor():
        coarse = PermanentOracle(n, field).base_tensor()
        return coarse.renamed({f"r{i}": f"r{i:02d}" for i in range(1, n + 1)})

    spec = MapSpec(
        name=f"perm({n})",
        input_sockets=tuple((Mode(f"r{i:02d}", n),) for i in range(1, n + 1)),
        output_socket=(),
        field=field,
        base_tensor=base_tensor,
    )
    snet = realize(spec, core, check="auto")
    steps = []
    results = []
    for i in range(1, n + 1):
        pair = (snet.socket_vertices[i - 1], f"M{i:02d}")
        steps.append(pair)
        results.append(merged_vertex_id(pair))
    cur = results[0]
    for nxt in results[1:]:
        steps.append((cur, nxt))
        cur = merged_vertex_id((cur, nxt))
    plan = ExecutionPlan(steps)
    report = plan_cost(snet.network, plan)
    claimed = subsets * n
    if report.max_cost > claimed:
        raise AssertionError(f"ryser cost {report.max_cost} > {claimed}")
    snet.meta.update(
        {
            "n": n,
            "claimed_bound": claimed,
            "generator": {"name": "ryser", "params": {"n": n}},
        }
    )
    return snet, plan


def bind_ryser(snet: SocketedNetwork, matrix, field: Field) -> Network:
    n = snet.meta["n"]
    inputs = []
    for i in range(1, n + 1):
        inputs.append(Tensor((Mode(f"r{i:02d}", n),), list(matrix[i - 1]), field))
    return snet.bind(inputs)
