"""Kronecker powers of realizations and the lifted execution construction.

`power_network` takes k disjoint copies of the non-socket core and regroups
the socket modes copy-wise; `lift` rewrites a base execution tree leaf to
root so that the lifted plan's max step cost stays within
amortized^(k-1) * cost of the base tree.  Copies are numbered 1..k and the
copy index is the outermost digit in every regrouped index.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadDecompositionError, NotARealizationError, ValueMismatchError
from .execution import ExecutionPlan, CostReport, amortized_cost, plan_cost, simulate
from .network import (
    MapSpec,
    Network,
    SocketedNetwork,
    _attach_sockets,
    merged_vertex_id,
    realize,
)
from .planner import _binarize
from .tensor import Mode, Tensor, mode_key


@dataclass(frozen=True)
class LiftedPlan:
    network: SocketedNetwork
    plan: ExecutionPlan
    claimed_bound: int
    report: CostReport
    k: int

    def __post_init__(self):
        if self.report.max_cost > self.claimed_bound:
            raise AssertionError(
                f"lifted cost {self.report.max_cost} exceeds bound {self.claimed_bound}"
            )


def copy_id(mode_or_vertex_id, i: int) -> str:
    return f"{mode_or_vertex_id}@{i:02d}"


def power_spec(spec: MapSpec, k: int) -> MapSpec:
    def socket_copy(sock):
        return tuple(
            Mode(copy_id(m.id, i), m.length) for i in range(1, k + 1) for m in sock
        )

    def base_tensor():
        t = spec.tensor()
        out = None
        for i in range(1, k + 1):
            renamed = t.renamed({m.id: copy_id(m.id, i) for m in t.modes})
            out = renamed if out is None else out.outer(renamed)
        return out

    return MapSpec(
        name=f"{spec.name}^x{k}",
        input_sockets=tuple(socket_copy(s) for s in spec.input_sockets),
        output_socket=socket_copy(spec.output_socket),
        field=spec.field,
        base_tensor=base_tensor,
    )


def power_network(snet: SocketedNetwork, k: int) -> SocketedNetwork:
    """k disjoint copies of the core, one socket vertex per input overall."""
    if k < 1:
        raise ValueError("k must be positive")
    if snet.spec is None:
        raise NotARealizationError("socketed network carries no map spec")
    core = snet.core()
    edges, incidence, tensors = {}, {}, {}
    for i in range(1, k + 1):
        for e, length in core.edges.items():
            edges[copy_id(e, i)] = length
        for v, ms in core.incidence.items():
            incidence[copy_id(v, i)] = tuple(copy_id(e, i) for e in ms)
            t = core.tensors[v]
            tensors[copy_id(v, i)] = (
                None if t is None else t.renamed({m.id: copy_id(m.id, i) for m in t.modes})
            )
    pspec = power_spec(snet.spec, k)
    # the power core's boundary is every socket mode; _attach_sockets then
    # moves the input modes off the boundary
    pcore = Network(edges, incidence, tensors, pspec.socket_mode_ids(), core.field)
    return _attach_sockets(pspec, pcore)


def lift(snet: SocketedNetwork, plan: ExecutionPlan, k: int) -> LiftedPlan:
    """Lift a base execution tree to the k-th Kronecker power.

    Case (i) internal nodes (no sockets below) replicate into k independent
    contraction steps; case (ii) nodes (sockets below one child) absorb the k
    copies of the pure child one at a time, copy 1 first; case (iii) nodes
    contract the two aggregated descendants in a single step.
    """
    if snet.spec is None:
        raise NotARealizationError("socketed network carries no map spec")
    base_net = snet.network
    simulate(base_net, plan)  # validity check
    plan = _binarize(plan)
    base_cost = plan_cost(base_net, plan).max_cost
    base_am = amortized_cost(snet, plan)
    power = power_network(snet, k)

    sockets = set(snet.socket_vertices)
    socket_index = {v: i for i, v in enumerate(snet.socket_vertices)}
    # base current id -> (has_socket, lifted rep: single id or list of k ids)
    state = {}
    for v in base_net.vertices():
        if v in sockets:
            state[v] = (True, power.socket_vertices[socket_index[v]])
        else:
            state[v] = (False, [copy_id(v, i) for i in range(1, k + 1)])
    steps = []
    for W in plan.steps:
        members = [state.pop(v) for v in W]
        flagged = [rep for has, rep in members if has]
        pure = [rep for has, rep in members if not has]
        if not flagged:
            # case (i): contract each copy independently
            new_rep = []
            for i in range(k):
                group = tuple(rep[i] for rep in pure)
                steps.append(group)
                new_rep.append(merged_vertex_id(group))
            state[merged_vertex_id(W)] = (False, new_rep)
        elif len(flagged) == 1:
            # case (ii): absorb the pure copies one at a time, copy 1..k
            cur = flagged[0]
            for i in range(k):
                group = tuple([cur] + [rep[i] for rep in pure])
                steps.append(group)
                cur = merged_vertex_id(group)
            state[merged_vertex_id(W)] = (True, cur)
        else:
            # case (iii): single contraction of the aggregated descendants
            group = tuple(list(flagged) + [rep[i] for rep in pure for i in range(k)])
            steps.append(group)
            state[merged_vertex_id(W)] = (True, merged_vertex_id(group))
    lifted_plan = ExecutionPlan(steps)
    report = plan_cost(power.network, lifted_plan)
    claimed = base_am ** (k - 1) * base_cost
    return LiftedPlan(power, lifted_plan, claimed, report, k)


def outer_power_input(base_parts) -> Tensor:
    """Kronecker-structured socket input: outer product of renamed copies.

    `base_parts` lists k tensors over the base socket's modes; part i gets
    its modes renamed to copy i (the lifted socket's grouping bijection).
    """
    out = None
    for i, part in enumerate(base_parts, start=1):
        renamed = part.renamed({m.id: copy_id(m.id, i) for m in part.modes})
        out = renamed if out is None else out.outer(renamed)
    return out


def low_rank_execution(spec: MapSpec, decomposition, k: int) -> LiftedPlan:
    """Star realization from a rank decomposition, lifted to the k-th power.

    `decomposition` holds one coarse factor matrix per input socket (socket
    volume x r) plus, for maps with output, one factor of shape
    (output volume x r).  The star is verified against the map's tensor
    before lifting.
    """
    factors = [list(map(list, f)) for f in decomposition]
    want = spec.arity + (0 if spec.is_form else 1)
    if len(factors) != want:
        raise BadDecompositionError(f"expected {want} factor matrices, got {len(factors)}")
    r = len(factors[0][0])
    center = "_r"
    edges = {center: r}
    incidence, tensors = {}, {}

    def factor_tensor(sock, matrix):
        modes = tuple(sorted(sock, key=lambda m: mode_key(m.id))) + (Mode(center, r),)
        vol = 1
        for m in sock:
            vol *= m.length

        if len(matrix) != vol or any(len(row) != r for row in matrix):
            raise BadDecompositionError(
                f"factor shape {len(matrix)}x{len(matrix[0])}, expected {vol}x{r}"
            )
        flat = [row[t] for row in matrix for t in range(r)]
        return Tensor(modes, flat, spec.field)

    for j, sock in enumerate(spec.input_sockets):
        name = f"U{j + 1}"
        tensors[name] = factor_tensor(sock, factors[j])
        incidence[name] = tuple(m.id for m in tensors[name].modes)
        for m in sock:
            edges[m.id] = m.length
    if not spec.is_form:
        tensors["W0"] = factor_tensor(spec.output_socket, factors[-1])
        incidence["W0"] = tuple(m.id for m in tensors["W0"].modes)
        for m in spec.output_socket:
            edges[m.id] = m.length
    core = Network(edges, incidence, tensors, spec.socket_mode_ids(), spec.field)
    try:
        snet = realize(spec, core)
    except ValueMismatchError as exc:
        raise BadDecompositionError(str(exc)) from exc
    steps = []
    cur = None
    for j in range(spec.arity):
        pair = (snet.socket_vertices[j], f"U{j + 1}")
        steps.append(pair)
        fj = merged_vertex_id(pair)
        if cur is None:
            cur = fj
        else:
            steps.append((cur, fj))
            cur = merged_vertex_id((cur, fj))
    if not spec.is_form:
        steps.append((cur, "W0"))
    return lift(snet, ExecutionPlan(steps), k)
