"""Execution plans, the max-step cost model, and the plan runner.

A plan is an ordered list of contraction steps over the current vertex ids
(ids change deterministically as vertices merge).  The flat list is the
post-order of the corresponding contraction tree; `plan_tree` recovers the
tree.  Costs are data-oblivious: `simulate` walks incidence only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidPlanError, InvalidStepError, NotSocketedError
from .network import Network, SocketedNetwork, merged_vertex_id


@dataclass(frozen=True)
class ExecutionPlan:
    """Ordered contraction steps; each step lists current vertex ids."""

    steps: tuple

    def __init__(self, steps):
        object.__setattr__(
            self, "steps", tuple(tuple(sorted(str(v) for v in W)) for W in steps)
        )

    def __len__(self):
        return len(self.steps)

    def is_binary(self):
        return all(len(W) <= 2 for W in self.steps)

    def to_json(self):
        return {"steps": [list(W) for W in self.steps]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["steps"])


@dataclass(frozen=True)
class CostReport:
    per_step_cost: tuple
    max_cost: int
    total_work: int
    amortized_cost: int | None = None

    @classmethod
    def from_costs(cls, costs, amortized=None):
        costs = tuple(costs)
        return cls(costs, max(costs, default=0), sum(costs), amortized)

    def to_json(self):
        return {
            "per_step_cost": list(self.per_step_cost),
            "max_cost": self.max_cost,
            "total_work": self.total_work,
            "amortized_cost": self.amortized_cost,
        }


@dataclass(frozen=True)
class StepInfo:
    """Data-oblivious account of one contraction step."""

    members: tuple
    result_id: str
    cost: int
    result_modes: tuple
    result_volume: int


class ShadowNetwork:
    """Incidence-only copy of a network; supports contraction bookkeeping."""

    def __init__(self, net: Network):
        self.edges = dict(net.edges)
        self.incidence = {v: set(ms) for v, ms in net.incidence.items()}
        self.boundary = set(net.boundary)

    def has_loop(self, v):
        counts = {}
        for ms in self.incidence.values():
            for e in ms:
                counts[e] = counts.get(e, 0) + 1
        return any(
            e not in self.boundary and counts[e] == 1 for e in self.incidence[v]
        )

    def contract(self, W) -> StepInfo:
        W = set(W)
        touched = set()
        for v in W:
            touched |= self.incidence[v]
        cost = 1
        for e in touched:
            cost *= self.edges[e]
        outside = set()
        for v, ms in self.incidence.items():
            if v not in W:
                outside |= ms
        result_modes = {e for e in touched if e in self.boundary or e in outside}
        for v in W:
            del self.incidence[v]
        for e in touched - result_modes:
            del self.edges[e]
        rid = merged_vertex_id(W)
        self.incidence[rid] = result_modes
        vol = 1
        for e in result_modes:
            vol *= self.edges[e]
        return StepInfo(tuple(sorted(W)), rid, cost, tuple(sorted(result_modes, key=str)), vol)


def simulate(net: Network, plan: ExecutionPlan):
    """Validate a plan and return its per-step infos (no tensor work)."""
    shadow = ShadowNetwork(net)
    infos = []
    for i, W in enumerate(plan.steps):
        missing = [v for v in W if v not in shadow.incidence]
        if missing:
            raise InvalidStepError(i, f"unknown vertices {missing}")
        if len(W) == 1 and not shadow.has_loop(W[0]):
            raise InvalidStepError(i, f"singleton {W[0]} has no loop")
        if len(set(W)) < len(W):
            raise InvalidStepError(i, f"repeated vertex in {W}")
        infos.append(shadow.contract(W))
    if len(shadow.incidence) != 1:
        raise InvalidPlanError(
            f"plan leaves {len(shadow.incidence)} vertices, expected a single tensor"
        )
    last = next(iter(shadow.incidence))
    if shadow.has_loop(last):
        raise InvalidPlanError("final vertex still has a loop")
    return infos


def plan_cost(net: Network, plan: ExecutionPlan) -> CostReport:
    return CostReport.from_costs(info.cost for info in simulate(net, plan))


def run(net: Network, plan: ExecutionPlan):
    """Execute the plan; returns (value tensor, cost report)."""
    infos = simulate(net, plan)  # validates up front, data-obliviously
    current = net
    for i, W in enumerate(plan.steps):
        current = current.contract(W)
    (last,) = current.vertices()
    return current.tensors[last].canonical(), CostReport.from_costs(
        info.cost for info in infos
    )


def amortized_cost(snet: SocketedNetwork, plan: ExecutionPlan) -> int:
    """Max over internal nodes of the three-case amortized cost.

    Case (i): no socket below either child -> 1.  Case (ii): sockets below
    exactly one child -> max of the result volume and that child's volume.
    Case (iii): sockets below several children -> the step's contraction
    cost.  Volumes count all modes of the node's tensor, boundary included.
    """
    if not snet.socket_vertices:
        raise NotSocketedError("network has no socket vertices")
    net = snet.network
    infos = simulate(net, plan)
    sockets = set(snet.socket_vertices)
    # per current vertex: (contains socket?, volume of its tensor)
    state = {v: (v in sockets, net.vertex_volume(v)) for v in net.vertices()}
    worst = 0
    for info in infos:
        flags = [state[v] for v in info.members]
        socket_children = [f for f in flags if f[0]]
        if not socket_children:
            a = 1
        elif len(socket_children) == 1:
            a = max(info.result_volume, socket_children[0][1])
        else:
            a = info.cost
        worst = max(worst, a)
        for v in info.members:
            del state[v]
        state[info.result_id] = (bool(socket_children), info.result_volume)
    return worst
