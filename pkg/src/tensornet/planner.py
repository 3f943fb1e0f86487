"""Minimum-cost execution search.

The exact strategy implements the connected-bipartition recurrence with a
bitmask memo: for a loopless connected network, the optimal cost is the min
over bipartitions {W, V\\W} with both sides connected of
max(cost(W side), cost(complement side), cost of the final join).  Loops are
eliminated first by singleton contractions, and disconnected networks are
planned per component and then joined pairwise in ascending volume order.
The greedy strategy contracts the cheapest adjacent pair until done.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import TooLargeError
from .execution import ExecutionPlan, plan_cost, simulate
from .network import Network, merged_vertex_id


class Strategy(enum.Enum):
    EXACT = "exact"
    GREEDY = "greedy"


class Objective(enum.Enum):
    #: the paper's objective: minimize the maximum step cost
    MAX_STEP = "max-step"
    #: extension: minimize the sum of step costs over binary adjacent plans
    TOTAL_WORK = "total-work"


@dataclass(frozen=True)
class PlanRequest:
    network: Network
    strategy: Strategy = Strategy.EXACT
    objective: Objective = Objective.MAX_STEP
    exact_bound: int = 18


def plan(req: PlanRequest):
    if req.strategy is Strategy.EXACT:
        return optimal_plan(req)
    return greedy_plan(req)


def optimal_plan(req: PlanRequest):
    """Exact minimum-cost plan; raises TooLarge beyond the vertex bound.

    Ties between equal-cost bipartitions break toward the smallest left
    subset (vertices sorted by id, subset compared as a bitmask), so plans
    are reproducible.
    """
    net = req.network
    net.require_valid()
    if len(net.incidence) > req.exact_bound:
        raise TooLargeError(
            f"{len(net.incidence)} vertices exceeds exact bound {req.exact_bound}"
        )
    steps = _loop_steps(net)
    sim = _Sim(net)
    for W in steps:
        sim.contract(W)
    steps += _plan_components(sim, req.objective)
    plan_ = ExecutionPlan(steps)
    return plan_, plan_cost(net, plan_)


def greedy_plan(req: PlanRequest):
    """Contract the adjacent pair of least step cost until one tensor remains."""
    net = req.network
    net.require_valid()
    steps = _loop_steps(net)
    sim = _Sim(net)
    for W in steps:
        sim.contract(W)
    while len(sim.incidence) > 1:
        verts = sorted(sim.incidence)
        pairs = [
            (u, v)
            for i, u in enumerate(verts)
            for v in verts[i + 1 :]
            if sim.incidence[u] & sim.incidence[v]
        ]
        if not pairs:  # disconnected remainder: outer joins only
            pairs = [(u, v) for i, u in enumerate(verts) for v in verts[i + 1 :]]
        best = min(pairs, key=lambda uv: (sim.pair_cost(*uv), uv))
        steps.append(best)
        sim.contract(best)
    plan_ = ExecutionPlan(steps)
    return plan_, plan_cost(net, plan_)


def normalize(plan_: ExecutionPlan, net: Network) -> ExecutionPlan:
    """Rewrite a valid plan to binary steps, then to adjacent-only steps.

    Never increases the max step cost and preserves the value.  The
    adjacent-only pass applies on connected networks; on a disconnected one
    the cross-component joins necessarily stay non-adjacent.
    """
    simulate(net, plan_)  # raises InvalidStep/InvalidPlan on bad input
    before = plan_cost(net, plan_).max_cost
    out = _binarize(plan_)
    loopless = not any(net.is_loop(e) for e in net.edges)
    if loopless and _connected_after_loops(net):
        out = _adjacentize(out, net)
    after = plan_cost(net, out).max_cost
    if after > before:  # the appendix argument rules this out
        raise AssertionError(f"normalize increased cost {before} -> {after}")
    return out


# -- shared plumbing ---------------------------------------------------------


class _Sim:
    """Incidence-only contraction state."""

    def __init__(self, net: Network):
        self.edges = dict(net.edges)
        self.incidence = {v: set(ms) for v, ms in net.incidence.items()}
        self.boundary = set(net.boundary)

    def pair_cost(self, u, v):
        cost = 1
        for e in self.incidence[u] | self.incidence[v]:
            cost *= self.edges[e]
        return cost

    def volume(self, v):
        vol = 1
        for e in self.incidence[v]:
            vol *= self.edges[e]
        return vol

    def adjacent(self, u, v):
        return bool(self.incidence[u] & self.incidence[v])

    def contract(self, W):
        W = set(W)
        touched = set()
        for v in W:
            touched |= self.incidence[v]
        outside = set()
        for v, ms in self.incidence.items():
            if v not in W:
                outside |= ms
        keep = {e for e in touched if e in self.boundary or e in outside}
        for v in W:
            del self.incidence[v]
        for e in touched - keep:
            del self.edges[e]
        rid = merged_vertex_id(W)
        self.incidence[rid] = keep
        return rid


def _loop_steps(net: Network):
    """Singleton contractions removing loops, in vertex order."""
    steps = []
    counts = net._incidence_counts()
    for v in net.vertices():
        if any(e not in net.boundary and counts[e] == 1 for e in net.incidence[v]):
            steps.append((v,))
    return steps


def _components(sim: _Sim):
    verts = sorted(sim.incidence)
    seen = set()
    comps = []
    for start in verts:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for v in verts:
                if v not in comp and sim.incidence[u] & sim.incidence[v]:
                    comp.add(v)
                    frontier.append(v)
        seen |= comp
        comps.append(sorted(comp))
    return comps


def _connected_after_loops(net: Network):
    sim = _Sim(net)
    for W in _loop_steps(net):
        sim.contract(W)
    return len(_components(sim)) == 1


def _plan_components(sim: _Sim, objective: Objective):
    """Plan each connected component exactly, then join results pairwise."""
    comps = _components(sim)
    steps = []
    results = []  # (volume, result id)
    for comp in comps:
        comp_steps, result = _exact_component(sim, comp, objective)
        steps += comp_steps
        results.append((sim.volume(result), result))
    results.sort()
    while len(results) > 1:
        (_, a), (_, b) = results[0], results[1]
        steps.append(tuple(sorted((a, b))))
        rid = sim.contract((a, b))
        results = sorted([(sim.volume(rid), rid)] + results[2:])
    return steps


def _exact_component(sim: _Sim, comp, objective: Objective):
    """Bitmask DP over connected bipartitions of one component.

    Also advances `sim` past the emitted steps so later components see
    consistent state.
    """
    verts = sorted(comp)
    n = len(verts)
    if n == 1:
        return [], verts[0]
    vmodes = [sim.incidence[v] for v in verts]
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if vmodes[i] & vmodes[j]:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    full = (1 << n) - 1

    def connected(mask):
        seen = mask & -mask
        frontier = seen
        while frontier:
            nxt = 0
            m = frontier
            while m:
                b = m & -m
                m ^= b
                nxt |= adj[b.bit_length() - 1]
            frontier = nxt & mask & ~seen
            seen |= frontier
        return seen == mask

    def touched(mask):
        out = set()
        while mask:
            b = mask & -mask
            mask ^= b
            out |= vmodes[b.bit_length() - 1]
        return out

    result_modes_cache = {}

    def result_modes(mask):
        if mask not in result_modes_cache:
            inside = touched(mask)
            outside = touched(full & ~mask)
            result_modes_cache[mask] = {
                e for e in inside if e in sim.boundary or e in outside
            }
        return result_modes_cache[mask]

    def join_cost(mask_a, mask_b):
        cost = 1
        for e in result_modes(mask_a) | result_modes(mask_b):
            cost *= sim.edges[e]
        return cost

    memo = {}

    def best(mask):
        if mask in memo:
            return memo[mask]
        if mask & (mask - 1) == 0:
            memo[mask] = (0, None)
            return memo[mask]
        low = mask & -mask
        best_val, best_split = None, None
        sub = (mask - 1) & mask
        while sub:
            if sub & low and connected(sub):
                other = mask & ~sub
                if connected(other):
                    step = join_cost(sub, other)
                    ca = best(sub)[0]
                    cb = best(other)[0]
                    if objective is Objective.MAX_STEP:
                        val = max(ca, cb, step)
                    else:
                        val = ca + cb + step
                    if best_val is None or (val, sub) < (best_val, best_split):
                        best_val, best_split = val, sub
            sub = (sub - 1) & mask
        memo[mask] = (best_val, best_split)
        return memo[mask]

    def emit(mask, steps):
        if mask & (mask - 1) == 0:
            return verts[(mask & -mask).bit_length() - 1]
        split = best(mask)[1]
        a = emit(split, steps)
        b = emit(mask & ~split, steps)
        steps.append(tuple(sorted((a, b))))
        return merged_vertex_id((a, b))

    best(full)
    steps = []
    result = emit(full, steps)
    for W in steps:
        sim.contract(W)
    return steps, result


# -- normalization ------------------------------------------------------------


def _binarize(plan_: ExecutionPlan) -> ExecutionPlan:
    """Split k-ary steps into binary ones without raising the max cost.

    A contraction of {w1..ws} becomes {w1..w(s-1)} then {result, ws}: both
    refinements involve subsets of the original step's modes.
    """
    steps = []
    for W in plan_.steps:
        W = list(W)
        while len(W) > 2:
            last = W.pop()
            steps.append(tuple(W))
            W = [merged_vertex_id(W), last]
        steps.append(tuple(W))
    return ExecutionPlan(steps)


def _adjacentize(plan_: ExecutionPlan, net: Network) -> ExecutionPlan:
    """Defer each non-adjacent pair contraction until its sides are adjacent.

    Each pass removes the first non-adjacent pair step and re-points the
    steps that consumed its result to one side of the pair, inserting the
    pair contraction at the first moment the two sides share a mode.  The
    number of non-adjacent steps drops every pass.
    """
    steps = list(plan_.steps)
    for _ in range(len(steps) + 1):
        sim = _Sim(net)
        bad = None
        for i, W in enumerate(steps):
            if len(W) == 2 and not sim.adjacent(W[0], W[1]):
                bad = i
                break
            sim.contract(W)
        if bad is None:
            return ExecutionPlan(steps)
        steps = _defer_pair(steps, bad, net)
    raise AssertionError("adjacent-only rewriting did not terminate")


def _defer_pair(steps, bad, net: Network):
    """One deferral pass of the appendix rewriting."""
    u0, v0 = steps[bad]
    sim = _Sim(net)
    for W in steps[:bad]:
        sim.contract(W)
    out = list(steps[:bad])
    cur_u, cur_v = u0, v0
    pending = merged_vertex_id((u0, v0))  # original id of the pair's lineage
    rename = {}  # other original result ids -> ids in the rewritten plan
    merged_id = None

    def resolve(x):
        return rename.get(x, x)

    def maybe_merge():
        # once the two sides are adjacent, contract them and fold the
        # lineage into the ordinary rename bookkeeping
        nonlocal merged_id
        if merged_id is None and sim.adjacent(cur_u, cur_v):
            out.append(tuple(sorted((cur_u, cur_v))))
            merged_id = sim.contract((cur_u, cur_v))
            rename[pending] = merged_id

    maybe_merge()  # sides may already touch through earlier steps
    for W in steps[bad + 1 :]:
        if merged_id is None and pending in W:
            others = [resolve(x) for x in W if x != pending]
            target = None
            for cand in (cur_u, cur_v):
                if all(sim.adjacent(cand, o) for o in others):
                    target = cand
                    break
            if target is None:
                target = cur_u
            members = tuple(sorted(others + [target]))
            out.append(members)
            rid = sim.contract(members)
            if target == cur_u:
                cur_u = rid
            else:
                cur_v = rid
            pending = merged_vertex_id(W)
            maybe_merge()
        else:
            members = tuple(sorted(resolve(x) for x in W))
            out.append(members)
            rid = sim.contract(members)
            old = merged_vertex_id(W)
            if old != rid:
                rename[old] = rid
    if merged_id is None:
        out.append(tuple(sorted((cur_u, cur_v))))
    return out
