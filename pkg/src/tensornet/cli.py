"""Batch command line: build, plan, exec, verify, socket-width, branchwidth, bench.

Every command is deterministic given its inputs and flags; randomized test
inputs always come from --seed (default 0).  Exit codes: 0 success, 2 usage
error, 3 validation failure, 4 verification mismatch.  --threads is
accepted for interface stability; the implementation is single-threaded and
deterministic, which the module contracts allow.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import builders
from .errors import TensorNetError
from .execution import ExecutionPlan, plan_cost, run
from .fields import field_from_tag
from .lowerbound import socket_width
from .network import Network, SocketedNetwork
from .oracle import (
    ConvolutionOracle,
    DeterminantOracle,
    DftOracle,
    KruskalOracle,
    MatmulOracle,
    PermanentOracle,
    PformOracle,
)
from .lowerbound import formify
from .planner import Objective, PlanRequest, Strategy, greedy_plan, optimal_plan
from .serialize import (
    build_generator,
    dumps,
    network_from_json,
    network_to_json,
    resolve_pattern,
    tensor_from_json,
    tensor_to_json,
)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args) or 0
    except TensorNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def _build_parser():
    p = argparse.ArgumentParser(prog="tensornet")
    p.add_argument("--threads", type=int, default=0, help="accepted; runs single-threaded")
    sub = p.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("build", help="emit a generator network file")
    b.add_argument("--generator", required=True)
    for flag in ("--n", "--r", "--m", "--k", "--l"):
        b.add_argument(flag, type=int)
    b.add_argument("--group", default="cyclic")
    b.add_argument("--base", default="z2")
    b.add_argument("--pattern")
    b.add_argument("--field", default="rational")
    b.add_argument("--out", help="network file (default stdout)")
    b.add_argument("--plan-out", help="also write the prescribed plan")
    b.set_defaults(fn=_cmd_build)

    pl = sub.add_parser("plan", help="plan a network file")
    pl.add_argument("--network", required=True)
    pl.add_argument("--strategy", choices=["exact", "greedy"], default="exact")
    pl.add_argument("--objective", choices=["max-step", "total-work"], default="max-step")
    pl.add_argument("--exact-bound", type=int, default=18)
    pl.add_argument("--out", help="plan file (default stdout)")
    pl.add_argument("--json", action="store_true")
    pl.set_defaults(fn=_cmd_plan)

    ex = sub.add_parser("exec", help="run a plan over a network")
    ex.add_argument("--network", required=True)
    ex.add_argument("--plan", required=True)
    ex.add_argument("--inputs", help="JSON file with socket tensors")
    ex.add_argument("--json", action="store_true")
    ex.set_defaults(fn=_cmd_exec)

    v = sub.add_parser("verify", help="compare a network against its oracle")
    v.add_argument("--network", required=True)
    v.add_argument("--plan")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=_cmd_verify)

    sw = sub.add_parser("socket-width", help="exact lower-bound certificate")
    sw.add_argument("--map", required=True, choices=["perm", "det", "matmul", "kruskal", "pform", "dft", "conv"])
    for flag in ("--n", "--r", "--m", "--k", "--l"):
        sw.add_argument(flag, type=int)
    sw.add_argument("--pattern")
    sw.add_argument("--group", default="cyclic")
    sw.add_argument("--field", default="rational")
    sw.add_argument("--as-form", action="store_true")
    sw.add_argument("--log-trees", action="store_true")
    sw.add_argument("--json", action="store_true")
    sw.set_defaults(fn=_cmd_socket_width)

    bw = sub.add_parser("branchwidth", help="minimum-width branch decomposition")
    bw.add_argument("--pattern", help="named pattern (K4, P4, C5, K4^3, ...)")
    bw.add_argument("--edges", help="edge-list file, one hyperedge per line")
    bw.add_argument("--json", action="store_true")
    bw.set_defaults(fn=_cmd_branchwidth)

    be = sub.add_parser("bench", help="sweep a builder; bound vs measured")
    be.add_argument("--generator", required=True)
    be.add_argument("--sweep", required=True, help="e.g. k=1..8 or n=2,4,8,16")
    be.add_argument("--field", default="gf:65537")
    be.add_argument("--group", default="cyclic")
    be.add_argument("--l", type=int)
    be.add_argument("--r", type=int)
    be.add_argument("--json", action="store_true")
    be.set_defaults(fn=_cmd_bench)
    return p


def _gen_params(args):
    params = {}
    for key in ("n", "r", "m", "k", "l"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if getattr(args, "group", None):
        params["group"] = args.group
    if getattr(args, "base", None):
        params["base"] = args.base
    if getattr(args, "pattern", None):
        params["pattern"] = args.pattern
    return params


def _cmd_build(args):
    field = field_from_tag(args.field)
    snet, plan = build_generator(args.generator, _gen_params(args), field)
    text = dumps(network_to_json(snet, plan))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plan_out:
        if plan is None:
            print("error: generator has no prescribed plan", file=sys.stderr)
            return 3
        with open(args.plan_out, "w") as fh:
            fh.write(dumps(plan.to_json()))
    return 0


def _load_network(path):
    with open(path) as fh:
        obj = json.load(fh)
    return network_from_json(obj), obj


def _cmd_plan(args):
    loaded, _ = _load_network(args.network)
    net = loaded.network if isinstance(loaded, SocketedNetwork) else loaded
    req = PlanRequest(
        net,
        Strategy(args.strategy),
        Objective(args.objective),
        exact_bound=args.exact_bound,
    )
    plan, report = optimal_plan(req) if req.strategy is Strategy.EXACT else greedy_plan(req)
    payload = {"plan": plan.to_json(), "report": report.to_json()}
    if args.json or args.out:
        text = dumps(payload)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if not args.json:
        print(f"max step cost  : {report.max_cost}")
        print(f"total work     : {report.total_work}")
        print("contraction tree:")
        print(render_plan_tree(plan))
    return 0


def _cmd_exec(args):
    loaded, _ = _load_network(args.network)
    with open(args.plan) as fh:
        plan = ExecutionPlan.from_json(json.load(fh))
    if isinstance(loaded, SocketedNetwork):
        if args.inputs:
            with open(args.inputs) as fh:
                tensors = [tensor_from_json(t) for t in json.load(fh)["inputs"]]
            net = loaded.bind(tensors)
        elif loaded.is_bound():
            net = loaded.network
        else:
            print("error: network has unbound sockets; pass --inputs", file=sys.stderr)
            return 3
    else:
        net = loaded
    tensor, report = run(net, plan)
    payload = {"value": tensor_to_json(tensor), "report": report.to_json()}
    if args.json:
        sys.stdout.write(dumps(payload))
    else:
        print(f"max step cost: {report.max_cost}  total work: {report.total_work}")
        print(f"value: {dumps(tensor_to_json(tensor))}")
    return 0


def _cmd_verify(args):
    loaded, obj = _load_network(args.network)
    rng = random.Random(args.seed)
    plan = None
    if args.plan:
        with open(args.plan) as fh:
            plan = ExecutionPlan.from_json(json.load(fh))
    elif "plan" in obj and obj["plan"]:
        plan = ExecutionPlan.from_json(obj["plan"])
    got, want = _verify_instance(loaded, plan, rng)
    mismatch = _first_difference(got, want)
    if args.json:
        sys.stdout.write(
            dumps(
                {
                    "match": mismatch is None,
                    "first_difference": mismatch,
                }
            )
        )
    if mismatch is None:
        if not args.json:
            print("MATCH")
        return 0
    if not args.json:
        pos, g, w = mismatch
        print(f"MISMATCH at {pos}: network {g} oracle {w}")
    return 4


def _verify_instance(loaded, plan, rng):
    """Bind seeded random inputs and evaluate network vs oracle."""
    if isinstance(loaded, Network):
        # generator 'strassen': the reconstruction core vs the 2x2x2 tensor
        field = loaded.field
        want = (
            MatmulOracle(2, 2, 2, field)
            .base_tensor()
            .renamed({"a_i": "i1", "a_k": "k1", "b_k": "k2", "b_j": "j1", "c_i": "i2", "c_j": "j2"})
        )
        got = loaded.value()
        order = sorted((m.id for m in got.modes), key=str)
        return got.nested(order), want.nested(order)
    snet = loaded
    field = snet.network.field
    gen = snet.meta.get("generator") or {}
    name, params = gen.get("name"), gen.get("params", {})

    def run_plan(net):
        if plan is not None:
            return run(net, plan)[0]
        chosen, _ = greedy_plan(PlanRequest(net, Strategy.GREEDY))
        return run(net, chosen)[0]

    if name in ("matmul", "rect_matmul"):
        n = params["n"]
        r = params.get("r", n)
        m = params.get("m", n)
        A = [[field.random(rng) for _ in range(r)] for _ in range(n)]
        B = [[field.random(rng) for _ in range(m)] for _ in range(r)]
        t = run_plan(builders.bind_matmul(snet, A, B, field))
        return (
            builders.read_matmul_result(t, n, m),
            MatmulOracle(n, r, m, field).evaluate([A, B]),
        )
    if name in ("fft", "wht"):
        k = params["k"]
        x = [field.random(rng) for _ in range(2**k)]
        t = run_plan(builders.bind_fft(snet, x, field))
        got = builders.read_fft_result(snet, t)
        if name == "fft":
            want = DftOracle(k, field).evaluate([x])
        else:
            want = _wht_apply(field, k, x)
        return got, want
    if name == "conv":
        k, group = params["k"], params.get("group", "cyclic")
        f = [field.random(rng) for _ in range(2**k)]
        g = [field.random(rng) for _ in range(2**k)]
        from .builders.fourier import vector_to_bits, bits_to_vector

        xf = vector_to_bits(f, sorted(snet.socket_modes(0)), field)
        xg = vector_to_bits(g, sorted(snet.socket_modes(1)), field)
        t = run_plan(snet.bind([xf, xg]))
        got = bits_to_vector(t, [m_.id for m_ in snet.spec.output_socket])
        return got, ConvolutionOracle(k, field, group).evaluate([f, g])
    if name == "yates":
        k = params["k"]
        base = params.get("shape")
        matrix = snet.meta.get("base_matrix")
        if matrix is None:
            # recover the base matrix from any core copy
            core_vertex = sorted(v for v in snet.network.vertices() if v.startswith("M@"))[0]
            matrix = snet.network.tensors[core_vertex].permuted(
                sorted(m_.id for m_ in snet.network.tensors[core_vertex].modes)
            )
            s = matrix.modes[0].length
            t_len = matrix.modes[1].length
            matrix = [
                [matrix.data[i * t_len + j] for j in range(t_len)] for i in range(s)
            ]
        s, t_len = len(matrix), len(matrix[0])
        x = [field.random(rng) for _ in range(s**k)]
        from .builders.fourier import vector_to_bits, bits_to_vector

        xt = vector_to_bits(x, sorted(snet.socket_modes(0)), field, radix=s)
        t = run_plan(snet.bind([xt]))
        got = bits_to_vector(t, sorted(m_.id for m_ in snet.spec.output_socket), radix=t_len)
        return got, _yates_apply(field, matrix, k, x)
    if name == "kruskal":
        l, n, r = params["l"], params["n"], params["r"]
        mats = [[[field.random(rng) for _ in range(r)] for _ in range(n)] for _ in range(l)]
        t = run_plan(builders.bind_kruskal(snet, mats, field))
        got = builders.read_kruskal_result(snet, t)
        want_map = KruskalOracle((n,) * l, r, field).evaluate(mats)

        def nest(prefix, depth):
            if depth == l:
                return want_map[tuple(prefix)]
            return [nest(prefix + [i], depth + 1) for i in range(n)]

        return got, nest([], 0)
    if name == "ryser":
        n = params["n"]
        A = [[field.random(rng) for _ in range(n)] for _ in range(n)]
        t = run_plan(builders.bind_ryser(snet, A, field))
        return t.data[0], PermanentOracle(n, field).evaluate(A)
    if name == "pform":
        pattern = resolve_pattern(params["pattern"])
        n = params["n"]
        k = pattern.uniformity

        def host():
            def nest(depth):
                if depth == k:
                    return rng.randint(0, 1)
                return [nest(depth + 1) for _ in range(n)]

            return nest(0)

        hosts = [host() for _ in pattern.hyperedges]
        snet.meta.setdefault("pattern", pattern)
        snet.meta.setdefault("n", n)
        t = run_plan(builders.bind_pform(snet, hosts, field))
        return t.data[0], PformOracle(pattern, n, field).evaluate(hosts)
    raise TensorNetError(f"network carries no verifiable generator metadata ({name})")


def _wht_apply(field, k, x):
    out = []
    for i in range(2**k):
        total = field.zero
        for j in range(2**k):
            sign = -1 if bin(i & j).count("1") % 2 else 1
            total = field.add(total, field.mul(field.coerce(sign), x[j]))
        out.append(total)
    return out


def _yates_apply(field, matrix, k, x):
    s, t = len(matrix), len(matrix[0])
    out = []
    for j in range(t**k):
        jd = _digits(j, k, t)
        total = field.zero
        for i in range(s**k):
            idd = _digits(i, k, s)
            term = x[i]
            for b in range(k):
                term = field.mul(term, field.coerce(matrix[idd[b]][jd[b]]))
            total = field.add(total, term)
        out.append(total)
    return out


def _digits(value, k, radix):
    out = []
    for _ in range(k):
        out.append(value % radix)
        value //= radix
    return list(reversed(out))


def _first_difference(got, want, path=()):
    if isinstance(want, list):
        if not isinstance(got, list) or len(got) != len(want):
            return (list(path), "shape", "shape")
        for i, (g, w) in enumerate(zip(got, want)):
            hit = _first_difference(g, w, path + (i,))
            if hit is not None:
                return hit
        return None
    if got != want:
        return (list(path), str(got), str(want))
    return None


def _cmd_socket_width(args):
    field = field_from_tag(args.field)
    fam = args.map
    if fam == "perm":
        spec = PermanentOracle(args.n, field).map_spec()
    elif fam == "det":
        spec = DeterminantOracle(args.n, field).map_spec()
    elif fam == "matmul":
        spec = MatmulOracle(args.n, args.r or args.n, args.m or args.n, field).map_spec()
    elif fam == "kruskal":
        spec = KruskalOracle((args.n,) * args.l, args.r, field).map_spec()
    elif fam == "pform":
        spec = PformOracle(resolve_pattern(args.pattern), args.n, field).map_spec()
    elif fam == "dft":
        spec = DftOracle(args.k, field).map_spec()
    else:
        spec = ConvolutionOracle(args.k, field, args.group).map_spec()
    if args.as_form:
        spec = formify(spec)
    cert = socket_width(spec, log_trees=args.log_trees)
    if args.json:
        sys.stdout.write(dumps(cert.to_json()))
    else:
        print(f"map          : {cert.map_id}")
        print(f"field        : {args.field}")
        print(f"socket-width : {cert.socket_width}")
        print(f"witness tree : {cert.witness_tree.render()}")
        for left, right, rank in cert.witness_edge_ranks:
            print(f"  rank {rank:>6}  {','.join(left)} | {','.join(right)}")
    return 0


def _cmd_branchwidth(args):
    if args.edges:
        with open(args.edges) as fh:
            pattern = resolve_pattern(fh.read())
    else:
        pattern = resolve_pattern(args.pattern)
    bd = builders.branch_decomposition_search(pattern)
    if args.json:
        sys.stdout.write(
            dumps(
                {
                    "pattern": pattern.name,
                    "width": bd.width,
                    "optimal": bd.optimal,
                    "edges": [
                        {"nodes": sorted(e), "width": w}
                        for e, w in sorted(bd.edge_widths.items(), key=lambda kv: sorted(kv[0]))
                    ],
                    "leaves": {leaf: list(edge) for leaf, edge in sorted(bd.leaf_map.items())},
                }
            )
        )
    else:
        print(f"pattern    : {pattern.name}")
        print(f"branchwidth: {bd.width} ({'exact' if bd.optimal else 'heuristic upper bound'})")
        for leaf, edge in sorted(bd.leaf_map.items()):
            print(f"  leaf {leaf}: hyperedge {edge}")
    return 0


def _parse_sweep(text):
    key, _, values = text.partition("=")
    if ".." in values:
        lo, hi = values.split("..")
        return key, list(range(int(lo), int(hi) + 1))
    return key, [int(v) for v in values.split(",")]


def _cmd_bench(args):
    field = field_from_tag(args.field)
    key, values = _parse_sweep(args.sweep)
    rows = []
    for value in values:
        params = {key: value}
        if args.l is not None:
            params.setdefault("l", args.l)
        if args.r is not None:
            params.setdefault("r", args.r)
        if args.generator == "kruskal":
            params.setdefault("n", value if key == "n" else 2)
            params.setdefault("l", 3)
            params.setdefault("r", 2)
        if args.generator == "conv":
            params.setdefault("group", args.group)
        snet, plan = build_generator(args.generator, params, field)
        if plan is None:
            plan, _ = optimal_plan(PlanRequest(snet.network))
        report = plan_cost(snet.network, plan)
        bound = snet.meta.get("claimed_bound")
        rows.append(
            {
                "params": params,
                "paper_bound": bound,
                "max_step_cost": report.max_cost,
                "total_work": report.total_work,
                "bound_satisfied": (bound is None) or report.max_cost <= bound,
            }
        )
    if args.json:
        sys.stdout.write(dumps({"generator": args.generator, "rows": rows}))
    else:
        print(f"{'instance':<24}{'paper bound':>14}{'max step':>12}{'total work':>12}  ok")
        for row in rows:
            inst = ",".join(f"{k}={v}" for k, v in sorted(row["params"].items()))
            ok = "yes" if row["bound_satisfied"] else "NO"
            bound = row["paper_bound"] if row["paper_bound"] is not None else "-"
            print(
                f"{inst:<24}{bound:>14}{row['max_step_cost']:>12}{row['total_work']:>12}  {ok}"
            )
    if not all(r["bound_satisfied"] for r in rows):
        return 3
    return 0


def render_plan_tree(plan: ExecutionPlan) -> str:
    """Indented contraction tree; leaves are original vertices."""
    from .network import merged_vertex_id

    children = {}
    for W in plan.steps:
        children[merged_vertex_id(W)] = list(W)
    roots = [rid for rid in children if not any(rid in kids for kids in children.values())]
    lines = []

    def rec(node, prefix, last):
        tag = "`- " if last else "|- "
        lines.append(prefix + tag + node)
        kids = children.get(node, [])
        for i, kid in enumerate(kids):
            rec(kid, prefix + ("   " if last else "|  "), i == len(kids) - 1)

    for root in sorted(roots):
        lines.append(root)
        kids = children.get(root, [])
        for i, kid in enumerate(kids):
            rec(kid, "", i == len(kids) - 1)
    return "\n".join(lines)


if __name__ == "__main__":
    sys.exit(main())
