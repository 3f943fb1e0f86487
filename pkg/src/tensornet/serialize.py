"""Versioned JSON interchange for tensors, networks, plans, and certificates.

The network format is the hub every CLI command reads and writes:

    {"version": 1, "field": "gf:101",
     "modes": [{"id": ..., "length": ...}, ...],
     "vertices": [{"id": ..., "modes": [...], "tensor": literal|null}, ...],
     "boundary": [...],
     "sockets": {"inputs": [[mode ids], ...], "output": [...],
                 "vertices": [...]},            # only for socketed networks
     "generator": {"name": ..., "params": ...}} # provenance, optional

Tensor literals carry their own field tag and scalars as decimal strings.
Vertex tensors may also be named generators (identity matrices, butterfly
and zeta/moebius constants, all-ones) instead of literals.
"""

from __future__ import annotations

import json

from .errors import ValidationError
from .execution import ExecutionPlan
from .fields import Field, field_from_tag, field_tag
from .network import Network, SocketedNetwork
from .patterns import NAMED_PATTERNS, PatternGraph
from .tensor import Mode, Tensor, mode_key


def tensor_to_json(t: Tensor):
    return {
        "modes": [{"id": m.id, "length": m.length} for m in t.canonical().modes],
        "field": field_tag(t.field),
        "data": [t.field.format(v) for v in t.canonical().data],
    }


def tensor_from_json(obj) -> Tensor:
    field = field_from_tag(obj["field"])
    modes = tuple(Mode(m["id"], m["length"]) for m in obj["modes"])
    return Tensor(modes, [field.parse(s) for s in obj["data"]], field)


_VERTEX_GENERATORS = {}


def _vertex_generator(name):
    def deco(fn):
        _VERTEX_GENERATORS[name] = fn
        return fn

    return deco


@_vertex_generator("identity")
def _gen_identity(params, modes, field):
    (a, b) = [m.id for m in modes]
    return Tensor.identity(field, modes[0].length, a, b)


@_vertex_generator("ones")
def _gen_ones(params, modes, field):
    return Tensor.ones(field, modes)


@_vertex_generator("delta")
def _gen_delta(params, modes, field):
    return Tensor.delta(field, [m.id for m in modes], modes[0].length)


@_vertex_generator("h2")
def _gen_h2(params, modes, field):
    from .builders.fourier import hadamard2

    a, b = [m.id for m in modes]
    return hadamard2(field).renamed({"h_in": a, "h_out": b})


@_vertex_generator("z2")
def _gen_z2(params, modes, field):
    from .builders.fourier import zeta2

    a, b = [m.id for m in modes]
    return zeta2(field).renamed({"h_in": a, "h_out": b})


@_vertex_generator("m2")
def _gen_m2(params, modes, field):
    from .builders.fourier import mobius2

    a, b = [m.id for m in modes]
    return mobius2(field).renamed({"h_in": a, "h_out": b})


def network_to_json(net, plan: ExecutionPlan = None):
    snet = None
    if isinstance(net, SocketedNetwork):
        snet = net
        net = snet.network
    obj = {
        "version": 1,
        "field": field_tag(net.field),
        "modes": [
            {"id": e, "length": net.edges[e]}
            for e in sorted(net.edges, key=mode_key)
        ],
        "vertices": [
            {
                "id": v,
                "modes": list(net.incidence[v]),
                "tensor": None if net.tensors[v] is None else tensor_to_json(net.tensors[v]),
            }
            for v in net.vertices()
        ],
        "boundary": sorted(net.boundary, key=mode_key),
    }
    if snet is not None:
        if snet.spec is not None:
            inputs = [[m.id for m in sock] for sock in snet.spec.input_sockets]
            output = [m.id for m in snet.spec.output_socket]
        else:
            inputs = [list(snet.socket_modes(k)) for k in range(len(snet.socket_vertices))]
            output = sorted(snet.output_modes, key=mode_key)
        obj["sockets"] = {
            "inputs": inputs,
            "output": output,
            "vertices": list(snet.socket_vertices),
        }
        meta = dict(snet.meta)
        meta.pop("pattern", None)
        if "generator" in meta:
            obj["generator"] = meta["generator"]
        extra = {k: v for k, v in meta.items() if k != "generator"}
        if extra:
            obj["meta"] = extra
    if plan is not None:
        obj["plan"] = plan.to_json()
    return obj


def network_from_json(obj):
    if obj.get("version") != 1:
        raise ValidationError(f"unsupported network format version {obj.get('version')}")
    field = field_from_tag(obj["field"])
    edges = {m["id"]: m["length"] for m in obj["modes"]}
    incidence, tensors = {}, {}
    for v in obj["vertices"]:
        incidence[v["id"]] = tuple(v["modes"])
        t = v.get("tensor")
        if t is None:
            tensors[v["id"]] = None
        elif "generator" in t:
            gen = _VERTEX_GENERATORS[t["generator"]]
            modes = tuple(Mode(e, edges[e]) for e in v["modes"])
            tensors[v["id"]] = gen(t.get("params", {}), modes, field)
        else:
            tensors[v["id"]] = tensor_from_json(t)
    net = Network(edges, incidence, tensors, set(obj["boundary"]), field)
    if "sockets" not in obj:
        return net
    from .network import MapSpec

    sockets = obj["sockets"]
    spec = MapSpec(
        name=(obj.get("generator") or {}).get("name", "map"),
        input_sockets=tuple(
            tuple(Mode(e, edges[e]) for e in sock) for sock in sockets["inputs"]
        ),
        output_socket=tuple(Mode(e, edges[e]) for e in sockets["output"]),
        field=field,
        base_tensor=None,
    )
    snet = SocketedNetwork(net, sockets["vertices"], spec=spec)
    snet.meta.update(obj.get("meta", {}))
    if "generator" in obj:
        snet.meta["generator"] = obj["generator"]
    return snet


# -- builder generator registry ---------------------------------------------------


def build_generator(name: str, params: dict, field: Field):
    """Construct a named builder network; returns (socketed network, plan)."""
    from .builders import (
        convolution_network,
        fft_network,
        kruskal_network,
        matmul_network,
        pform_network,
        rect_matmul_network,
        ryser_network,
        strassen_core,
        wht_network,
        yates_network,
    )

    if name == "strassen":
        core = strassen_core(field)
        return core, None
    if name == "matmul":
        return matmul_network(int(params["n"]), field)
    if name == "rect_matmul":
        return rect_matmul_network(
            int(params["n"]),
            int(params["r"]),
            int(params.get("m", params["n"])),
            field,
        )
    if name == "fft":
        return fft_network(int(params["k"]), field)
    if name == "wht":
        return wht_network(int(params["k"]), field)
    if name == "conv":
        return convolution_network(int(params["k"]), field, params.get("group", "cyclic"))
    if name == "yates":
        base = params.get("base", "z2")
        named = {"z2": [[1, 1], [0, 1]], "m2": [[1, -1], [0, 1]], "h2": [[1, 1], [1, -1]]}
        matrix = named[base] if isinstance(base, str) else base
        return yates_network(matrix, int(params["k"]), field)
    if name == "kruskal":
        return kruskal_network(int(params["l"]), int(params["n"]), int(params["r"]), field)
    if name == "ryser":
        return ryser_network(int(params["n"]), field)
    if name == "pform":
        pattern = resolve_pattern(params["pattern"])
        spec, snet = pform_network(pattern, int(params["n"]), field)
        return snet, None
    raise ValidationError(f"unknown generator {name!r}")


def resolve_pattern(spec) -> PatternGraph:
    if isinstance(spec, PatternGraph):
        return spec
    if isinstance(spec, str):
        if spec in NAMED_PATTERNS:
            return NAMED_PATTERNS[spec]
        return PatternGraph.from_edge_list(spec)
    raise ValidationError(f"cannot resolve pattern {spec!r}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
