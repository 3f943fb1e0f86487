"""Butterfly networks: FFT, Walsh-Hadamard, convolution, and Yates lifts.

Indices of length 2^k are refined into k bit modes, bit 1 most significant.
Each bit line carries one 2x2 butterfly; twiddle vertices sit on all k
current lines at once and act diagonally (a hyperedge shared by several
vertices multiplies pointwise).  The final bit reversal is pure metadata:
output bit b of the transform is read off line k+1-b, no contraction step.
"""

from __future__ import annotations

from ..errors import CharacteristicTwoError, NoRootError
from ..execution import ExecutionPlan, plan_cost
from ..fields import Field, PrimeField, primitive_root_of_unity
from ..kronpow import lift
from ..network import MapSpec, Network, SocketedNetwork, merged_vertex_id, realize
from ..oracle import ConvolutionOracle, DftOracle
from ..tensor import Mode, Tensor


def hadamard2(field: Field) -> Tensor:
    return Tensor((Mode("h_in", 2), Mode("h_out", 2)), [1, 1, 1, -1], field)


def zeta2(field: Field) -> Tensor:
    return Tensor((Mode("h_in", 2), Mode("h_out", 2)), [1, 1, 0, 1], field)


def mobius2(field: Field) -> Tensor:
    return Tensor((Mode("h_in", 2), Mode("h_out", 2)), [1, -1, 0, 1], field)


def _root_for(field: Field, k: int, inverse=False):
    if k <= 0:
        return field.one
    if k == 1:
        return field.sub(field.zero, field.one)
    if not isinstance(field, PrimeField):
        raise NoRootError(f"no primitive 2^{k}-th root available over {field.kind}")
    rho = primitive_root_of_unity(field.modulus, 2**k)
    return field.inv(rho) if inverse else rho


def _twiddle_values(field: Field, k: int, j: int, rho):
    """R^(k,j): 2^j copies of [1,...,1, rho^(2^j * 0), ..., rho^(2^j * (2^(k-1-j)-1))]."""
    half = 2 ** (k - 1 - j)
    block = [field.one] * half + [field.pow(rho, (2**j) * m) for m in range(half)]
    return block * (2**j)


class _Chain:
    """One FFT chain: butterflies, optional twiddles, and mode bookkeeping."""

    def __init__(self, field, k, rho, prefix, in_modes, out_modes, twiddles):
        self.field = field
        self.k = k
        self.prefix = prefix
        self.in_modes = list(in_modes)  # mode id of line i's input segment
        self.out_modes = list(out_modes)  # mode id of line i's output segment
        self.twiddles = twiddles
        self.rho = rho

    def build(self, edges, incidence, tensors):
        f = self.field
        h = hadamard2(f)
        for i in range(1, self.k + 1):
            a, b = self.in_modes[i - 1], self.out_modes[i - 1]
            edges.setdefault(a, 2)
            edges.setdefault(b, 2)
            name = f"{self.prefix}bf{i:02d}"
            incidence[name] = (a, b)
            tensors[name] = h.renamed({"h_in": a, "h_out": b})
        if self.twiddles:
            for j in range(self.k - 1):
                name = f"{self.prefix}tw{j:02d}"
                lines = self.current_lines(j + 1)
                incidence[name] = tuple(lines)
                values = _twiddle_values(f, self.k, j, self.rho)
                modes = tuple(Mode(m, 2) for m in lines)
                tensors[name] = Tensor(modes, values, f)

    def current_lines(self, done):
        """Mode of each line after `done` butterflies have fired."""
        return [
            self.out_modes[i - 1] if i <= done else self.in_modes[i - 1]
            for i in range(1, self.k + 1)
        ]

    def plan_steps(self, start_id):
        steps = []
        cur = start_id
        for i in range(1, self.k + 1):
            steps.append((cur, f"{self.prefix}bf{i:02d}"))
            cur = merged_vertex_id(steps[-1])
            if self.twiddles and i <= self.k - 1:
                steps.append((cur, f"{self.prefix}tw{i - 1:02d}"))
                cur = merged_vertex_id(steps[-1])
        return steps, cur


def _dft_spec(field, k, rho, in_modes, out_reversed, name):
    """MapSpec over bit modes; out_reversed[b-1] is the mode of output bit b."""

    def base_tensor():
        coarse = DftOracle(k, field, rho=rho).base_tensor()
        mapping = {}
        for b in range(1, k + 1):
            mapping[f"x{b}"] = in_modes[b - 1]
            mapping[f"y{b}"] = out_reversed[b - 1]
        return coarse.renamed(mapping)

    return MapSpec(
        name=name,
        input_sockets=(tuple(Mode(m, 2) for m in in_modes),),
        output_socket=tuple(Mode(m, 2) for m in out_reversed),
        field=field,
        base_tensor=base_tensor,
    )


def fft_network(k: int, field: Field, twiddles: bool = True):
    """DFT (or Walsh-Hadamard, twiddles=False) network of order 2^k.

    The prescribed left-to-right sweep has max step cost exactly 2^(k+1):
    each butterfly touches k+1 bit modes, each twiddle only the current k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rho = _root_for(field, k) if twiddles else None
    in_modes = [f"t{i:02d}.0" for i in range(1, k + 1)]
    out_modes = [f"t{i:02d}.1" for i in range(1, k + 1)]
    chain = _Chain(field, k, rho, "", in_modes, out_modes, twiddles)
    edges, incidence, tensors = {}, {}, {}
    chain.build(edges, incidence, tensors)
    boundary = set(in_modes) | set(out_modes)
    core = Network(edges, incidence, tensors, boundary, field)
    if twiddles:
        # bit reversal: output bit b is read off line k+1-b
        out_reversed = [out_modes[k - b] for b in range(1, k + 1)]
        spec = _dft_spec(field, k, rho, in_modes, out_reversed, f"dft(2^{k})")
    else:
        out_reversed = list(out_modes)
        spec = MapSpec(
            name=f"wht(2^{k})",
            input_sockets=(tuple(Mode(m, 2) for m in in_modes),),
            output_socket=tuple(Mode(m, 2) for m in out_reversed),
            field=field,
            base_tensor=lambda: _wht_base(field, k, in_modes, out_modes),
        )
    snet = realize(spec, core, check="auto")
    steps, _ = chain.plan_steps(snet.socket_vertices[0])
    plan = ExecutionPlan(steps)
    report = plan_cost(snet.network, plan)
    if report.max_cost != 2 ** (k + 1):
        raise AssertionError(f"fft sweep cost {report.max_cost} != {2 ** (k + 1)}")
    snet.meta.update(
        {
            "k": k,
            "claimed_bound": 2 ** (k + 1),
            "generator": {
                "name": "fft" if twiddles else "wht",
                "params": {"k": k},
            },
        }
    )
    return snet, plan


def _wht_base(field, k, in_modes, out_modes):
    """Independent Walsh-Hadamard tensor: entry (-1)^(x . y) over bit modes."""
    modes = tuple(Mode(m, 2) for m in in_modes) + tuple(Mode(m, 2) for m in out_modes)

    def fn(idx):
        dot = sum(a * b for a, b in zip(idx[:k], idx[k:]))
        return -1 if dot % 2 else 1

    return Tensor.from_function(modes, field, fn)


def wht_network(k: int, field: Field):
    return fft_network(k, field, twiddles=False)


def convolution_network(k: int, field: Field, group: str = "cyclic"):
    """Group algebra product on Z_(2^k) (cyclic) or Z_2^k (xor).

    Forward transforms of both inputs share their output bit lines, the
    inverse transform consumes them, and a constant vertex scales by 2^-k.
    Requires 2 to be a unit in the field.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(field, PrimeField) and field.modulus == 2:
        raise CharacteristicTwoError("2 must be a unit for the inverse transform")
    cyclic = group == "cyclic"
    rho = _root_for(field, k) if cyclic else None
    rho_inv = _root_for(field, k, inverse=True) if cyclic else None

    f_in = [f"f{i:02d}.0" for i in range(1, k + 1)]
    g_in = [f"g{i:02d}.0" for i in range(1, k + 1)]
    prod = [f"p{b:02d}" for b in range(1, k + 1)]
    v_out = [f"v{i:02d}.1" for i in range(1, k + 1)]

    # forward chains write product bit b onto line k+1-b (cyclic case: the
    # bit reversal of each forward transform), the inverse chain reads bit
    # b on its own line b and its output is read reversed again
    if cyclic:
        f_out = [prod[k - i] for i in range(1, k + 1)]
        out_reversed = [v_out[k - b] for b in range(1, k + 1)]
    else:
        f_out = list(prod)
        out_reversed = list(v_out)

    edges, incidence, tensors = {}, {}, {}
    fchain = _Chain(field, k, rho, "f.", f_in, f_out, cyclic)
    gchain = _Chain(field, k, rho, "g.", g_in, f_out, cyclic)
    vchain = _Chain(field, k, rho_inv, "v.", prod, v_out, cyclic)
    for chain in (fchain, gchain, vchain):
        chain.build(edges, incidence, tensors)
    scale = field.inv(field.coerce(2**k))
    incidence["scale"] = tuple(v_out)
    tensors["scale"] = Tensor(tuple(Mode(m, 2) for m in v_out), [scale] * 2**k, field)

    boundary = set(f_in) | set(g_in) | set(v_out)
    core = Network(edges, incidence, tensors, boundary, field)

    def base_tensor():
        coarse = ConvolutionOracle(k, field, "cyclic" if cyclic else "xor").base_tensor()
        mapping = {}
        for b in range(1, k + 1):
            mapping[f"f{b}"] = f_in[b - 1]
            mapping[f"g{b}"] = g_in[b - 1]
            mapping[f"h{b}"] = out_reversed[b - 1]
        return coarse.renamed(mapping)

    spec = MapSpec(
        name=f"conv({group},2^{k})",
        input_sockets=(
            tuple(Mode(m, 2) for m in f_in),
            tuple(Mode(m, 2) for m in g_in),
        ),
        output_socket=tuple(Mode(m, 2) for m in out_reversed),
        field=field,
        base_tensor=base_tensor,
    )
    snet = realize(spec, core, check="auto")
    xf, xg = snet.socket_vertices
    steps_f, f_id = fchain.plan_steps(xf)
    steps_g, g_id = gchain.plan_steps(xg)
    steps = steps_f + steps_g + [(f_id, g_id)]
    cur = merged_vertex_id(steps[-1])
    inv_steps, cur = vchain.plan_steps(cur)
    steps += inv_steps + [(cur, "scale")]
    plan = ExecutionPlan(steps)
    report = plan_cost(snet.network, plan)
    if report.max_cost != 2 ** (k + 1):
        raise AssertionError(f"conv sweep cost {report.max_cost} != {2 ** (k + 1)}")
    snet.meta.update(
        {
            "k": k,
            "claimed_bound": 2 ** (k + 1),
            "generator": {"name": "conv", "params": {"k": k, "group": group}},
        }
    )
    return snet, plan


def yates_network(base_matrix, k: int, field: Field):
    """k-th Kronecker power of a linear map, via the two-vertex lift.

    The input vector enters on the row side: the realized map sends x to
    y with y[j] = sum_i x[i] * M[i][j], applied k times Kronecker-wise.
    """
    s = len(base_matrix)
    t = len(base_matrix[0])
    flat = [v for row in base_matrix for v in row]
    core_tensor = Tensor((Mode("yi", s), Mode("yo", t)), flat, field)
    core = Network(
        {"yi": s, "yo": t}, {"M": ("yi", "yo")}, {"M": core_tensor}, {"yi", "yo"}, field
    )
    spec = MapSpec(
        name=f"yates({s}x{t})",
        input_sockets=((Mode("yi", s),),),
        output_socket=(Mode("yo", t),),
        field=field,
        base_tensor=lambda: core_tensor,
    )
    snet = realize(spec, core, check=True)
    base_plan = ExecutionPlan([(snet.socket_vertices[0], "M")])
    lifted = lift(snet, base_plan, k)
    lifted.network.meta.update(
        {
            "k": k,
            "claimed_bound": lifted.claimed_bound,
            "generator": {"name": "yates", "params": {"k": k, "shape": [s, t]}},
        }
    )
    return lifted.network, lifted.plan


# -- vector encode/decode helpers -------------------------------------------------


def vector_to_bits(values, mode_ids, field, radix=2):
    """Socket tensor for a vector: digits msb-first along `mode_ids`."""
    k = len(mode_ids)
    modes = tuple(Mode(m, radix) for m in mode_ids)

    def fn(idx):
        pos = 0
        for d in idx:
            pos = pos * radix + d
        return values[pos] if pos < len(values) else 0

    return Tensor.from_function(modes, field, fn)


def bits_to_vector(t: Tensor, mode_ids, radix=2):
    """Read a vector back, digits msb-first along `mode_ids`."""
    ordered = t.permuted(list(mode_ids))
    return list(ordered.data)


def bind_fft(snet: SocketedNetwork, x, field: Field) -> Network:
    sock = snet.socket_modes(0)
    return snet.bind([vector_to_bits(x, sorted(sock), field)])


def read_fft_result(snet: SocketedNetwork, t: Tensor):
    spec = snet.spec
    order = [m.id for m in spec.output_socket]
    return bits_to_vector(t, order)
