"""Strassen-based matrix multiplication networks.

The square network is the k-th Kronecker power of the three-tensor Strassen
decomposition, executed one component tensor at a time.  The rectangular
network wraps the square core with identity vertices: shared "sum" bits
join the two inputs directly (block summation) and "passthrough" bits route
input bits straight to the boundary (block grid).  All indices are encoded
in base c with digit 1 outermost.
"""

from __future__ import annotations

from ..errors import NotARealizationError
from ..execution import ExecutionPlan, plan_cost
from ..fields import Field
from ..kronpow import copy_id, lift, power_network
from ..network import MapSpec, Network, SocketedNetwork, merged_vertex_id, realize
from ..oracle import MatmulOracle
from ..tensor import Mode, Tensor, refine

# the seven bilinear products: coefficients of A entries, B entries, and the
# contribution of each product to C
_STRASSEN = [
    # (a_coeffs, b_coeffs, c_coeffs) as {(row, col): +-1}
    ({(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}),
    ({(1, 0): 1, (1, 1): 1}, {(0, 0): 1}, {(1, 0): 1, (1, 1): -1}),
    ({(0, 0): 1}, {(0, 1): 1, (1, 1): -1}, {(0, 1): 1, (1, 1): 1}),
    ({(1, 1): 1}, {(1, 0): 1, (0, 0): -1}, {(0, 0): 1, (1, 0): 1}),
    ({(0, 0): 1, (0, 1): 1}, {(1, 1): 1}, {(0, 0): -1, (0, 1): 1}),
    ({(1, 0): 1, (0, 0): -1}, {(0, 0): 1, (0, 1): 1}, {(1, 1): 1}),
    ({(0, 1): 1, (1, 1): -1}, {(1, 0): 1, (1, 1): 1}, {(0, 0): 1}),
]


def strassen_components(field: Field):
    """The fixed 2x2x7 components (alpha, beta, gamma).

    Modes: alpha (i1, k1, l), beta (k2, j1, l), gamma (i2, j2, l).  Joining
    the three on l reconstructs the 2x2 matrix multiplication tensor; the
    reconstruction is verified entrywise at import of any network built here.
    """

    def component(coeff_index, row_id, col_id):
        def fn(idx):
            row, col, term = idx
            return _STRASSEN[term][coeff_index].get((row, col), 0)

        return Tensor.from_function(
            (Mode(row_id, 2), Mode(col_id, 2), Mode("l", 7)), field, fn
        )

    return component(0, "i1", "k1"), component(1, "k2", "j1"), component(2, "i2", "j2")


def strassen_core(field: Field) -> Network:
    alpha, beta, gamma = strassen_components(field)
    edges = {"i1": 2, "k1": 2, "k2": 2, "j1": 2, "i2": 2, "j2": 2, "l": 7}
    incidence = {
        "alpha": ("i1", "k1", "l"),
        "beta": ("k2", "j1", "l"),
        "gamma": ("i2", "j2", "l"),
    }
    tensors = {"alpha": alpha, "beta": beta, "gamma": gamma}
    boundary = {"i1", "k1", "k2", "j1", "i2", "j2"}
    return Network(edges, incidence, tensors, boundary, field)


def matmul_map_spec(field: Field, ta: int, tb: int, tc: int, c: int = 2) -> MapSpec:
    """The c^ta x c^tb by c^tb x c^tc multiplication map over bit modes."""

    def base_tensor():
        coarse = MatmulOracle(c**ta, c**tb, c**tc, field).base_tensor()
        splits = {
            "a_i": [Mode(copy_id("i1", b), c) for b in range(1, ta + 1)],
            "a_k": [Mode(copy_id("k1", b), c) for b in range(1, tb + 1)],
            "b_k": [Mode(copy_id("k2", b), c) for b in range(1, tb + 1)],
            "b_j": [Mode(copy_id("j1", b), c) for b in range(1, tc + 1)],
            "c_i": [Mode(copy_id("i2", b), c) for b in range(1, ta + 1)],
            "c_j": [Mode(copy_id("j2", b), c) for b in range(1, tc + 1)],
        }
        return refine(coarse.canonical(), splits)

    def bits(prefix, count):
        return tuple(Mode(copy_id(prefix, b), c) for b in range(1, count + 1))

    return MapSpec(
        name=f"matmul(2^{ta},2^{tb},2^{tc})",
        input_sockets=(bits("i1", ta) + bits("k1", tb), bits("k2", tb) + bits("j1", tc)),
        output_socket=bits("i2", ta) + bits("j2", tc),
        field=field,
        base_tensor=base_tensor,
    )


def strassen_realization(field: Field) -> SocketedNetwork:
    """One Strassen block realizing 2x2 matrix multiplication, value-checked."""
    core = strassen_core(field)

    def base_tensor():
        coarse = MatmulOracle(2, 2, 2, field).base_tensor()
        return coarse.renamed(
            {"a_i": "i1", "a_k": "k1", "b_k": "k2", "b_j": "j1", "c_i": "i2", "c_j": "j2"}
        )

    spec = MapSpec(
        name="matmul(2,2,2)",
        input_sockets=(
            (Mode("i1", 2), Mode("k1", 2)),
            (Mode("k2", 2), Mode("j1", 2)),
        ),
        output_socket=(Mode("i2", 2), Mode("j2", 2)),
        field=field,
        base_tensor=base_tensor,
    )
    return realize(spec, core, check=True)


def strassen_base_plan(snet: SocketedNetwork) -> ExecutionPlan:
    """The diag-base tree: (X1 a), (X2 b), join, then absorb gamma."""
    x1, x2 = snet.socket_vertices
    f1 = merged_vertex_id((x1, "alpha"))
    f2 = merged_vertex_id((x2, "beta"))
    join = merged_vertex_id((f1, f2))
    return ExecutionPlan([(x1, "alpha"), (x2, "beta"), (f1, f2), (join, "gamma")])


def matmul_network(n: int, field: Field, c: int = 2, d: int = 7):
    """Strassen network for n x n matrices, padded up to a power of c.

    Returns (socketed network, plan); the measured max step cost is at most
    d^k * c^2 and lands in the network's meta alongside the padding data.
    """
    _require_strassen(c, d)
    k = _log_ceil(n, c)
    base = strassen_realization(field)
    lifted = lift(base, strassen_base_plan(base), k)
    snet, plan = lifted.network, lifted.plan
    snet.meta.update(
        {
            "logical_n": n,
            "k": k,
            "claimed_bound": lifted.claimed_bound,
            "generator": {"name": "matmul", "params": {"n": n}},
        }
    )
    assert lifted.claimed_bound == d**k * c * c
    return snet, plan


def rect_matmul_network(
    n: int, r: int, m: int | None = None, field: Field = None, c: int = 2, d: int = 7
):
    """Network multiplying an n x r matrix by an r x m matrix.

    Shapes pad up to powers of c.  The inner square core has
    min(ta, tb, tc) Strassen copies; leftover bits become identity-joined
    sum bits (when r dominates) or boundary passthrough bits (when n or m
    dominate), which is the paper's two-case rectangular construction and
    its three-exponent generalization.
    """
    _require_strassen(c, d)
    if m is None:
        m = n
    ta, tb, tc = _log_ceil(n, c), _log_ceil(r, c), _log_ceil(m, c)
    frame = _rect_frame(ta, tb, tc, field, c=c)
    spec = matmul_map_spec(field, ta, tb, tc, c=c)
    snet = realize(spec, frame.core, check="auto")
    x1, x2 = snet.socket_vertices
    steps = []
    left = _absorb(steps, x1, [v for v in frame.left_passthrough])
    right = _absorb(steps, x2, [v for v in frame.right_passthrough])
    right = _absorb(steps, right, [v for v in frame.sum_identities])
    steps += frame.chain_steps(left, right)
    plan = ExecutionPlan(steps)
    report = plan_cost(snet.network, plan)
    extra = (ta - frame.k) + (tb - frame.k) + (tc - frame.k)
    claimed = d**frame.k * c ** (2 + extra)
    if report.max_cost > claimed:
        raise AssertionError(f"rect cost {report.max_cost} > bound {claimed}")
    snet.meta.update(
        {
            "logical_n": n,
            "logical_r": r,
            "logical_m": m,
            "k": frame.k,
            "claimed_bound": claimed,
            "generator": {"name": "rect_matmul", "params": {"n": n, "r": r, "m": m}},
        }
    )
    return snet, plan


class _Frame:
    pass


def _rect_frame(ta: int, tb: int, tc: int, field: Field, c: int = 2) -> _Frame:
    """Square Strassen power core plus sum/passthrough identity vertices."""
    k = min(ta, tb, tc)
    if k < 1:
        raise ValueError("each dimension needs at least one base-c digit")
    baser = strassen_realization(field)
    power = power_network(baser, k)
    core = power.core()
    edges = dict(core.edges)
    incidence = dict(core.incidence)
    tensors = dict(core.tensors)
    frame = _Frame()
    frame.k = k
    frame.left_passthrough = []
    frame.right_passthrough = []
    frame.sum_identities = []

    def add_identity(name, mode_a, mode_b):
        edges[mode_a] = c
        edges[mode_b] = c
        incidence[name] = (mode_a, mode_b)
        tensors[name] = Tensor.identity(field, c, mode_a, mode_b)

    for b in range(k + 1, ta + 1):
        name = f"lpt{b:02d}"
        add_identity(name, copy_id("i1", b), copy_id("i2", b))
        frame.left_passthrough.append(name)
    for b in range(k + 1, tc + 1):
        name = f"rpt{b:02d}"
        add_identity(name, copy_id("j1", b), copy_id("j2", b))
        frame.right_passthrough.append(name)
    for b in range(k + 1, tb + 1):
        name = f"sum{b:02d}"
        add_identity(name, copy_id("k1", b), copy_id("k2", b))
        frame.sum_identities.append(name)

    boundary = set()
    for prefix, count in (
        ("i1", ta),
        ("k1", tb),
        ("k2", tb),
        ("j1", tc),
        ("i2", ta),
        ("j2", tc),
    ):
        boundary.update(copy_id(prefix, b) for b in range(1, count + 1))
    frame.core = Network(edges, incidence, tensors, boundary, field)

    def chain_steps(left_id, right_id):
        steps = []
        cur = left_id
        for i in range(1, k + 1):
            steps.append((cur, copy_id("alpha", i)))
            cur = merged_vertex_id(steps[-1])
        left = cur
        cur = right_id
        for i in range(1, k + 1):
            steps.append((cur, copy_id("beta", i)))
            cur = merged_vertex_id(steps[-1])
        steps.append((left, cur))
        cur = merged_vertex_id(steps[-1])
        for i in range(1, k + 1):
            steps.append((cur, copy_id("gamma", i)))
            cur = merged_vertex_id(steps[-1])
        return steps

    frame.chain_steps = chain_steps
    return frame


def _absorb(steps, start, vertices):
    cur = start
    for v in vertices:
        steps.append((cur, v))
        cur = merged_vertex_id(steps[-1])
    return cur


def _log_ceil(n: int, c: int) -> int:
    if n < 1:
        raise ValueError("sizes must be positive")
    k = 1
    while c**k < n:
        k += 1
    return k


def _require_strassen(c, d):
    if (c, d) != (2, 7):
        raise NotARealizationError("only the Strassen base (c=2, d=7) is shipped")


# -- digit encoding helpers ----------------------------------------------------


def matrix_to_bits(rows, row_prefix, col_prefix, nbits_row, nbits_col, field, c=2):
    """Socket tensor for a matrix, zero-padded to c^bits per side."""
    nr, nc = c**nbits_row, c**nbits_col
    modes = tuple(Mode(copy_id(row_prefix, b), c) for b in range(1, nbits_row + 1)) + tuple(
        Mode(copy_id(col_prefix, b), c) for b in range(1, nbits_col + 1)
    )

    def fn(idx):
        row = _digits_to_int(idx[:nbits_row], c)
        col = _digits_to_int(idx[nbits_row:], c)
        if row < len(rows) and col < len(rows[0]):
            return rows[row][col]
        return 0

    assert nr >= len(rows) and nc >= len(rows[0])
    return Tensor.from_function(modes, field, fn)


def bits_to_matrix(t: Tensor, row_prefix, col_prefix, nbits_row, nbits_col, n, m, c=2):
    """Read the logical n x m block out of a bit-mode result tensor."""
    row_ids = [copy_id(row_prefix, b) for b in range(1, nbits_row + 1)]
    col_ids = [copy_id(col_prefix, b) for b in range(1, nbits_col + 1)]
    ordered = t.permuted(row_ids + col_ids)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            idx = _int_to_digits(i, nbits_row, c) + _int_to_digits(j, nbits_col, c)
            row.append(ordered.data[ordered._offset(idx)])
        out.append(row)
    return out


def bind_matmul(snet: SocketedNetwork, A, B, field: Field) -> Network:
    ta = max(b for b in range(1, 65) if copy_id("i1", b) in snet.network.edges)
    tb = max(b for b in range(1, 65) if copy_id("k1", b) in snet.network.edges)
    tc = max(b for b in range(1, 65) if copy_id("j1", b) in snet.network.edges)
    tA = matrix_to_bits(A, "i1", "k1", ta, tb, field)
    tB = matrix_to_bits(B, "k2", "j1", tb, tc, field)
    return snet.bind([tA, tB])


def read_matmul_result(t: Tensor, n, m, c=2):
    ids = sorted(mid for mid in (m_.id for m_ in t.modes))
    ta = sum(1 for i in ids if str(i).startswith("i2@"))
    tc = sum(1 for i in ids if str(i).startswith("j2@"))
    return bits_to_matrix(t, "i2", "j2", ta, tc, n, m, c)


def _digits_to_int(digits, c):
    out = 0
    for di in digits:
        out = out * c + di
    return out


def _int_to_digits(x, nbits, c):
    out = []
    for _ in range(nbits):
        out.append(x % c)
        x //= c
    return tuple(reversed(out))
