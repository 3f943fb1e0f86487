"""Independent brute-force evaluators for every multilinear map in scope.

These are the ground truth the networks are checked against: literal
summations straight from the defining equations, no algorithmic shortcuts,
and no code shared with the builders or the plan runner.  Base tensors are
materialized by probing the map on all unit-vector combinations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ShapeMismatchError, TooLargeError
from .fields import Field, PrimeField, primitive_root_of_unity
from .network import MapSpec
from .patterns import PatternGraph
from .tensor import Mode, Tensor

PROBE_BOUND = 2**24


class Oracle:
    """One multilinear map family: socket layout plus literal evaluation."""

    name = "oracle"
    field: Field

    def input_sockets(self):
        raise NotImplementedError

    def output_socket(self):
        return ()

    def evaluate(self, inputs):
        raise NotImplementedError

    def unit_input(self, j, position):
        raise NotImplementedError

    def output_entry(self, output, position):
        raise NotImplementedError

    def map_spec(self) -> MapSpec:
        return MapSpec(
            name=self.name,
            input_sockets=tuple(tuple(s) for s in self.input_sockets()),
            output_socket=tuple(self.output_socket()),
            field=self.field,
            base_tensor=self.base_tensor,
        )

    def base_tensor(self) -> Tensor:
        """T-hat by unit-vector probing, one evaluation per input combination."""
        sockets = [tuple(s) for s in self.input_sockets()]
        out_modes = tuple(self.output_socket())
        flat_in = [m for sock in sockets for m in sock]
        volume = 1
        for m in flat_in + list(out_modes):
            volume *= m.length
        if volume > PROBE_BOUND:
            raise TooLargeError(f"base tensor volume {volume} exceeds {PROBE_BOUND}")
        sizes = [len(sock) for sock in sockets]
        data = []
        out_ranges = [range(m.length) for m in out_modes]
        for idx in itertools.product(*[range(m.length) for m in flat_in]):
            pos = 0
            inputs = []
            for j, sock in enumerate(sockets):
                sub = idx[pos : pos + sizes[j]]
                pos += sizes[j]
                inputs.append(self.unit_input(j, dict(zip((m.id for m in sock), sub))))
            out = self.evaluate(inputs)
            if not out_modes:
                data.append(out)
            else:
                for oidx in itertools.product(*out_ranges):
                    data.append(
                        self.output_entry(out, dict(zip((m.id for m in out_modes), oidx)))
                    )
        return Tensor(tuple(flat_in) + out_modes, data, self.field)


# -- matrix multiplication ----------------------------------------------------


@dataclass
class MatmulOracle(Oracle):
    n: int
    r: int
    m: int
    field: Field

    @property
    def name(self):
        return f"matmul({self.n}x{self.r}x{self.m})"

    def input_sockets(self):
        return (
            (Mode("a_i", self.n), Mode("a_k", self.r)),
            (Mode("b_j", self.m), Mode("b_k", self.r)),
        )

    def output_socket(self):
        return (Mode("c_i", self.n), Mode("c_j", self.m))

    def evaluate(self, inputs):
        A, B = inputs
        if len(A) != self.n or any(len(row) != self.r for row in A):
            raise ShapeMismatchError("A is not n x r")
        if len(B) != self.r or any(len(row) != self.m for row in B):
            raise ShapeMismatchError("B is not r x m")
        f = self.field
        return [
            [
                _sum(f, (f.mul(A[i][k], B[k][j]) for k in range(self.r)))
                for j in range(self.m)
            ]
            for i in range(self.n)
        ]

    def unit_input(self, j, position):
        if j == 0:
            A = [[0] * self.r for _ in range(self.n)]
            A[position["a_i"]][position["a_k"]] = 1
            return A
        B = [[0] * self.m for _ in range(self.r)]
        B[position["b_k"]][position["b_j"]] = 1
        return B

    def output_entry(self, output, position):
        return output[position["c_i"]][position["c_j"]]


# -- DFT on bit modes ----------------------------------------------------------


def _bits_to_index(position, ids):
    """Bit modes listed most-significant first."""
    idx = 0
    for mid in ids:
        idx = (idx << 1) | position[mid]
    return idx


@dataclass
class DftOracle(Oracle):
    """DFT of order 2^k at rho, with each index refined into k bit modes."""

    k: int
    field: Field
    rho: object = None

    def __post_init__(self):
        if self.rho is None:
            if self.k == 0:
                self.rho = self.field.one
            elif self.k == 1:
                self.rho = self.field.sub(self.field.zero, self.field.one)
            elif isinstance(self.field, PrimeField):
                self.rho = primitive_root_of_unity(self.field.modulus, 2**self.k)
            else:
                raise ShapeMismatchError("need an explicit 2^k-th root over this field")

    @property
    def name(self):
        return f"dft(2^{self.k})"

    @property
    def size(self):
        return 2**self.k

    def input_sockets(self):
        return ((Mode(f"x{b}", 2) for b in range(1, self.k + 1)),)

    def output_socket(self):
        return (Mode(f"y{b}", 2) for b in range(1, self.k + 1))

    def phi(self):
        f = self.field
        return [
            [f.pow(self.rho, i * j) for j in range(self.size)] for i in range(self.size)
        ]

    def evaluate(self, inputs):
        (x,) = inputs
        if len(x) != self.size:
            raise ShapeMismatchError("vector length mismatch")
        f = self.field
        phi = self.phi()
        return [_sum(f, (f.mul(phi[i][j], x[j]) for j in range(self.size))) for i in range(self.size)]

    def unit_input(self, j, position):
        x = [0] * self.size
        x[_bits_to_index(position, [f"x{b}" for b in range(1, self.k + 1)])] = 1
        return x

    def output_entry(self, output, position):
        return output[_bits_to_index(position, [f"y{b}" for b in range(1, self.k + 1)])]


# -- group algebra product ------------------------------------------------------


@dataclass
class ConvolutionOracle(Oracle):
    """Convolution over Z_{2^k} (cyclic) or Z_2^k (xor), on bit modes."""

    k: int
    field: Field
    group: str = "cyclic"  # or "xor"

    @property
    def name(self):
        return f"conv({self.group},2^{self.k})"

    @property
    def size(self):
        return 2**self.k

    def input_sockets(self):
        return (
            (Mode(f"f{b}", 2) for b in range(1, self.k + 1)),
            (Mode(f"g{b}", 2) for b in range(1, self.k + 1)),
        )

    def output_socket(self):
        return (Mode(f"h{b}", 2) for b in range(1, self.k + 1))

    def evaluate(self, inputs):
        f_vec, g_vec = inputs
        if len(f_vec) != self.size or len(g_vec) != self.size:
            raise ShapeMismatchError("vector length mismatch")
        fld = self.field
        out = []
        for h in range(self.size):
            if self.group == "cyclic":
                terms = (
                    fld.mul(f_vec[(h - j) % self.size], g_vec[j]) for j in range(self.size)
                )
            else:
                terms = (fld.mul(f_vec[h ^ j], g_vec[j]) for j in range(self.size))
            out.append(_sum(fld, terms))
        return out

    def unit_input(self, j, position):
        prefix = "f" if j == 0 else "g"
        x = [0] * self.size
        x[_bits_to_index(position, [f"{prefix}{b}" for b in range(1, self.k + 1)])] = 1
        return x

    def output_entry(self, output, position):
        return output[_bits_to_index(position, [f"h{b}" for b in range(1, self.k + 1)])]


# -- Kruskal operator ------------------------------------------------------------


@dataclass
class KruskalOracle(Oracle):
    dims: tuple
    r: int
    field: Field

    @property
    def name(self):
        dims = "x".join(map(str, self.dims))
        return f"kruskal({dims}|{self.r})"

    @property
    def arity(self):
        return len(self.dims)

    def input_sockets(self):
        return tuple(
            (Mode(f"a{t}_i", n), Mode(f"a{t}_j", self.r))
            for t, n in enumerate(self.dims, start=1)
        )

    def output_socket(self):
        return tuple(Mode(f"y{t}", n) for t, n in enumerate(self.dims, start=1))

    def evaluate(self, inputs):
        if len(inputs) != self.arity:
            raise ShapeMismatchError(f"expected {self.arity} matrices")
        f = self.field
        out = {}
        for pos in itertools.product(*[range(n) for n in self.dims]):
            out[pos] = _sum(
                f,
                (
                    _prod(f, (inputs[t][pos[t]][j] for t in range(self.arity)))
                    for j in range(self.r)
                ),
            )
        return out

    def unit_input(self, j, position):
        n = self.dims[j]
        A = [[0] * self.r for _ in range(n)]
        A[position[f"a{j + 1}_i"]][position[f"a{j + 1}_j"]] = 1
        return A

    def output_entry(self, output, position):
        return output[tuple(position[f"y{t}"] for t in range(1, self.arity + 1))]


# -- determinant and permanent -----------------------------------------------------


def cycle_count(perm):
    seen = [False] * len(perm)
    cycles = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        cycles += 1
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
    return cycles


@dataclass
class PermanentOracle(Oracle):
    n: int
    field: Field
    signed: bool = False

    @property
    def name(self):
        return f"{'det' if self.signed else 'perm'}({self.n})"

    def input_sockets(self):
        return tuple((Mode(f"r{i}", self.n),) for i in range(1, self.n + 1))

    def evaluate(self, rows):
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ShapeMismatchError("expected n row vectors of length n")
        f = self.field
        total = f.zero
        # lexicographic permutation order; sign from the cycle count
        for perm in itertools.permutations(range(self.n)):
            term = _prod(f, (rows[i][perm[i]] for i in range(self.n)))
            if self.signed and (self.n - cycle_count(perm)) % 2 == 1:
                term = f.neg(term)
            total = f.add(total, term)
        return total

    def unit_input(self, j, position):
        row = [0] * self.n
        row[position[f"r{j + 1}"]] = 1
        return row


def DeterminantOracle(n, field):
    return PermanentOracle(n, field, signed=True)


# -- P-linear forms -------------------------------------------------------------


@dataclass
class PformOracle(Oracle):
    pattern: PatternGraph
    n: int
    field: Field

    @property
    def name(self):
        return f"pform({self.pattern.name},n={self.n})"

    def socket_mode_id(self, edge, vertex):
        return f"e{'_'.join(map(str, edge))}v{vertex}"

    def input_sockets(self):
        return tuple(
            tuple(Mode(self.socket_mode_id(e, v), self.n) for v in e)
            for e in self.pattern.hyperedges
        )

    def evaluate(self, hosts):
        """Hosts listed per hyperedge (sorted order), indexed by the edge's
        vertices ascending."""
        if len(hosts) != self.pattern.num_edges:
            raise ShapeMismatchError("one host tensor per hyperedge required")
        f = self.field
        total = f.zero
        for sigma in itertools.product(range(self.n), repeat=self.pattern.num_vertices):
            term = f.one
            for host, edge in zip(hosts, self.pattern.hyperedges):
                entry = host
                for v in edge:
                    entry = entry[sigma[v]]
                term = f.mul(term, entry)
            total = f.add(total, term)
        return total

    def unit_input(self, j, position):
        edge = self.pattern.hyperedges[j]
        idx = tuple(position[self.socket_mode_id(edge, v)] for v in edge)

        def nest(depth):
            if depth == len(edge):
                return 1
            return [nest(depth + 1) if i == idx[depth] else _zeros(len(edge) - depth - 1, self.n) for i in range(self.n)]

        return nest(0)


def _zeros(depth, n):
    if depth == 0:
        return 0
    return [_zeros(depth - 1, n) for _ in range(n)]


def _sum(field, terms):
    total = field.zero
    for t in terms:
        total = field.add(total, field.coerce(t))
    return total


def _prod(field, factors):
    total = field.one
    for t in factors:
        total = field.mul(total, field.coerce(t))
    return total


ORACLE_FAMILIES = {
    "matmul": MatmulOracle,
    "dft": DftOracle,
    "conv": ConvolutionOracle,
    "kruskal": KruskalOracle,
    "perm": PermanentOracle,
    "det": DeterminantOracle,
    "pform": PformOracle,
}
