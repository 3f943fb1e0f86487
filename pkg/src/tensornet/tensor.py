"""Dense tensors with mode-labeled axes.

A tensor stores a flat row-major list of raw field values under an explicit
tuple of modes.  Modes are an unordered set conceptually; the canonical
storage/serialization order is ascending mode id, and the row/column
enumeration inside `flatten` (row-major over modes sorted by id) is part of
the stable public contract.  All indices are 0-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    BadBipartitionError,
    BadPositionError,
    FieldMismatchError,
    FloatRankRefusedError,
    ModeCollisionError,
    OrderMismatchError,
)
from .fields import Field, PrimeField, RATIONAL


def mode_key(mode_id):
    """Total order on mode ids; ints sort before strings."""
    if isinstance(mode_id, bool) or not isinstance(mode_id, (int, str)):
        raise TypeError(f"mode id must be int or str, got {mode_id!r}")
    return (0, "", mode_id) if isinstance(mode_id, int) else (1, mode_id, 0)


@dataclass(frozen=True)
class Mode:
    """A named axis with an index-set length."""

    id: object
    length: int

    def __post_init__(self):
        mode_key(self.id)
        if self.length < 1:
            raise ValueError(f"mode {self.id!r} has nonpositive length {self.length}")


class Tensor:
    def __init__(self, modes, data, field: Field):
        modes = tuple(modes)
        ids = [m.id for m in modes]
        if len(set(ids)) != len(ids):
            raise ModeCollisionError(f"duplicate mode ids in {ids}")
        volume = 1
        for m in modes:
            volume *= m.length
        data = [field.coerce(v) for v in data]
        if len(data) != volume:
            raise ValueError(f"expected {volume} entries, got {len(data)}")
        self.modes = modes
        self.data = data
        self.field = field

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_function(cls, modes, field, fn):
        """Entries from fn(index_tuple), iterating row-major over `modes`."""
        modes = tuple(modes)
        ranges = [range(m.length) for m in modes]
        return cls(modes, [fn(idx) for idx in itertools.product(*ranges)], field)

    @classmethod
    def scalar(cls, field, value):
        return cls((), [value], field)

    @classmethod
    def identity(cls, field, n, row_id, col_id):
        return cls.from_function(
            (Mode(row_id, n), Mode(col_id, n)), field, lambda ij: 1 if ij[0] == ij[1] else 0
        )

    @classmethod
    def ones(cls, field, modes):
        return cls.from_function(modes, field, lambda _: 1)

    @classmethod
    def delta(cls, field, ids, length):
        """Generalized copy tensor: 1 where all indices agree, else 0."""
        modes = tuple(Mode(i, length) for i in ids)
        return cls.from_function(modes, field, lambda idx: 1 if len(set(idx)) <= 1 else 0)

    # -- indexing ---------------------------------------------------------

    @property
    def order(self):
        return len(self.modes)

    @property
    def volume(self):
        v = 1
        for m in self.modes:
            v *= m.length
        return v

    @property
    def shape(self):
        return tuple(m.length for m in self.modes)

    def mode_ids(self):
        return frozenset(m.id for m in self.modes)

    def _offset(self, idx):
        off = 0
        for m, i in zip(self.modes, idx):
            off = off * m.length + i
        return off

    def entry(self, position):
        """Entry at a mode-id -> index mapping covering exactly the modes."""
        if set(position) != {m.id for m in self.modes}:
            raise BadPositionError(
                f"position keys {sorted(map(str, position))} do not cover modes"
            )
        idx = []
        for m in self.modes:
            i = position[m.id]
            if not 0 <= i < m.length:
                raise BadPositionError(f"index {i} out of range for mode {m.id!r}")
            idx.append(i)
        return self.data[self._offset(idx)]

    def positions(self):
        return itertools.product(*[range(m.length) for m in self.modes])

    # -- reordering and equality ------------------------------------------

    def permuted(self, new_ids):
        """Same tensor with axes stored in the order given by mode ids."""
        if set(new_ids) != {m.id for m in self.modes} or len(new_ids) != self.order:
            raise BadPositionError("permutation must list each mode id exactly once")
        by_id = {m.id: k for k, m in enumerate(self.modes)}
        perm = [by_id[i] for i in new_ids]
        new_modes = tuple(self.modes[k] for k in perm)
        if new_modes == self.modes:
            return self
        out = [None] * len(self.data)
        new = Tensor.__new__(Tensor)
        new.modes, new.field = new_modes, self.field
        for idx in self.positions():
            new_idx = tuple(idx[k] for k in perm)
            out[new._offset(new_idx)] = self.data[self._offset(idx)]
        new.data = out
        return new

    def canonical(self):
        return self.permuted(sorted((m.id for m in self.modes), key=mode_key))

    def renamed(self, mapping):
        """Rename mode ids via a (partial) id -> id mapping."""
        new_modes = tuple(Mode(mapping.get(m.id, m.id), m.length) for m in self.modes)
        new = Tensor.__new__(Tensor)
        new.modes, new.data, new.field = new_modes, self.data, self.field
        if len({m.id for m in new_modes}) != len(new_modes):
            raise ModeCollisionError("renaming collapses two modes")
        return new

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.field != other.field or self.mode_ids() != other.mode_ids():
            return False
        a, b = self.canonical(), other.canonical()
        return a.shape == b.shape and a.data == b.data

    def __repr__(self):
        ids = ",".join(str(m.id) for m in self.modes)
        return f"Tensor[{ids}]({'x'.join(map(str, self.shape)) or 'scalar'})"

    def nested(self, id_order=None):
        """Entries as nested lists, axes ordered by `id_order` (canonical default)."""
        t = self.canonical() if id_order is None else self.permuted(list(id_order))
        if t.order == 0:
            return t.data[0]

        def build(level, base, stride):
            length = t.modes[level].length
            inner = stride // length
            if level == t.order - 1:
                return t.data[base : base + length]
            return [build(level + 1, base + i * inner, inner) for i in range(length)]

        return build(0, 0, t.volume)

    # -- products -----------------------------------------------------------

    def kronecker(self, other: "Tensor", axis_pairing):
        """Kronecker product along paired axes.

        `axis_pairing` lists (self mode id, other mode id, new mode id)
        triples forming a bijection between the two mode sets.  Along each
        pair the combined index is `len_other * i + j`, i.e. the left factor
        is outermost.
        """
        if self.field != other.field:
            raise FieldMismatchError("kronecker of tensors over different fields")
        if self.order != other.order:
            raise OrderMismatchError(f"orders {self.order} != {other.order}")
        s_ids = [p[0] for p in axis_pairing]
        t_ids = [p[1] for p in axis_pairing]
        if set(s_ids) != self.mode_ids() or set(t_ids) != other.mode_ids() or len(
            axis_pairing
        ) != self.order:
            raise OrderMismatchError("axis pairing is not a bijection of the mode sets")
        s = self.permuted(s_ids)
        t = other.permuted(t_ids)
        new_modes = tuple(
            Mode(new_id, sm.length * tm.length)
            for (sm, tm, new_id) in zip(s.modes, t.modes, (p[2] for p in axis_pairing))
        )
        out = Tensor.__new__(Tensor)
        out.modes, out.field = new_modes, self.field
        data = [None] * (s.volume * t.volume)
        mul = self.field.mul
        for si in s.positions():
            sv = s.data[s._offset(si)]
            for ti in t.positions():
                idx = tuple(sm * tm.length + tj for sm, tm, tj in zip(si, t.modes, ti))
                data[out._offset(idx)] = mul(sv, t.data[t._offset(ti)])
        out.data = data
        return out

    def outer(self, other: "Tensor"):
        """Outer product; mode-id sets must be disjoint."""
        if self.field != other.field:
            raise FieldMismatchError("outer product of tensors over different fields")
        if self.mode_ids() & other.mode_ids():
            raise ModeCollisionError(f"shared ids {sorted(map(str, self.mode_ids() & other.mode_ids()))}")
        out = Tensor.__new__(Tensor)
        out.modes, out.field = self.modes + other.modes, self.field
        mul = self.field.mul
        out.data = [mul(a, b) for a in self.data for b in other.data]
        return out

    # -- flattening -----------------------------------------------------------

    def flatten(self, row_ids, row_mode_id="rows", col_mode_id="cols"):
        """Matrix of the bipartition (row_ids, complement).

        Rows enumerate positions of the row modes sorted by id, row-major;
        columns likewise for the complement.  The empty-side cases are
        rejected except that flattening a matrix by its own row mode returns
        an equal matrix.
        """
        row_ids = set(row_ids)
        all_ids = self.mode_ids()
        if not row_ids or not row_ids < all_ids:
            raise BadBipartitionError("rows must be a nonempty proper subset of the modes")
        rows = sorted(row_ids, key=mode_key)
        cols = sorted(all_ids - row_ids, key=mode_key)
        t = self.permuted(rows + cols)
        nrows = 1
        for m in t.modes[: len(rows)]:
            nrows *= m.length
        out = Tensor.__new__(Tensor)
        out.modes = (Mode(row_mode_id, nrows), Mode(col_mode_id, t.volume // nrows))
        out.field = self.field
        out.data = t.data
        return out


def refine(t: Tensor, splits) -> Tensor:
    """Split modes into finer ones without touching the data layout.

    `splits` maps a mode id to a list of replacement Modes whose lengths
    multiply to the original length; the first listed replacement is the
    outermost (most significant) digit of the original index.
    """
    order = [m.id for m in t.modes]
    src = t.permuted(order)  # no-op; keeps storage order explicit
    new_modes = []
    for m in src.modes:
        if m.id in splits:
            parts = tuple(splits[m.id])
            vol = 1
            for p in parts:
                vol *= p.length
            if vol != m.length:
                raise BadPositionError(f"refinement of {m.id!r} has volume {vol}, need {m.length}")
            new_modes.extend(parts)
        else:
            new_modes.append(m)
    out = Tensor.__new__(Tensor)
    out.modes = tuple(new_modes)
    out.data = src.data
    out.field = src.field
    if len({m.id for m in out.modes}) != len(out.modes):
        raise ModeCollisionError("refinement introduces duplicate mode ids")
    return out


def unflatten(matrix: Tensor, row_modes, col_modes):
    """Inverse of `flatten`: reshape a matrix back onto explicit modes."""
    row_modes, col_modes = tuple(row_modes), tuple(col_modes)
    rows = sorted(row_modes, key=lambda m: mode_key(m.id))
    cols = sorted(col_modes, key=lambda m: mode_key(m.id))
    nrows = 1
    for m in rows:
        nrows *= m.length
    ncols = 1
    for m in cols:
        ncols *= m.length
    if matrix.order != 2 or matrix.shape != (nrows, ncols):
        raise BadBipartitionError("matrix shape does not match the target modes")
    out = Tensor.__new__(Tensor)
    out.modes = tuple(rows + cols)
    out.data = matrix.data
    out.field = matrix.field
    return out


def matrix_rank(matrix: Tensor) -> int:
    """Exact rank of a 2-mode tensor.

    Fraction-free Bareiss elimination over the rationals, standard row
    elimination over GF(p).  Float64 inputs are refused.
    """
    if matrix.order != 2:
        raise BadBipartitionError(f"rank needs a matrix, got order {matrix.order}")
    field = matrix.field
    if not field.exact:
        raise FloatRankRefusedError("rank over Float64 is refused; use an exact field")
    nrows, ncols = matrix.shape
    m = [matrix.data[r * ncols : (r + 1) * ncols] for r in range(nrows)]
    if isinstance(field, PrimeField):
        return _rank_mod_p(m, field.modulus)
    return _rank_bareiss(m)


def _rank_mod_p(m, p):
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    for c in range(ncols):
        pivot = next((r for r in range(rank, nrows) if m[r][c] % p), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], -1, p)
        for r in range(rank + 1, nrows):
            f = m[r][c] * inv % p
            if f:
                row, top = m[r], m[rank]
                for l in range(c, ncols):
                    row[l] = (row[l] - f * top[l]) % p
        rank += 1
        if rank == nrows:
            break
    return rank


def _rank_bareiss(m):
    # clear denominators row by row; row scaling preserves rank
    im = []
    for row in m:
        den = 1
        for v in row:
            den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
        im.append([int(Fraction(v) * den) for v in row])
    nrows = len(im)
    ncols = len(im[0]) if nrows else 0
    rank = 0
    prev = 1
    for c in range(ncols):
        pivot = next((r for r in range(rank, nrows) if im[r][c]), None)
        if pivot is None:
            continue
        im[rank], im[pivot] = im[pivot], im[rank]
        piv = im[rank][c]
        for r in range(rank + 1, nrows):
            row, top = im[r], im[rank]
            f = row[c]
            for l in range(c, ncols):
                row[l] = (piv * row[l] - f * top[l]) // prev
        prev = piv
        rank += 1
        if rank == nrows:
            break
    return rank


def rational_matrix(rows):
    """Convenience: 2-mode rational tensor from nested lists."""
    n = len(rows)
    m = len(rows[0])
    return Tensor(
        (Mode("rows", n), Mode("cols", m)), [v for row in rows for v in row], RATIONAL
    )
