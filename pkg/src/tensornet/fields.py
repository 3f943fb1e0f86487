"""Pluggable scalar arithmetic: exact rationals, prime fields, and floats.

Raw values are plain Python objects (`Fraction`, `int` residues in
``[0, p)``, or `float`); they do not carry their field around.  Tensors and
networks hold a `Field` instance and all arithmetic goes through it, so
mismatched kinds are rejected structurally rather than coerced.  The
`Scalar` wrapper is provided for code that wants self-describing values
(serialization, the CLI).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import FieldMismatchError, NoRootError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit integers."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface of the three scalar domains."""

    kind = "abstract"
    exact = True

    def coerce(self, value):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        return self.sub(self.zero, a)

    def inv(self, a):
        return self.div(self.one, a)

    def pow(self, a, e: int):
        if e < 0:
            return self.inv(self.pow(a, -e))
        acc = self.one
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def format(self, a) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def random(self, rng):
        """Deterministic sample for seeded test/CLI inputs."""
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)


@dataclass(frozen=True)
class RationalField(Field):
    kind = "rational"
    exact = True

    def coerce(self, value):
        if isinstance(value, float):
            raise FieldMismatchError("refusing silent float -> rational coercion")
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in rational field")
        return a / b

    def format(self, a) -> str:
        f = Fraction(a)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

    def parse(self, text: str):
        return Fraction(text)

    def random(self, rng):
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


@dataclass(frozen=True)
class PrimeField(Field):
    modulus: int
    kind = "prime"
    exact = True

    def __post_init__(self):
        if not (2 <= self.modulus < 2**63):
            raise ValueError(f"modulus {self.modulus} does not fit a 64-bit word")
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")

    def coerce(self, value):
        if isinstance(value, float):
            raise FieldMismatchError("refusing silent float -> GF(p) coercion")
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return value.numerator % self.modulus
            raise FieldMismatchError("refusing silent rational -> GF(p) coercion")
        return int(value) % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def div(self, a, b):
        if b % self.modulus == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.modulus})")
        return a * pow(b, -1, self.modulus) % self.modulus

    def format(self, a) -> str:
        return str(a % self.modulus)

    def parse(self, text: str):
        return int(text) % self.modulus

    def random(self, rng):
        return rng.randrange(self.modulus)


@dataclass(frozen=True)
class Float64Field(Field):
    """Floating point, for benchmarking only; never used in exact checks."""

    kind = "f64"
    exact = False

    def coerce(self, value):
        return float(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def format(self, a) -> str:
        return repr(float(a))

    def parse(self, text: str):
        return float(text)

    def random(self, rng):
        return rng.uniform(-1.0, 1.0)


RATIONAL = RationalField()
FLOAT64 = Float64Field()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


# Default exact field for DFT work: 2^16 + 1 has primitive 2^k-th roots
# for every k <= 16 and odd characteristic, so 2 is always a unit.
GF_DFT = GF(65537)


def field_tag(field: Field) -> str:
    if isinstance(field, PrimeField):
        return f"gf:{field.modulus}"
    return field.kind


def field_from_tag(tag: str) -> Field:
    if tag == "rational":
        return RATIONAL
    if tag == "f64":
        return FLOAT64
    if tag.startswith("gf:"):
        return GF(int(tag[3:]))
    raise ValueError(f"unknown field tag {tag!r}")


@dataclass(frozen=True)
class Scalar:
    """A self-describing field element, used at serialization boundaries."""

    field: Field
    value: object

    def _check(self, other: "Scalar"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.div(self.value, other.value))

    def __str__(self):
        return self.field.format(self.value)


def arithmetic(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Apply one of add/sub/mul/div to two scalars of the same field."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def multiplicative_order(a: int, p: int) -> int:
    """Order of a nonzero residue in GF(p)*, by direct iteration."""
    x = a % p
    if x == 0:
        raise ZeroDivisionError("0 has no multiplicative order")
    order = 1
    acc = x
    while acc != 1:
        acc = acc * x % p
        order += 1
    return order


def primitive_root_of_unity(modulus: int, order: int) -> int:
    """Smallest residue of multiplicative order exactly `order` in GF(modulus).

    For 2-power orders this is the usual FFT root condition: rho^order = 1
    and rho^(order/2) = -1.
    """
    field = GF(modulus)
    p = field.modulus
    if order < 1 or (p - 1) % order != 0:
        raise NoRootError(f"order {order} does not divide {p}-1")
    if order == 1:
        return 1
    # factor the order once; rho has order exactly `order` iff rho^order = 1
    # and rho^(order/q) != 1 for every prime q | order
    prime_factors = []
    rem, q = order, 2
    while q * q <= rem:
        if rem % q == 0:
            prime_factors.append(q)
            while rem % q == 0:
                rem //= q
        q += 1
    if rem > 1:
        prime_factors.append(rem)
    for candidate in range(2, p):
        if pow(candidate, order, p) != 1:
            continue
        if all(pow(candidate, order // q, p) != 1 for q in prime_factors):
            return candidate
    raise NoRootError(f"no residue of order {order} in GF({p})")
