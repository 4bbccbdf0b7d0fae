"""
Exact scalars, exterior masks and weight bookkeeping.

Masks are plain ints: bit ``k - 1`` set means ξ_k (or dv_k) is a factor. Every Koszul sign in
the package is computed by :func:`merge_sign` or :func:`contraction_sign`.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from utils.errors import SideMismatchError

Rat = Fraction
MultiIndex = tuple[int, ...]
Weight = tuple[int, ...]

WEIGHT_MODULUS = 5


def parse_rat(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a number into a reduced fraction."""
    return Fraction(text)


def format_rat(value: Fraction) -> str:
    """Canonical ``p/q`` (or ``p``) spelling of a rational."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------------------------
# masks


def popcount(mask: int) -> int:
    return mask.bit_count()


def bit(k: int) -> int:
    """Mask of the single generator with 1-based index ``k``."""
    return 1 << (k - 1)


def mask_indices(mask: int) -> list[int]:
    """1-based indices present in ``mask``, ascending."""
    out = []
    k = 1
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for k in indices:
        mask |= bit(k)
    return mask


def all_masks(n: int) -> range:
    return range(1 << n)


def merge_sign(m1: int, m2: int) -> int:
    """Sign of sorting the concatenation of two ascending wedge words, 0 if they share a factor."""
    if m1 & m2:
        return 0
    inversions = 0
    rest = m2
    pos = 0
    while rest:
        if rest & 1:
            inversions += (m1 >> (pos + 1)).bit_count()
        rest >>= 1
        pos += 1
    return -1 if inversions & 1 else 1


def contraction_sign(k: int, mask: int) -> int:
    """Sign of the left contraction ι_k on an ascending word: (−1)^{#factors below k}, or 0."""
    b = bit(k)
    if not mask & b:
        return 0
    return -1 if (mask & (b - 1)).bit_count() & 1 else 1


def reversal_sign(size: int) -> int:
    """Sign relating ξ_{j_p}∧…∧ξ_{j_1} to the ascending word ξ_{j_1}∧…∧ξ_{j_p}."""
    return -1 if (size * (size - 1) // 2) & 1 else 1


class Side(Enum):
    VECTOR = "xi"
    COVECTOR = "dv"


@dataclass(frozen=True)
class ExtMask:
    """Canonical basis word of Λ(V) (``Side.VECTOR``) or Λ(V^∨) (``Side.COVECTOR``)."""

    bits: int
    side: Side = Side.VECTOR

    @classmethod
    def of(cls, *indices: int, side: Side = Side.VECTOR) -> ExtMask:
        return cls(mask_from_indices(indices), side)

    @property
    def parity(self) -> int:
        return popcount(self.bits) & 1

    def indices(self) -> list[int]:
        return mask_indices(self.bits)

    def __str__(self) -> str:
        if not self.bits:
            return "1"
        return "^".join(f"{self.side.value}{k}" for k in self.indices())


def wedge_sign(m1: ExtMask, m2: ExtMask) -> int:
    """Koszul sign of m1 ∧ m2 relative to the canonical word of m1 ∪ m2."""
    if m1.side is not m2.side:
        raise SideMismatchError(f"cannot wedge {m1.side.name} mask with {m2.side.name} mask")
    return merge_sign(m1.bits, m2.bits)


# ---------------------------------------------------------------------------------------------
# monomials


def unit_index(n: int, k: int) -> MultiIndex:
    return tuple(1 if i == k - 1 else 0 for i in range(n))


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def monomials_of_degree(n: int, degree: int) -> Iterator[MultiIndex]:
    """All exponent vectors of total degree ``degree``, in descending lexicographic order."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(n - 1, degree - first):
            yield (first, *rest)


def monomials_up_to(n: int, max_degree: int, min_degree: int = 0) -> list[MultiIndex]:
    out: list[MultiIndex] = []
    for d in range(min_degree, max_degree + 1):
        out.extend(monomials_of_degree(n, d))
    return out


def monomial_key(m: MultiIndex) -> tuple:
    """Canonical monomial order: total degree, then lexicographic with v1 first."""
    return (sum(m), tuple(-a for a in m))


def format_monomial(m: MultiIndex, name: str = "v") -> str:
    factors = []
    for k, a in enumerate(m, start=1):
        if a == 1:
            factors.append(f"{name}{k}")
        elif a:
            factors.append(f"{name}{k}^{a}")
    return "*".join(factors) if factors else "1"


# ---------------------------------------------------------------------------------------------
# weights


def monomial_weight(m: Union[MultiIndex, ExtMask], n: int = 0) -> Weight:
    """
    (ℤ/5)^n weight: v_k and dv_k carry −e_k, ξ_k carries +e_k; products add.

    Raises:
        ValueError: for an exterior word without ``n``, or one with bits beyond ``n``.
    """
    if isinstance(m, ExtMask):
        if n <= 0 or m.bits >> n:
            raise ValueError(f"weight of {m} needs the number of variables, got n={n}")
        sign = 1 if m.side is Side.VECTOR else -1
        return tuple((sign if m.bits >> i & 1 else 0) % WEIGHT_MODULUS for i in range(n))
    return tuple((-a) % WEIGHT_MODULUS for a in m)


def xi_weight(mask: int, n: int) -> Weight:
    return tuple((mask >> i) & 1 for i in range(n))


def add_weights(*weights: Sequence[int]) -> Weight:
    return tuple(sum(parts) % WEIGHT_MODULUS for parts in zip(*weights))


def sub_weights(a: Sequence[int], b: Sequence[int]) -> Weight:
    return tuple((x - y) % WEIGHT_MODULUS for x, y in zip(a, b))


def pairing(covector: Sequence[int], weight: Sequence[int]) -> int:
    return sum(c * w for c, w in zip(covector, weight)) % WEIGHT_MODULUS


def is_diagonal(weight: Sequence[int]) -> bool:
    return len({w % WEIGHT_MODULUS for w in weight}) <= 1


# ---------------------------------------------------------------------------------------------
# Q(zeta_5)


Scalar = Union[int, Fraction, "Cyc5"]


class Cyc5:
    """Element a + bζ + cζ² + dζ³ of ℚ(ζ₅), kept reduced modulo 1 + ζ + ζ² + ζ³ + ζ⁴."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Union[int, Fraction]] = (0, 0, 0, 0)) -> None:
        raw = [Fraction(c) for c in coeffs]
        if len(raw) > 4:
            raw = _reduce_cyclotomic(raw)
        raw += [Fraction(0)] * (4 - len(raw))
        self.coeffs: tuple[Fraction, Fraction, Fraction, Fraction] = tuple(raw)  # type: ignore[assignment]

    @classmethod
    def zeta(cls, power: int = 1) -> Cyc5:
        coeffs = [0] * 5
        coeffs[power % 5] = 1
        return cls(coeffs)

    @classmethod
    def coerce(cls, value: Scalar) -> Cyc5:
        if isinstance(value, Cyc5):
            return value
        return cls((value,))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __add__(self, other: Scalar) -> Cyc5:
        if not isinstance(other, (Cyc5, int, Fraction)):
            return NotImplemented
        o = Cyc5.coerce(other)
        return Cyc5(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> Cyc5:
        return Cyc5(tuple(-a for a in self.coeffs))

    def __sub__(self, other: Scalar) -> Cyc5:
        if not isinstance(other, (Cyc5, int, Fraction)):
            return NotImplemented
        return self + (-Cyc5.coerce(other))

    def __rsub__(self, other: Scalar) -> Cyc5:
        return Cyc5.coerce(other) - self

    def __mul__(self, other: Scalar) -> Cyc5:
        if isinstance(other, (int, Fraction)):
            return Cyc5(tuple(a * other for a in self.coeffs))
        if not isinstance(other, Cyc5):
            return NotImplemented
        prod = [Fraction(0)] * 7
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyc5(_reduce_cyclotomic(prod))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyc5.coerce(other)
        if not isinstance(other, Cyc5):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Cyc5({', '.join(format_rat(c) for c in self.coeffs)})"

    def __str__(self) -> str:
        parts = []
        for power, c in enumerate(self.coeffs):
            if c:
                parts.append(format_rat(c) if power == 0 else f"{format_rat(c)}*z^{power}")
        return " + ".join(parts) if parts else "0"


def _reduce_cyclotomic(coeffs: Sequence[Fraction]) -> list[Fraction]:
    c = list(coeffs) + [Fraction(0)] * max(0, 5 - len(coeffs))
    for power in range(len(c) - 1, 4, -1):
        if c[power]:
            c[power % 5] += c[power]
            c[power] = Fraction(0)
    top = c[4]
    out = [c[i] - top for i in range(4)]
    return out


def cyc5_mul(a: Cyc5, b: Cyc5) -> Cyc5:
    return a * b
