"""
Elements of the exterior algebra Λ(V) and its two standard products.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from fractions import Fraction
from typing import Optional

from algebra.scalars import ExtMask, Scalar, Side, all_masks, format_rat, merge_sign, popcount


def mask_order(mask: int) -> tuple[int, int]:
    """Canonical order on masks: by size, then by the integer value."""
    return (popcount(mask), mask)


def format_mask(mask: int, name: str = "xi") -> str:
    return str(ExtMask(mask, Side.VECTOR if name == "xi" else Side.COVECTOR))


class AElem:
    """Finite linear combination of canonical basis words ξ_S of Λ(V)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[int, Scalar]] = None) -> None:
        self.n = n
        self.terms: dict[int, Scalar] = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def basis(cls, n: int, mask: int, coeff: Scalar = 1) -> AElem:
        return cls(n, {mask: Fraction(coeff) if isinstance(coeff, int) else coeff})

    @classmethod
    def of(cls, n: int, *indices: int) -> AElem:
        return cls.basis(n, ExtMask.of(*indices).bits)

    @classmethod
    def unit(cls, n: int) -> AElem:
        return cls.basis(n, 0)

    @staticmethod
    def full_basis(n: int) -> list[int]:
        return sorted(all_masks(n), key=mask_order)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AElem):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: AElem) -> AElem:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return AElem(self.n, out)

    def __neg__(self) -> AElem:
        return AElem(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: AElem) -> AElem:
        return self + (-other)

    def scale(self, c: Scalar) -> AElem:
        return AElem(self.n, {m: v * c for m, v in self.terms.items()})

    def coefficient(self, mask: int) -> Scalar:
        return self.terms.get(mask, Fraction(0))

    def parity_parts(self) -> dict[int, AElem]:
        parts: dict[int, dict[int, Scalar]] = {}
        for m, c in self.terms.items():
            parts.setdefault(popcount(m) & 1, {})[m] = c
        return {p: AElem(self.n, t) for p, t in parts.items()}

    def items(self) -> list[tuple[int, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: mask_order(item[0]))

    def __repr__(self) -> str:
        return f"AElem({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for m, c in self.items():
            coeff = format_rat(c) if isinstance(c, Fraction) else f"({c})"
            chunks.append(f"{coeff}*{format_mask(m)}")
        return " + ".join(chunks)


def wedge_A(a2: AElem, a1: AElem) -> AElem:
    """Plain exterior product a2 ∧ a1."""
    out: dict[int, Scalar] = {}
    for m2, c2 in a2.terms.items():
        for m1, c1 in a1.terms.items():
            s = merge_sign(m2, m1)
            if s:
                key = m2 | m1
                out[key] = out.get(key, 0) + s * c2 * c1
    return AElem(a2.n, out)


def mu2_standard(a2: AElem, a1: AElem) -> AElem:
    """(−1)^{|a1|} a2 ∧ a1, extended bilinearly over the parity parts of a1."""
    result = AElem(a2.n)
    for parity, part in a1.parity_parts().items():
        product = wedge_A(a2, part)
        result = result + (product if parity == 0 else -product)
    return result


def mu2_constant(m2: int, m1: int) -> tuple[int, int]:
    """Structure constant of the standard product on basis words: (output mask, sign)."""
    s = merge_sign(m2, m1)
    if popcount(m1) & 1:
        s = -s
    return m2 | m1, s


def sum_elements(n: int, elements: Iterable[AElem]) -> AElem:
    total = AElem(n)
    for e in elements:
        total = total + e
    return total
