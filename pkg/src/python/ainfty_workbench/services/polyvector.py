"""
Polyvector fields Sym(V^∨) ⊗ Λ(V), the Schouten bracket, contraction with dW, and invariant counts.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from fractions import Fraction
from typing import NamedTuple, Optional

from algebra.exterior import format_mask, mask_order
from algebra.polynomials import Poly, format_terms
from algebra.scalars import (
    Cyc5,
    MultiIndex,
    add_index,
    add_weights,
    all_masks,
    bit,
    contraction_sign,
    format_monomial,
    mask_indices,
    merge_sign,
    monomial_key,
    monomial_weight,
    monomials_of_degree,
    popcount,
    sub_weights,
    xi_weight,
)
from services.groups import GroupSpec

logger = logging.getLogger(__name__)

PKey = tuple[MultiIndex, int, int]


class PolyVector:
    """Finite sum of f ξ_I ħ^k with exact rational coefficients, keyed by (mono, mask, k)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[PKey, Fraction]] = None) -> None:
        self.n = n
        self.terms: dict[PKey, Fraction] = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def term(cls, n: int, mono: MultiIndex, mask: int, coeff: Fraction = Fraction(1), hbar: int = 0) -> PolyVector:
        return cls(n, {(tuple(mono), mask, hbar): coeff})

    @classmethod
    def from_poly(cls, poly: Poly, mask: int = 0, hbar: int = 0) -> PolyVector:
        return cls(poly.n, {(m, mask, hbar): c for m, c in poly.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: PolyVector) -> PolyVector:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolyVector(self.n, out)

    def __neg__(self) -> PolyVector:
        return PolyVector(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: PolyVector) -> PolyVector:
        return self + (-other)

    def scale(self, c: Fraction) -> PolyVector:
        return PolyVector(self.n, {k: v * c for k, v in self.terms.items()})

    def lambda_degrees(self) -> set[int]:
        return {popcount(mask) for _m, mask, _h in self.terms}

    def lambda_part(self, j: int) -> PolyVector:
        return PolyVector(self.n, {k: c for k, c in self.terms.items() if popcount(k[1]) == j})

    def hbar_part(self, k: int) -> PolyVector:
        return PolyVector(self.n, {key: c for key, c in self.terms.items() if key[2] == k})

    def forget_hbar(self) -> PolyVector:
        out: dict[PKey, Fraction] = {}
        for (m, mask, _h), c in self.terms.items():
            out[(m, mask, 0)] = out.get((m, mask, 0), 0) + c
        return PolyVector(self.n, out)

    def truncate(self, order: int) -> PolyVector:
        """Drop terms of Sym-degree ≥ ``order``."""
        return PolyVector(self.n, {k: c for k, c in self.terms.items() if sum(k[0]) < order})

    def min_sym_degree(self) -> Optional[int]:
        return min((sum(k[0]) for k in self.terms), default=None)

    def coefficient_poly(self, mask: int, hbar: int = 0) -> Poly:
        return Poly(self.n, {m: c for (m, msk, h), c in self.terms.items() if msk == mask and h == hbar})

    def scalar_part(self) -> Poly:
        """Λ⁰ component with ħ forgotten."""
        out: dict[MultiIndex, Fraction] = {}
        for (m, mask, _h), c in self.terms.items():
            if mask == 0:
                out[m] = out.get(m, 0) + c
        return Poly(self.n, out)

    def items(self) -> list[tuple[PKey, Fraction]]:
        return sorted(
            self.terms.items(), key=lambda item: (item[0][2], mask_order(item[0][1]), monomial_key(item[0][0]))
        )

    def __repr__(self) -> str:
        return f"PolyVector({self})"

    def __str__(self) -> str:
        def render(key: PKey) -> str:
            m, mask, h = key
            parts = [format_monomial(m)] if any(m) else []
            if mask:
                parts.append(format_mask(mask))
            if h:
                parts.append(f"hbar^{h}" if h > 1 else "hbar")
            return "*".join(parts) or "1"

        return format_terms(self.items(), render)


def _mono_times_poly(mono: MultiIndex, coeff: Fraction, mask: int, hbar: int, poly: Poly, out: dict) -> None:
    for m, c in poly.terms.items():
        key = (add_index(mono, m), mask, hbar)
        out[key] = out.get(key, 0) + coeff * c


def _derivative_index(mono: MultiIndex, k: int) -> tuple[int, MultiIndex]:
    a = mono[k - 1]
    if not a:
        return 0, mono
    return a, mono[: k - 1] + (a - 1,) + mono[k:]


def schouten(p: PolyVector, q: PolyVector) -> PolyVector:
    """
    [f ξ_I, g ξ_J] = Σ_q (−1)^{k−q−1} f ∂_{i_q}g ξ_{I∖i_q}∧ξ_J + Σ_q (−1)^{l−q+(k−1)(l−1)} g ∂_{j_q}f ξ_{J∖j_q}∧ξ_I,

    with k = |I|, l = |J| and q the number of factors standing left of the removed one.
    """
    n = p.n
    out: dict[PKey, Fraction] = {}
    for (mf, mask_i, hp), cp in p.terms.items():
        k = popcount(mask_i)
        for (mg, mask_j, hq), cq in q.terms.items():
            l = popcount(mask_j)
            h = hp + hq
            for pos, i in enumerate(mask_indices(mask_i)):
                a, dg = _derivative_index(mg, i)
                if not a:
                    continue
                s = merge_sign(mask_i & ~bit(i), mask_j)
                if not s:
                    continue
                sign = -s if (k - pos - 1) & 1 else s
                key = (add_index(mf, dg), (mask_i & ~bit(i)) | mask_j, h)
                out[key] = out.get(key, 0) + sign * a * cp * cq
            for pos, j in enumerate(mask_indices(mask_j)):
                a, df = _derivative_index(mf, j)
                if not a:
                    continue
                s = merge_sign(mask_j & ~bit(j), mask_i)
                if not s:
                    continue
                sign = -s if (l - pos + (k - 1) * (l - 1)) & 1 else s
                key = (add_index(mg, df), (mask_j & ~bit(j)) | mask_i, h)
                out[key] = out.get(key, 0) + sign * a * cp * cq
    return PolyVector(n, out)


def koszul_dW(p: PolyVector, w: Poly) -> PolyVector:
    """ι_{dW}(f ξ_I) = Σ_{i∈I} (−1)^{#I below i} ∂_iW f ξ_{I∖i}."""
    n = p.n
    partials = [w.derivative(k) for k in range(1, n + 1)]
    out: dict[PKey, Fraction] = {}
    for (m, mask, h), c in p.terms.items():
        for i in mask_indices(mask):
            s = contraction_sign(i, mask)
            _mono_times_poly(m, s * c, mask & ~bit(i), h, partials[i - 1], out)
    return PolyVector(n, out)


# ---------------------------------------------------------------------------------------------
# invariant counts


def polyvector_weight(mono: MultiIndex, mask: int, n: int) -> tuple[int, ...]:
    return add_weights(monomial_weight(mono), xi_weight(mask, n))


def invariant_dim(i: int, j: int, group: GroupSpec) -> int:
    """dim (Sym^i(V^∨) ⊗ Λ^j(V))^G, counted on weight-homogeneous basis monomials."""
    n = group.n
    count = 0
    for mono in monomials_of_degree(n, i):
        for mask in all_masks(n):
            if popcount(mask) == j and group.is_invariant(polyvector_weight(mono, mask, n)):
                count += 1
    return count


def character_average_dim(i: int, j: int, group: GroupSpec) -> int:
    """Same dimension as the averaged trace (1/|G|) Σ_g tr(g), evaluated in ℚ(ζ₅)."""
    n = group.n
    total = Cyc5()
    basis = [(m, mask) for m in monomials_of_degree(n, i) for mask in all_masks(n) if popcount(mask) == j]
    for element in group.elements:
        for mono, mask in basis:
            total = total + group.character(element, polyvector_weight(mono, mask, n))
    value = total.to_rational() / group.order
    if value.denominator != 1:
        raise ArithmeticError(f"character average {value} is not an integer")
    return int(value)


def hom_invariant_dim(arity: int, j: int, group: GroupSpec) -> int:
    """dim Hom^j(A^{⊗arity}, A)^G on basis words: output degree minus input degrees equals j."""
    n = group.n
    count = 0
    masks = list(all_masks(n))
    for inputs in itertools.product(masks, repeat=arity):
        in_degree = sum(popcount(a) for a in inputs)
        in_weight = add_weights(*(xi_weight(a, n) for a in inputs)) if inputs else (0,) * n
        for out in masks:
            if popcount(out) - in_degree != j:
                continue
            if group.is_invariant(sub_weights(xi_weight(out, n), in_weight)):
                count += 1
    return count


class DegreePredicates(NamedTuple):
    g: bool
    h: bool
    mod4: bool


def degree_predicates(d: int, i: int, j: int, k: int) -> DegreePredicates:
    """
    Membership of Sym^i ⊗ Λ^j ħ^k in the degree-d pieces: 2i + j − 4k = 3d + 3 for 𝔤,
    3i + j − 4k = 3d + 3 for 𝔥 (both with k ≥ 0, i ≥ d + 2), and 2i + j + d + 1 ≡ 0 mod 4.
    """
    side = k >= 0 and i >= d + 2
    return DegreePredicates(
        g=side and 2 * i + j - 4 * k == 3 * d + 3,
        h=side and 3 * i + j - 4 * k == 3 * d + 3,
        mod4=(2 * i + j + d + 1) % 4 == 0,
    )
