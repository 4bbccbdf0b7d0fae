"""
Hochschild cochains of Λ(V): differential, Gerstenhaber bracket, Maurer-Cartan residual and HKR.

A cochain is a sparse table ``{(inputs, output, k): coefficient}`` on basis words, with inputs
written left to right as ``(a_j, …, a_1)``. A component in Hom^p(A^{⊗j}, A) has CC-degree
j + p − 1, and its parity is what enters every Koszul sign below.

Keys may pack a group index above the low ``n`` bits of each mask (semidirect products); degrees
only look at the low bits.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from fractions import Fraction
from typing import Optional

from algebra.scalars import MultiIndex, Scalar, all_masks, bit, merge_sign, popcount
from services.polyvector import PolyVector

logger = logging.getLogger(__name__)

CKey = tuple[tuple[int, ...], int, int]

HALF = Fraction(1, 2)


class HochschildCochain:
    """Finite sum of multilinear maps A^{⊗j} → A, with an ħ-power per component."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Optional[Mapping[CKey, Scalar]] = None) -> None:
        self.n = n
        self.entries: dict[CKey, Scalar] = {k: c for k, c in (entries or {}).items() if c}

    def degree_of(self, key: int) -> int:
        return popcount(key & ((1 << self.n) - 1))

    def entry_parity(self, inputs: tuple[int, ...], output: int) -> int:
        return (len(inputs) + self.degree_of(output) - sum(self.degree_of(a) for a in inputs) - 1) & 1

    @property
    def cc_parity(self) -> Optional[int]:
        """Common CC-degree parity; ``None`` when mixed, 0 for the zero cochain."""
        parities = {self.entry_parity(inputs, out) for inputs, out, _h in self.entries}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def parity_parts(self) -> dict[int, HochschildCochain]:
        parts: dict[int, dict[CKey, Scalar]] = {}
        for key, c in self.entries.items():
            parts.setdefault(self.entry_parity(key[0], key[1]), {})[key] = c
        return {p: HochschildCochain(self.n, t) for p, t in parts.items()}

    def arities(self) -> list[int]:
        return sorted({len(inputs) for inputs, _out, _h in self.entries})

    def arity_part(self, arity: int) -> HochschildCochain:
        return HochschildCochain(self.n, {k: c for k, c in self.entries.items() if len(k[0]) == arity})

    def truncate_arity(self, max_arity: int) -> HochschildCochain:
        return HochschildCochain(self.n, {k: c for k, c in self.entries.items() if len(k[0]) <= max_arity})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HochschildCochain):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: HochschildCochain) -> HochschildCochain:
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return HochschildCochain(self.n, out)

    def __neg__(self) -> HochschildCochain:
        return HochschildCochain(self.n, {k: -c for k, c in self.entries.items()})

    def __sub__(self, other: HochschildCochain) -> HochschildCochain:
        return self + (-other)

    def scale(self, c: Scalar) -> HochschildCochain:
        return HochschildCochain(self.n, {k: v * c for k, v in self.entries.items()})

    def sorted_entries(self) -> list[tuple[CKey, Scalar]]:
        return sorted(self.entries.items(), key=lambda item: (len(item[0][0]), item[0][2], item[0][0], item[0][1]))

    def __repr__(self) -> str:
        return f"HochschildCochain(n={self.n}, {len(self.entries)} entries)"


def product_cochain(n: int) -> HochschildCochain:
    """m(a₂, a₁) = (−1)^{|a₁|} a₂ ∧ a₁ on all basis pairs."""
    entries: dict[CKey, Scalar] = {}
    for a2 in all_masks(n):
        for a1 in all_masks(n):
            s = merge_sign(a2, a1)
            if s:
                entries[((a2, a1), a2 | a1, 0)] = Fraction(-s if popcount(a1) & 1 else s)
    return HochschildCochain(n, entries)


def identity_cochain(n: int) -> HochschildCochain:
    return HochschildCochain(n, {((a,), a, 0): Fraction(1) for a in all_masks(n)})


# ---------------------------------------------------------------------------------------------
# composition, bracket, differential


def insert(phi: HochschildCochain, psi: HochschildCochain, max_arity: Optional[int] = None) -> HochschildCochain:
    """Σ ± φ(a_j, …, ψ(a_{k+l}, …, a_{k+1}), a_k, …, a_1) with sign (−1)^{|ψ|(|a_k|+…+|a_1| − k)}."""
    n = phi.n
    by_output: dict[int, list[tuple[tuple[int, ...], int, Scalar, int]]] = {}
    for (yin, yout, yh), cy in psi.entries.items():
        by_output.setdefault(yout, []).append((yin, yh, cy, psi.entry_parity(yin, yout)))
    out: dict[CKey, Scalar] = {}
    for (xin, xout, xh), cx in phi.entries.items():
        p = len(xin)
        for slot in range(p):
            matches = by_output.get(xin[slot])
            if not matches:
                continue
            right = xin[slot + 1 :]
            shift = sum(phi.degree_of(a) for a in right) - len(right)
            for yin, yh, cy, y_parity in matches:
                arity = p - 1 + len(yin)
                if max_arity is not None and arity > max_arity:
                    continue
                sign = -1 if (y_parity * shift) & 1 else 1
                key = (xin[:slot] + yin + right, xout, xh + yh)
                out[key] = out.get(key, 0) + sign * cx * cy
    return HochschildCochain(n, out)


def gerstenhaber(phi: HochschildCochain, psi: HochschildCochain, max_arity: Optional[int] = None) -> HochschildCochain:
    """[φ, ψ] = φ∘ψ − (−1)^{|φ||ψ|} ψ∘φ, extended bilinearly over parity parts."""
    total = HochschildCochain(phi.n)
    for p_phi, phi_part in phi.parity_parts().items():
        for p_psi, psi_part in psi.parity_parts().items():
            forward = insert(phi_part, psi_part, max_arity)
            backward = insert(psi_part, phi_part, max_arity)
            total = total + forward + (backward if (p_phi * p_psi) & 1 else -backward)
    return total


def hochschild_d(phi: HochschildCochain, max_arity: Optional[int] = None) -> HochschildCochain:
    """
    (∂φ)(a_{j+1}, …, a_1) against the wedge product of Λ(V):

    * merging a_{k+1}a_k inside φ, sign (−1)^{|φ| + |a_k|+…+|a_1| + k};
    * a_{j+1} ∧ φ(…), sign (−1)^{|φ| + |a_j|+…+|a_1| + j + 1};
    * φ(…) ∧ a_1, sign (−1)^{(|φ|−1)(|a_1|−1)+1}.
    """
    n = phi.n
    out: dict[CKey, Scalar] = {}

    def add(key: CKey, value: Scalar) -> None:
        out[key] = out.get(key, 0) + value

    for (xin, xout, xh), cx in phi.entries.items():
        p = len(xin)
        if max_arity is not None and p + 1 > max_arity:
            continue
        parity = phi.entry_parity(xin, xout)
        degrees = [phi.degree_of(a) for a in xin]
        for slot in range(p):
            x = xin[slot]
            right_degree = sum(degrees[slot + 1 :])
            k = p - slot
            sub = x
            while True:
                y, z = sub, x & ~sub
                s = merge_sign(y, z)
                if s:
                    exponent = parity + right_degree + popcount(z) + k
                    sign = -s if exponent & 1 else s
                    add((xin[:slot] + (y, z) + xin[slot + 1 :], xout, xh), sign * cx)
                if sub == 0:
                    break
                sub = (sub - 1) & x
        total_degree = sum(degrees)
        for a in all_masks(n):
            s = merge_sign(a, xout)
            if s:
                exponent = parity + total_degree + p + 1
                add(((a,) + xin, a | xout, xh), (-s if exponent & 1 else s) * cx)
            s = merge_sign(xout, a)
            if s:
                exponent = (parity - 1) * (popcount(a) - 1) + 1
                add((xin + (a,), xout | a, xh), (-s if exponent & 1 else s) * cx)
    return HochschildCochain(n, out)


def mc_residual(alpha: HochschildCochain, max_arity: int) -> HochschildCochain:
    """∂α + ½[α, α], restricted to arities ≤ ``max_arity``."""
    d_alpha = hochschild_d(alpha, max_arity)
    bracket = gerstenhaber(alpha, alpha, max_arity)
    return (d_alpha + bracket.scale(HALF)).truncate_arity(max_arity)


def ainfty_residual(mu: HochschildCochain, max_arity: int) -> HochschildCochain:
    """½[μ, μ] for a full structure μ (product included), restricted to arities ≤ ``max_arity``."""
    return gerstenhaber(mu, mu, max_arity).scale(HALF).truncate_arity(max_arity)


# ---------------------------------------------------------------------------------------------
# HKR


def hkr(phi: HochschildCochain) -> PolyVector:
    """Φ¹(φ)(ξ) = Σ_j φ^j(ξ, …, ξ) for the generic odd ξ = Σ v_k ξ_k, keeping the ħ-power."""
    n = phi.n
    singles = {bit(k): k for k in range(1, n + 1)}
    out: dict[tuple[MultiIndex, int, int], Fraction] = {}
    for (inputs, output, h), c in phi.entries.items():
        if not inputs or any(a not in singles for a in inputs):
            continue
        counts = [0] * n
        for a in inputs:
            counts[singles[a] - 1] += 1
        key = (tuple(counts), output, h)
        out[key] = out.get(key, 0) + c
    return PolyVector(n, out)
