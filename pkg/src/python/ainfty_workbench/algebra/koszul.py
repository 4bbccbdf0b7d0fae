"""
The Koszul dga B = End_{C[V]}(Ω(V)) and its deformation by a one-form γ.

B has two interchangeable presentations sharing the key layout ``(mono, row, col, hbar)``:

* :class:`BEndo` - a matrix over sparse polynomials indexed by covector masks; the entry at
  ``(row, col)`` is the coefficient of dv_row in the image of dv_col.
* :class:`BTensor` - terms ``f dv_β ⊗ ξ_θ`` of Ω(V) ⊗ Λ(V) with ``β = row`` and ``θ = col``.

``fβ⊗θ`` acts by δ ↦ ⟨θ, δ⟩ fβ, and ⟨ξ_S, dv_S⟩ = (−1)^{|S|(|S|−1)/2} on ascending words, so the
two presentations differ only by that sign on each term.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, TypeVar, Union

from algebra.exterior import format_mask, mask_order
from algebra.polynomials import HPoly, Poly
from algebra.scalars import (
    MultiIndex,
    add_index,
    add_weights,
    all_masks,
    bit,
    contraction_sign,
    format_monomial,
    format_rat,
    is_diagonal,
    merge_sign,
    monomial_key,
    monomial_weight,
    popcount,
    reversal_sign,
    unit_index,
)

logger = logging.getLogger(__name__)

BKey = tuple[MultiIndex, int, int, int]

T = TypeVar("T", bound="_BElement")


class _BElement:
    """Shared linear structure of the two presentations of B."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[BKey, Fraction]] = None) -> None:
        self.n = n
        self.terms: dict[BKey, Fraction] = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls: type[T], n: int) -> T:
        return cls(n)

    @classmethod
    def term(
        cls: type[T], n: int, mono: MultiIndex, row: int, col: int, coeff: Union[int, Fraction] = 1, hbar: int = 0
    ) -> T:
        return cls(n, {(tuple(mono), row, col, hbar): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.terms == other.terms  # type: ignore[attr-defined]

    __hash__ = None  # type: ignore[assignment]

    def __add__(self: T, other: T) -> T:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return type(self)(self.n, out)

    def __neg__(self: T) -> T:
        return type(self)(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self: T, other: T) -> T:
        return self + (-other)

    def scale(self: T, c: Union[int, Fraction]) -> T:
        if c == 1:
            return self
        return type(self)(self.n, {k: v * c for k, v in self.terms.items()})

    def parity_parts(self: T) -> dict[int, T]:
        """Split into ℤ/2-homogeneous components; a term's parity is |row| + |col| mod 2."""
        parts: dict[int, dict[BKey, Fraction]] = {}
        for k, c in self.terms.items():
            parts.setdefault((popcount(k[1]) + popcount(k[2])) & 1, {})[k] = c
        return {p: type(self)(self.n, t) for p, t in parts.items()}

    @property
    def parity(self) -> Optional[int]:
        """Common parity of all terms, ``None`` when mixed, 0 for the zero element."""
        parities = {(popcount(k[1]) + popcount(k[2])) & 1 for k in self.terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def max_sym_degree(self) -> int:
        return max((sum(k[0]) for k in self.terms), default=-1)

    def prune_sym(self: T, max_degree: int) -> T:
        """Drop terms whose Sym-degree exceeds ``max_degree``."""
        return type(self)(self.n, {k: c for k, c in self.terms.items() if sum(k[0]) <= max_degree})

    def grading_degrees(self) -> set[int]:
        """Set of regraded degrees 2·sym − |row| + |col| − 4·hbar occurring in the element."""
        return {2 * sum(m) - popcount(r) + popcount(c) - 4 * h for (m, r, c, h) in self.terms}

    def items(self) -> list[tuple[BKey, Fraction]]:
        return sorted(
            self.terms.items(),
            key=lambda item: (monomial_key(item[0][0]), mask_order(item[0][1]), mask_order(item[0][2]), item[0][3]),
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for (m, r, c, h), coeff in self.items():
            tag = f"*hbar^{h}" if h else ""
            chunks.append(
                f"{format_rat(coeff)}*{format_monomial(m)}*{format_mask(r, 'dv')}|{format_mask(c)}{tag}"
            )
        return " + ".join(chunks)


class BTensor(_BElement):
    """Element of Ω(V) ⊗ Λ(V): terms (coeff, f, dv_β, ξ_θ, ħ-tag)."""

    __slots__ = ()


class BEndo(_BElement):
    """ℂ[V]-linear endomorphism of Ω(V) as a matrix indexed by covector masks."""

    __slots__ = ()

    @classmethod
    def identity(cls, n: int) -> BEndo:
        zero = (0,) * n
        return cls(n, {(zero, c, c, 0): 1 for c in all_masks(n)})

    def entry(self, row: int, col: int) -> HPoly:
        return HPoly(self.n, {(m, h): c for (m, r, cc, h), c in self.terms.items() if r == row and cc == col})

    def by_col(self) -> dict[int, list[tuple[MultiIndex, int, int, Fraction]]]:
        index: dict[int, list[tuple[MultiIndex, int, int, Fraction]]] = {}
        for (m, r, c, h), coeff in self.terms.items():
            index.setdefault(c, []).append((m, r, h, coeff))
        return index

    def by_row(self) -> dict[int, list[tuple[MultiIndex, int, int, Fraction]]]:
        index: dict[int, list[tuple[MultiIndex, int, int, Fraction]]] = {}
        for (m, r, c, h), coeff in self.terms.items():
            index.setdefault(r, []).append((m, c, h, coeff))
        return index


# ---------------------------------------------------------------------------------------------
# the two presentations


def _pairing_sign(col: int) -> int:
    return reversal_sign(popcount(col))


def to_endo(b: BTensor) -> BEndo:
    return BEndo(b.n, {k: c * _pairing_sign(k[2]) for k, c in b.terms.items()})


def to_tensor(b: BEndo) -> BTensor:
    return BTensor(b.n, {k: c * _pairing_sign(k[2]) for k, c in b.terms.items()})


def mult_B(b2: BEndo, b1: BEndo, projected: bool = False) -> BEndo:
    """Composition b2∘b1; with ``projected`` only the (row ∅, Sym 0) block is formed."""
    out: dict[BKey, Fraction] = {}
    left = b2.by_col()
    for (m1, r1, c1, h1), x1 in b1.terms.items():
        if projected and any(m1):
            continue
        for m2, r2, h2, x2 in left.get(r1, ()):
            if projected and (r2 or any(m2)):
                continue
            key = (add_index(m1, m2), r2, c1, h1 + h2)
            out[key] = out.get(key, 0) + x1 * x2
    return BEndo(b1.n, out)


def tensor_product(x2: BTensor, x1: BTensor) -> BTensor:
    """(f₂β₂⊗θ₂)(f₁β₁⊗θ₁) = ⟨θ₂, β₁⟩ f₁f₂ β₂⊗θ₁, computed without the matrix presentation."""
    out: dict[BKey, Fraction] = {}
    by_beta: dict[int, list[tuple[MultiIndex, int, int, Fraction]]] = {}
    for (m1, r1, c1, h1), c in x1.terms.items():
        by_beta.setdefault(r1, []).append((m1, c1, h1, c))
    for (m2, r2, c2, h2), y2 in x2.terms.items():
        matches = by_beta.get(c2)
        if not matches:
            continue
        s = _pairing_sign(c2)
        for m1, c1, h1, y1 in matches:
            key = (add_index(m1, m2), r2, c1, h1 + h2)
            out[key] = out.get(key, 0) + s * y1 * y2
    return BTensor(x1.n, out)


# ---------------------------------------------------------------------------------------------
# one-forms


@dataclass(frozen=True)
class OneForm:
    """γ = Σ g_k dv_k with ħ-tagged polynomial components."""

    n: int
    components: tuple[HPoly, ...]

    @classmethod
    def from_strings(cls, components: Iterable[str], n: int) -> OneForm:
        return cls(n, tuple(HPoly.from_sympy(text, n) for text in components))

    @classmethod
    def zero(cls, n: int) -> OneForm:
        return cls(n, tuple(HPoly(n) for _ in range(n)))

    def negated(self) -> OneForm:
        return OneForm(self.n, tuple(-g for g in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def min_sym_degree(self) -> Optional[int]:
        degrees = [g.min_degree() for g in self.components if g]
        return min(degrees) if degrees else None

    def w_eff(self) -> HPoly:
        """W_eff = −γ(η) = −Σ_k g_k v_k, keeping ħ-tags."""
        out: dict[tuple[MultiIndex, int], Fraction] = {}
        for k, g in enumerate(self.components, start=1):
            e = unit_index(self.n, k)
            for (m, h), c in g.terms.items():
                key = (add_index(m, e), h)
                out[key] = out.get(key, 0) - c
        return HPoly(self.n, out)

    def is_weight_homogeneous(self) -> bool:
        """True when every term g dv_k has diagonal (ℤ/5)ⁿ weight, i.e. γ is G-equivariant."""
        for k, g in enumerate(self.components, start=1):
            ek = unit_index(self.n, k)
            for m, _h in g.terms:
                if not is_diagonal(add_weights(monomial_weight(m), monomial_weight(ek))):
                    return False
        return True

    def strings(self) -> list[str]:
        return [str(g) for g in self.components]

    def __str__(self) -> str:
        return " + ".join(f"({g})*dv{k}" for k, g in enumerate(self.components, start=1) if g) or "0"


def printed_gamma(n: int = 3) -> OneForm:
    """The printed components g_k = −v_{k+1}v_{k+2}/3 + ħ v_k⁴ (indices cyclic)."""
    if n != 3:
        raise ValueError("the printed one-form is defined for n = 3 only")
    return OneForm.from_strings(["-v2*v3/3 + hbar*v1**4", "-v3*v1/3 + hbar*v2**4", "-v1*v2/3 + hbar*v3**4"], 3)


def toy_gamma(n: int = 2) -> OneForm:
    """γ = Σ v_k² dv_k, with W_eff = −Σ v_k³."""
    return OneForm.from_strings([f"v{k}**2" for k in range(1, n + 1)], n)


def superpotential(n: int = 3) -> Poly:
    """W = −v₁v₂v₃ + v₁⁵ + v₂⁵ + v₃⁵."""
    return Poly.from_sympy("-v1*v2*v3 + v1**5 + v2**5 + v3**5", n)


def sign_normalize_gamma(gamma: OneForm, target: Poly) -> tuple[OneForm, int]:
    """Return (±γ, flip) such that W_eff of the result equals ``target`` once ħ is forgotten."""
    w = gamma.w_eff().forget_hbar()
    if w == target:
        return gamma, 1
    if -w == target:
        logger.info("[Koszul] flipping gamma so that W_eff matches the target superpotential")
        return gamma.negated(), -1
    raise ValueError(f"W_eff = {w} is not ±{target}")


# ---------------------------------------------------------------------------------------------
# differentials


def delta0(n: int) -> BEndo:
    """ι_η: dv_c ↦ Σ_{k∈c} (−1)^{#c below k} v_k dv_{c∖k}."""
    out: dict[BKey, Fraction] = {}
    for c in all_masks(n):
        for k in range(1, n + 1):
            s = contraction_sign(k, c)
            if s:
                out[(unit_index(n, k), c & ~bit(k), c, 0)] = Fraction(s)
    return BEndo(n, out)


def deformation_endo(gamma: OneForm) -> BEndo:
    """−γ∧· as a matrix: dv_c ↦ −Σ_k g_k dv_k ∧ dv_c."""
    n = gamma.n
    out: dict[BKey, Fraction] = {}
    for c in all_masks(n):
        for k, g in enumerate(gamma.components, start=1):
            s = merge_sign(bit(k), c)
            if not s:
                continue
            for (m, h), coeff in g.terms.items():
                key = (m, c | bit(k), c, h)
                out[key] = out.get(key, 0) - s * coeff
    return BEndo(n, out)


def delta_deformed(gamma: OneForm) -> BEndo:
    """δ̃ = ι_η − γ∧·."""
    return delta0(gamma.n) + deformation_endo(gamma)


class _IndexedOdd:
    """An odd operator X with cached row/column indices for graded commutators [X, b]."""

    def __init__(self, x: BEndo) -> None:
        self.x = x
        self.cols = x.by_col()
        self.rows = x.by_row()

    def commutator(self, b: BEndo) -> BEndo:
        """X∘b − (−1)^{|b|} b∘X, termwise in the parity of b."""
        out: dict[BKey, Fraction] = {}
        for (mb, rb, cb, hb), cf in b.terms.items():
            odd = (popcount(rb) + popcount(cb)) & 1
            # X∘b
            for mx, rx, hx, xc in self.cols.get(rb, ()):
                key = (add_index(mb, mx), rx, cb, hb + hx)
                out[key] = out.get(key, 0) + xc * cf
            # −(−1)^{|b|} b∘X
            sign = 1 if odd else -1
            for mx, cx, hx, xc in self.rows.get(cb, ()):
                key = (add_index(mb, mx), rb, cx, hb + hx)
                out[key] = out.get(key, 0) + sign * xc * cf
        return BEndo(b.n, out)


class KoszulDifferentials:
    """∂ and ∂̃ − ∂ on B for a fixed one-form, with the operator matrices built once."""

    def __init__(self, gamma: OneForm) -> None:
        self.gamma = gamma
        self.n = gamma.n
        self._delta0 = _IndexedOdd(delta0(self.n))
        self._deformation = _IndexedOdd(deformation_endo(gamma))

    def partial(self, b: BEndo) -> BEndo:
        return self._delta0.commutator(b)

    def deformation(self, b: BEndo) -> BEndo:
        return self._deformation.commutator(b)

    def partial_tilde(self, b: BEndo) -> BEndo:
        return self.partial(b) + self.deformation(b)


def partial_B(b: BEndo) -> BEndo:
    """∂b = δ₀∘b − (−1)^{|b|} b∘δ₀."""
    return _IndexedOdd(delta0(b.n)).commutator(b)


def deformation_part(gamma: OneForm) -> Callable[[BEndo], BEndo]:
    """b ↦ (∂̃ − ∂)b, the graded commutator with −γ∧·."""
    op = _IndexedOdd(deformation_endo(gamma))
    return op.commutator


# ---------------------------------------------------------------------------------------------
# displayed tensor formulas


def partial_tensor_formula(x: BTensor) -> BTensor:
    """∂(fβ⊗θ) = Σ_k v_k f ι_{ξ_k}β⊗θ + (−1)^{|β|−1} v_k fβ⊗ξ_k∧θ, evaluated termwise."""
    n = x.n
    out: dict[BKey, Fraction] = {}
    for (m, beta, theta, h), c in x.terms.items():
        outer = -1 if popcount(beta) % 2 == 0 else 1
        for k in range(1, n + 1):
            mk = add_index(m, unit_index(n, k))
            s = contraction_sign(k, beta)
            if s:
                key = (mk, beta & ~bit(k), theta, h)
                out[key] = out.get(key, 0) + s * c
            s = merge_sign(bit(k), theta)
            if s:
                key = (mk, beta, theta | bit(k), h)
                out[key] = out.get(key, 0) + outer * s * c
    return BTensor(n, out)


def deformation_tensor_formula(gamma: OneForm, x: BTensor) -> BTensor:
    """(∂̃−∂)(fβ⊗θ) = −fγ∧β⊗θ + (−1)^{|β|−1} Σ_k g_k fβ⊗ι_{dv_k}θ, evaluated termwise."""
    n = x.n
    out: dict[BKey, Fraction] = {}
    for (m, beta, theta, h), c in x.terms.items():
        outer = -1 if popcount(beta) % 2 == 0 else 1
        for k, g in enumerate(gamma.components, start=1):
            s1 = merge_sign(bit(k), beta)
            s2 = contraction_sign(k, theta)
            for (mg, hg), cg in g.terms.items():
                mm = add_index(m, mg)
                if s1:
                    key = (mm, beta | bit(k), theta, h + hg)
                    out[key] = out.get(key, 0) - s1 * cg * c
                if s2:
                    key = (mm, beta, theta & ~bit(k), h + hg)
                    out[key] = out.get(key, 0) + outer * s2 * cg * c
    return BTensor(n, out)
