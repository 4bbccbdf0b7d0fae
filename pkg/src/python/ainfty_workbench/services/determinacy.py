"""
Finite determinacy: truncated power series, coordinate changes, membership in the Jacobian ideal
of W, and the step-by-step reduction of an odd invariant W′ ≡ W mod F₇ to W itself.

Every linear problem is solved exactly over ℚ, degree by degree, with free variables set to zero.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from algebra.koszul import superpotential
from algebra.linear import solve_exact
from algebra.polynomials import Poly
from algebra.scalars import (
    MultiIndex,
    add_index,
    add_weights,
    monomial_key,
    monomial_weight,
    monomials_of_degree,
    monomials_up_to,
    sub_weights,
    unit_index,
    xi_weight,
)
from services.groups import GroupSpec
from services.polyvector import PolyVector, koszul_dW
from utils.errors import DeterminacyError

logger = logging.getLogger(__name__)

FULL_MASK_3 = 0b111


@dataclass(frozen=True)
class TruncatedSeries:
    """A power series known modulo F_order; terms of degree ≥ order are discarded."""

    poly: Poly
    order: int

    @classmethod
    def of(cls, poly: Poly, order: int) -> TruncatedSeries:
        return cls(poly.truncate(order), order)

    @property
    def n(self) -> int:
        return self.poly.n

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        order = min(self.order, other.order)
        return TruncatedSeries.of(self.poly + other.poly, order)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        order = min(self.order, other.order)
        return TruncatedSeries.of(self.poly - other.poly, order)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        order = min(self.order, other.order)
        return TruncatedSeries(self.poly.mul_truncated(other.poly, order), order)

    def valuation(self) -> Optional[int]:
        """Lowest degree present, ``None`` for the zero series."""
        return self.poly.order()

    def in_filtration(self, r: int) -> bool:
        v = self.valuation()
        return v is None or v >= r

    def is_zero(self) -> bool:
        return not self.poly


@dataclass(frozen=True)
class CoordChange:
    """v_k ↦ v_k + f_k with every f_k in F₂, all arithmetic modulo F_order."""

    components: tuple[Poly, ...]
    order: int

    def __post_init__(self) -> None:
        for k, f in enumerate(self.components, start=1):
            low = f.order()
            if low is not None and low < 2:
                raise DeterminacyError(f"coordinate change component f_{k} = {f} is not in F_2")

    @classmethod
    def identity(cls, n: int, order: int) -> CoordChange:
        return cls(tuple(Poly.zero(n) for _ in range(n)), order)

    @property
    def n(self) -> int:
        return len(self.components)

    def images(self) -> list[Poly]:
        return [Poly.variable(self.n, k) + f for k, f in enumerate(self.components, start=1)]

    def is_identity(self) -> bool:
        return not any(self.components)

    def compose(self, other: CoordChange) -> CoordChange:
        """The change v ↦ self(other(v)): substituting s∘(self∘other) = (s∘self)∘other."""
        order = min(self.order, other.order)
        new = []
        for k, image in enumerate(self.images(), start=1):
            new.append(image.substitute(other.images(), order) - Poly.variable(self.n, k))
        return CoordChange(tuple(f.truncate(order) for f in new), order)

    def is_equivariant(self, group: GroupSpec) -> bool:
        return self == equivariant_average(self, group)

    def __str__(self) -> str:
        parts = (f"v{k} -> v{k} + ({f})" if f else f"v{k} -> v{k}" for k, f in enumerate(self.components, start=1))
        return ", ".join(parts)


def substitute(s: TruncatedSeries | Poly, change: CoordChange, order: Optional[int] = None) -> Poly:
    """s(v₁ + f₁, …, v_n + f_n) modulo F_order (default: the smaller of the two truncations)."""
    if isinstance(s, TruncatedSeries):
        poly, limit = s.poly, min(s.order, change.order)
    else:
        poly, limit = s, change.order
    if order is not None:
        limit = min(limit, order)
    return poly.substitute(change.images(), limit)


def equivariant_average(change: CoordChange, group: GroupSpec) -> CoordChange:
    """Keep the terms of f_k whose weight matches v_k up to an invariant: the group average for diagonal G."""
    n = change.n
    out = []
    for k, f in enumerate(change.components, start=1):
        target = monomial_weight(unit_index(n, k))
        kept = {m: c for m, c in f.terms.items() if group.is_invariant(sub_weights(monomial_weight(m), target))}
        out.append(Poly(n, kept))
    return CoordChange(tuple(out), change.order)


def is_invariant_poly(f: Poly, group: GroupSpec) -> bool:
    return all(group.is_invariant(monomial_weight(m)) for m in f.terms)


# ---------------------------------------------------------------------------------------------
# ideal membership


@dataclass
class MembershipCertificate:
    """f = Σ q_k ∂_kW + remainder with remainder ∈ F_order."""

    q: tuple[Poly, ...]
    remainder: Poly
    order: int

    def check(self, f: Poly, w: Poly) -> bool:
        total = self.remainder
        for k, qk in enumerate(self.q, start=1):
            total = total + qk * w.derivative(k)
        return total == f and self.remainder.truncate(self.order) == Poly.zero(f.n)


def _membership_system(f: Poly, partials: Sequence[Poly], order: int, q_order: int, upto: int):
    n = f.n
    columns: list[tuple[int, MultiIndex]] = []
    for m in monomials_up_to(n, order - 3, q_order):
        for k in range(1, n + 1):
            columns.append((k, m))
    columns.sort(key=lambda col: (sum(col[1]), col[0], monomial_key(col[1])))
    rows: dict[MultiIndex, dict[tuple[int, MultiIndex], Fraction]] = {}
    for col in columns:
        k, m = col
        for mono, c in partials[k - 1].terms.items():
            target = add_index(m, mono)
            if sum(target) < upto:
                row = rows.setdefault(target, {})
                row[col] = row.get(col, 0) + c
    for mono in f.terms:
        if sum(mono) < upto:
            rows.setdefault(mono, {})
    ordered = sorted(rows, key=monomial_key)
    return columns, [rows[m] for m in ordered], [f.coefficient(m) for m in ordered]


def ideal_membership(f: Poly, w: Poly, order: int, q_order: int = 0) -> MembershipCertificate:
    """
    Solve f ≡ Σ q_k ∂_kW mod F_order with q_k supported in degrees q_order … order − 3.

    Raises:
        DeterminacyError: naming the lowest degree at which no such q exists.
    """
    n = f.n
    partials = [w.derivative(k) for k in range(1, n + 1)]
    columns, rows, rhs = _membership_system(f, partials, order, q_order, order)
    solution = solve_exact(rows, rhs, columns)
    if solution is None:
        for degree in range(order):
            cols, part_rows, part_rhs = _membership_system(f, partials, order, q_order, degree + 1)
            if solve_exact(part_rows, part_rhs, cols) is None:
                raise DeterminacyError(
                    f"{f} is not in the Jacobian ideal modulo F_{order}: infeasible in degree {degree}"
                )
        raise DeterminacyError(f"{f} is not in the Jacobian ideal modulo F_{order}")
    q = []
    for k in range(1, n + 1):
        q.append(Poly(n, {m: v for (kk, m), v in solution.values.items() if kk == k and v}))
    remainder = f
    for k, qk in enumerate(q, start=1):
        remainder = remainder - qk * partials[k - 1]
    logger.debug(f"[Determinacy] membership of {f} mod F_{order}: rank {solution.rank}")
    return MembershipCertificate(tuple(q), remainder, order)


# ---------------------------------------------------------------------------------------------
# reduction to W


@dataclass
class ReductionStep:
    agreement_order: int
    q_order: int
    step: CoordChange


@dataclass
class ReductionCertificate:
    change: CoordChange
    residual: Poly
    order: int
    steps: list[ReductionStep] = field(default_factory=list)
    gamma3: Optional[PolyVector] = None

    @property
    def passed(self) -> bool:
        return not self.residual

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}: {len(self.steps)} reduction steps, residual mod F_{self.order} = {self.residual}"


def _check_reduction_input(w_prime: Poly, w: Poly, group: GroupSpec) -> None:
    if not w_prime.is_odd():
        raise DeterminacyError(f"W' must be odd, got {w_prime}")
    if not is_invariant_poly(w_prime, group):
        raise DeterminacyError(f"W' is not invariant under the group: {w_prime}")
    diff = w_prime - w
    low = diff.order()
    if low is not None and low < 7:
        raise DeterminacyError(f"W' differs from W below degree 7: {diff.truncate(7)}")


def reduce_to_W(
    w_prime: Poly,
    order: int,
    w: Optional[Poly] = None,
    group: Optional[GroupSpec] = None,
    a2: Optional[PolyVector] = None,
) -> ReductionCertificate:
    """
    Build an equivariant coordinate change c with W′∘c ≡ W mod F_order.

    Each step kills the lowest-order disagreement r with q of degree r − 2 (or from r − 4 when that
    is infeasible), then re-substitutes and demands that the agreement order strictly grows. When a
    Λ²-part ``a2`` is supplied, a Λ³ field γ³ with ι_{dW}γ³ = −a2 is solved for as well.
    """
    w = w if w is not None else superpotential(w_prime.n)
    group = group if group is not None else GroupSpec.default_g()
    _check_reduction_input(w_prime, w, group)

    total = CoordChange.identity(w_prime.n, order)
    steps: list[ReductionStep] = []
    current = w_prime.truncate(order)
    target = w.truncate(order)
    while True:
        diff = current - target
        r = diff.order()
        if r is None:
            break
        certificate = None
        used = r - 2
        for q_order in (r - 2, r - 4):
            try:
                certificate = ideal_membership(diff, w, r + 1, q_order=max(q_order, 0))
                used = q_order
                break
            except DeterminacyError:
                logger.debug(f"[Determinacy] order {r}: no solution with q from degree {q_order}")
        if certificate is None:
            stuck = diff.homogeneous_part(r)
            raise DeterminacyError(f"reduction stalled at order {r}: the disagreement {stuck} is not in the ideal")
        step = equivariant_average(CoordChange(tuple(-qk for qk in certificate.q), order), group)
        total = total.compose(step)
        current = substitute(w_prime, total, order)
        new_r = (current - target).order()
        if new_r is not None and new_r <= r:
            raise DeterminacyError(f"reduction step at order {r} did not raise the agreement order")
        steps.append(ReductionStep(r, used, step))
        logger.info(f"[Determinacy] agreement order {r} -> {new_r if new_r is not None else order}")

    residual = (substitute(w_prime, total, order) - w).truncate(order)
    gamma3 = solve_two_form(a2, w, order, group) if a2 is not None else None
    certificate = ReductionCertificate(total, residual, order, steps, gamma3)
    logger.info(f"[Determinacy] {certificate.summary()}")
    return certificate


# ---------------------------------------------------------------------------------------------
# the Λ² part


def solve_two_form(a2: PolyVector, w: Poly, order: int, group: Optional[GroupSpec] = None) -> PolyVector:
    """
    Find γ³ = c·ξ₁∧ξ₂∧ξ₃ with ι_{dW}γ³ ≡ −a2 mod F_order, after checking ι_{dW}a2 ≡ 0.

    Raises:
        DeterminacyError: when a2 is not a cocycle or no γ³ exists at this order.
    """
    n = a2.n
    if n != 3:
        raise DeterminacyError("two-form solving is implemented for n = 3")
    if any(mask.bit_count() != 2 for _m, mask, _h in a2.terms):
        raise DeterminacyError("a2 must lie in Sym ⊗ Λ²")
    if koszul_dW(a2, w).truncate(order):
        raise DeterminacyError(f"a2 is not a cocycle for the contraction with dW modulo F_{order}")
    columns = list(monomials_up_to(n, order - 3))
    rows: dict[tuple[MultiIndex, int], dict[MultiIndex, Fraction]] = {}
    for m in columns:
        image = koszul_dW(PolyVector.term(n, m, FULL_MASK_3), w)
        for (mono, mask, _h), c in image.terms.items():
            if sum(mono) < order:
                rows.setdefault((mono, mask), {})[m] = c
    target: dict[tuple[MultiIndex, int], Fraction] = {}
    for (mono, mask, _h), c in a2.terms.items():
        if sum(mono) < order:
            target[(mono, mask)] = target.get((mono, mask), 0) - c
            rows.setdefault((mono, mask), {})
    keys = sorted(rows, key=lambda key: (key[1], monomial_key(key[0])))
    solution = solve_exact([rows[k] for k in keys], [target.get(k, Fraction(0)) for k in keys], columns)
    if solution is None:
        raise DeterminacyError(f"no Λ³ preimage of a2 modulo F_{order}")
    gamma3 = PolyVector(n, {(m, FULL_MASK_3, 0): v for m, v in solution.values.items() if v})
    if group is not None:
        top = xi_weight(FULL_MASK_3, n)
        gamma3 = PolyVector(
            n,
            {
                key: c
                for key, c in gamma3.terms.items()
                if group.is_invariant(add_weights(monomial_weight(key[0]), top))
            },
        )
    return gamma3


@dataclass
class ExactnessReport:
    samples: int
    solved: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.solved == self.samples


def exactness_sample(w: Poly, order: int, rng: random.Random, samples: int = 10, terms: int = 4) -> ExactnessReport:
    """
    Sampled check that every ι_{dW}-cocycle in Sym ⊗ Λ² is a boundary modulo F_order: random Λ³
    fields x give cocycles a = ι_{dW}x, and each must be re-solved with zero residual.
    """
    n = w.n
    report = ExactnessReport(samples)
    candidates = list(monomials_up_to(n, max(order - 3, 0)))
    for index in range(samples):
        chosen = rng.sample(candidates, min(terms, len(candidates)))
        x = PolyVector(n, {(m, FULL_MASK_3, 0): Fraction(rng.randint(-3, 3) or 1) for m in chosen})
        a2 = koszul_dW(x, w).truncate(order)
        try:
            gamma3 = solve_two_form(a2, w, order)
        except DeterminacyError as exc:
            report.failures.append(f"sample {index}: {exc}")
            continue
        if (koszul_dW(gamma3, w) + a2).truncate(order):
            report.failures.append(f"sample {index}: residual does not vanish")
            continue
        report.solved += 1
    logger.info(f"[Determinacy] exactness sample: {report.solved}/{samples} cocycles re-solved")
    return report


def invariant_monomials(group: GroupSpec, degrees: Sequence[int]) -> list[MultiIndex]:
    out = []
    for degree in degrees:
        out.extend(m for m in monomials_of_degree(group.n, degree) if group.is_invariant(monomial_weight(m)))
    return sorted(out, key=monomial_key)


def random_invariant_perturbation(
    rng: random.Random,
    group: Optional[GroupSpec] = None,
    degrees: Sequence[int] = (7, 9, 11, 13),
    terms: int = 3,
) -> Poly:
    """Random odd G-invariant element of F₇ with small integer coefficients."""
    group = group if group is not None else GroupSpec.default_g()
    pool = invariant_monomials(group, [d for d in degrees if d % 2 == 1])
    chosen = rng.sample(pool, min(terms, len(pool)))
    return Poly(group.n, {m: rng.choice([-2, -1, 1, 2]) for m in chosen})
