"""
A∞-structures on Λ(V): container, Maurer-Cartan translation, relation and grading checks,
group conjugation, and the semidirect product with a finite diagonal group.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

from algebra.exterior import format_mask
from algebra.scalars import Cyc5, Scalar, add_weights, is_diagonal, pairing, popcount, sub_weights, xi_weight
from services.groups import GroupSpec
from services.hochschild import CKey, HochschildCochain, ainfty_residual, hkr, mc_residual, product_cochain
from services.polyvector import PolyVector
from utils.errors import EquivarianceError

logger = logging.getLogger(__name__)

INDEX_LAW = (6, -3, 4)

MAX_REPORTED_FAILURES = 20


def format_key(key: CKey, n: Optional[int] = None) -> str:
    inputs, output, h = key

    def show(mask: int) -> str:
        if n is not None and mask >> n:
            return f"({format_mask(mask & ((1 << n) - 1))},g{mask >> n})"
        return format_mask(mask)

    return f"mu^{len(inputs)}_{h}({', '.join(show(a) for a in inputs)}) -> {show(output)}"


class AInftyStructure:
    """Structure constants μ^d_k on basis words of Λ(V), product included."""

    def __init__(self, n: int, entries: Optional[Mapping[CKey, Scalar]] = None, label: str = "") -> None:
        self.n = n
        self.entries: dict[CKey, Scalar] = {k: c for k, c in (entries or {}).items() if c}
        self.label = label

    @classmethod
    def wedge(cls, n: int) -> AInftyStructure:
        return cls(n, product_cochain(n).entries, label="wedge")

    @classmethod
    def from_transfer(cls, result) -> AInftyStructure:  # noqa: ANN001
        return cls(result.n, result.entries, label="transferred")

    @property
    def max_arity(self) -> int:
        return max((len(k[0]) for k in self.entries), default=0)

    def table(self, d: int, k: int) -> dict[tuple[tuple[int, ...], int], Scalar]:
        return {(inputs, out): c for (inputs, out, h), c in self.entries.items() if len(inputs) == d and h == k}

    def cochain(self) -> HochschildCochain:
        return HochschildCochain(self.n, self.entries)

    def with_entry(self, key: CKey, delta: Scalar) -> AInftyStructure:
        entries = dict(self.entries)
        entries[key] = entries.get(key, 0) + delta
        return AInftyStructure(self.n, entries, label=f"{self.label}+mutation")

    def restricted(self, max_arity: int) -> AInftyStructure:
        return AInftyStructure(self.n, {k: c for k, c in self.entries.items() if len(k[0]) <= max_arity}, self.label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AInftyStructure):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"AInftyStructure(n={self.n}, {len(self.entries)} constants, label={self.label!r})"


def to_mc(mu: AInftyStructure) -> HochschildCochain:
    """α = μ − m: the product cochain is removed from the arity-2, ħ⁰ part."""
    return mu.cochain() - product_cochain(mu.n)


def from_mc(alpha: HochschildCochain, label: str = "") -> AInftyStructure:
    return AInftyStructure(alpha.n, (alpha + product_cochain(alpha.n)).entries, label=label)


def hkr_summary(mu: AInftyStructure) -> dict[tuple[int, int], PolyVector]:
    """HKR image of each nonzero (arity, ħ-power) block; blocks with zero image are left out."""
    blocks: dict[tuple[int, int], dict[CKey, Scalar]] = {}
    for key, c in mu.entries.items():
        blocks.setdefault((len(key[0]), key[2]), {})[key] = c
    summary = {}
    for block, entries in sorted(blocks.items()):
        image = hkr(HochschildCochain(mu.n, entries))
        if image:
            summary[block] = image
    return summary


# ---------------------------------------------------------------------------------------------
# reports


@dataclass
class AInftyReport:
    max_arity: int
    checked_constants: int = 0
    failures: list[str] = field(default_factory=list)
    failing_arities: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> str:
        return self.failures[0] if self.failures else ""

    def summary(self) -> str:
        if self.passed:
            return (
                f"PASS: A-infinity relations hold through arity {self.max_arity} ({self.checked_constants} constants)"
            )
        return f"FAIL: relations violated in arities {self.failing_arities}; first: {self.first_failure}"


@dataclass
class GradingReport:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}: {self.name} law on {self.checked} constants, {len(self.violations)} violations"


def _residual_report(
    residual: HochschildCochain, max_arity: int, checked: int, n: Optional[int] = None
) -> AInftyReport:
    report = AInftyReport(max_arity=max_arity, checked_constants=checked)
    for key, c in residual.sorted_entries():
        if len(report.failures) < MAX_REPORTED_FAILURES:
            report.failures.append(f"{format_key(key, n)}: residual {c}")
    report.failing_arities = residual.arities()
    return report


def verify_ainfty(mu: AInftyStructure, max_arity: int) -> AInftyReport:
    """∂α + ½[α, α] = 0 through ``max_arity`` for α = to_mc(μ)."""
    alpha = to_mc(mu).truncate_arity(max_arity)
    residual = mc_residual(alpha, max_arity)
    report = _residual_report(residual, max_arity, len(mu.entries))
    logger.info(f"[AInfty] {mu.label or 'structure'}: {report.summary()}")
    return report


def check_weights(mu: AInftyStructure, group: Optional[GroupSpec] = None) -> GradingReport:
    """Σ weight(inputs) − weight(output) must be invisible to the group (diagonal when no group is given)."""
    report = GradingReport("weight")
    n = mu.n
    for (inputs, out, h), _c in sorted(mu.entries.items()):
        report.checked += 1
        total = add_weights(*(xi_weight(a, n) for a in inputs)) if inputs else (0,) * n
        delta = sub_weights(total, xi_weight(out, n))
        ok = group.is_invariant(delta) if group is not None else is_diagonal(delta)
        if not ok:
            report.violations.append(f"{format_key((inputs, out, h))}: weight defect {delta}")
    return report


def check_index_degrees(mu: AInftyStructure, law: Sequence[int] = INDEX_LAW) -> GradingReport:
    """index(output) − Σ index(inputs) = c₀ + c₁·d + c₂·k, by default 6 − 3d + 4k."""
    c0, c1, c2 = law
    report = GradingReport("index")
    for (inputs, out, h), _c in sorted(mu.entries.items()):
        report.checked += 1
        d = len(inputs)
        shift = popcount(out) - sum(popcount(a) for a in inputs)
        expected = c0 + c1 * d + c2 * h
        if shift != expected:
            report.violations.append(f"{format_key((inputs, out, h))}: index shift {shift}, expected {expected}")
    return report


def check_low_order(mu: AInftyStructure) -> GradingReport:
    """
    μ¹ = 0, μ²_k = 0 for k > 0, μ²₀ is the wedge product on every input pair that occurs, and the
    α⁴₁ table is empty.
    """
    report = GradingReport("low-order")
    wedge = product_cochain(mu.n).entries
    seen_pairs = set()
    for key, c in sorted(mu.entries.items()):
        inputs, _out, h = key
        d = len(inputs)
        if d == 1 or (d == 2 and h > 0) or (d == 4 and h == 1):
            report.checked += 1
            report.violations.append(f"{format_key(key)}: expected 0, got {c}")
        elif d == 2:
            report.checked += 1
            seen_pairs.add(inputs)
            if wedge.get(key, 0) != c:
                report.violations.append(f"{format_key(key)}: wedge product gives {wedge.get(key, 0)}, got {c}")
    for key, c in sorted(wedge.items()):
        if key[0] in seen_pairs and key not in mu.entries:
            report.violations.append(f"{format_key(key)}: wedge product gives {c}, missing")
    return report


def conjugate(mu: AInftyStructure, element: Sequence[int]) -> AInftyStructure:
    """g·μ(g⁻¹·, …, g⁻¹·) for a diagonal group element given as a covector."""
    n = mu.n
    entries: dict[CKey, Scalar] = {}
    for (inputs, out, h), c in mu.entries.items():
        total = add_weights(*(xi_weight(a, n) for a in inputs)) if inputs else (0,) * n
        power = pairing(element, sub_weights(xi_weight(out, n), total))
        entries[(inputs, out, h)] = Cyc5.coerce(c) * Cyc5.zeta(power)
    return AInftyStructure(n, entries, label=f"{mu.label}^g")


def is_equivariant(mu: AInftyStructure, elements: Sequence[Sequence[int]]) -> bool:
    return all(conjugate(mu, g) == mu for g in elements)


# ---------------------------------------------------------------------------------------------
# semidirect product


@dataclass
class SemidirectStructure:
    """A ⋊ Γ with basis words (a, g) packed as ``index(g) · 2ⁿ + mask(a)``."""

    base: AInftyStructure
    group: GroupSpec
    cochain: HochschildCochain

    @property
    def n(self) -> int:
        return self.base.n

    def pack(self, mask: int, element_index: int) -> int:
        return (element_index << self.n) | mask

    def unpack(self, key: int) -> tuple[int, int]:
        return key & ((1 << self.n) - 1), key >> self.n

    def verify(self, max_arity: int) -> AInftyReport:
        residual = ainfty_residual(self.cochain, max_arity)
        report = _residual_report(residual, max_arity, len(self.cochain.entries), self.n)
        logger.info(f"[AInfty] semidirect product of order {self.group.order}: {report.summary()}")
        return report


def semidirect(mu: AInftyStructure, group: GroupSpec, max_arity: Optional[int] = None) -> SemidirectStructure:
    """
    μ^d((a_d,g_d), …, (a_1,g_1)) = (μ^d(a_d, g_d·a_{d−1}, g_dg_{d−1}·a_{d−2}, …, g_d⋯g_2·a_1), g_d⋯g_1),
    where g acts on ξ_S by ζ^{⟨g, e_S⟩}.
    """
    n = mu.n
    violations = check_weights(mu, group).violations
    if violations:
        raise EquivarianceError(f"structure is not equivariant for the group: {violations[0]}")
    elements = group.elements
    order = len(elements)
    entries: dict[CKey, Scalar] = {}
    for (inputs, out, h), c in mu.entries.items():
        d = len(inputs)
        if max_arity is not None and d > max_arity:
            continue
        weights = [xi_weight(a, n) for a in inputs]
        for word in itertools.product(range(order), repeat=d):
            prefix = (0,) * n
            power = 0
            for t in range(d):
                power += pairing(prefix, weights[t])
                prefix = add_weights(prefix, elements[word[t]])
            coeff = Cyc5.coerce(c) * Cyc5.zeta(power)
            key_inputs = tuple((g << n) | a for g, a in zip(word, inputs))
            key_out = (group.index_of(prefix) << n) | out
            entries[(key_inputs, key_out, h)] = coeff
    logger.info(f"[AInfty] semidirect product: {len(entries)} constants over a group of order {order}")
    return SemidirectStructure(mu, group, HochschildCochain(n, entries))

