"""
Floer cohomology data of the genus-two curve's orbifold Lagrangian, shipped as a static table, and
its transport into Λ(V) through the signed generator dictionary.

The table lists μ² on the eight generators, the constant μ³₀ and the ħ-diagonal μ⁵₁; every pair
of generators absent from the μ² block multiplies to zero.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Optional

from algebra.exterior import format_mask, mu2_constant
from algebra.scalars import (
    WEIGHT_MODULUS,
    Weight,
    is_diagonal,
    mask_from_indices,
    parse_rat,
    popcount,
    sub_weights,
    xi_weight,
)
from services.ainfty_structure import AInftyStructure, check_index_degrees, check_weights, format_key
from services.hochschild import hkr
from services.polyvector import PolyVector
from utils.errors import ConfigError
from utils.utilities import Utilities

logger = logging.getLogger(__name__)

FLOER_TABLE_FILE = "floer_tables.json"

TARGET_ARITIES = range(2, 6)

# dictionary entry: (sign, mask of the Λ(V) basis word)
Dictionary = dict[str, tuple[int, int]]


@dataclass(frozen=True)
class FloerGenerator:
    name: str
    weight: Weight
    index: int

    @property
    def parity(self) -> int:
        return self.index % 2


@dataclass(frozen=True)
class FloerProduct:
    inputs: tuple[str, ...]
    output: str
    hbar: int
    coeff: Fraction

    @property
    def d(self) -> int:
        return len(self.inputs)


@dataclass
class FloerTables:
    version: int
    generators: dict[str, FloerGenerator]
    products: list[FloerProduct]

    def block(self, d: int, k: int) -> list[FloerProduct]:
        return [p for p in self.products if p.d == d and p.hbar == k]


def load_floer_data(text: Optional[str] = None) -> tuple[FloerTables, Dictionary]:
    """Parse the JSON table (the vendored one by default) into tables and dictionary."""
    raw: Mapping[str, Any] = json.loads(text if text is not None else Utilities().load_text(FLOER_TABLE_FILE))
    generators = {
        g["name"]: FloerGenerator(g["name"], tuple(int(w) % WEIGHT_MODULUS for w in g["weight"]), int(g["index"]))
        for g in raw["generators"]
    }
    dictionary: Dictionary = {}
    for name, (sign, indices) in raw["dictionary"].items():
        if name not in generators:
            raise ConfigError(f"dictionary entry for unknown generator {name!r}")
        if sign not in (1, -1):
            raise ConfigError(f"dictionary sign for {name!r} must be ±1, got {sign}")
        dictionary[name] = (int(sign), mask_from_indices(indices))
    products = []
    for record in raw["products"]:
        inputs = tuple(record["inputs"])
        if len(inputs) != int(record["d"]):
            raise ConfigError(f"product record {record} has {len(inputs)} inputs but d = {record['d']}")
        for name in (*inputs, record["output"]):
            if name not in generators:
                raise ConfigError(f"product record {record} uses unknown generator {name!r}")
        products.append(FloerProduct(inputs, record["output"], int(record["k"]), parse_rat(record["coeff"])))
    logger.debug(f"[Floer] loaded {len(generators)} generators and {len(products)} products")
    return FloerTables(int(raw["version"]), generators, products), dictionary


def transport(tables: FloerTables, dictionary: Dictionary, n: int = 3) -> AInftyStructure:
    """Rewrite each constant on Λ(V) words: coefficient c·s_out·Π s_in."""
    entries: dict = {}
    for product in tables.products:
        sign, out_mask = dictionary[product.output]
        masks = []
        for name in product.inputs:
            s, mask = dictionary[name]
            sign *= s
            masks.append(mask)
        key = (tuple(masks), out_mask, product.hbar)
        entries[key] = entries.get(key, 0) + sign * product.coeff
    return AInftyStructure(n, entries, label="floer")


def mutate(tables: FloerTables, position: int, factor: Fraction = Fraction(-1)) -> FloerTables:
    """Copy of the tables with one product coefficient multiplied by ``factor``."""
    products = list(tables.products)
    products[position] = replace(products[position], coeff=products[position].coeff * factor)
    return FloerTables(tables.version, dict(tables.generators), products)


@dataclass
class FloerReport:
    checked_pairs: int = 0
    checked_constants: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: {self.checked_pairs} product pairs, {self.checked_constants} constants graded, "
            f"{len(self.failures)} failures"
        )


def hkr_targets(n: int = 3) -> dict[tuple[int, int], PolyVector]:
    """−v₁v₂v₃ at (3, 0) and v₁⁵ + … + v_n⁵ at (5, 1)."""
    cubic = PolyVector.term(n, (1,) * n, 0, Fraction(-1))
    quintic = PolyVector(n, {(tuple(5 if i == k else 0 for i in range(n)), 0, 1): Fraction(1) for k in range(n)})
    return {(3, 0): cubic, (5, 1): quintic}


def hkr_mismatches(
    summary: Mapping[tuple[int, int], PolyVector], hkr_sign: int = 1, n: int = 3, arities: range = TARGET_ARITIES
) -> list[str]:
    """Target classes with arity in ``arities`` that the HKR summary, times ``hkr_sign``, fails to reproduce."""
    mismatches = []
    for (d, k), target in hkr_targets(n).items():
        if d not in arities:
            continue
        image = summary.get((d, k))
        got = image.scale(Fraction(hkr_sign)) if image is not None else PolyVector(n)
        if got != target:
            mismatches.append(f"HKR of mu^{d}_{k}: got {got}, expected {target}")
    return mismatches


def _arity_hbar_part(mu: AInftyStructure, d: int, k: int) -> AInftyStructure:
    return AInftyStructure(mu.n, {key: c for key, c in mu.entries.items() if len(key[0]) == d and key[2] == k})


def validate_floer(tables: FloerTables, dictionary: Dictionary, n: int = 3) -> FloerReport:
    report = FloerReport()

    for name, generator in tables.generators.items():
        if name not in dictionary:
            report.failures.append(f"generator {name} has no dictionary entry")
            continue
        _sign, mask = dictionary[name]
        if generator.index != popcount(mask):
            report.failures.append(f"generator {name}: index {generator.index} but image {format_mask(mask)}")
        if not is_diagonal(sub_weights(generator.weight, xi_weight(mask, n))):
            report.failures.append(f"generator {name}: weight {generator.weight} does not match {format_mask(mask)}")

    mu = transport(tables, dictionary, n)
    masks = [dictionary[name][1] for name in tables.generators if name in dictionary]
    for a2 in masks:
        for a1 in masks:
            report.checked_pairs += 1
            out, sign = mu2_constant(a2, a1)
            expected = {out: Fraction(sign)} if sign else {}
            got = {o: c for (inputs, o, h), c in mu.entries.items() if inputs == (a2, a1) and h == 0}
            if got != expected:
                report.failures.append(
                    f"mu2({format_mask(a2)}, {format_mask(a1)}): transported {got}, wedge product {expected}"
                )

    for grading in (check_weights(mu), check_index_degrees(mu)):
        report.checked_constants = max(report.checked_constants, grading.checked)
        report.failures.extend(grading.violations)

    for (d, k), target in hkr_targets(n).items():
        image = hkr(_arity_hbar_part(mu, d, k).cochain())
        if image != target:
            report.failures.append(f"HKR of mu^{d}_{k}: got {image}, expected {target}")

    logger.info(f"[Floer] {report.summary()}")
    return report


def compare_with_transfer(floer: AInftyStructure, transferred: AInftyStructure, hkr_sign: int = 1) -> list[str]:
    """
    Mismatches between the transported Floer data and a transferred structure: the μ²₀ table, the
    HKR class of μ³₀ and the diagonal μ⁵₁ constants, the latter two after multiplying by ``hkr_sign``.
    """
    mismatches = []
    floer_mu2, transferred_mu2 = floer.table(2, 0), transferred.table(2, 0)
    if floer_mu2 != transferred_mu2:
        differing = [k for k in set(floer_mu2) | set(transferred_mu2) if floer_mu2.get(k) != transferred_mu2.get(k)]
        mismatches.append(f"mu^2_0 differs on {len(differing)} words")
    cubic_floer = hkr(_arity_hbar_part(floer, 3, 0).cochain()).scale(Fraction(hkr_sign))
    cubic_transferred = hkr(_arity_hbar_part(transferred, 3, 0).cochain())
    if cubic_floer != cubic_transferred:
        mismatches.append(f"HKR of mu^3_0: floer {cubic_floer}, transferred {cubic_transferred}")
    for key, c in floer.entries.items():
        inputs, out, h = key
        if len(inputs) == 5 and h == 1 and len(set(inputs)) == 1:
            other = transferred.entries.get(key, 0)
            if other != hkr_sign * c:
                mismatches.append(f"{format_key(key)}: floer {hkr_sign * c}, transferred {other}")
    for line in mismatches:
        logger.warning(f"[Floer] {line}")
    return mismatches
