"""
Toric charts of the crepant resolution of V/Z for Z = ⟨(1,1,3)⟩ ⊂ SL₃.

Charts are given by the three inequalities cutting out each dual cone σ^∨ ⊂ M_ℝ. Chart
coordinates a₁, a₂, a₃ are the monomials x^{g₁}, x^{g₂}, x^{g₃} of the semigroup generators, so a
monomial x^m reads Π a_j^{c_j} with c = m·G⁻¹ (G has the generators as rows).
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import sympy

from algebra.polynomials import Poly
from utils.errors import ToricError
from utils.utilities import Utilities

logger = logging.getLogger(__name__)

IntVector = tuple[int, ...]

Z_WEIGHT = (1, 1, 3)
MODULUS = 5
REFERENCE_M_BASIS: tuple[IntVector, ...] = ((5, 0, 0), (-1, 1, 0), (-3, 0, 1))
N_BASIS: tuple[tuple[Fraction, ...], ...] = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(2, 5), Fraction(2, 5), Fraction(1, 5)),
)
SCAN_BOUND = 6
GOLDEN_FILE = "toric_golden.txt"

PRINTED_CHARTS: tuple[tuple[tuple[IntVector, ...], tuple[IntVector, ...]], ...] = (
    (((0, 1, 0), (1, 1, 3), (2, 2, 1)), ((3, 0, -1), (-1, 0, 2), (-1, 1, 0))),
    (((1, 0, 0), (1, 1, 3), (2, 2, 1)), ((0, 3, -1), (0, -1, 2), (1, -1, 0))),
    (((0, 1, 0), (0, 0, 1), (1, 1, 3)), ((5, 0, 0), (-3, 0, 1), (-1, 1, 0))),
    (((1, 0, 0), (0, 0, 1), (1, 1, 3)), ((0, 5, 0), (0, -3, 1), (1, -1, 0))),
    (((1, 0, 0), (0, 1, 0), (2, 2, 1)), ((0, 1, -2), (1, 0, -2), (0, 0, 5))),
)

# (from chart, to chart) for the printed coordinate changes
PRINTED_TRANSITIONS: tuple[tuple[int, int], ...] = ((2, 1), (3, 1), (4, 3), (5, 4))

CHART_SYMBOLS = sympy.symbols("a1 a2 a3")


def _dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))


def _cross(u: IntVector, v: IntVector) -> IntVector:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _primitive(v: IntVector) -> IntVector:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g else v


def _matrix(rows: Iterable[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows])


def _int_rows(matrix: sympy.Matrix) -> tuple[IntVector, ...]:
    rows = []
    for i in range(matrix.rows):
        row = []
        for j in range(matrix.cols):
            entry = matrix[i, j]
            if not entry.is_integer:
                raise ToricError(f"non-integral exponent {entry} in row {i + 1}")
            row.append(int(entry))
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class Lattice:
    """N = ℤ³ + ℤ·z/5 and its dual M = {m ∈ ℤ³ : ⟨z, m⟩ ≡ 0 mod 5}."""

    z: IntVector = Z_WEIGHT
    modulus: int = MODULUS

    def in_M(self, m: Sequence[int]) -> bool:
        return sum(a * b for a, b in zip(self.z, m)) % self.modulus == 0

    def in_N(self, n: Sequence[Fraction]) -> bool:
        return all(_dot(n, m).denominator == 1 for m in REFERENCE_M_BASIS)

    @cached_property
    def index(self) -> int:
        """[N : ℤ³], the number of distinct classes k·z/5 modulo ℤ³."""
        return len({tuple(k * a % self.modulus for a in self.z) for k in range(self.modulus)})

    def check(self) -> list[str]:
        problems = []
        if self.index != self.modulus:
            problems.append(f"[N : Z^3] = {self.index}, expected {self.modulus}")
        for m in REFERENCE_M_BASIS:
            if not self.in_M(m):
                problems.append(f"reference vector {m} is not in M")
        det_m = abs(_matrix(REFERENCE_M_BASIS).det())
        if det_m != self.index:
            problems.append(f"[Z^3 : M] = {det_m}, expected {self.index}")
        det_n = abs(_matrix(N_BASIS).det())
        if det_n * self.index != 1:
            problems.append(f"N basis has covolume {det_n}, expected 1/{self.index}")
        for n in N_BASIS:
            if not self.in_N(n):
                problems.append(f"N basis vector {n} pairs non-integrally with M")
        generator = tuple(Fraction(a, self.modulus) for a in self.z)
        if not self.in_N(generator):
            problems.append(f"z/{self.modulus} is not in N")
        return problems


@dataclass(frozen=True)
class ChartSpec:
    index: int
    inequalities: tuple[IntVector, ...]
    generators: tuple[IntVector, ...]

    @cached_property
    def generator_matrix(self) -> sympy.Matrix:
        return _matrix(self.generators)

    def contains(self, m: Sequence[int]) -> bool:
        """m ∈ σ^∨: every inequality normal pairs non-negatively with m."""
        return all(_dot(normal, m) >= 0 for normal in self.inequalities)

    def coordinates(self, m: Sequence[int]) -> IntVector:
        """c with m = Σ c_j g_j."""
        row = _matrix([m]) * self.generator_matrix.inv()
        return _int_rows(row)[0]


def default_charts() -> list[ChartSpec]:
    return [ChartSpec(i, ineq, gens) for i, (ineq, gens) in enumerate(PRINTED_CHARTS, start=1)]


def dual_generators(chart: ChartSpec, lattice: Optional[Lattice] = None) -> tuple[IntVector, ...]:
    """
    The first M-point on each ray of σ^∨, a ray being the intersection of two facet planes. The
    result is listed in the chart's recorded order when both triples agree as sets.
    """
    lattice = lattice or Lattice()
    rays = []
    for k in range(3):
        others = [chart.inequalities[i] for i in range(3) if i != k]
        ray = _primitive(_cross(others[0], others[1]))
        if _dot(chart.inequalities[k], ray) < 0:
            ray = tuple(-x for x in ray)
        if _dot(chart.inequalities[k], ray) == 0:
            raise ToricError(f"chart {chart.index}: inequalities do not cut out a full simplicial cone")
        step = next((t for t in range(1, lattice.modulus + 1) if lattice.in_M(tuple(t * x for x in ray))), None)
        if step is None:
            raise ToricError(f"chart {chart.index}: ray {ray} meets M only beyond {lattice.modulus} steps")
        rays.append(tuple(step * x for x in ray))
    if set(rays) == set(chart.generators):
        return chart.generators
    return tuple(sorted(rays))


@dataclass
class ChartReport:
    chart: int
    generators: tuple[IntVector, ...]
    scanned: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_chart(chart: ChartSpec, lattice: Optional[Lattice] = None, bound: int = SCAN_BOUND) -> ChartReport:
    """Generators in σ^∨ ∩ M, unimodular against M, and every scanned point a non-negative combination."""
    lattice = lattice or Lattice()
    computed = dual_generators(chart, lattice)
    report = ChartReport(chart.index, computed)
    if set(computed) != set(chart.generators):
        report.failures.append(f"chart {chart.index}: ray generators {computed} differ from {chart.generators}")
    for g in chart.generators:
        if not lattice.in_M(g):
            report.failures.append(f"chart {chart.index}: generator {g} is not in M")
        if not chart.contains(g):
            report.failures.append(f"chart {chart.index}: generator {g} violates an inequality")
    unimodular = abs((chart.generator_matrix * _matrix(REFERENCE_M_BASIS).inv()).det())
    if unimodular != 1:
        report.failures.append(f"chart {chart.index}: |det| against the M basis is {unimodular}, not 1")
        return report
    for m in itertools.product(range(-bound, bound + 1), repeat=3):
        if not lattice.in_M(m) or not chart.contains(m):
            continue
        report.scanned += 1
        c = chart.coordinates(m)
        if any(x < 0 for x in c):
            report.failures.append(f"chart {chart.index}: {m} = {c} is not a non-negative combination")
            break
    return report


def transition(charts: Sequence[ChartSpec], i: int, j: int) -> tuple[IntVector, ...]:
    """
    Exponent matrix G_j·G_i⁻¹: row k gives the j-th chart's coordinate a_k as a Laurent monomial in
    the i-th chart's coordinates.
    """
    by_index = {c.index: c for c in charts}
    return _int_rows(by_index[j].generator_matrix * by_index[i].generator_matrix.inv())


def compose_exponents(first: Sequence[IntVector], second: Sequence[IntVector]) -> tuple[IntVector, ...]:
    """Exponent matrix of the map i → k from T(i → j) = ``first`` and T(j → k) = ``second``."""
    return _int_rows(_matrix(second) * _matrix(first))


def change_coordinates(
    laurent: dict[IntVector, Fraction], exponents: Sequence[IntVector]
) -> dict[IntVector, Fraction]:
    """Rewrite a Laurent polynomial in the j-th chart's coordinates into the i-th, for T(i → j)."""
    t = _matrix(exponents)
    out: dict[IntVector, Fraction] = {}
    for c, coeff in laurent.items():
        new = _int_rows(_matrix([c]) * t)[0]
        out[new] = out.get(new, 0) + coeff
    return {k: v for k, v in out.items() if v}


@dataclass
class ChartEquation:
    """W pulled back to a chart: prefactor monomial times the strict transform, normalised by ``sign``."""

    chart: int
    prefactor: IntVector
    strict: list[tuple[IntVector, Fraction]]
    sign: int

    def laurent(self) -> dict[IntVector, Fraction]:
        """The full pullback of W, prefactor multiplied back in and normalisation undone."""
        return {tuple(a + b for a, b in zip(self.prefactor, e)): self.sign * c for e, c in self.strict}

    def to_sympy(self) -> sympy.Expr:
        return _monomial_sympy(self.prefactor) * sum(
            (sympy.Rational(c.numerator, c.denominator) * _monomial_sympy(e) for e, c in self.strict), sympy.Integer(0)
        )

    def __str__(self) -> str:
        body = format_laurent(self.strict)
        prefix = format_monomial(self.prefactor)
        return body if prefix == "1" else f"{prefix}*({body})"


def pullback_laurent(
    chart: ChartSpec, w: Poly, lattice: Optional[Lattice] = None
) -> list[tuple[IntVector, Fraction]]:
    lattice = lattice or Lattice()
    terms = []
    for m, c in w.items():
        if not lattice.in_M(m):
            raise ToricError(f"monomial with exponent {m} is not invariant under Z")
        terms.append((chart.coordinates(m), c))
    return terms


def pullback_W(chart: ChartSpec, w: Poly, lattice: Optional[Lattice] = None) -> ChartEquation:
    """
    Express W in chart coordinates, factor out the largest common monomial, and normalise the sign so
    that the image of v₁v₂v₃ (or the lowest-degree term of W) has coefficient +1.
    """
    terms = pullback_laurent(chart, w, lattice)
    if not terms:
        raise ToricError("cannot pull back the zero polynomial")
    prefactor = tuple(min(e[k] for e, _c in terms) for k in range(3))
    lead = w.items()[0][1]
    sign = 1 if lead > 0 else -1
    strict = [(tuple(a - b for a, b in zip(e, prefactor)), sign * c) for e, c in terms]
    logger.debug(f"[Toric] chart {chart.index}: prefactor {prefactor}, {len(strict)} strict terms")
    return ChartEquation(chart.index, prefactor, strict, sign)


# ---------------------------------------------------------------------------------------------
# coverage


def coverage_gaps(
    charts: Sequence[ChartSpec], lattice: Optional[Lattice] = None, box: int = 3
) -> list[tuple[Fraction, ...]]:
    """
    Points of N in the box [0, box]³ of the positive orthant not lying in any cone σ, where σ is
    spanned by the chart's inequality normals.
    """
    lattice = lattice or Lattice()
    inverses = [_matrix(c.inequalities).inv() for c in charts]
    gaps = []
    scale = lattice.modulus
    for k in range(scale):
        shift = tuple(k * a % scale for a in lattice.z)
        ranges = [range(s, box * scale + 1, scale) for s in shift]
        for p in itertools.product(*ranges):
            point = tuple(Fraction(x, scale) for x in p)
            row = _matrix([point])
            if not any(all(x >= 0 for x in row * inv) for inv in inverses):
                gaps.append(point)
    logger.debug(f"[Toric] coverage scan of the box [0, {box}]^3: {len(gaps)} gaps")
    return gaps


# ---------------------------------------------------------------------------------------------
# text output and the vendored golden data


def format_monomial(e: Sequence[int]) -> str:
    factors = []
    for k, a in enumerate(e, start=1):
        if a == 1:
            factors.append(f"a{k}")
        elif a:
            factors.append(f"a{k}^{a}")
    return "*".join(factors) if factors else "1"


def format_laurent(terms: Sequence[tuple[IntVector, Fraction]]) -> str:
    chunks = []
    for e, c in terms:
        mono = format_monomial(e)
        magnitude = abs(c)
        text = mono if magnitude == 1 else (str(magnitude) if mono == "1" else f"{magnitude}*{mono}")
        if not chunks:
            chunks.append(text if c > 0 else f"-{text}")
        else:
            chunks.append(f"+ {text}" if c > 0 else f"- {text}")
    return " ".join(chunks) if chunks else "0"


def _monomial_sympy(e: Sequence[int]) -> sympy.Expr:
    expr = sympy.Integer(1)
    for symbol, a in zip(CHART_SYMBOLS, e):
        expr *= symbol**a
    return expr


def render_toric(charts: Sequence[ChartSpec], w: Poly) -> str:
    lines = ["# toric charts of the crepant resolution"]
    for chart in charts:
        vectors = " ".join("(" + ",".join(str(x) for x in g) + ")" for g in dual_generators(chart))
        lines.append(f"generators {chart.index}: {vectors}")
    for i, j in PRINTED_TRANSITIONS:
        rows = transition(charts, i, j)
        lines.append(f"transition {i} -> {j}: (" + ", ".join(format_monomial(r) for r in rows) + ")")
    for chart in charts:
        lines.append(f"equation {chart.index}: {pullback_W(chart, w)}")
    return "\n".join(lines) + "\n"


@dataclass
class ToricGolden:
    generators: dict[int, tuple[IntVector, ...]]
    transitions: dict[tuple[int, int], list[sympy.Expr]]
    equations: dict[int, sympy.Expr]


def _parse_vector(text: str) -> IntVector:
    return tuple(int(x) for x in text.strip().strip("()").split(","))


def load_golden(text: Optional[str] = None) -> ToricGolden:
    text = text if text is not None else Utilities().load_text(GOLDEN_FILE)
    golden = ToricGolden({}, {}, {})
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        kind, _, label = head.partition(" ")
        body = body.strip()
        if kind == "generators":
            golden.generators[int(label)] = tuple(_parse_vector(v) for v in body.split())
        elif kind == "transition":
            i, _, j = label.partition("->")
            images = body.strip("()").split(",")
            golden.transitions[(int(i), int(j))] = [sympy.sympify(x.strip(), convert_xor=True) for x in images]
        elif kind == "equation":
            golden.equations[int(label)] = sympy.sympify(body, convert_xor=True)
        else:
            raise ToricError(f"unrecognised golden line: {raw!r}")
    return golden


def compare_golden(charts: Sequence[ChartSpec], w: Poly, golden: ToricGolden) -> list[str]:
    """Mismatches against the golden data: exact generator triples, and sympy equality of maps and equations."""
    mismatches = []
    by_index = {c.index: c for c in charts}
    for index, expected in sorted(golden.generators.items()):
        got = dual_generators(by_index[index])
        if got != expected:
            mismatches.append(f"generators {index}: got {got}, expected {expected}")
    for (i, j), expected in sorted(golden.transitions.items()):
        got = [_monomial_sympy(r) for r in transition(charts, i, j)]
        if any(sympy.simplify(a - b) != 0 for a, b in zip(got, expected)):
            mismatches.append(f"transition {i} -> {j}: got {got}, expected {expected}")
    for index, expected in sorted(golden.equations.items()):
        got = pullback_W(by_index[index], w).to_sympy()
        if sympy.expand(got - expected) != 0:
            mismatches.append(f"equation {index}: got {got}, expected {expected}")
    for line in mismatches:
        logger.warning(f"[Toric] {line}")
    return mismatches
