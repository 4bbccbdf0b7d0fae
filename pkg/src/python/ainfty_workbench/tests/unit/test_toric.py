"""
Unit tests for the toric charts, their coordinate changes and the pulled-back equations.
"""

import sys
from pathlib import Path

import pytest
import sympy

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.polynomials import Poly
from services.toric import (
    CHART_SYMBOLS,
    Lattice,
    change_coordinates,
    compare_golden,
    compose_exponents,
    coverage_gaps,
    default_charts,
    dual_generators,
    format_laurent,
    format_monomial,
    load_golden,
    pullback_laurent,
    pullback_W,
    render_toric,
    transition,
    verify_chart,
)
from utils.errors import ToricError

a1, a2, a3 = CHART_SYMBOLS


@pytest.fixture(scope="module")
def charts():
    return default_charts()


@pytest.mark.unit
class TestLattice:
    """The lattices N and M."""

    def test_lattice_is_consistent(self):
        """Test the index and the reference bases."""
        lattice = Lattice()
        assert lattice.check() == []
        assert lattice.index == 5

    def test_membership(self):
        """Test M membership of invariant exponents."""
        lattice = Lattice()
        assert lattice.in_M((1, 1, 1))
        assert lattice.in_M((5, 0, 0))
        assert not lattice.in_M((1, 0, 0))


@pytest.mark.unit
class TestCharts:
    """Dual cones and their generators."""

    def test_generators_match_golden(self, charts):
        """Test the recomputed semigroup generators of every chart."""
        golden = load_golden()
        for chart in charts:
            assert dual_generators(chart) == golden.generators[chart.index]

    @pytest.mark.parametrize("index", [1, 2, 3, 4, 5])
    def test_chart_verifies(self, charts, index):
        """Test unimodularity and the non-negative scan."""
        report = verify_chart(charts[index - 1], bound=3)
        assert report.passed, report.failures
        assert report.scanned > 0

    def test_coordinates(self, charts):
        """Test the chart coordinates of v1v2v3 and v1^5 in chart 1."""
        chart = charts[0]
        assert chart.contains((3, 0, -1))
        assert chart.coordinates((1, 1, 1)) == (1, 1, 1)
        assert chart.coordinates((5, 0, 0)) == (2, 1, 0)

    def test_charts_cover_the_orthant(self, charts):
        """Test that the cones leave no gaps in a small box."""
        assert coverage_gaps(charts, box=2) == []


@pytest.mark.unit
class TestTransitions:
    """Exponent matrices of the coordinate changes."""

    def test_printed_transition(self, charts):
        """Test the change from chart 2 to chart 1."""
        assert transition(charts, 2, 1) == ((1, 0, 3), (0, 1, -1), (0, 0, -1))

    def test_composition(self, charts):
        """Test that composing 2 -> 1 with 1 -> 3 gives 2 -> 3."""
        composed = compose_exponents(transition(charts, 2, 1), transition(charts, 1, 3))
        assert composed == transition(charts, 2, 3)

    def test_round_trip_is_identity(self, charts):
        """Test that a chart change followed by its inverse is the identity."""
        back_and_forth = compose_exponents(transition(charts, 4, 3), transition(charts, 3, 4))
        assert back_and_forth == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def test_change_coordinates_agrees_with_pullback(self, charts, w3):
        """Test that rewriting chart 1's pullback lands on chart 2's."""
        in_chart1 = dict(pullback_laurent(charts[0], w3))
        in_chart2 = dict(pullback_laurent(charts[1], w3))
        assert change_coordinates(in_chart1, transition(charts, 2, 1)) == in_chart2


@pytest.mark.unit
class TestEquations:
    """W pulled back to the charts."""

    def test_chart_one(self, charts, w3):
        """Test the prefactor and strict transform in chart 1."""
        equation = pullback_W(charts[0], w3)
        assert equation.prefactor == (1, 1, 0)
        assert sympy.expand(equation.to_sympy() - a1 * a2 * (a3 - a1 - a1 * a3**5 - a2**2)) == 0
        assert str(equation).startswith("a1*a2*(")

    def test_chart_five(self, charts, w3):
        """Test the equation in the chart containing the exceptional divisor."""
        equation = pullback_W(charts[4], w3)
        assert sympy.expand(equation.to_sympy() - a3 * (a1 * a2 - a2**5 * a3 - a1**5 * a3 - 1)) == 0

    def test_laurent_undoes_normalisation(self, charts, w3):
        """Test that the full pullback keeps the original signs."""
        equation = pullback_W(charts[0], w3)
        assert equation.laurent() == dict(pullback_laurent(charts[0], w3))

    def test_non_invariant_monomial_is_refused(self, charts):
        """Test that a monomial outside M cannot be pulled back."""
        with pytest.raises(ToricError, match="not invariant"):
            pullback_W(charts[0], Poly.from_sympy("v1", 3))
        with pytest.raises(ToricError):
            pullback_W(charts[0], Poly.zero(3))

    def test_formatting(self):
        """Test monomial and Laurent printing."""
        assert format_monomial((1, 0, -1)) == "a1*a3^-1"
        assert format_monomial((0, 0, 0)) == "1"
        assert format_laurent([((0, 0, 1), 1), ((1, 0, 0), -2)]) == "a3 - 2*a1"


@pytest.mark.unit
class TestGolden:
    """The vendored golden file."""

    def test_golden_agrees(self, charts, w3):
        """Test generators, transitions and equations against the file."""
        assert compare_golden(charts, w3, load_golden()) == []

    def test_rendered_text_reloads(self, charts, w3):
        """Test that the rendered report parses back and agrees."""
        golden = load_golden(render_toric(charts, w3))
        assert set(golden.equations) == {1, 2, 3, 4, 5}
        assert compare_golden(charts, w3, golden) == []

    def test_wrong_equation_is_reported(self, charts, w3):
        """Test that a corrupted equation is reported."""
        golden = load_golden()
        golden.equations[3] = golden.equations[3] + a1
        mismatches = compare_golden(charts, w3, golden)
        assert len(mismatches) == 1
        assert mismatches[0].startswith("equation 3")

    def test_unknown_line_is_refused(self):
        """Test that an unrecognised line raises."""
        with pytest.raises(ToricError):
            load_golden("chart 1: nothing\n")
