"""
Unit tests for truncated series, coordinate changes, ideal membership and the reduction to W.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.polynomials import Poly
from services.determinacy import (
    CoordChange,
    TruncatedSeries,
    equivariant_average,
    exactness_sample,
    ideal_membership,
    invariant_monomials,
    is_invariant_poly,
    random_invariant_perturbation,
    reduce_to_W,
    solve_two_form,
    substitute,
)
from services.polyvector import PolyVector, koszul_dW
from utils.errors import DeterminacyError


def P(text):
    return Poly.from_sympy(text, 3)


@pytest.mark.unit
class TestSeriesAndChanges:
    """Truncated arithmetic and coordinate changes."""

    def test_truncated_series(self):
        """Test valuation and filtration membership."""
        s = TruncatedSeries.of(P("v1**2 + v1**5"), 4)
        assert s.poly == P("v1**2")
        assert s.valuation() == 2
        assert s.in_filtration(2)
        assert not s.in_filtration(3)
        assert (s - s).is_zero()
        assert (s * s).poly == Poly.zero(3)

    def test_change_must_start_in_degree_two(self):
        """Test that a linear component is refused."""
        with pytest.raises(DeterminacyError):
            CoordChange((P("v2"), Poly.zero(3), Poly.zero(3)), 6)

    def test_composition(self):
        """Test that composing changes matches substituting one after the other."""
        c1 = CoordChange((P("v2**2"), Poly.zero(3), Poly.zero(3)), 6)
        c2 = CoordChange((Poly.zero(3), P("v3**2"), P("v1**3")), 6)
        both = c1.compose(c2)
        assert both.components[0] == P("v2**2 + 2*v2*v3**2 + v3**4")
        s = P("v1*v2 + v3**3")
        assert substitute(substitute(s, c1), c2) == substitute(s, both)
        assert CoordChange.identity(3, 6).compose(c1) == c1

    def test_equivariant_average(self, group_g):
        """Test that only weight-compatible terms survive the average."""
        change = CoordChange((P("v2*v3 + v1**2*v2*v3"), Poly.zero(3), Poly.zero(3)), 8)
        averaged = equivariant_average(change, group_g)
        assert averaged.components[0] == P("v1**2*v2*v3")
        assert averaged.is_equivariant(group_g)
        assert not change.is_equivariant(group_g)


@pytest.mark.unit
class TestIdealMembership:
    """Membership in the Jacobian ideal modulo a filtration step."""

    def test_quadratic_monomial(self, w3):
        """Test v1v2 = -dW/dv3 + 5 v3^4."""
        certificate = ideal_membership(P("v1*v2"), w3, 4)
        assert certificate.q[2] == Poly.constant(3, -1)
        assert certificate.q[0] == Poly.zero(3)
        assert certificate.remainder == P("5*v3**4")
        assert certificate.check(P("v1*v2"), w3)

    def test_sixth_power_with_quadratic_start(self, w3):
        """Test that v1^6 lies in I.F2 + F8."""
        certificate = ideal_membership(P("v1**6"), w3, 8, q_order=2)
        assert certificate.check(P("v1**6"), w3)
        assert all(q.order() is None or q.order() >= 2 for q in certificate.q)

    def test_infeasible_degree_is_named(self, w3):
        """Test that a linear term cannot be reached."""
        with pytest.raises(DeterminacyError, match="degree 1"):
            ideal_membership(P("v1"), w3, 4)


@pytest.mark.unit
class TestReduction:
    """Reduction of an invariant perturbation back to W."""

    def test_single_term_perturbation(self, w3, group_g):
        """Test W + (v1v2v3)^3 modulo F12."""
        w_prime = w3 + P("(v1*v2*v3)**3")
        certificate = reduce_to_W(w_prime, 12, w=w3, group=group_g)
        assert certificate.passed
        assert certificate.steps[0].agreement_order == 9
        assert certificate.change.is_equivariant(group_g)
        assert (substitute(w_prime, certificate.change) - w3).truncate(12) == Poly.zero(3)
        assert certificate.summary().startswith("PASS")

    def test_random_perturbation(self, w3, group_g, rng):
        """Test a random odd invariant perturbation."""
        pert = random_invariant_perturbation(rng, group_g, degrees=(7, 9))
        assert pert.is_odd()
        assert is_invariant_poly(pert, group_g)
        certificate = reduce_to_W(w3 + pert, 11, w=w3, group=group_g)
        assert certificate.passed

    def test_unchanged_potential_needs_no_steps(self, w3):
        """Test that W itself reduces with the identity change."""
        certificate = reduce_to_W(w3, 10)
        assert certificate.passed
        assert certificate.steps == []
        assert certificate.change.is_identity()

    @pytest.mark.parametrize(
        "extra,message",
        [("(v1*v2*v3)**2", "odd"), ("v1**7", "invariant"), ("v1**5", "below degree 7")],
    )
    def test_rejected_inputs(self, w3, extra, message):
        """Test the preconditions on W'."""
        with pytest.raises(DeterminacyError, match=message):
            reduce_to_W(w3 + P(extra), 12)

    def test_with_two_form(self, w3):
        """Test that a supplied Lambda^2 part is solved alongside."""
        a2 = koszul_dW(PolyVector.term(3, (0, 0, 0), 0b111), w3)
        certificate = reduce_to_W(w3, 8, a2=a2)
        assert certificate.gamma3 == PolyVector.term(3, (0, 0, 0), 0b111, -1)


@pytest.mark.unit
class TestTwoForms:
    """Solving iota_dW gamma3 = -a2."""

    def test_unique_preimage(self, w3, group_g):
        """Test that the preimage of a boundary is recovered."""
        x = PolyVector.term(3, (1, 1, 1), 0b111, Fraction(2))
        a2 = koszul_dW(x, w3).truncate(9)
        gamma3 = solve_two_form(a2, w3, 9, group_g)
        assert gamma3 == x.scale(-1)

    def test_non_cocycle_is_refused(self, w3):
        """Test that a two-form with nonzero contraction is refused."""
        with pytest.raises(DeterminacyError, match="cocycle"):
            solve_two_form(PolyVector.term(3, (0, 0, 0), 0b011), w3, 6)

    def test_wrong_degree_is_refused(self, w3):
        """Test that a one-form component is refused."""
        with pytest.raises(DeterminacyError):
            solve_two_form(PolyVector.term(3, (0, 0, 0), 0b001), w3, 6)

    def test_exactness_sample(self, w3, rng):
        """Test that sampled cocycles are re-solved."""
        report = exactness_sample(w3, 7, rng, samples=3)
        assert report.passed
        assert report.solved == 3

    def test_invariant_monomials(self, group_g):
        """Test the invariant monomials of degrees 3 and 5."""
        assert invariant_monomials(group_g, [3]) == [(1, 1, 1)]
        assert invariant_monomials(group_g, [5]) == [(5, 0, 0), (0, 5, 0), (0, 0, 5)]
