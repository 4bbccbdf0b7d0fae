"""
Unit tests for the Koszul dga, its two presentations and the deformed differential.
"""

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.koszul import (
    BEndo,
    BTensor,
    KoszulDifferentials,
    OneForm,
    delta0,
    delta_deformed,
    deformation_tensor_formula,
    mult_B,
    partial_B,
    partial_tensor_formula,
    sign_normalize_gamma,
    superpotential,
    tensor_product,
    to_endo,
    to_tensor,
)
from algebra.polynomials import Poly
from algebra.scalars import all_masks


def _basis_tensors(n):
    for beta, theta in itertools.product(all_masks(n), repeat=2):
        yield BTensor.term(n, (0,) * n, beta, theta)


@pytest.mark.unit
class TestPresentations:
    """The matrix and tensor presentations of B agree."""

    def test_round_trip(self):
        """Test that to_endo and to_tensor are inverse."""
        x = BTensor.term(3, (1, 0, 0), 0b011, 0b110, Fraction(2, 3))
        assert to_tensor(to_endo(x)) == x

    def test_product_matches_composition(self):
        """Test that the tensor product formula is matrix composition."""
        x2 = BTensor.term(2, (1, 0), 0b01, 0b11) + BTensor.term(2, (0, 0), 0b10, 0b01, 3)
        x1 = BTensor.term(2, (0, 1), 0b11, 0b10) + BTensor.term(2, (0, 0), 0b01, 0b00, -1)
        assert to_endo(tensor_product(x2, x1)) == mult_B(to_endo(x2), to_endo(x1))

    def test_identity(self):
        """Test that the identity endomorphism is a unit for composition."""
        b = BEndo.term(3, (0, 2, 0), 0b001, 0b101, 5)
        assert mult_B(BEndo.identity(3), b) == b
        assert mult_B(b, BEndo.identity(3)) == b

    def test_parity(self):
        """Test parity bookkeeping on mixed elements."""
        even = BEndo.term(2, (0, 0), 0b01, 0b10)
        odd = BEndo.term(2, (0, 0), 0b01, 0b00)
        assert even.parity == 0
        assert odd.parity == 1
        assert (even + odd).parity is None
        assert set((even + odd).parity_parts()) == {0, 1}


@pytest.mark.unit
class TestDifferentials:
    """The Koszul differential and its deformation."""

    def test_delta0_squares_to_zero(self):
        """Test that the contraction with the Euler field squares to zero."""
        d = delta0(3)
        assert not mult_B(d, d)

    def test_partial_squares_to_zero(self):
        """Test that the induced differential on B squares to zero."""
        b = BEndo.term(3, (1, 0, 0), 0b010, 0b101) + BEndo.term(3, (0, 0, 0), 0b111, 0b000, 2)
        assert not partial_B(partial_B(b))

    def test_partial_formula_matches_commutator(self):
        """Test the tensor formula for the differential against the commutator with delta0."""
        for x in _basis_tensors(2):
            assert partial_tensor_formula(x) == to_tensor(partial_B(to_endo(x)))

    def test_deformation_formula_matches_commutator(self, toy2):
        """Test the tensor formula for the deformation against the commutator with -gamma^."""
        diffs = KoszulDifferentials(toy2)
        for x in _basis_tensors(2):
            assert deformation_tensor_formula(toy2, x) == to_tensor(diffs.deformation(to_endo(x)))

    def test_deformed_square_is_scalar(self, toy2):
        """Test that delta~^2 is W_eff times the identity."""
        d = delta_deformed(toy2)
        square = mult_B(d, d)
        for c in all_masks(2):
            assert square.entry(c, c).forget_hbar() == Poly.from_sympy("-v1**3 - v2**3", 2)


@pytest.mark.unit
class TestOneForm:
    """One-forms, their effective potential and sign normalisation."""

    def test_printed_gamma_gives_minus_w(self, gamma3_printed):
        """Test that the printed one-form has W_eff = -W."""
        assert gamma3_printed.w_eff().forget_hbar() == -superpotential(3)

    def test_sign_normalisation(self, gamma3_printed, w3):
        """Test that normalisation flips the printed one-form."""
        gamma, flip = sign_normalize_gamma(gamma3_printed, w3)
        assert flip == -1
        assert gamma.w_eff().forget_hbar() == w3
        assert sign_normalize_gamma(gamma, w3) == (gamma, 1)

    def test_normalisation_rejects_other_targets(self, toy2):
        """Test that an unrelated target cannot be matched."""
        with pytest.raises(ValueError):
            sign_normalize_gamma(toy2, Poly.from_sympy("v1**2", 2))

    def test_weight_homogeneity(self, gamma3):
        """Test that the main one-form is equivariant and a generic one is not."""
        assert gamma3.is_weight_homogeneous()
        assert not OneForm.from_strings(["v2", "0", "0"], 3).is_weight_homogeneous()

    def test_min_sym_degree(self, gamma3, toy2):
        """Test the lowest polynomial degree of the components."""
        assert gamma3.min_sym_degree() == 2
        assert toy2.min_sym_degree() == 2
        assert OneForm.zero(2).is_zero()
