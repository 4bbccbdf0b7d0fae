"""
Unit tests for Hochschild cochains, the Gerstenhaber bracket and HKR.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.scalars import bit
from services.hochschild import (
    HochschildCochain,
    ainfty_residual,
    gerstenhaber,
    hkr,
    hochschild_d,
    identity_cochain,
    mc_residual,
    product_cochain,
)


def random_cochain(rng, n=2, max_arity=2, terms=3):
    """A few random entries of arity at most ``max_arity`` with small coefficients."""
    entries = {}
    for _ in range(terms):
        inputs = tuple(rng.randrange(1 << n) for _ in range(rng.randint(1, max_arity)))
        entries[(inputs, rng.randrange(1 << n), rng.randint(0, 1))] = Fraction(rng.choice([-2, -1, 1, 3]))
    return HochschildCochain(n, entries)


def random_homogeneous(rng, n=2, max_arity=2):
    """A random cochain cut down to the parity part of its first entry."""
    cochain = random_cochain(rng, n, max_arity)
    first_inputs, first_output, _h = next(iter(cochain.entries))
    return cochain.parity_parts()[cochain.entry_parity(first_inputs, first_output)]


@pytest.mark.unit
class TestCochains:
    """Cochain bookkeeping."""

    def test_parities(self):
        """Test the CC-degree parity of a few entries."""
        c = HochschildCochain(1, {((1,), 0, 0): 1})
        assert c.cc_parity == 1
        assert product_cochain(2).cc_parity == 1
        assert identity_cochain(2).cc_parity == 0
        mixed = c + identity_cochain(1)
        assert mixed.cc_parity is None
        assert set(mixed.parity_parts()) == {0, 1}

    def test_arity_filters(self):
        """Test arity selection and truncation."""
        c = product_cochain(1) + identity_cochain(1)
        assert c.arities() == [1, 2]
        assert c.arity_part(1) == identity_cochain(1)
        assert c.truncate_arity(1) == identity_cochain(1)

    def test_product_is_associative(self):
        """Test that the wedge product cochain satisfies [m, m] = 0."""
        assert not ainfty_residual(product_cochain(3), 3)


@pytest.mark.unit
class TestDifferential:
    """The Hochschild differential is the bracket with the product."""

    @pytest.mark.parametrize(
        "entries",
        [
            {((0,), 0, 0): 1},
            {((1,), 0, 0): 1},
            {((1,), 1, 0): 1},
            {((0b01, 0b10), 0, 0): Fraction(1, 2)},
        ],
    )
    def test_differential_is_bracket_with_product(self, entries):
        """Test d(phi) = [m, phi] on small cochains."""
        n = max(max(max(inputs, default=0), out) for inputs, out, _h in entries).bit_length() or 1
        phi = HochschildCochain(n, entries)
        assert hochschild_d(phi) == gerstenhaber(product_cochain(n), phi)

    def test_differential_squares_to_zero(self):
        """Test d(d(phi)) = 0 on a mixed cochain in two variables."""
        phi = HochschildCochain(2, {((0b01,), 0b10, 0): 1, ((0b11,), 0, 0): Fraction(3, 2), ((0b10, 0b10), 0, 0): -1})
        assert not hochschild_d(hochschild_d(phi))

    def test_differential_squares_to_zero_on_random_cochains(self, rng):
        """Test d(d(phi)) = 0 on fifty random cochains of arity at most three."""
        for _ in range(50):
            phi = random_cochain(rng, max_arity=3)
            assert not hochschild_d(hochschild_d(phi))

    def test_bracket_antisymmetry(self, rng):
        """Test [phi, psi] = -(-1)^(p q) [psi, phi] on random homogeneous cochains."""
        for _ in range(50):
            phi, psi = random_homogeneous(rng, max_arity=3), random_homogeneous(rng, max_arity=3)
            sign = -1 if (phi.cc_parity * psi.cc_parity) & 1 else 1
            assert gerstenhaber(psi, phi) == gerstenhaber(phi, psi).scale(-sign)

    def test_jacobi_identity(self, rng):
        """Test the graded Jacobi identity on random homogeneous cochains."""
        for _ in range(25):
            phi, psi, chi = random_homogeneous(rng), random_homogeneous(rng), random_homogeneous(rng)
            sign = -1 if (phi.cc_parity * psi.cc_parity) & 1 else 1
            left = gerstenhaber(phi, gerstenhaber(psi, chi))
            right = gerstenhaber(gerstenhaber(phi, psi), chi) + gerstenhaber(psi, gerstenhaber(phi, chi)).scale(sign)
            assert left == right

    def test_zero_is_maurer_cartan(self):
        """Test that the zero deformation has zero residual."""
        assert not mc_residual(HochschildCochain(3), 4)

    def test_perturbed_cubic_is_not_maurer_cartan(self):
        """Test that a lone cubic constant fails the Maurer-Cartan equation in arity four."""
        alpha = HochschildCochain(3, {((bit(1), bit(2), bit(3)), 0, 0): -1})
        residual = mc_residual(alpha, 4)
        assert residual
        assert residual.arities() == [4]
        assert residual == hochschild_d(alpha, 4)


@pytest.mark.unit
class TestHKR:
    """The HKR map to polyvector fields."""

    def test_symmetrises_degree_one_inputs(self):
        """Test that permutations of the same inputs add up in one monomial."""
        phi = HochschildCochain(
            3,
            {
                ((bit(1), bit(2), bit(3)), 0, 0): 1,
                ((bit(2), bit(1), bit(3)), 0, 0): 2,
                ((bit(1), bit(1)), bit(2), 1): Fraction(1, 3),
            },
        )
        image = hkr(phi)
        assert image.coefficient_poly(0, 0).coefficient((1, 1, 1)) == 3
        assert image.coefficient_poly(bit(2), 1).coefficient((2, 0, 0)) == Fraction(1, 3)

    def test_ignores_other_inputs(self):
        """Test that entries with a non-degree-one input do not contribute."""
        phi = HochschildCochain(2, {((0, bit(1)), bit(1), 0): 1, ((0b11,), 0, 0): 1})
        assert not hkr(phi)

    def test_product_has_zero_image(self):
        """Test that the antisymmetric product drops out."""
        assert not hkr(product_cochain(3))

    def test_coboundaries_have_zero_image(self, rng):
        """Test that HKR vanishes on d(phi) for random cochains in three variables."""
        for _ in range(50):
            phi = random_cochain(rng, n=3, max_arity=3, terms=4)
            assert not hkr(hochschild_d(phi))
