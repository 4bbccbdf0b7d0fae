"""
Unit tests for polyvector fields, the Schouten bracket and invariant dimensions.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.polynomials import Poly
from algebra.scalars import all_masks, bit, popcount
from services.groups import GroupSpec
from services.polyvector import (
    DegreePredicates,
    PolyVector,
    character_average_dim,
    degree_predicates,
    hom_invariant_dim,
    invariant_dim,
    koszul_dW,
    schouten,
)


def random_field(rng, degree, n=3, terms=3):
    """A few terms of Lambda-degree ``degree`` with small random monomials and coefficients."""
    masks = [m for m in all_masks(n) if popcount(m) == degree]
    field = PolyVector(n)
    for _ in range(terms):
        mono = tuple(rng.randint(0, 2) for _ in range(n))
        field = field + PolyVector.term(n, mono, rng.choice(masks), Fraction(rng.choice([-2, -1, 1, 3])))
    return field


def shifted_sign(k, j):
    """(-1)^((k-1)(j-1)) for fields of Lambda-degrees k and j."""
    return -1 if ((k - 1) * (j - 1)) & 1 else 1


@pytest.mark.unit
class TestPolyVector:
    """Construction and component access."""

    def test_components(self):
        """Test Lambda-degree, hbar and scalar parts."""
        p = PolyVector.term(3, (1, 0, 0), bit(2), 2) + PolyVector.term(3, (0, 0, 3), 0, Fraction(1, 2), hbar=1)
        assert p.lambda_degrees() == {0, 1}
        assert p.lambda_part(1) == PolyVector.term(3, (1, 0, 0), bit(2), 2)
        assert p.hbar_part(1).scalar_part() == Poly.monomial((0, 0, 3), Fraction(1, 2))
        assert p.forget_hbar().hbar_part(0) == p.forget_hbar()
        assert p.truncate(2) == PolyVector.term(3, (1, 0, 0), bit(2), 2)

    def test_print(self):
        """Test the printed form."""
        p = PolyVector.term(2, (1, 0), 0b11, -1) + PolyVector.term(2, (0, 0), 0, 3, hbar=1)
        assert str(p) == "-v1*xi1^xi2 + 3*hbar"


@pytest.mark.unit
class TestSchouten:
    """The Schouten bracket and contraction with dW."""

    def test_basic_bracket(self):
        """Test [xi1, v1] = 1 and graded antisymmetry against a function."""
        xi1 = PolyVector.term(3, (0, 0, 0), bit(1))
        v1 = PolyVector.term(3, (1, 0, 0), 0)
        one = PolyVector.term(3, (0, 0, 0), 0)
        assert schouten(xi1, v1) == one
        assert schouten(v1, xi1) == -one

    def test_bracket_with_function_is_contraction(self, w3):
        """Test [W, f xi_J] = -f iota_dW xi_J on a few fields."""
        w = PolyVector.from_poly(w3)
        for field in [
            PolyVector.term(3, (0, 0, 0), bit(1)),
            PolyVector.term(3, (1, 1, 0), 0b011),
            PolyVector.term(3, (0, 2, 0), 0b111, Fraction(2, 3)),
        ]:
            assert schouten(w, field) == -koszul_dW(field, w3)

    def test_contraction_squares_to_zero(self, w3):
        """Test iota_dW o iota_dW = 0."""
        top = PolyVector.term(3, (0, 0, 0), 0b111)
        once = koszul_dW(top, w3)
        assert once.lambda_degrees() == {2}
        assert not koszul_dW(once, w3)

    def test_contraction_of_single_word(self, w3):
        """Test iota_dW xi_1 = dW/dv1."""
        image = koszul_dW(PolyVector.term(3, (0, 0, 0), bit(1)), w3)
        assert image.scalar_part() == w3.derivative(1)

    def test_graded_antisymmetry(self, rng):
        """Test [Q, P] = -(-1)^((k-1)(j-1)) [P, Q] on random homogeneous fields."""
        for _ in range(50):
            k, j = rng.randint(0, 3), rng.randint(0, 3)
            p, q = random_field(rng, k), random_field(rng, j)
            assert schouten(q, p) == schouten(p, q).scale(Fraction(-shifted_sign(k, j)))

    def test_graded_jacobi(self, rng):
        """Test [P, [Q, R]] = [[P, Q], R] + (-1)^((k-1)(j-1)) [Q, [P, R]] on random triples."""
        for _ in range(25):
            k, j, m = rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)
            p, q, r = random_field(rng, k, terms=2), random_field(rng, j, terms=2), random_field(rng, m, terms=2)
            left = schouten(p, schouten(q, r))
            right = schouten(schouten(p, q), r) + schouten(q, schouten(p, r)).scale(Fraction(shifted_sign(k, j)))
            assert left == right

    def test_potential_brackets_koszul_image_to_zero(self, w3, rng):
        """Test [W, iota_dW gamma] = 0 for random top-degree fields gamma."""
        w = PolyVector.from_poly(w3)
        for _ in range(10):
            gamma = random_field(rng, 3)
            image = koszul_dW(gamma, w3)
            assert image.lambda_degrees() <= {2}
            assert not schouten(w, image)


@pytest.mark.unit
class TestInvariantDimensions:
    """Counts of invariant polyvectors and multilinear maps."""

    @pytest.mark.parametrize("i,j,expected", [(3, 0, 1), (4, 2, 3), (5, 0, 3)])
    def test_known_dimensions(self, group_g, i, j, expected):
        """Test hand-counted invariant dimensions."""
        assert invariant_dim(i, j, group_g) == expected

    @pytest.mark.parametrize("i,j", [(2, 1), (3, 3), (4, 2), (6, 1)])
    def test_character_average_agrees(self, group_g, i, j):
        """Test that the averaged trace gives the monomial count."""
        assert character_average_dim(i, j, group_g) == invariant_dim(i, j, group_g)

    def test_trivial_group_counts_everything(self):
        """Test dim Sym^2 x Lambda^1 in three variables."""
        assert invariant_dim(2, 1, GroupSpec.trivial(3)) == 18

    def test_hom_dimensions(self, group_g):
        """Test vanishing invariant Hom spaces."""
        assert hom_invariant_dim(3, 1, group_g) == 0
        assert hom_invariant_dim(3, -2, group_g) == 0
        assert hom_invariant_dim(0, 0, GroupSpec.trivial(1)) == 1

    def test_degree_predicates(self):
        """Test membership in the graded pieces."""
        assert degree_predicates(1, 3, 0, 0) == DegreePredicates(g=True, h=False, mod4=True)
        assert not degree_predicates(1, 2, 2, 0).g
