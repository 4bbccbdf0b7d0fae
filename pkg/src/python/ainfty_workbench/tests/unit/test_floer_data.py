"""
Unit tests for the vendored Floer tables and their transport to the exterior algebra.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from algebra.scalars import bit
from services.ainfty_structure import AInftyStructure
from services.floer_data import (
    compare_with_transfer,
    hkr_mismatches,
    hkr_targets,
    load_floer_data,
    mutate,
    transport,
    validate_floer,
)
from utils.errors import ConfigError
from utils.utilities import Utilities


@pytest.fixture(scope="module")
def floer():
    return load_floer_data()


@pytest.mark.unit
class TestLoading:
    """Parsing of the JSON table."""

    def test_vendored_table(self, floer):
        """Test the generator list and the product blocks."""
        tables, dictionary = floer
        assert len(tables.generators) == 8
        assert set(dictionary) == set(tables.generators)
        assert len(tables.block(3, 0)) == 1
        assert len(tables.block(5, 1)) == 3
        assert tables.generators["xbar1"].parity == 0

    def test_unknown_generator_is_refused(self):
        """Test that a product naming an unknown generator raises."""
        raw = json.loads(Utilities().load_text("floer_tables.json"))
        raw["products"].append({"d": 2, "k": 0, "inputs": ["e", "y"], "output": "e", "coeff": "1"})
        with pytest.raises(ConfigError, match="unknown generator"):
            load_floer_data(json.dumps(raw))

    def test_bad_dictionary_sign_is_refused(self):
        """Test that a dictionary sign other than +-1 raises."""
        raw = json.loads(Utilities().load_text("floer_tables.json"))
        raw["dictionary"]["e"] = [2, []]
        with pytest.raises(ConfigError):
            load_floer_data(json.dumps(raw))


@pytest.mark.unit
class TestTransport:
    """Signed rewriting of the constants."""

    def test_cubic_constant(self, floer):
        """Test that mu^3_0(x3, x2, x1) lands on -1."""
        mu = transport(*floer)
        assert mu.entries[((bit(3), bit(2), bit(1)), 0, 0)] == -1

    def test_quintic_diagonals(self, floer):
        """Test that every diagonal mu^5_1 constant becomes +1."""
        mu = transport(*floer)
        for k in (1, 2, 3):
            assert mu.entries[((bit(k),) * 5, 0, 1)] == 1

    def test_validation_passes(self, floer):
        """Test the product table, gradings and HKR classes."""
        report = validate_floer(*floer)
        assert report.passed, report.failures
        assert report.checked_pairs == 64
        assert report.summary().startswith("PASS")

    def test_hkr_targets(self):
        """Test the expected potential pieces."""
        targets = hkr_targets(3)
        assert str(targets[(3, 0)]) == "-v1*v2*v3"
        assert targets[(5, 1)].hbar_part(1).scalar_part().coefficient((0, 5, 0)) == 1

    def test_hkr_mismatches(self):
        """Test the comparison of a scaled HKR summary with the potential."""
        targets = hkr_targets(3)
        assert hkr_mismatches(targets) == []
        flipped = hkr_mismatches(targets, -1)
        assert [line.split(":")[0] for line in flipped] == ["HKR of mu^3_0", "HKR of mu^5_1"]
        assert hkr_mismatches({}, 1, arities=range(2, 4)) == ["HKR of mu^3_0: got 0, expected -v1*v2*v3"]
        assert hkr_mismatches({}, 1, arities=range(2, 3)) == []


@pytest.mark.unit
class TestMutations:
    """Corrupted tables are caught."""

    def test_product_mutation(self, floer):
        """Test that flipping e*e fails the product check."""
        tables, dictionary = floer
        report = validate_floer(mutate(tables, 0), dictionary)
        assert not report.passed
        assert any(line.startswith("mu2(") for line in report.failures)

    def test_cubic_mutation(self, floer):
        """Test that flipping the cubic constant fails the HKR check."""
        tables, dictionary = floer
        position = next(i for i, p in enumerate(tables.products) if p.d == 3)
        report = validate_floer(mutate(tables, position), dictionary)
        assert any(line.startswith("HKR of mu^3_0") for line in report.failures)

    def test_mutation_copies(self, floer):
        """Test that the original table is left alone."""
        tables, _dictionary = floer
        mutated = mutate(tables, 0, Fraction(2))
        assert mutated.products[0].coeff == 2
        assert tables.products[0].coeff == 1


@pytest.mark.unit
class TestComparison:
    """Comparison against another structure."""

    def test_self_comparison(self, floer):
        """Test that the transported data agrees with itself."""
        mu = transport(*floer)
        assert compare_with_transfer(mu, mu) == []

    def test_sign_flip_is_reported(self, floer):
        """Test that the opposite HKR sign gives mismatches in arities three and five."""
        mu = transport(*floer)
        mismatches = compare_with_transfer(mu, mu, hkr_sign=-1)
        assert any(line.startswith("HKR of mu^3_0") for line in mismatches)
        assert sum(line.startswith("mu^5_1") for line in mismatches) == 3

    def test_products_agree_with_wedge(self, floer):
        """Test that the binary part is the exterior product."""
        mu = transport(*floer).restricted(2)
        assert compare_with_transfer(mu, AInftyStructure.wedge(3)) == []
