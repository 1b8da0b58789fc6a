"""
Tests for tangency germs: order, multiplicity, speed blocks and records.
"""

from fractions import Fraction

import numpy as np
import pytest

from tangency_lab.core.errors import (
    ExponentResolutionError,
    OrderExceedsTruncationError,
    PersistentTangencyError,
    PreconditionError,
)
from tangency_lab.core.models import SpeedBlock
from tangency_lab.germ import (
    UnfoldingGerm,
    classify_unfolding,
    lift_jacobian,
    multiplicity_counting,
    multiplicity_resultant,
    order_of_tangency,
    random_monomial_germ,
    snap_exponent,
    sylvester_matrix,
)
from tangency_lab.series import TruncatedSeries1


class TestOrderOfTangency:
    """Test the order h read from phi(0, .)."""

    def test_cubic_contact(self):
        assert order_of_tangency(TruncatedSeries1.from_coeffs([0, 0, 0, 1])) == 2

    def test_transverse_crossing_is_not_a_tangency(self):
        with pytest.raises(PreconditionError):
            order_of_tangency(TruncatedSeries1.from_coeffs([0, 1, 1]))

    def test_flat_germ_exceeds_truncation(self):
        with pytest.raises(OrderExceedsTruncationError):
            order_of_tangency(TruncatedSeries1.from_coeffs([0, 0, 0]))

    def test_weierstrass_degree(self):
        """t^2 + lam keeps t-degree h + 1 = 2; t^2 + t^3 + lam keeps 3."""
        assert UnfoldingGerm.from_terms({(0, 2): 1, (1, 0): 1}, 4).weierstrass_degree() == 2
        germ = UnfoldingGerm.from_terms({(0, 2): 1, (0, 3): 1, (1, 0): 1}, 4)
        assert germ.weierstrass_degree() == 3


class TestMultiplicity:
    """Test the resultant and counting algorithms."""

    def test_sylvester_matrix_shape(self):
        """Degrees 2 and 1 give a 3 x 3 matrix."""
        mat = sylvester_matrix(np.array([1, 0, 1]), np.array([0, 2]))

        assert mat.shape == (3, 3)
        assert abs(np.linalg.det(mat)) == pytest.approx(4.0)

    @pytest.mark.parametrize("h,k", [(1, 1), (1, 2), (2, 2), (3, 1)])
    def test_resultant_on_monomial_germs(self, h, k):
        """t^(h+1) + lam^k has multiplicity h k."""
        germ = UnfoldingGerm.from_terms({(0, h + 1): 1.0, (k, 0): 1.0}, 8)

        assert germ.h == h
        assert multiplicity_resultant(germ) == h * k

    def test_counting_agrees(self):
        germ = UnfoldingGerm.from_terms({(0, 2): 1.0, (2, 0): 1.0}, 6)
        count = multiplicity_counting(germ, rng=np.random.default_rng(1))

        assert count.m == 2
        assert len(count.perturbations) == 2

    @pytest.mark.parametrize("h,k", [(2, 3), (3, 3)])
    def test_counting_on_larger_monomial_germs(self, h, k):
        """Both draws of t^(h+1) + lam^k find exactly h k distinct solutions."""
        germ = UnfoldingGerm.from_terms({(0, h + 1): 1.0, (k, 0): 1.0}, 8)
        count = multiplicity_counting(germ, rng=np.random.default_rng(3))

        assert count.m == h * k
        assert len(count.solutions) == h * k
        assert multiplicity_resultant(germ) == count.m

    def test_persistent_tangency(self):
        """phi = t^2 has a tangency for every lambda."""
        germ = UnfoldingGerm.from_terms({(0, 2): 1.0}, 4)
        with pytest.raises(PersistentTangencyError):
            multiplicity_resultant(germ)

    def test_random_germ_multiplicity(self):
        germ, expected = random_monomial_germ(np.random.default_rng(5), 2, 1)

        assert expected == 2
        assert multiplicity_resultant(germ) == expected


class TestClassification:
    """Test the TangencyRecord of a quadratic, positive-speed germ."""

    def test_lift_jacobian(self):
        germ = UnfoldingGerm.from_terms({(0, 2): 1.0, (1, 0): 1.0}, 4)

        assert np.allclose(lift_jacobian(germ), [[1, 0], [0, 2]])

    def test_quadratic_positive_speed(self):
        germ = UnfoldingGerm.from_terms({(0, 2): 1.0, (1, 0): 1.0}, 6)
        record = classify_unfolding(germ, rng=np.random.default_rng(0))

        assert record.h == 1
        assert record.m == 1
        assert record.quadratic_positive_speed
        assert record.blocks == [SpeedBlock.of(1, 1)]
        assert record.to_output()["blocks"] == [[1, "1/1"]]

    def test_cubic_positive_speed_is_not_quadratic(self):
        """t^3 + lam has positive speed but h = 2."""
        germ = UnfoldingGerm.from_terms({(0, 3): 1.0, (1, 0): 1.0}, 8)
        record = classify_unfolding(germ, rng=np.random.default_rng(0))

        assert (record.h, record.m) == (2, 2)
        assert record.blocks == [SpeedBlock.of(2, 1)]
        assert not record.quadratic_positive_speed

    def test_quadratic_with_double_speed(self):
        """t^2 + lam^2 is quadratic but m = 2."""
        germ = UnfoldingGerm.from_terms({(0, 2): 1.0, (2, 0): 1.0}, 8)
        record = classify_unfolding(germ, rng=np.random.default_rng(0))

        assert (record.h, record.m) == (1, 2)
        assert record.blocks == [SpeedBlock.of(1, 2)]
        assert not record.quadratic_positive_speed

    def test_without_speed(self):
        germ = UnfoldingGerm.from_terms({(0, 3): 1.0, (2, 0): 1.0}, 8)
        record = classify_unfolding(germ, rng=np.random.default_rng(0), with_speed=False)

        assert (record.h, record.m) == (2, 4)
        assert record.blocks == []
        assert not record.quadratic_positive_speed


class TestSpeedExponents:
    """Test snapping of measured exponents to p / h_j."""

    def test_snaps_to_block_denominator(self):
        assert snap_exponent(0.501, 2) == Fraction(1, 2)
        assert snap_exponent(1.0, 1) == Fraction(1)

    def test_other_denominators_rejected(self):
        """1/3 is not of the form p/4."""
        with pytest.raises(ExponentResolutionError):
            snap_exponent(1 / 3, 4)
