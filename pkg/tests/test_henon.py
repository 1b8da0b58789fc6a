"""
Tests for Hénon maps, local germs and parametric families.
"""

import numpy as np
import pytest

from tangency_lab.core.errors import PreconditionError, ScenarioParseError, ValidationError
from tangency_lab.henon import (
    HenonFactor,
    LocalMap,
    conjugated_evaluation,
    derivative,
    family_eval,
    linear_family,
    load_family,
    localize,
    quadratic_henon,
    quadratic_henon_family,
)
from tangency_lab.henon.maps import max_roundtrip_error, random_points
from tangency_lab.series import TruncatedSeries2

FAMILY_TOML = """
name = "test-henon"
parameters = ["a", "c"]

[box]
a = {re = [-1.0, 1.0]}
c = {re = [-8.0, 0.0]}

[[factors]]
polynomial = ["c", "0", "1"]
jacobian = "a"
"""


class TestHenonMaps:
    """Test Hénon factors and their compositions."""

    def test_forward_and_inverse(self):
        """f_{0.5,-1}(1, 2) = (1, 1) and the inverse undoes it."""
        f = quadratic_henon(0.5, -1.0)

        assert f.forward(1.0, 2.0) == (1.0, 1.0)
        assert f.inverse(1.0, 1.0) == pytest.approx((1.0, 2.0))
        assert f.jacobian_determinant == pytest.approx(-0.5)

    def test_roundtrip_on_random_points(self):
        """inverse o forward is the identity on the unit bidisk."""
        f = quadratic_henon(0.3 + 0.1j, -0.7)
        points = random_points(np.random.default_rng(7), 50)

        assert max_roundtrip_error(f, points) < 1e-12

    def test_chain_rule_matches_iterate(self):
        """The derivative of f^2 is the product of the one-step derivatives."""
        f = quadratic_henon(0.5, -1.0)
        point = (0.3 + 0.2j, -0.1)

        assert np.allclose(derivative(f, point, 2), f.iterate(2).derivative(point))

    def test_degree_one_polynomial_rejected(self):
        """Hénon factors need deg P >= 2."""
        with pytest.raises(ValidationError):
            HenonFactor(np.array([0.0, 1.0]), 1.0)

    def test_zero_jacobian_not_invertible(self):
        """Factors with a = 0 evaluate forward but refuse to invert."""
        factor = HenonFactor(np.array([0.0, 0.0, 1.0]), 0.0)

        assert factor.forward(2.0, 5.0) == (4.0, 2.0)
        with pytest.raises(PreconditionError):
            factor.inverse(1.0, 1.0)

    def test_iterate_needs_positive_count(self):
        with pytest.raises(ValidationError):
            quadratic_henon(0.5, 0.0).iterate(0)


class TestLocalMaps:
    """Test localization at a fixed point."""

    def setup_method(self):
        self.map = quadratic_henon(0.5, 0.0)
        self.point = (0.5, 0.5)

    def test_localized_linear_part(self):
        """The germ's linear part is the derivative at the fixed point."""
        local = localize(self.map, self.point, np.eye(2), degree=3)

        assert np.allclose(local.linear_matrix, self.map.derivative(self.point))
        assert local.fixes_origin

    def test_localized_germ_matches_direct_evaluation(self):
        """A quadratic map is represented exactly at degree 3."""
        frame = np.array([[1.0, 0.2], [0.1, 1.0]])
        local = localize(self.map, self.point, frame, degree=3)
        x, y = 0.05 + 0.01j, -0.03

        direct = conjugated_evaluation(self.map, self.point, frame, x, y)
        assert np.allclose(local.forward(x, y), direct, atol=1e-12)

    def test_non_periodic_point_rejected(self):
        with pytest.raises(PreconditionError):
            localize(self.map, (0.1, 0.2), np.eye(2), degree=3)

    def test_local_inverse(self):
        """Newton-polished inverse recovers the preimage."""
        local = localize(self.map, self.point, np.eye(2), degree=4)
        image = local.forward(0.01, 0.02)

        assert np.allclose(local.inverse(*image), (0.01, 0.02), atol=1e-12)

    def test_linear_germ(self):
        """LocalMap.linear is diagonal when the matrix is."""
        local = LocalMap.linear(np.diag([2.0, 0.5]))

        assert local.is_diagonal
        assert np.allclose(local.forward(1.0, 1.0), (2.0, 0.5))


class TestFamilies:
    """Test parametric families and family files."""

    def test_parameter_derivative(self):
        """d f / d a = (w, 0) and d f / d c = (1, 0)."""
        jet = family_eval(quadratic_henon_family(), (0.5, -1.0), jet_order=1)
        rows = jet.parameter_derivative((0.3, 0.7))

        assert np.allclose(rows, [[0.7, 0.0], [1.0, 0.0]])

    def test_parameter_outside_box(self):
        with pytest.raises(ValidationError):
            family_eval(quadratic_henon_family(), (20.0, 0.0))

    def test_load_family_file(self, tmp_path):
        """A TOML family file evaluates like the built-in family."""
        path = tmp_path / "family.toml"
        path.write_text(FAMILY_TOML)
        family = load_family(path)

        assert family.name == "test-henon"
        assert family.at((0.5, -1.0)).forward(1.0, 2.0) == pytest.approx((1.0, 1.0))

    def test_unknown_symbol_in_family_file(self, tmp_path):
        path = tmp_path / "family.toml"
        path.write_text(FAMILY_TOML.replace('"c", "0", "1"', '"c + b", "0", "1"'))

        with pytest.raises(ScenarioParseError):
            load_family(path)

    def test_linear_family(self):
        """diag(u, s) family with constant multipliers."""
        family = linear_family({0: 2.0}, {0: 0.5})

        assert np.allclose(family.at((0.1,)).linear_matrix, np.diag([2.0, 0.5]))

    def test_synthetic_family_must_fix_origin(self):
        from tangency_lab.henon import synthetic_family

        shifted = TruncatedSeries2.from_terms({(0, 0): 1.0, (1, 0): 2.0}, 2)
        identity_y = TruncatedSeries2.from_terms({(0, 1): 0.5}, 2)
        with pytest.raises(ValidationError):
            synthetic_family("bad", {(0,): shifted}, {(0,): identity_y})
