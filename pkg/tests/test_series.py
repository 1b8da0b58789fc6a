"""
Tests for truncated series arithmetic and the polynomial root utilities.
"""

import numpy as np
import pytest

from tangency_lab.core.errors import (
    BoundaryAmbiguityError,
    ConvergenceError,
    DegreeUnderflowError,
    PreconditionError,
    SmallDivisorError,
    ValidationError,
)
from tangency_lab.series import (
    TruncatedSeries1,
    TruncatedSeries2,
    compose1,
    compose2,
    invert_map,
    reversion,
    root_clusters,
    roots_in_disk,
    series_arith,
    series_from_json,
    solve_homological,
    winding_count,
    winding_number,
)


class TestTruncatedSeries1:
    """Test one-variable series arithmetic and tail bookkeeping."""

    def test_product_moves_dropped_terms_into_tail(self):
        """(1 + t)^2 truncated at degree 1 keeps 1 + 2t and a tail of 1."""
        s = TruncatedSeries1.from_coeffs([1, 1])
        product = s * s

        assert product.degree == 1
        assert np.allclose(product.coeffs, [1, 2])
        assert product.tail == pytest.approx(1.0)

    def test_exact_inner_keeps_outer_degree(self):
        """Composing with an exact polynomial keeps D_outer."""
        outer = TruncatedSeries1.from_coeffs([0, 1, 1], radius=10.0)
        inner = TruncatedSeries1.from_coeffs([0, 0.5])
        result = compose1(outer, inner)

        assert result.degree == 2
        assert np.allclose(result.coeffs, [0, 0.5, 0.25])
        assert result.is_exact

    def test_reversion_of_quadratic(self):
        """The inverse of t + t^2 has alternating Catalan coefficients."""
        f = TruncatedSeries1.from_coeffs([0, 1, 1, 0, 0, 0, 0])
        g = reversion(f)

        assert np.allclose(g.coeffs, [0, 1, -1, 2, -5, 14, -42], atol=1e-10)

    def test_reversion_needs_invertible_germ(self):
        """A germ with f(0) != 0 is rejected."""
        with pytest.raises(PreconditionError):
            reversion(TruncatedSeries1.from_coeffs([1, 1, 0]))

    def test_degree_zero_derivative(self):
        """Differentiating a constant underflows the degree."""
        with pytest.raises(DegreeUnderflowError):
            TruncatedSeries1.constant(2.0, 0).derive()

    def test_extend_needs_exact_series(self):
        """Only polynomials without tail can be zero-padded."""
        s = TruncatedSeries1.from_coeffs([1, 1], tail=0.1)
        with pytest.raises(PreconditionError):
            s.extend(4)


class TestSeriesArith:
    """Test the add, mul and derive entry point."""

    def test_difference_of_squares(self):
        a = TruncatedSeries1.from_coeffs([1, 1, 0])
        b = TruncatedSeries1.from_coeffs([1, -1, 0])

        assert np.allclose(series_arith(a, b, "mul").coeffs, [1, 0, -1])

    def test_derive_cube(self):
        cube = TruncatedSeries1.from_coeffs([0, 0, 0, 1])

        assert np.allclose(series_arith(cube, None, "derive").coeffs, [0, 0, 3])

    def test_two_variable_sum_cancels(self):
        a = TruncatedSeries2.from_terms({(0, 2): 1.0, (1, 0): 1.0}, 2)
        b = TruncatedSeries2.from_terms({(1, 0): -1.0}, 2)
        total = series_arith(a, b, "add")

        assert total.coefficient(0, 2) == 1.0
        assert total.coefficient(1, 0) == 0.0

    def test_mixed_variable_counts(self):
        with pytest.raises(ValidationError):
            series_arith(TruncatedSeries1.from_coeffs([1]), TruncatedSeries2.from_terms({}, 1), "add")

    def test_unknown_kind(self):
        s = TruncatedSeries1.from_coeffs([1, 1])
        with pytest.raises(ValidationError):
            series_arith(s, s, "divide")


class TestTruncatedSeries2:
    """Test two-variable series."""

    def test_triangular_table_required(self):
        """Coefficients above the total degree are rejected."""
        table = np.ones((2, 2))
        with pytest.raises(ValidationError):
            TruncatedSeries2(table)

    def test_terms_above_degree_go_to_tail(self):
        """from_terms bounds dropped monomials on the bidisk."""
        s = TruncatedSeries2.from_terms({(1, 0): 1.0, (2, 1): 3.0}, 2, radii=(0.5, 1.0))

        assert s.coefficient(1, 0) == 1.0
        assert s.tail == pytest.approx(3.0 * 0.25)

    def test_homological_small_divisor(self):
        """A vanishing divisor names the offending monomial."""
        rhs = TruncatedSeries2.from_terms({(2, 0): 1.0, (1, 1): 1.0}, 3)
        with pytest.raises(SmallDivisorError) as exc:
            solve_homological(rhs, lambda i, j: 0.0 if (i, j) == (1, 1) else 2.0)

        assert exc.value.details["monomial"] == (1, 1)

    def test_invert_map_is_inverse_through_degree(self):
        """F(G(x, y)) = (x, y) through the truncation degree."""
        f1 = TruncatedSeries2.from_terms({(1, 0): 2.0, (0, 2): 1.0}, 4)
        f2 = TruncatedSeries2.from_terms({(0, 1): 1 / 3, (2, 0): 1.0}, 4)
        g1, g2 = invert_map((f1, f2))

        x = TruncatedSeries2.variable(0, 4)
        y = TruncatedSeries2.variable(1, 4)
        assert np.allclose(compose2(f1, g1, g2, 4).coeffs, x.coeffs, atol=1e-10)
        assert np.allclose(compose2(f2, g1, g2, 4).coeffs, y.coeffs, atol=1e-10)

    def test_invert_map_with_sheared_linear_part(self):
        """Cross linear terms belong to L, not to the nonlinear remainder."""
        f1 = TruncatedSeries2.from_terms({(1, 0): 2.0, (0, 1): 0.5, (1, 1): 1.0}, 4)
        f2 = TruncatedSeries2.from_terms({(1, 0): 0.25, (0, 1): 1.0, (0, 3): -1.0}, 4)
        g1, g2 = invert_map((f1, f2))

        x = TruncatedSeries2.variable(0, 4)
        y = TruncatedSeries2.variable(1, 4)
        assert np.allclose(compose2(f1, g1, g2, 4).coeffs, x.coeffs, atol=1e-10)
        assert np.allclose(compose2(f2, g1, g2, 4).coeffs, y.coeffs, atol=1e-10)


class TestSeriesJson:
    """Test the shared series JSON object."""

    def test_two_variable_payload(self):
        """Coefficients are listed row by row over i + j <= D."""
        payload = {
            "vars": 2,
            "degree": 1,
            "radius": [1.0, 2.0],
            "tail": 0.0,
            "coeffs": [[0, 0], [1, 0], [2, 0]],
        }
        s = series_from_json(payload)

        assert isinstance(s, TruncatedSeries2)
        assert s.coefficient(0, 1) == 1.0
        assert s.coefficient(1, 0) == 2.0
        assert s.radii == (1.0, 2.0)

    def test_wrong_coefficient_count(self):
        """Malformed payloads are validation errors."""
        with pytest.raises(ValidationError):
            series_from_json({"vars": 1, "degree": 3, "coeffs": [[1, 0]]})


class TestRoots:
    """Test root clustering and winding counts."""

    def test_double_root_cluster(self):
        """(z - 1)^2 (z + 2) has a double root at 1."""
        clusters = root_clusters([2, -3, 0, 1])

        assert [c.multiplicity for c in clusters] == [1, 2]
        assert clusters[0].center == pytest.approx(-2.0)
        assert clusters[1].center == pytest.approx(1.0, abs=1e-6)

    def test_roots_in_disk(self):
        """Only the double root lies in |z| < 1.5."""
        inside = roots_in_disk([2, -3, 0, 1], 1.5)

        assert len(inside) == 1
        assert inside[0].multiplicity == 2

    def test_root_on_boundary_is_ambiguous(self):
        """A root on the circle cannot be counted."""
        with pytest.raises(BoundaryAmbiguityError):
            roots_in_disk([-1, 0, 1], 1.0)

    def test_winding_count(self):
        """z^3 has three zeros in the unit disk."""
        assert winding_count(lambda z: z**3, 1.0) == 3

    def test_curve_through_origin(self):
        """The winding number is undefined on a curve through 0."""
        with pytest.raises(ConvergenceError):
            winding_number(np.array([1.0, 0.0, -1.0, 1.0]))
