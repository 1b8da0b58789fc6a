"""
Tests for bidisk graphs, Riemann-Hurwitz counts, graph transforms and
horseshoe charts.
"""

import itertools

import numpy as np
import pytest

from tangency_lab.bidisk import (
    BidiskFrame,
    GraphInBidisk,
    HorizontalManifold,
    branch_anchors,
    crossing_certificate,
    graph_transform_n,
    henon_pull_back,
    horizontal_degree,
    horseshoe_census,
    horseshoe_stable_graphs,
    intersect_graphs,
    rh_check,
    split_tangency,
    tangency_count,
    vertical_tangencies,
)
from tangency_lab.core.errors import CrossingVerificationError, PreconditionError, ValidationError
from tangency_lab.core.models import Orientation
from tangency_lab.henon import LocalMap, PolynomialAutomorphism, quadratic_henon


class TestGraphs:
    """Test graph evaluation in normalized coordinates."""

    def test_normalized_evaluation(self):
        """Series are expressed in v / R."""
        graph = GraphInBidisk.vertical([0.1, 0.2], domain_radius=2.0)

        assert graph.evaluate(2.0) == pytest.approx(0.3)
        assert graph.derivative(0.0, 1) == pytest.approx(0.1)
        assert graph.point(2.0) == pytest.approx((0.3, 2.0))

    def test_containment_slack(self):
        assert GraphInBidisk.vertical([0.5]).containment_slack == pytest.approx(0.5)

    def test_positive_radii_required(self):
        with pytest.raises(ValidationError):
            GraphInBidisk.vertical([0.0], domain_radius=0.0)


class TestRiemannHurwitz:
    """Test intersections and tangency counts against a horizontal manifold."""

    def setup_method(self):
        # z -> (z^2, z / 2): a degree-2 cover tangent to x = 0 at the origin
        self.manifold = HorizontalManifold.from_coeffs([0, 0, 1], [0, 0.5])
        self.line = GraphInBidisk.vertical([0.0])

    def test_degree_and_tangencies(self):
        assert self.manifold.degree == 2
        assert [order for _, _, order in self.manifold.tangencies] == [1]

    def test_vertical_tangency_at_origin(self):
        [(z, point, order)] = vertical_tangencies(self.manifold)

        assert abs(z) < 1e-12
        assert np.allclose(point, (0, 0))
        assert order == 1

    def test_double_intersection(self):
        intersections = intersect_graphs(self.manifold, self.line)

        assert len(intersections) == 1
        assert intersections[0].multiplicity == 2
        assert tangency_count(self.manifold, [self.line]) == [1]

    def test_bound_holds(self):
        check = rh_check(self.manifold, [self.line, GraphInBidisk.vertical([0.2])])

        assert check.count == 1
        assert check.bound == 1
        assert check.holds

    def test_splitting_gives_simple_points(self):
        """x = 0.01 meets the manifold at z = +-0.1."""
        points = split_tangency(self.manifold, self.line, 1e-2)

        assert [p.multiplicity for p in points] == [1, 1]
        assert sorted(abs(p.parameter) for p in points) == pytest.approx([0.1, 0.1])

    def test_manifold_leaving_bidisk(self):
        escaping = HorizontalManifold.from_coeffs([0, 1], [0, 2.0])
        with pytest.raises(PreconditionError):
            horizontal_degree(escaping)

    def test_horizontal_graphs_rejected(self):
        with pytest.raises(PreconditionError):
            intersect_graphs(self.manifold, GraphInBidisk.horizontal([0.0]))


class TestGraphTransform:
    """Test both transform engines on a linear saddle."""

    @pytest.mark.parametrize("engine", ["series", "collocation"])
    def test_linear_contraction(self, engine):
        """y = c x maps to y = c s / u x under diag(u, s)."""
        local = LocalMap.linear(np.diag([2.0, 0.5]))
        graph = GraphInBidisk.horizontal([0, 0.5, 0], bound=2.0)
        history = graph_transform_n(local, graph, 3, engine=engine)

        assert len(history.graphs) == 4
        assert history.final.series.coefficient(1) == pytest.approx(0.5 / 64, abs=1e-9)
        assert np.allclose(history.norm_series(0), [0.5, 0.125, 0.03125, 0.0078125], atol=1e-9)

    @pytest.mark.parametrize("engine", ["series", "collocation"])
    def test_constant_graphs(self, engine):
        """y = c pushes forward to s^n c, x = c pulls back to c / u^n."""
        local = LocalMap.linear(np.diag([2.0, 0.5]))
        horizontal = graph_transform_n(local, GraphInBidisk.horizontal([0.4]), 5, engine=engine)
        vertical = graph_transform_n(local, GraphInBidisk.vertical([0.2]), 5, engine=engine)

        assert complex(horizontal.final.evaluate(0.3)) == pytest.approx(0.4 / 32, abs=1e-12)
        assert complex(vertical.final.evaluate(0.3)) == pytest.approx(0.2 / 32, abs=1e-12)
        assert vertical.final.series.tail < 1e-12

    def test_unknown_engine(self):
        local = LocalMap.linear(np.diag([2.0, 0.5]))
        with pytest.raises(ValidationError):
            graph_transform_n(local, GraphInBidisk.horizontal([0.0]), 1, engine="spectral")


class TestHorseshoe:
    """Test the horseshoe chart of f_{0.1,-6}."""

    def setup_method(self):
        self.map = quadratic_henon(0.1, -6.0)
        self.frame = BidiskFrame(0j, 3.5)

    def test_branch_anchors_are_roots(self):
        anchors = branch_anchors(self.map.factors[0])

        assert sorted(a.real for a in anchors) == pytest.approx([-np.sqrt(6), np.sqrt(6)])

    def test_pull_back_solves_graph_equation(self):
        """The pull-back of x = 0 satisfies x^2 - 6 + 0.1 y = 0."""
        factor = self.map.factors[0]
        base = GraphInBidisk.vertical([0.0], domain_radius=3.5, bound=3.5)
        graph = henon_pull_back(factor, base, 0, degree=32)

        y = np.array([1.0, -2.0 + 1.0j, 3.0j])
        x = graph.evaluate(y)
        assert graph.orientation is Orientation.VERTICAL
        assert graph.code == "0"
        assert np.max(np.abs(x**2 - 6.0 + 0.1 * y)) < 1e-8

    def test_crossing_certificate(self):
        certificate = crossing_certificate(self.map, self.frame)

        assert certificate.windings == (1, 1)
        assert certificate.min_boundary_modulus > self.frame.radius

    def test_non_horseshoe_parameter(self):
        with pytest.raises(CrossingVerificationError):
            crossing_certificate(quadratic_henon(0.1, -1.0), self.frame)

    def test_census_by_itinerary(self):
        census = horseshoe_census(self.map, 3)

        assert sorted(word for word, _ in census) == sorted(itertools.product((0, 1), repeat=3))

    def test_census_needs_a_single_factor(self):
        twice = PolynomialAutomorphism(self.map.factors * 2)
        with pytest.raises(PreconditionError):
            horseshoe_census(twice, 1)

    def test_stable_graphs_of_length_two(self):
        family = horseshoe_stable_graphs(self.map, self.frame, 2)

        assert family.codes == ["00", "01", "10", "11"]
        assert family.disjoint
