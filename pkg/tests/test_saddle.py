"""
Tests for periodic points, resonances, manifold germs, normal forms and the
zero-slope section.
"""

import numpy as np
import pytest

from tangency_lab.core.errors import PreconditionError, ResonanceError, ValidationError
from tangency_lab.core.models import BranchKind, SaddleKind
from tangency_lab.henon import LocalMap, apply, quadratic_henon
from tangency_lab.saddle import (
    NormalFormGerm,
    classify_multipliers,
    detect_resonance,
    dynamical_slope_nonzero,
    find_periodic,
    koenigs_linearize,
    manifold_germ,
    margins,
    normal_form_star_k,
    periodic_census,
    section_residual,
    slope_decay_ratios,
    zero_slope_section,
)
from tangency_lab.series import TruncatedSeries1, TruncatedSeries2, compose1


class TestPeriodicPoints:
    """Test Newton search and classification."""

    def test_classify_multipliers(self):
        assert classify_multipliers(2.0, 0.5) == SaddleKind.SADDLE
        assert classify_multipliers(0.5, 0.3) == SaddleKind.SINK
        assert classify_multipliers(2.0, 3.0) == SaddleKind.SOURCE
        assert classify_multipliers(1.0, 0.5) == SaddleKind.INDETERMINATE

    def test_fixed_point_of_dissipative_map(self):
        """f_{0.5,0} has the saddle (0.5, 0.5) with u s = -0.5."""
        report = find_periodic(quadratic_henon(0.5, 0.0), 1, (0.45, 0.55))

        assert report.kind == SaddleKind.SADDLE
        assert np.allclose(report.point, (0.5, 0.5))
        assert report.saddle is not None
        assert report.saddle.u == pytest.approx((1 + np.sqrt(3)) / 2)
        assert report.saddle.u * report.saddle.s == pytest.approx(-0.5)

    def test_period_must_be_positive(self):
        with pytest.raises(ValidationError):
            find_periodic(quadratic_henon(0.5, 0.0), 0, (0.0, 0.0))

    def test_zero_jacobian_rejected(self):
        with pytest.raises(PreconditionError):
            find_periodic(quadratic_henon(0.0, -1.0), 1, (0.0, 0.0))

    def test_itinerary_census_of_horseshoe(self):
        """f_{0.1,-6} has 2^2 period-2 points, one per itinerary."""
        f = quadratic_henon(0.1, -6.0)
        census = periodic_census(f, 2)

        assert sorted(word for word, _ in census) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        for _, point in census:
            image = apply(f, point, "forward", 2)
            assert np.allclose(image, point, atol=1e-9)


class TestResonance:
    """Test the resonance scan and the margins."""

    def test_resonances_of_two_and_half(self):
        assert detect_resonance(2.0, 0.5, 4) == [(1, 1), (2, 2)]

    def test_non_resonant_pair(self):
        assert detect_resonance(2.0, 1 / 3, 12) == []

    def test_needs_saddle_multipliers(self):
        with pytest.raises(PreconditionError):
            detect_resonance(0.5, 2.0, 4)

    def test_margins(self):
        """|u| = 2, |s| = 1/2 gives rho = 1, r = 4 and k' = 3 for ell = 1."""
        assert margins(2.0, 0.5, 1) == (1.0, 4, 3)


class TestManifoldGerms:
    """Test invariant manifold parameterizations."""

    def test_unstable_manifold_residual(self):
        f = quadratic_henon(0.5, 0.0)
        saddle = find_periodic(f, 1, (0.5, 0.5)).saddle
        germ = manifold_germ(f, saddle, BranchKind.UNSTABLE, degree=10, radius=0.1)

        assert germ.degree == 10
        assert germ.residual(f) <= 1e-8


class TestKoenigs:
    """Test Koenigs linearization."""

    @pytest.mark.parametrize("mu", [2.0, 0.5])
    def test_conjugates_to_linear(self, mu):
        """phi(h(x)) = mu phi(x) through the truncation degree."""
        h = TruncatedSeries1.from_coeffs([0, mu, 0, 1, 0, 0, 0], radius=0.2)
        phi = koenigs_linearize(h, 1)

        assert np.allclose(compose1(phi, h).coeffs, mu * phi.coeffs, atol=1e-10)

    def test_quadratic_term_must_vanish(self):
        h = TruncatedSeries1.from_coeffs([0, 2.0, 1.0, 0, 0], radius=0.2)
        with pytest.raises(PreconditionError):
            koenigs_linearize(h, 1)


class TestNormalForm:
    """Test the normal form reduction."""

    def test_flatness_and_conjugacy(self):
        local = LocalMap.from_terms(
            {(1, 0): 2.0, (2, 0): 0.1, (1, 1): 0.05, (0, 2): 0.1},
            {(0, 1): 1 / 3, (2, 0): 0.1, (0, 2): 0.05},
            10,
        )
        nf = normal_form_star_k(local, 3)

        assert nf.flatness() < 1e-10
        assert nf.residual(local) <= 1e-8

    def test_resonant_germ_rejected(self):
        with pytest.raises(ResonanceError):
            normal_form_star_k(LocalMap.linear(np.diag([2.0, 0.5]), degree=4), 1)


class TestZeroSlopeSection:
    """Test the zero-slope section on a germ with a linear section."""

    def setup_method(self):
        # g1 = 0 and g2 = 0.1 give zeta(y) = 0.1 y exactly
        g1 = TruncatedSeries2.zero(2)
        g2 = TruncatedSeries2.constant(0.1, 2)
        self.nf = NormalFormGerm.from_components(2.0, 1 / 3, g1, g2, 1)

    def test_section_coefficients(self):
        zeta = zero_slope_section(self.nf, 4)

        assert np.allclose(zeta.coeffs, [0, 0.1, 0, 0, 0])
        assert section_residual(self.nf, zeta, 0.5) <= 1e-12

    def test_deviation_decays_at_rate_s_over_u(self):
        trace = slope_decay_ratios(self.nf, 0.5, 1.0, iterations=10)

        assert np.allclose(trace.ratios(), 1 / 6)

    def test_dynamical_slope(self):
        assert not dynamical_slope_nonzero(self.nf, 0.5, 0.05)
        assert dynamical_slope_nonzero(self.nf, 0.5, 1.0)

    def test_base_point_outside_radius(self):
        with pytest.raises(PreconditionError):
            dynamical_slope_nonzero(self.nf, 2.0, 0.0)
