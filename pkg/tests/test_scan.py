"""
Tests for tangency detection, scaling fits, continuation, moduli profiles,
type changes and local asymptotics.
"""

import math

import numpy as np
import pytest

from tangency_lab.bidisk import GraphInBidisk
from tangency_lab.core.errors import (
    CurveSingularityError,
    EscapeError,
    MissingEventError,
    NonMonotoneSequenceError,
    PreconditionError,
    ValidationError,
)
from tangency_lab.core.models import ContinuationCurve, TangencyEvent
from tangency_lab.henon import LocalMap, linear_family, quadratic_henon, quadratic_henon_family
from tangency_lab.scan import (
    FunctionConstraint,
    MultiplierLevelConstraint,
    ParameterWindow,
    ParametricGraph,
    SaddleTracker,
    TangencyConstraint,
    ToyPullBack,
    count_per_index,
    detect_tangencies,
    detect_tangency,
    detect_type_change,
    distance_to_graph,
    fit_scaling,
    moduli_probe,
    moduli_profile,
    representatives,
    resonance_closure,
    return_index,
    secondary_sequence,
    segment_problem,
    trace_constraint_curve,
    verify_curve,
    verify_local_asymptotics,
)

Y0 = 0.3


def _unstable(sigma: int) -> ParametricGraph:
    """x = (y - 0.3)^2 + lambda^sigma."""
    return ParametricGraph.power_at(Y0, 2, {sigma: 1.0})


def _event(index: int, lam: float) -> TangencyEvent:
    return TangencyEvent(parameter=[lam], point=(Y0, 0.0), residual=0.0, index=index)


def _closed_form_moduli(a: float) -> float:
    z = 1.0 - a
    root = math.sqrt(z * z + a)
    return math.log(abs(z + root)) / math.log(abs(z - root))


class TestDetection:
    """Test tangencies between x = (y - 0.3)^2 + lambda and x = 2^-n."""

    def test_single_tangency(self):
        target = ToyPullBack(1.0, 2.0).graph(3)
        events = detect_tangencies(None, _unstable(1), target, ParameterWindow(0j, 1.0))

        assert len(events) == 1
        assert events[0].parameter[0] == pytest.approx(1 / 8)
        assert events[0].point[0] == pytest.approx(Y0)

    def test_classified_tangency_is_quadratic(self):
        target = ToyPullBack(1.0, 2.0).graph(2)
        window = ParameterWindow(0j, 1.0)
        event = detect_tangency(None, _unstable(1), target, window, rng=np.random.default_rng(0))

        assert event is not None
        assert event.record is not None
        assert (event.record.h, event.record.m) == (1, 1)

    def test_degenerate_tangency_is_classified(self):
        """x = (y - 0.3)^3 + lambda has contact order 3 with x = 0 at lambda = 0."""
        unstable = ParametricGraph.power_at(Y0, 3, {1: 1.0})
        axis = ParametricGraph.constant(0.0, "axis")
        event = detect_tangency(None, unstable, axis, ParameterWindow(0j, 0.5), rng=np.random.default_rng(0))

        assert event is not None
        assert event.classification_error is None
        assert abs(event.parameter[0]) < 1e-10
        assert abs(event.point[0] - Y0) < 1e-10
        assert (event.record.h, event.record.m) == (2, 2)
        assert not event.record.quadratic_positive_speed

    def test_unclassified_tangency_keeps_the_reason(self):
        """x = (y - 0.3)^2 touches x = 0 for every lambda."""
        unstable = ParametricGraph.power_at(Y0, 2)
        axis = ParametricGraph.constant(0.0, "axis")
        event = detect_tangency(None, unstable, axis, ParameterWindow(0j, 0.5), rng=np.random.default_rng(0))

        assert event is not None
        assert event.record is None
        assert event.classification_error.startswith("PersistentTangencyError")

    def test_window_without_tangency(self):
        window = ParameterWindow(0.9, 0.05)

        assert detect_tangency(None, _unstable(1), ToyPullBack(1.0, 2.0).graph(1), window) is None

    def test_window_radius_must_be_positive(self):
        with pytest.raises(ValidationError):
            ParameterWindow(0j, 0.0)

    def test_multiplicity_two_gives_two_parameters(self):
        """lambda^2 = 2^-10 has the two roots +-2^-5."""
        target = ToyPullBack(1.0, 2.0).graph(10)
        window = ParameterWindow(0j, 1.5 * 2.0**-5)
        events = detect_tangencies(None, _unstable(2), target, window)

        assert sorted(e.parameter[0].real for e in events) == pytest.approx([-(2.0**-5), 2.0**-5])


class TestSecondarySequence:
    """Test secondary sequences and scaling fits."""

    def test_scaling_slope_is_log_u(self):
        bracket = (ParameterWindow(0j, 1.0), ParameterWindow(0j, 1.0))
        events = secondary_sequence(None, _unstable(1), ToyPullBack(1.0, 2.0), range(5, 13), bracket)
        result = fit_scaling(events, u0=2.0, sigma=1)

        assert result.indices == list(range(5, 13))
        assert result.slope == pytest.approx(math.log(2.0), rel=1e-6)
        assert result.deviation < 1e-6

    def test_all_branches_counts(self):
        bracket = (ParameterWindow(0j, 1.0), ParameterWindow(0j, 1.0))
        events = secondary_sequence(
            None, _unstable(2), ToyPullBack(1.0, 2.0), [4, 5, 6], bracket, all_branches=True
        )

        assert count_per_index(events) == {4: 2, 5: 2, 6: 2}
        assert representatives(events)[6].modulus == pytest.approx(2.0**-3)

    def test_missing_event(self):
        bracket = (ParameterWindow(0.9, 0.05), ParameterWindow(0j, 1.0))
        with pytest.raises(MissingEventError):
            secondary_sequence(None, _unstable(1), ToyPullBack(1.0, 2.0), [1, 2], bracket)

    def test_needs_two_indices(self):
        bracket = (ParameterWindow(0j, 1.0), ParameterWindow(0j, 1.0))
        with pytest.raises(ValidationError):
            secondary_sequence(None, _unstable(1), ToyPullBack(1.0, 2.0), [3], bracket)


class TestScalingFit:
    """Test the regression preconditions."""

    def test_too_few_indices(self):
        events = [_event(n, 2.0**-n) for n in range(1, 5)]
        with pytest.raises(PreconditionError):
            fit_scaling(events)

    def test_non_monotone_sequence(self):
        moduli = [0.5, 0.25, 0.125, 0.2, 0.05, 0.02, 0.01, 0.005]
        events = [_event(n, m) for n, m in enumerate(moduli, start=1)]
        with pytest.raises(NonMonotoneSequenceError) as exc:
            fit_scaling(events)

        assert exc.value.details["n"] == 4

    def test_events_need_indices(self):
        with pytest.raises(PreconditionError):
            representatives([TangencyEvent(parameter=[0.1], point=(0, 0), residual=0.0)])

    def test_resonance_closure(self):
        closure = resonance_closure(2.0, 0.5, m=1, h=1, q=2)

        assert (closure.a, closure.b) == (1, 1)
        assert closure.confirmed
        assert closure.relation_error == pytest.approx(0.0)

    def test_closure_without_resonance(self):
        with pytest.raises(PreconditionError):
            resonance_closure(2.0, 0.5, m=1, h=1, q=1)


class TestContinuation:
    """Test pseudo-arclength continuation."""

    def test_segment(self):
        constraint = segment_problem((0.0, 0.0), (1.0, 0.0))
        curve = trace_constraint_curve(constraint, (0.0, 0.0), step=0.1, samples=5, direction=(1.0, 0.0))

        assert len(curve.points) == 5
        assert all(abs(p[1]) < 1e-12 for p in curve.points)
        assert curve.points[-1][0] == pytest.approx(0.4, abs=1e-3)
        assert verify_curve(constraint, curve).passed

    def test_persistent_tangency_curve(self):
        """(y - 0.3)^2 + l1 = l2 stays tangent along l1 = l2, y = 0.3."""
        constraint = TangencyConstraint.from_expressions("(y - 0.3)**2 + l1", "l2")
        curve = trace_constraint_curve(constraint, (0.1, 0.1, 0.3), step=0.05, samples=4)

        for l1, l2, y in curve.points:
            assert l1 == pytest.approx(l2, abs=1e-9)
            assert y == pytest.approx(0.3, abs=1e-9)

    def test_rank_drop_reports_location(self):
        constraint = FunctionConstraint(lambda x: [x[0] * x[1]], ("p", "q"))
        with pytest.raises(CurveSingularityError) as exc:
            trace_constraint_curve(constraint, (0.0, 0.0), samples=3)

        assert exc.value.details["location"] == [0.0, 0.0]

    def test_seed_off_the_curve(self):
        constraint = FunctionConstraint(lambda x: [1.0], ("p", "q"), lambda x: [[0.0, 0.0]])
        with pytest.raises(PreconditionError):
            trace_constraint_curve(constraint, (0.0, 0.0), samples=3)

    def test_needs_samples_or_length(self):
        with pytest.raises(ValidationError):
            trace_constraint_curve(segment_problem((0, 0), (1, 0)), (0.0, 0.0))

    def test_multiplier_level_residual(self):
        """The saddle (0.5, 0.5) of f_{0.5,0} sits on the level |mu| = |u|."""
        u = (1 + math.sqrt(3)) / 2
        constraint = MultiplierLevelConstraint(quadratic_henon_family(), u)
        x = constraint.pack((0.5, 0.0), (0.5, 0.5), u)

        assert np.max(np.abs(constraint.residual(x))) < 1e-12


class TestModuli:
    """Test ln|u| / ln|s| along the quadratic family."""

    def test_probe_matches_closed_form(self):
        sample = moduli_probe(quadratic_henon(0.5, 0.0), (0.5, 0.5))

        assert sample.moduli == pytest.approx(_closed_form_moduli(0.5), abs=1e-10)
        assert sample.moduli == pytest.approx(-0.31024, abs=1e-4)
        assert sample.identity_error < 1e-12

    def test_profile_is_not_constant(self):
        curve = ContinuationCurve(
            constraint="segment",
            unknowns=["a", "c"],
            points=[[0.5, 0.0], [0.6, 0.0]],
            arclength=[0.0, 0.1],
            residuals=[0.0, 0.0],
            step=0.1,
        )
        tracker = SaddleTracker(quadratic_henon_family(), (0.5, 0.5))
        profile = moduli_profile(curve, tracker)

        assert len(profile.samples) == 2
        assert profile.samples[1].moduli == pytest.approx(_closed_form_moduli(0.6), abs=1e-10)
        assert profile.non_constant

    def test_type_change_of_linear_family(self):
        """u(lambda) = 0.5 + lambda crosses the unit circle at lambda = 1/2."""
        family = linear_family({0: 0.5, 1: 1.0}, {0: 0.3})
        events = detect_type_change(family, [[0.0, 0.25, 0.75, 1.0]])

        assert len(events) == 1
        assert events[0].kind == "sink->saddle"
        assert events[0].parameter[0] == pytest.approx(0.5, abs=1e-7)

    def test_grid_must_match_dimension(self):
        with pytest.raises(ValidationError):
            detect_type_change(quadratic_henon_family(), [[0.1, 0.2]])


class TestAsymptotics:
    """Test distance decay and return indices near a tangency."""

    def test_distance_to_vertical_line(self):
        assert distance_to_graph(GraphInBidisk.vertical([0.0]), 0.3, 0.5) == pytest.approx(0.3)

    def test_return_index(self):
        local = LocalMap.linear(np.diag([2.0, 0.5]))

        assert return_index(local, (0.01, 0.5), 10) == 0
        assert return_index(local, (0.4, 0.03), 10) == 2

    def test_backward_escape(self):
        local = LocalMap.linear(np.diag([2.0, 0.5]))
        with pytest.raises(EscapeError):
            return_index(local, (0.2, 0.95), 10)

    def test_linear_saddle(self):
        local = LocalMap.linear(np.diag([2.0, 0.5]))
        unstable = GraphInBidisk.vertical([Y0**2, -2 * Y0, 1.0], bound=2.0)
        report = verify_local_asymptotics(local, unstable, GraphInBidisk.vertical([0.2]), range(5, 26), Y0)

        assert report.slope_deviation <= 0.01
        assert report.bound <= 2.0
        assert report.ratio == pytest.approx(1.0)

    def test_needs_a_saddle(self):
        local = LocalMap.linear(np.diag([0.5, 0.3]))
        line = GraphInBidisk.vertical([0.0])
        with pytest.raises(PreconditionError):
            verify_local_asymptotics(local, line, line, range(5, 10), Y0)
