"""
Tests for the verification suite framework and the resonance suite.
"""

from typing import List

import numpy as np
import pytest

from tangency_lab.core.errors import ConvergenceError, UnknownSuiteError
from tangency_lab.suites import (
    SUITES,
    BaseSuite,
    criterion,
    get_suites,
    lattice_scan,
    run_suites,
    within,
)
from tangency_lab.suites.resonance import ResonanceSuite


class _MixedSuite(BaseSuite):
    """One passing check and two failing ones."""

    name = "mixed"
    description = "framework test"

    def checks(self):
        def passing(rng):
            return criterion("draw", float(rng.random()), None, True)

        def failing(rng):
            raise ConvergenceError("Newton did not converge")

        def crashing(rng):
            raise RuntimeError("worker died")

        return [("passing", passing), ("failing", failing), ("crashing", crashing)]


class TestRegistry:
    """Test suite lookup."""

    def test_registered_order(self):
        assert list(SUITES) == [
            "germ-oracles",
            "speed-expansion",
            "graph-decay",
            "rh-counts",
            "scaling-laws",
            "normal-form",
            "asymptotics",
            "multipliers",
            "horseshoe",
            "resonance",
        ]

    def test_all_selects_every_suite(self):
        assert [s.name for s in get_suites("all")] == list(SUITES)

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuiteError) as exc:
            get_suites("moduli")

        assert exc.value.exit_code == 3


class TestCriteria:
    """Test report lines."""

    def test_within_relative(self):
        line = within("slope", 0.7, 0.69314718, 0.03)

        assert line.passed
        assert line.measured == 0.7

    def test_within_absolute(self):
        assert not within("gap", 1e-6, 0.0, 1e-8, relative=False).passed

    def test_numpy_values_become_plain(self):
        line = criterion("count", np.int64(4), 4, np.bool_(True))

        assert line.measured == 4
        assert type(line.measured) is int
        assert line.passed is True


class TestSuiteRuns:
    """Test the per-check isolation of suite runs."""

    def test_failures_become_lines(self):
        report = _MixedSuite().run(seed=1)
        names: List[str] = [line.name for line in report.criteria]

        assert names == ["draw", "failing", "crashing"]
        assert [line.passed for line in report.criteria] == [True, False, False]
        assert report.criteria[1].detail.startswith("ConvergenceError")
        assert not report.passed

    def test_same_seed_same_report(self):
        first = _MixedSuite().run(seed=3).criteria[0].measured
        second = _MixedSuite().run(seed=3).criteria[0].measured

        assert first == second

    @pytest.mark.asyncio
    async def test_run_suites_keeps_order(self):
        reports = await run_suites([_MixedSuite(), ResonanceSuite()], seed=20240601, threads=2)

        assert [r.suite for r in reports] == ["mixed", "resonance"]
        assert reports[1].passed


class TestResonanceLattice:
    """Test the brute-force resonance scan."""

    def test_lattice_scan_of_two_and_half(self):
        assert lattice_scan(2.0, 0.5, 4) == [(1, 1), (2, 2)]

    def test_lattice_scan_of_four_and_half(self):
        assert lattice_scan(4.0, 0.5, 6) == [(1, 2), (2, 4)]

    def test_non_resonant(self):
        assert lattice_scan(2.0, 1 / 3, 12) == []
