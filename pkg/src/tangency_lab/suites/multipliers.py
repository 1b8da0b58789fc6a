"""
Multiplier suite: the identity u s = jac^n at computed saddles, the moduli
value of f_{0.5,0} against its closed form and the moduli profile along an
a-axis segment of the quadratic Hénon family.
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from ..bidisk import horseshoe_census
from ..core.models import CriterionResult, PeriodicReport
from ..henon import quadratic_henon, quadratic_henon_family
from ..saddle import grid_census, periodic_report
from ..scan import (
    SaddleTracker,
    moduli_probe,
    moduli_profile,
    segment_problem,
    trace_constraint_curve,
)
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-10
PROBE_TOL = 1e-10
SPREAD_MIN = 0.1
SEGMENT = ((0.1, 0.0), (0.9, 0.0))
SEGMENT_STEP = 0.05
SEGMENT_SEED = (0.9, 0.9)


def _saddle_reports() -> List[Tuple[complex, PeriodicReport]]:
    reports = []
    horseshoe = quadratic_henon(0.1, -6.0)
    for n in (1, 2, 3):
        for _, point in horseshoe_census(horseshoe, n):
            reports.append((horseshoe.jacobian_determinant, periodic_report(horseshoe, point, n)))
    dissipative = quadratic_henon(0.5, 0.0)
    for n in (1, 2):
        for point in grid_census(dissipative, n, 2.0):
            reports.append((dissipative.jacobian_determinant, periodic_report(dissipative, point, n)))
    return [(jac, r) for jac, r in reports if r.saddle is not None]


def _identity(rng: np.random.Generator) -> CriterionResult:
    saddles = _saddle_reports()
    worst = 0.0
    for jac, report in saddles:
        assert report.saddle is not None
        expected = jac**report.period
        gap = abs(report.saddle.u * report.saddle.s - expected) / (1.0 + abs(expected))
        worst = max(worst, gap)
    return criterion(
        "u s = jac^n at every saddle",
        worst,
        IDENTITY_TOL,
        bool(saddles) and worst <= IDENTITY_TOL,
        f"{len(saddles)} saddles",
    )


def _closed_form_moduli(a: float) -> float:
    """ln|u| / ln|s| at the fixed point z = 1 - a of f_{a,0}."""
    z = 1.0 - a
    root = math.sqrt(z * z + a)
    return math.log(abs(z + root)) / math.log(abs(z - root))


def _probe(rng: np.random.Generator) -> CriterionResult:
    sample = moduli_probe(quadratic_henon(0.5, 0.0), (0.5, 0.5))
    expected = _closed_form_moduli(0.5)
    error = abs(sample.moduli - expected)
    return criterion(
        "f_{0.5,0} moduli vs closed form",
        sample.moduli,
        f"{expected:.8f} (absolute {PROBE_TOL:g})",
        error <= PROBE_TOL,
    )


def _segment_profile(rng: np.random.Generator) -> List[CriterionResult]:
    start, end = SEGMENT
    constraint = segment_problem(start, end)
    length = math.dist(start, end)
    direction = np.subtract(end, start)
    curve = trace_constraint_curve(constraint, start, step=SEGMENT_STEP, length=length, direction=direction)
    family = quadratic_henon_family()
    profile = moduli_profile(curve, SaddleTracker(family, SEGMENT_SEED))
    identity = max(s.identity_error / (1.0 + abs(s.jacobian)) for s in profile.samples)
    return [
        criterion(
            "moduli spread along the a-axis",
            profile.spread,
            f"> {SPREAD_MIN}",
            profile.spread > SPREAD_MIN and profile.non_constant,
            f"{len(profile.samples)} samples, numerical error {profile.numerical_error:.2e}",
        ),
        criterion("u s = jac per sample", identity, IDENTITY_TOL, identity <= IDENTITY_TOL),
    ]


class MultipliersSuite(BaseSuite):
    """Multiplier identities and moduli of stability."""

    name = "multipliers"
    description = "u s = jac^n, the f_{0.5,0} moduli value and the a-axis moduli profile"

    def checks(self) -> List[Check]:
        return [
            ("jacobian identity", _identity),
            ("moduli probe", _probe),
            ("a-axis profile", _segment_profile),
        ]
