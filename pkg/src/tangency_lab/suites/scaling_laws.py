"""
Scaling-law suite: secondary tangency parameters of synthetic unfoldings
shrink like |u0|^(-n / sigma), a multiplicity-m tangency yields m
parameters per index, and two scaling laws close into a resonance.
"""

import logging
from typing import Callable, List, Tuple

import numpy as np

from ..bidisk import GraphInBidisk
from ..core.models import CriterionResult, ScanResult
from ..henon import LocalMap
from ..scan import (
    GermPullBack,
    ParameterWindow,
    ParametricGraph,
    ToyPullBack,
    detect_tangencies,
    fit_scaling,
    resonance_closure,
    secondary_sequence,
)
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

SLOPE_TOL = 0.03
INDICES = range(5, 26)
Y0 = 0.3
COUNT_INDEX = 10


def _unstable(sigma: int) -> ParametricGraph:
    return ParametricGraph.power_at(Y0, 2, {sigma: 1.0})


def _bracket() -> Tuple[ParameterWindow, ParameterWindow]:
    return ParameterWindow(0j, 1.0), ParameterWindow(0j, 1.0)


def _deviation_line(name: str, result: ScanResult) -> CriterionResult:
    deviation = result.deviation if result.deviation is not None else float("inf")
    return criterion(name, deviation, SLOPE_TOL, deviation <= SLOPE_TOL, f"slope {result.slope:.6f}")


def _toy_law(sigma: int) -> Callable[[np.random.Generator], CriterionResult]:
    def check(rng: np.random.Generator) -> CriterionResult:
        u = 2.0
        events = secondary_sequence(None, _unstable(sigma), ToyPullBack(1.0, u), INDICES, _bracket())
        result = fit_scaling(events, u0=u, sigma=sigma)
        return _deviation_line(f"sigma={sigma}: slope vs ln|u0|/sigma", result)

    return check


def _germ_law(rng: np.random.Generator) -> CriterionResult:
    u = 2.0
    stable = GermPullBack(LocalMap.linear(np.diag([u, 0.5])), GraphInBidisk.vertical([0.2]))
    events = secondary_sequence(None, _unstable(1), stable, INDICES, _bracket())
    result = fit_scaling(events, u0=u, sigma=1)
    return _deviation_line("germ pull-backs: slope vs ln|u0|", result)


def _counts(rng: np.random.Generator) -> List[CriterionResult]:
    lines = []
    u = 2.0
    target = ToyPullBack(1.0, u).graph(COUNT_INDEX)
    for m in range(1, 5):
        radius = 1.5 * u ** (-COUNT_INDEX / m)
        events = detect_tangencies(None, _unstable(m), target, ParameterWindow(0j, radius))
        name = f"multiplicity {m}: parameters at n={COUNT_INDEX}"
        lines.append(criterion(name, len(events), m, len(events) == m))
    return lines


def _closure(rng: np.random.Generator) -> CriterionResult:
    closure = resonance_closure(2.0, 0.5, m=1, h=1, q=2)
    return criterion(
        "resonance closure (u, s) = (2, 1/2)",
        [closure.a, closure.b],
        "(1, 1) confirmed",
        closure.confirmed and (closure.a, closure.b) == (1, 1),
        f"relation error {closure.relation_error:.2e}",
    )


class ScalingLawsSuite(BaseSuite):
    """Fitted exponents of secondary tangency sequences."""

    name = "scaling-laws"
    description = "-ln|lambda_n| slope against ln|u0|/sigma, counts per index, resonance closure"

    def checks(self) -> List[Check]:
        checks: List[Check] = [(f"toy sigma={sigma}", _toy_law(sigma)) for sigma in (1, 2, 3)]
        checks += [("germ pull-backs", _germ_law), ("counts", _counts), ("closure", _closure)]
        return checks

