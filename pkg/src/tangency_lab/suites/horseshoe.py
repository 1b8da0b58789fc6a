"""Horseshoe suite for f_{0.1,-6} in the bidisk of radius 3.5."""

import logging
from typing import List

import numpy as np

from ..bidisk import BidiskFrame, horseshoe_census, horseshoe_stable_graphs
from ..core.models import CriterionResult
from ..henon import quadratic_henon, quadratic_henon_family
from ..scan import detect_type_change
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

A, C = 0.1, -6.0
RADIUS = 3.5
MAX_LENGTH = 6
TYPE_CHANGE_AXES = ([A], list(np.linspace(-8.0, -6.0, 9)))


def _census(rng: np.random.Generator) -> List[CriterionResult]:
    map_ = quadratic_henon(A, C)
    lines = []
    for n in range(1, MAX_LENGTH + 1):
        points = horseshoe_census(map_, n)
        distinct = len({tuple(np.round([z.real, z.imag, w.real, w.imag], 8)) for _, (z, w) in points})
        lines.append(criterion(f"period-{n} points", distinct, 2**n, distinct == 2**n))
    return lines


def _stable_graphs(rng: np.random.Generator) -> List[CriterionResult]:
    map_ = quadratic_henon(A, C)
    frame = BidiskFrame(0j, RADIUS)
    lines = []
    for length in range(1, MAX_LENGTH + 1):
        family = horseshoe_stable_graphs(map_, frame, length)
        count = len(set(family.codes))
        lines.append(
            criterion(
                f"disjoint stable graphs of length {length}",
                count,
                2**length,
                count == 2**length and family.disjoint,
                f"min gap {family.min_gap:.3g}",
            )
        )
    return lines


def _no_type_change(rng: np.random.Generator) -> CriterionResult:
    events = detect_type_change(quadratic_henon_family(), TYPE_CHANGE_AXES, max_period=2)
    return criterion(
        "no type change for a=0.1, c in [-8, -6]",
        len(events),
        0,
        not events,
        "; ".join(f"{e.kind} at {e.parameter}" for e in events),
    )


class HorseshoeSuite(BaseSuite):
    """Periodic census, stable-graph chart and weak stability of a horseshoe map."""

    name = "horseshoe"
    description = "2^n periodic points, 2^L disjoint stable graphs, no type changes"

    def checks(self) -> List[Check]:
        return [
            ("census", _census),
            ("stable graphs", _stable_graphs),
            ("type changes", _no_type_change),
        ]
