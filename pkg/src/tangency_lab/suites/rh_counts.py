"""
Riemann-Hurwitz suite: tangency counts of random horizontal manifolds
against disjoint vertical families, and the splitting of an order-h
tangency into h + 1 transverse points.
"""

import logging
from typing import List

import numpy as np

from ..bidisk import (
    GraphInBidisk,
    HorizontalManifold,
    horizontal_degree,
    intersect_graphs,
    random_rh_trial,
    rh_check,
    split_tangency,
)
from ..core.errors import NumericalError
from ..core.models import CriterionResult
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

TRIALS = 1000
MAX_DEGREE = 5
SPLIT_OFFSET = 1e-2


def _random_trials(rng: np.random.Generator) -> List[CriterionResult]:
    satisfied = 0
    wrong_degree = 0
    failures: List[str] = []
    for i in range(TRIALS):
        degree = 1 + i % MAX_DEGREE
        V, graphs = random_rh_trial(rng, degree)
        try:
            measured = horizontal_degree(V, rng=rng)
            check = rh_check(V, graphs, measured)
        except NumericalError as e:
            failures.append(f"trial {i}: {e.message}")
            continue
        if measured != degree:
            wrong_degree += 1
        if check.holds:
            satisfied += 1
    logger.info(f"Riemann-Hurwitz bound held in {satisfied}/{TRIALS} trials")
    return [
        criterion(
            "tangency count <= d - 1",
            f"{satisfied}/{TRIALS}",
            f"{TRIALS}/{TRIALS}",
            satisfied == TRIALS,
            "; ".join(failures[:5]),
        ),
        criterion("measured degree equals construction", wrong_degree, 0, wrong_degree == 0),
    ]


def _splitting(rng: np.random.Generator) -> List[CriterionResult]:
    lines = []
    line = GraphInBidisk.vertical([0.0])
    for h in (1, 2, 3):
        V = HorizontalManifold.from_coeffs([0.0] * (h + 1) + [1.0], [0.0, 0.5])
        before = intersect_graphs(V, line)
        after = split_tangency(V, line, SPLIT_OFFSET)
        order_ok = len(before) == 1 and before[0].multiplicity == h + 1
        split_ok = len(after) == h + 1 and all(p.multiplicity == 1 for p in after)
        lines.append(
            criterion(
                f"order-{h} tangency splits into {h + 1} points",
                [len(after), max((p.multiplicity for p in after), default=0)],
                [h + 1, 1],
                order_ok and split_ok,
                "" if order_ok else f"unperturbed intersections {[p.multiplicity for p in before]}",
            )
        )
    return lines


class RHCountsSuite(BaseSuite):
    """Randomized Riemann-Hurwitz bound and tangency splitting."""

    name = "rh-counts"
    description = "1000 random trials of the d - 1 tangency bound, plus splitting counts"

    def checks(self) -> List[Check]:
        return [("random trials", _random_trials), ("splitting", _splitting)]
