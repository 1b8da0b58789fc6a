"""
Graph-transform decay suite.

Pushing a horizontal graph forward shrinks its j-th derivative by
|s u^-j| per step: exactly for a linear saddle, asymptotically for a germ
in normal form with small nonlinearity.
"""

import logging
import math
from typing import List

import numpy as np

from ..bidisk import GraphInBidisk, graph_transform_n
from ..core.models import CriterionResult
from ..henon import LocalMap
from ..saddle import NormalFormGerm
from ..series import TruncatedSeries2
from .base_suite import BaseSuite, Check, criterion, within

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
RATE_TOL = 0.05
FIT_RANGE = (5, 20)


def _linear_exactness(rng: np.random.Generator) -> List[CriterionResult]:
    u, s = 2.0, 0.5
    local = LocalMap.linear(np.diag([u, s]))
    lines = []
    for j in (1, 2, 3):
        start = GraphInBidisk.horizontal([0.0] * j + [1.0], bound=2.0)
        history = graph_transform_n(local, start, 10, ell=j)
        norms = history.norm_series(j)
        rate = abs(s * u**-j)
        worst = max(abs(norms[n] / (norms[0] * rate**n) - 1.0) for n in range(1, len(norms)))
        name = f"linear x^{j}: derivative {j} scales by |s u^-{j}|^n"
        lines.append(criterion(name, worst, EXACT_TOL, worst <= EXACT_TOL))
    return lines


def _nonlinear_rates(rng: np.random.Generator) -> List[CriterionResult]:
    u, s = 2.0, 1.0 / 3.0
    g = TruncatedSeries2.from_terms({(0, 2): 0.01}, 2)
    germ = NormalFormGerm.from_components(u, s, g, g, 2).as_local_map()
    start = GraphInBidisk.horizontal([0.05, 0.1, 0.1, 0.1])
    first, last = FIT_RANGE
    history = graph_transform_n(germ, start, last, ell=3)
    ns = np.arange(first, last + 1)
    lines = []
    for j in range(4):
        norms = np.array(history.norm_series(j))[first : last + 1]
        slope = float(np.polyfit(ns, np.log(norms), 1)[0])
        name = f"normal-form germ: decay rate of order {j}"
        lines.append(within(name, math.exp(slope), abs(s * u**-j), RATE_TOL))
    return lines


class GraphDecaySuite(BaseSuite):
    """Derivative decay under iterated graph transforms."""

    name = "graph-decay"
    description = "|s u^-j| decay of graph derivatives, exact and asymptotic"

    def checks(self) -> List[Check]:
        return [("linear exactness", _linear_exactness), ("nonlinear rates", _nonlinear_rates)]
