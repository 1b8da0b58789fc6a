"""Local asymptotics suite on linear saddles diag(u, 1/2)."""

from typing import Callable, List

import numpy as np

from ..bidisk import GraphInBidisk
from ..core.models import CriterionResult
from ..henon import LocalMap
from ..scan import verify_local_asymptotics
from .base_suite import BaseSuite, Check, criterion

SLOPE_TOL = 0.01
RETURN_BOUND = 2.0
INDICES = range(5, 26)
Y0 = 0.3


def _linear_saddle(u: float) -> Callable[[np.random.Generator], List[CriterionResult]]:
    def check(rng: np.random.Generator) -> List[CriterionResult]:
        local = LocalMap.linear(np.diag([u, 0.5]))
        # x = (y - 0.3)^2, tangent to the stable axis at y = 0.3
        unstable = GraphInBidisk.vertical([Y0**2, -2 * Y0, 1.0], bound=2.0)
        stable = GraphInBidisk.vertical([0.2])
        report = verify_local_asymptotics(local, unstable, stable, INDICES, Y0)
        return [
            criterion(
                f"u={u:g}: distance slope vs ln|u|",
                report.slope_deviation,
                SLOPE_TOL,
                report.slope_deviation <= SLOPE_TOL,
                f"slope {report.distance_slope:.6f}, target {report.slope_target:.6f}",
            ),
            criterion(
                f"u={u:g}: |m_n - ratio n|",
                report.bound,
                RETURN_BOUND,
                report.bound <= RETURN_BOUND,
                f"ratio {report.ratio:.4f}",
            ),
        ]

    return check


class AsymptoticsSuite(BaseSuite):
    """Distance decay and return-index bound along pulled-back stable graphs."""

    name = "asymptotics"
    description = "d(r_n, unstable) ~ |u|^-n and m_n ~ (ln|u|/ln|s|) n on linear saddles"

    def checks(self) -> List[Check]:
        return [(f"linear saddle u={u:g}", _linear_saddle(u)) for u in (2.0, 4.0)]
