"""
Speed expansion suite: for phi = t^(h+1) + lambda (1 + t) the vertical
tangencies sit at x(lambda) = lambda + c lambda^(1 + 1/h).
"""

from typing import Callable, List

import numpy as np

from ..commands.germ_commands import germ_from_expression
from ..core.models import CriterionResult
from ..germ import secondary_exponent, speed_exponents
from .base_suite import BaseSuite, Check, within

LEADING_TOL = 0.01
SECONDARY_TOL = 0.02


def _expansion(h: int) -> Callable[[np.random.Generator], List[CriterionResult]]:
    def check(rng: np.random.Generator) -> List[CriterionResult]:
        germ = germ_from_expression(f"t**{h + 1} + lam + lam*t")
        report = speed_exponents(germ, m=h)
        leading = max(report.raw_exponents, key=lambda sigma: abs(sigma - 1.0))
        secondary, _ = secondary_exponent(germ)
        return [
            within(f"h={h} leading exponent", leading, 1.0, LEADING_TOL),
            within(f"h={h} secondary exponent", secondary, 1.0 + 1.0 / h, SECONDARY_TOL),
        ]

    return check


class SpeedExpansionSuite(BaseSuite):
    """Leading and secondary exponents of the vertical-tangency abscissae."""

    name = "speed-expansion"
    description = "x(lambda) = lambda + c lambda^(1+1/h) for h = 1, 2, 3"

    def checks(self) -> List[Check]:
        return [(f"expansion h={h}", _expansion(h)) for h in (1, 2, 3)]
