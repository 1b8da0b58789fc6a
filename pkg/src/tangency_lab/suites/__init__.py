"""
Verification suites for tangency-lab.

Each suite checks one family of quantitative claims with declared
tolerances and reports one line per criterion.
"""

from typing import Dict, List

from ..core.errors import UnknownSuiteError
from .asymptotics import AsymptoticsSuite
from .base_suite import BaseSuite, criterion, run_suites, within
from .germ_oracles import GermOraclesSuite
from .graph_decay import GraphDecaySuite
from .horseshoe import HorseshoeSuite
from .multipliers import MultipliersSuite
from .normal_form import NormalFormSuite
from .resonance import ResonanceSuite, lattice_scan
from .rh_counts import RHCountsSuite
from .scaling_laws import ScalingLawsSuite
from .speed_expansion import SpeedExpansionSuite

SUITES: Dict[str, BaseSuite] = {
    suite.name: suite
    for suite in (
        GermOraclesSuite(),
        SpeedExpansionSuite(),
        GraphDecaySuite(),
        RHCountsSuite(),
        ScalingLawsSuite(),
        NormalFormSuite(),
        AsymptoticsSuite(),
        MultipliersSuite(),
        HorseshoeSuite(),
        ResonanceSuite(),
    )
}


def get_suites(name: str) -> List[BaseSuite]:
    """
    Resolve a suite name; "all" selects every registered suite in order.

    Raises:
        UnknownSuiteError: the name is not registered
    """
    if name == "all":
        return list(SUITES.values())
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite: {name!r}", {"known": sorted(SUITES)})
    return [SUITES[name]]


__all__ = [
    "BaseSuite",
    "SUITES",
    "get_suites",
    "run_suites",
    "criterion",
    "within",
    "lattice_scan",
]
