"""
tangency-lab: a desk-scale laboratory for homoclinic tangencies

Numerical tools for complex Hénon maps: tangency germ classification,
saddle normal forms, graph transforms in bidisks, parameter scans for
secondary tangencies and moduli of stability, and verification suites.
"""

__version__ = "0.1.0"
__author__ = "Evan Volgas"

from .config import config
from .core.models import (
    ModuliProfile,
    PeriodicReport,
    Scenario,
    ScanResult,
    SpeedBlock,
    SuiteReport,
    TangencyEvent,
    TangencyRecord,
)
from .core.scenario_engine import ScenarioEngine, build_scenario, load_scenario
from .suites import SUITES, get_suites, run_suites

__all__ = [
    "__version__",
    "__author__",
    "config",
    "ScenarioEngine",
    "build_scenario",
    "load_scenario",
    "Scenario",
    "TangencyRecord",
    "SpeedBlock",
    "PeriodicReport",
    "TangencyEvent",
    "ScanResult",
    "ModuliProfile",
    "SuiteReport",
    "SUITES",
    "get_suites",
    "run_suites",
]
