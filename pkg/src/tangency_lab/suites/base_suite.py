"""
Base suite class for tangency-lab verification.

A suite is a list of named checks; each check measures something, compares
it with a declared tolerance and yields one or more report lines. A failing
or crashing check never stops the rest of the suite.
"""

import asyncio
import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import config
from ..core.errors import LabError
from ..core.models import CriterionResult, SuiteReport

logger = logging.getLogger(__name__)

CheckResult = Union[CriterionResult, List[CriterionResult]]
Check = Tuple[str, Callable[[np.random.Generator], CheckResult]]


def criterion(name: str, measured: Any, tolerance: Any, passed: bool, detail: str = "") -> CriterionResult:
    """Build one report line; numpy scalars become plain numbers."""
    return CriterionResult(
        name=name, measured=_plain(measured), tolerance=_plain(tolerance), passed=bool(passed), detail=detail
    )


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def within(
    name: str, measured: float, target: float, tolerance: float, relative: bool = True
) -> CriterionResult:
    """|measured - target| <= tolerance, relative to |target| by default."""
    error = abs(measured - target) / (abs(target) if relative and target != 0 else 1.0)
    kind = "relative" if relative else "absolute"
    return criterion(name, float(measured), f"{target:.6g} ({kind} {tolerance:g})", error <= tolerance)


class BaseSuite(ABC):
    """
    Abstract base class for all verification suites.

    Each suite inherits from this class and implements the checks method.
    """

    name: str = ""
    description: str = ""

    @abstractmethod
    def checks(self) -> List[Check]:
        """
        Get the checks of this suite.

        Returns:
            List of (name, function of the generator) pairs
        """
        pass

    def run(self, seed: Optional[int] = None) -> SuiteReport:
        """
        Run every check with its own generator spawned from the seed.

        Args:
            seed: Suite seed (if None, uses config)

        Returns:
            SuiteReport with one line per criterion
        """
        seed = config.get_seed() if seed is None else seed
        checks = self.checks()
        children = np.random.SeedSequence(seed).spawn(len(checks))
        started = time.perf_counter()
        lines: List[CriterionResult] = []
        for (name, check), child in zip(checks, children):
            try:
                result = check(np.random.default_rng(child))
                lines.extend(result if isinstance(result, list) else [result])
            except LabError as e:
                logger.error(f"{self.name}/{name} failed: {e.message}")
                lines.append(criterion(name, None, None, False, f"{type(e).__name__}: {e.message}"))
            except Exception as e:
                logger.error(f"{self.name}/{name} crashed: {str(e)}")
                lines.append(criterion(name, None, None, False, f"{type(e).__name__}: {str(e)}"))
        duration = time.perf_counter() - started
        report = SuiteReport(suite=self.name, criteria=lines, duration=duration, seed=seed)
        passed = sum(1 for line in lines if line.passed)
        logger.info(f"suite {self.name}: {passed}/{len(lines)} criteria passed in {duration:.2f}s")
        return report


async def run_suites(
    suites: Sequence[BaseSuite], seed: Optional[int] = None, threads: Optional[int] = None
) -> List[SuiteReport]:
    """
    Run suites concurrently on a bounded pool; reports keep the input order.
    """
    semaphore = asyncio.Semaphore(threads or config.get_threads())

    async def one(suite: BaseSuite) -> SuiteReport:
        async with semaphore:
            return await asyncio.to_thread(suite.run, seed)

    results = await asyncio.gather(*(one(s) for s in suites), return_exceptions=True)
    reports = []
    for suite, result in zip(suites, results):
        if isinstance(result, Exception):
            logger.error(f"suite {suite.name} failed: {str(result)}")
            line = criterion("suite", None, None, False, f"{type(result).__name__}: {str(result)}")
            reports.append(SuiteReport(suite=suite.name, criteria=[line], seed=seed or config.get_seed()))
        else:
            reports.append(result)
    return reports
