"""
Scenario Engine for tangency-lab.

This module orchestrates a batch run: it loads a scenario file, expands the
requested command into independent work items, executes them on a bounded
worker pool and writes the artifacts and the manifest.
"""

import asyncio
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from ..commands import ItemOutcome, WorkItem, get_command
from ..config import config
from .artifacts import ArtifactWriter
from .errors import LabError, ScenarioParseError, ValidationError
from .models import Manifest, Scenario

logger = logging.getLogger(__name__)

SCENARIO_KEYS = {"command", "family", "seed", "tol", "output", "params"}


@dataclass
class RunResult:
    """Everything a run produced."""

    scenario: Scenario
    manifest: Manifest
    outcomes: List[ItemOutcome]
    summary: Any = None
    warnings: List[str] = field(default_factory=list)

    @property
    def errors(self) -> List[Dict[str, Any]]:
        return [o.error for o in self.outcomes if o.error is not None]

    @property
    def exit_code(self) -> int:
        """0 on success (possibly with warnings), else the code of the first failed item."""
        for outcome in self.outcomes:
            if not outcome.ok:
                return outcome.exit_code
        return 0


class _WarningCollector(logging.Handler):
    """Collects WARNING records of the package logger during a run."""

    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(f"{record.name}: {record.getMessage()}")


def load_scenario(
    path: Path,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    out: Optional[Path] = None,
) -> Scenario:
    """
    Parse and validate a scenario file.

    Relative family references resolve against the scenario's directory.
    Command-line values override the file, the file overrides config.

    Raises:
        ScenarioParseError: unreadable TOML or unknown keys
        ValidationError: missing family file or non-positive tolerance
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ScenarioParseError(f"scenario {path} is not valid TOML: {e}") from e
    unknown = set(data) - SCENARIO_KEYS
    if unknown:
        raise ScenarioParseError(f"unknown scenario keys: {sorted(unknown)}")
    if "command" not in data:
        raise ScenarioParseError("scenario has no 'command'")

    family = data.get("family")
    family_path = None
    if family is not None:
        family_path = Path(family)
        if not family_path.is_absolute():
            family_path = Path(path).parent / family_path
    output = out or Path(data.get("output", config.get_output_dir()))
    return build_scenario(
        command=str(data["command"]),
        family=family_path,
        params=dict(data.get("params", {})),
        output_dir=output,
        seed=seed if seed is not None else data.get("seed"),
        tol=tol if tol is not None else data.get("tol"),
    )


def build_scenario(
    command: str,
    params: Optional[Dict[str, Any]] = None,
    family: Optional[Path] = None,
    output_dir: Optional[Path] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
) -> Scenario:
    """
    Validated scenario from values; unset seed and tolerance come from config.

    Raises:
        ValidationError: missing family file or invalid values
    """
    if family is not None and not Path(family).exists():
        raise ValidationError(f"family file not found: {family}", {"family": str(family)})
    try:
        return Scenario(
            command=command,
            family=family,
            params=params or {},
            output_dir=output_dir or config.get_output_dir(),
            seed=int(seed) if seed is not None else config.get_seed(),
            tol=float(tol) if tol is not None else config.get_rel_tol(),
        )
    except PydanticValidationError as e:
        raise ValidationError(f"invalid scenario: {e.errors()[0]['msg']}") from e


class ScenarioEngine:
    """
    Runs scenarios on a bounded worker pool.

    Work items are pure functions; each gets its own generator spawned from
    the scenario seed, so results do not depend on scheduling. Results are
    merged in item order and written serially after the gather.
    """

    def __init__(self, threads: Optional[int] = None):
        """
        Initialize the Scenario Engine.

        Args:
            threads: Worker-pool size (if None, uses config)
        """
        self.threads = threads or config.get_threads()

    async def _run_item(
        self, semaphore: asyncio.Semaphore, item: WorkItem, rng: np.random.Generator
    ) -> Any:
        async with semaphore:
            logger.debug(f"starting {item.name}")
            if item.needs_rng:
                return await asyncio.to_thread(item.func, *item.args, rng=rng)
            return await asyncio.to_thread(item.func, *item.args)

    async def run_items(self, items: Sequence[WorkItem], seed: int) -> List[ItemOutcome]:
        """
        Execute the items with at most `threads` running at once.

        Failures are logged and turned into error records; they never abort
        the other items.
        """
        semaphore = asyncio.Semaphore(self.threads)
        children = np.random.SeedSequence(seed).spawn(len(items))
        tasks = [
            self._run_item(semaphore, item, np.random.default_rng(child))
            for item, child in zip(items, children)
        ]
        results = await asyncio.gather(*tasks, return_exceptions=True)

        outcomes = []
        for item, result in zip(items, results):
            if isinstance(result, LabError):
                logger.error(f"{item.name} failed: {result.message}")
                outcomes.append(self._create_error_outcome(item.name, result.to_dict(), result.exit_code))
            elif isinstance(result, Exception):
                logger.error(f"{item.name} failed: {str(result)}")
                record = {"error": type(result).__name__, "message": str(result), "details": {}}
                outcomes.append(self._create_error_outcome(item.name, record, 4))
            else:
                outcomes.append(ItemOutcome(item.name, result))
        return outcomes

    async def run(self, scenario: Scenario, timestamp: bool = True) -> RunResult:
        """
        Run a scenario end to end.

        Args:
            scenario: Validated scenario
            timestamp: Prefix CSV files with a timestamp comment line

        Returns:
            RunResult with the manifest and per-item outcomes

        Raises:
            ValidationError: unknown command
        """
        command = get_command(scenario.command)
        logger.info(f"Running '{scenario.command}' with seed {scenario.seed} on {self.threads} workers")

        collector = _WarningCollector()
        package_logger = logging.getLogger("tangency_lab")
        package_logger.addHandler(collector)
        try:
            with config.scoped(rel_tol=scenario.tol):
                items = command.items(scenario)
                outcomes = await self.run_items(items, scenario.seed)
                writer = ArtifactWriter(scenario.output_dir, timestamp=timestamp)
                summary = command.write(writer, outcomes, scenario)
        finally:
            package_logger.removeHandler(collector)

        warnings = sorted(set(collector.messages))
        errors = [{"item": o.name, **o.error} for o in outcomes if o.error is not None]
        manifest = writer.write_manifest(
            scenario.command,
            scenario.seed,
            settings=config.summary(scenario.seed) | {"tol": scenario.tol},
            warnings=warnings,
            errors=errors,
        )
        failed = len(errors)
        logger.info(f"Completed '{scenario.command}': {len(outcomes) - failed} items ok, {failed} failed")
        return RunResult(scenario, manifest, outcomes, summary, warnings)

    def _create_error_outcome(self, name: str, record: Dict[str, Any], exit_code: int) -> ItemOutcome:
        """Create an error record when an item fails."""
        return ItemOutcome(name=name, value=None, error=record, exit_code=exit_code)
