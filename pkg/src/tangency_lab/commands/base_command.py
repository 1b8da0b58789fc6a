"""
Base command class for tangency-lab scenario runs.

A command turns a validated scenario into independent work items and, once
they have been gathered, writes its artifacts. Every CLI operation group is
one command.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..core.artifacts import ArtifactWriter
from ..core.errors import ScenarioParseError, ValidationError
from ..core.models import Scenario
from ..henon.family import ParametricFamily, load_family, quadratic_henon_family

logger = logging.getLogger(__name__)


@dataclass
class WorkItem:
    """A pure task: `func(*args)` runs in a worker thread, with `rng=` when asked."""

    name: str
    func: Callable[..., Any]
    args: Sequence[Any] = ()
    needs_rng: bool = False


@dataclass
class ItemOutcome:
    """Result or error record of one work item."""

    name: str
    value: Any = None
    error: Optional[Dict[str, Any]] = None
    exit_code: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None


class BaseCommand(ABC):
    """
    Abstract base class for scenario commands.

    Subclasses expand a scenario into work items and write the gathered
    results; they never write from inside a work item.
    """

    name: str = ""
    description: str = ""

    @abstractmethod
    def items(self, scenario: Scenario) -> List[WorkItem]:
        """
        Expand the scenario into work items.

        Raises:
            ScenarioParseError, ValidationError: bad parameters
        """
        pass

    @abstractmethod
    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        """
        Write the artifacts of a finished run.

        Returns:
            A JSON-ready summary, printed by the CLI
        """
        pass

    @staticmethod
    def successes(outcomes: List[ItemOutcome]) -> List[Any]:
        return [o.value for o in outcomes if o.ok]


# parameter helpers


def param(scenario: Scenario, key: str, default: Any = None, required: bool = False) -> Any:
    """A scenario parameter; missing required ones are parse errors."""
    if key not in scenario.params:
        if required:
            raise ScenarioParseError(f"'{scenario.command}' needs the parameter '{key}'")
        return default
    return scenario.params[key]


def as_complex(value: Any, where: str = "value") -> complex:
    """Numbers, [re, im] pairs and strings such as '1+2j'."""
    try:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        return complex(value)
    except (TypeError, ValueError) as e:
        raise ScenarioParseError(f"{where}: not a complex number: {value!r}") from e


def as_point(value: Any, where: str = "point") -> Tuple[complex, complex]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioParseError(f"{where}: expected two coordinates, got {value!r}")
    return as_complex(value[0], where), as_complex(value[1], where)


def parse_range(text: Any) -> List[int]:
    """
    Index ranges as written in scenarios: "5..25", [5, 6, 9] or a single int.

    Raises:
        ScenarioParseError: malformed range
    """
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        try:
            return [int(v) for v in text]
        except (TypeError, ValueError) as e:
            raise ScenarioParseError(f"malformed index list: {text!r}") from e
    try:
        lo, hi = str(text).split("..")
        values = list(range(int(lo), int(hi) + 1))
    except ValueError as e:
        raise ScenarioParseError(f"malformed index range: {text!r} (expected 'a..b')") from e
    if not values:
        raise ScenarioParseError(f"empty index range: {text!r}")
    return values


def polynomial_terms(expression: str, names: Sequence[str]) -> Dict[Tuple[int, ...], complex]:
    """
    Monomial coefficients of a polynomial expression in the given variables.

    Raises:
        ScenarioParseError: not a polynomial in exactly these variables
    """
    symbols = {n: sympy.Symbol(n) for n in names}
    try:
        expr = sympy.sympify(str(expression), locals=symbols)
        extra = expr.free_symbols - set(symbols.values())
        if extra:
            raise ScenarioParseError(f"unknown symbols {sorted(map(str, extra))} in {expression!r}")
        poly = sympy.Poly(expr, *symbols.values())
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
        raise ScenarioParseError(f"not a polynomial expression: {expression!r}") from e
    return {tuple(int(p) for p in monom): complex(coeff) for monom, coeff in poly.terms()}


def scenario_family(scenario: Scenario) -> ParametricFamily:
    """The scenario's family file, or the quadratic Hénon family by default."""
    if scenario.family is None:
        return quadratic_henon_family()
    return load_family(scenario.family)


def real_axis(axis: Any, where: str) -> np.ndarray:
    """[start, stop, count] as a linspace."""
    try:
        start, stop, count = axis
        return np.linspace(float(start), float(stop), int(count))
    except (TypeError, ValueError) as e:
        raise ScenarioParseError(f"{where}: expected [start, stop, count], got {axis!r}") from e


def positive(value: Any, where: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValidationError(f"{where} must be positive, got {value}")
    return value
