"""
Germ commands: the classification table of a germ suite and single-germ
classification.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config import config
from ..core.artifacts import ArtifactWriter
from ..core.errors import ScenarioParseError
from ..core.models import Scenario, TangencyRecord
from ..germ import UnfoldingGerm, classify_unfolding
from .base_command import BaseCommand, ItemOutcome, WorkItem, param, polynomial_terms

logger = logging.getLogger(__name__)

GERM_VARIABLES = ("lam", "t")


def germ_from_expression(expression: str, degree: Optional[int] = None) -> UnfoldingGerm:
    """phi(lam, t) from a polynomial expression such as 't**3 + lam**2'."""
    terms: Dict[Tuple[int, int], complex] = {
        (p[0], p[1]): c for p, c in polynomial_terms(expression, GERM_VARIABLES).items()
    }
    top = max(p + q for p, q in terms)
    return UnfoldingGerm.from_terms(terms, max(degree or config.get_degree(), top))


def germ_from_file(path: Path) -> UnfoldingGerm:
    """
    A germ stored as a series payload, or as {"phi": payload} as written by
    UnfoldingGerm.to_json.

    Raises:
        ScenarioParseError: unreadable or malformed JSON
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioParseError(f"cannot read germ file {path}: {e}") from e
    if isinstance(payload, dict) and "phi" in payload:
        payload = payload["phi"]
    try:
        return UnfoldingGerm.from_json(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioParseError(f"germ file {path} is not a series payload") from e


def oracle_expressions(h_max: int, k_max: int) -> List[str]:
    """t^(h+1) + lam^k for h <= h_max, k <= k_max."""
    return [f"t**{h + 1} + lam**{k}" for h in range(1, h_max + 1) for k in range(1, k_max + 1)]


def _classify(expression: str, with_speed: bool, rng: np.random.Generator) -> TangencyRecord:
    return classify_unfolding(germ_from_expression(expression), rng=rng, with_speed=with_speed)


def _record_row(name: str, record: TangencyRecord) -> List[Any]:
    blocks = " ".join(f"{b.size}:{b.exponent}" for b in record.blocks)
    return [name, record.h, record.m, blocks, record.quadratic_positive_speed]


class GermSuiteCommand(BaseCommand):
    """Classification table of the oracle germs plus any listed expressions."""

    name = "germ-suite"
    description = "Classify the germ oracle suite (records.json, records.csv)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        h_max = int(param(scenario, "h_max", 3))
        k_max = int(param(scenario, "k_max", 3))
        with_speed = bool(param(scenario, "speed", True))
        expressions = oracle_expressions(h_max, k_max) + [str(e) for e in param(scenario, "germs", [])]
        return [WorkItem(e, _classify, (e, with_speed), needs_rng=True) for e in expressions]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        records = []
        rows = []
        for outcome in outcomes:
            if outcome.ok:
                records.append({"germ": outcome.name, **outcome.value.to_output()})
                rows.append(_record_row(outcome.name, outcome.value))
            else:
                records.append({"germ": outcome.name, **(outcome.error or {})})
        writer.write_json("records.json", records)
        writer.write_csv("records.csv", ["germ", "h", "m", "blocks", "quadratic_positive_speed"], rows)
        return records


class GermClassifyCommand(BaseCommand):
    """One germ, from a JSON file (`input`) or a polynomial `expression` in lam and t."""

    name = "germ classify"
    description = "Classify one unfolding germ (record.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        with_speed = bool(param(scenario, "speed", True))
        source = param(scenario, "input")
        expression = param(scenario, "expression")
        if source is None and expression is None:
            raise ScenarioParseError("'germ classify' needs 'input' or 'expression'")

        def run(rng: np.random.Generator) -> TangencyRecord:
            germ = germ_from_file(Path(source)) if source is not None else germ_from_expression(expression)
            return classify_unfolding(germ, rng=rng, with_speed=with_speed)

        return [WorkItem(str(source or expression), run, needs_rng=True)]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        if not outcome.ok:
            writer.write_json("record.json", outcome.error)
            return outcome.error
        record: TangencyRecord = outcome.value
        payload = {**record.to_output(), "residuals": record.residuals}
        writer.write_json("record.json", payload)
        return payload
