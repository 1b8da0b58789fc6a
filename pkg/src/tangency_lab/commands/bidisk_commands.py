"""
Bidisk commands: randomized Riemann-Hurwitz checks and horseshoe charts.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from ..bidisk import (
    BidiskFrame,
    horizontal_degree,
    horseshoe_census,
    horseshoe_stable_graphs,
    random_rh_trial,
    rh_check,
)
from ..core.artifacts import ArtifactWriter
from ..core.models import Scenario
from ..henon.maps import quadratic_henon
from .base_command import BaseCommand, ItemOutcome, WorkItem, as_complex, param, parse_range, positive

logger = logging.getLogger(__name__)


def _rh_trial(degree: int, rng: np.random.Generator) -> Dict[str, Any]:
    V, graphs = random_rh_trial(rng, degree)
    measured = horizontal_degree(V, rng=rng)
    check = rh_check(V, graphs, measured)
    return {
        "degree": measured,
        "graphs": len(graphs),
        "count": check.count,
        "bound": check.bound,
        "holds": check.holds,
    }


class RHCheckCommand(BaseCommand):
    """Tangency counts of random horizontal manifolds against disjoint vertical families."""

    name = "bidisk rh-check"
    description = "Randomized Riemann-Hurwitz bound (rh.csv, rh_summary.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        trials = int(param(scenario, "trials", 1000))
        max_degree = int(param(scenario, "max_degree", 5))
        return [
            WorkItem(f"trial {i}", _rh_trial, (1 + i % max_degree,), needs_rng=True)
            for i in range(trials)
        ]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        rows = []
        for i, outcome in enumerate(outcomes):
            if outcome.ok:
                v = outcome.value
                rows.append([i, v["degree"], v["graphs"], v["count"], v["bound"], v["holds"]])
        writer.write_csv("rh.csv", ["trial", "degree", "graphs", "count", "bound", "holds"], rows)
        summary = {
            "trials": len(outcomes),
            "completed": len(rows),
            "satisfied": sum(1 for r in rows if r[5]),
        }
        writer.write_json("rh_summary.json", summary)
        return summary


def _stable_graphs(a: complex, c: complex, radius: float, length: int) -> Dict[str, Any]:
    family = horseshoe_stable_graphs(quadratic_henon(a, c), BidiskFrame(0j, radius), length)
    return {
        "length": length,
        "codes": family.codes,
        "min_gap": family.min_gap,
        "disjoint": family.disjoint,
        "min_boundary_modulus": family.certificate.min_boundary_modulus,
        "windings": list(family.certificate.windings),
    }


def _census(a: complex, c: complex, period: int) -> List[Tuple[str, Tuple[complex, complex]]]:
    census = horseshoe_census(quadratic_henon(a, c), period)
    return [("".join(map(str, word)), point) for word, point in census]


class HorseshoeCommand(BaseCommand):
    """Stable-graph chart and itinerary census of a horseshoe Hénon map."""

    name = "bidisk horseshoe"
    description = "Horseshoe stable graphs and periodic census (horseshoe.json, census.csv)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        a = as_complex(param(scenario, "a", 0.1), "a")
        c = as_complex(param(scenario, "c", -6.0), "c")
        radius = positive(param(scenario, "radius", 3.5), "radius")
        length = int(param(scenario, "length", 3))
        periods = parse_range(param(scenario, "periods", "1..4"))
        items = [WorkItem(f"stable graphs L={length}", _stable_graphs, (a, c, radius, length))]
        items.extend(WorkItem(f"census n={n}", _census, (a, c, n)) for n in periods)
        return items

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        chart, *census = outcomes
        rows = []
        counts: Dict[str, Any] = {}
        for outcome in census:
            if outcome.ok:
                period = outcome.name.split("=")[1]
                counts[period] = len(outcome.value)
                rows.extend([int(period), word, z, w] for word, (z, w) in outcome.value)
            else:
                counts[outcome.name] = outcome.error
        payload = {"chart": chart.value if chart.ok else chart.error, "census_counts": counts}
        writer.write_json("horseshoe.json", payload)
        writer.write_csv("census.csv", ["period", "itinerary", "z", "w"], rows)
        return payload
