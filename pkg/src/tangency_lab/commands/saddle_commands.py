"""
Saddle commands: periodic points with manifold germs, resonance scans and
normal forms.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import config
from ..core.artifacts import ArtifactWriter
from ..core.errors import PreconditionError, ScenarioParseError
from ..core.models import BranchKind, PeriodicReport, Scenario, SaddleKind
from ..henon.family import ParametricFamily
from ..henon.local import LocalMap, localize
from ..saddle import (
    detect_resonance,
    find_periodic,
    grid_census,
    manifold_germ,
    margins,
    normal_form_star_k,
    periodic_report,
    section_residual,
    zero_slope_section,
)
from .base_command import (
    BaseCommand,
    ItemOutcome,
    WorkItem,
    as_complex,
    as_point,
    param,
    parse_range,
    scenario_family,
)

logger = logging.getLogger(__name__)


def _parameter(scenario: Scenario, family: ParametricFamily) -> List[complex]:
    raw = param(scenario, "parameter", required=True)
    values = [as_complex(v, "parameter") for v in (raw if isinstance(raw, list) else [raw])]
    return list(family.check_box(values))


def _periodic_points(
    family: ParametricFamily,
    lam: Sequence[complex],
    period: int,
    seed: Optional[Tuple[complex, complex]],
    radius: float,
    manifold_degree: int,
) -> List[Dict[str, Any]]:
    map_ = family.at(lam)
    if seed is not None:
        reports = [find_periodic(map_, period, seed)]
    else:
        reports = [periodic_report(map_, p, period) for p in grid_census(map_, period, radius)]
    results = []
    for report in reports:
        entry: Dict[str, Any] = {"report": report}
        if manifold_degree > 0 and report.saddle is not None:
            for kind in (BranchKind.UNSTABLE, BranchKind.STABLE):
                germ = manifold_germ(map_, report.saddle, kind, manifold_degree)
                entry[f"{kind.value}_residual"] = germ.residual(map_)
        results.append(entry)
    return results


def _report_row(report: PeriodicReport) -> List[Any]:
    mu1, mu2 = report.multipliers
    return [
        report.period,
        report.point[0],
        report.point[1],
        report.kind.value,
        abs(mu1),
        abs(mu2),
        report.residual,
    ]


class SaddleFindCommand(BaseCommand):
    """Periodic points of a family member, by seeded Newton or a grid census."""

    name = "saddle find"
    description = "Find and classify periodic points (periodic.json, periodic.csv)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        family = scenario_family(scenario)
        lam = _parameter(scenario, family)
        periods = parse_range(param(scenario, "period", 1))
        seed = param(scenario, "seed")
        point = as_point(seed, "seed") if seed is not None else None
        radius = float(param(scenario, "radius", 4.0))
        degree = int(param(scenario, "manifold_degree", 0))
        return [
            WorkItem(f"period {n}", _periodic_points, (family, lam, n, point, radius, degree))
            for n in periods
        ]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        entries, rows = [], []
        for outcome in outcomes:
            if not outcome.ok:
                entries.append({"item": outcome.name, **(outcome.error or {})})
                continue
            for entry in outcome.value:
                entries.append({**entry, "report": entry["report"].model_dump(mode="json")})
                rows.append(_report_row(entry["report"]))
        writer.write_json("periodic.json", entries)
        writer.write_csv("periodic.csv", ["period", "z", "w", "kind", "abs_mu1", "abs_mu2", "residual"], rows)
        saddles = sum(1 for r in rows if r[3] == SaddleKind.SADDLE.value)
        return {"points": len(rows), "saddles": saddles}


def _resonance_scan(u: complex, s: complex, k: int, tol: float) -> Dict[str, Any]:
    pairs = detect_resonance(u, s, k, tol)
    rho, r, k_prime = margins(u, s, 1)
    return {"pairs": pairs, "rho": rho, "regularity_order": r, "slope_order": k_prime}


class SaddleResonanceCommand(BaseCommand):
    """Resonances u^a s^b = 1 with a + b <= k, and the non-resonance margins."""

    name = "saddle resonance"
    description = "Resonance scan of a multiplier pair (resonances.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        u = as_complex(param(scenario, "u", required=True), "u")
        s = as_complex(param(scenario, "s", required=True), "s")
        k = int(param(scenario, "k", 12))
        tol = float(param(scenario, "tol", 1e-9))
        return [WorkItem(f"resonance u={u} s={s}", _resonance_scan, (u, s, k, tol))]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        payload = outcome.value if outcome.ok else outcome.error
        writer.write_json("resonances.json", payload)
        return payload


def _saddle_germ(
    family: ParametricFamily,
    lam: Sequence[complex],
    seed: Optional[Tuple[complex, complex]],
    period: int,
    degree: int,
) -> LocalMap:
    map_ = family.at(lam)
    if isinstance(map_, LocalMap):
        return map_
    if seed is None:
        raise PreconditionError("a Hénon family member needs a saddle seed for its normal form")
    report = find_periodic(map_, period, seed)
    if report.saddle is None:
        raise PreconditionError("seeded periodic point is not a saddle", {"kind": report.kind.value})
    frame = np.array(
        [[report.saddle.e_u[0], report.saddle.e_s[0]], [report.saddle.e_u[1], report.saddle.e_s[1]]]
    )
    return localize(map_, report.point, frame, degree, period)


def _normal_form(
    family: ParametricFamily,
    lam: Sequence[complex],
    seed: Optional[Tuple[complex, complex]],
    period: int,
    degree: int,
    k: int,
    section_radius: float,
) -> Dict[str, Any]:
    local = _saddle_germ(family, lam, seed, period, degree)
    nf = normal_form_star_k(local, k)
    zeta = zero_slope_section(nf, nf.degree)
    return {
        "u": nf.u,
        "s": nf.s,
        "k": nf.k,
        "flatness": nf.flatness(),
        "conjugacy_residual": nf.residual(local),
        "g_norms": list(nf.g_norms),
        "section": zeta.coeffs,
        "section_residual": section_residual(nf, zeta, section_radius),
        "normal_form": nf.to_json(),
    }


class NormalFormCommand(BaseCommand):
    """Normal form (u x (1 + y g1), s y (1 + x g2)) of a saddle germ and its zero-slope section."""

    name = "saddle normal-form"
    description = "Normal form and zero-slope section (normal_form.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        family = scenario_family(scenario)
        lam = _parameter(scenario, family)
        seed = param(scenario, "seed")
        point = as_point(seed, "seed") if seed is not None else None
        period = int(param(scenario, "period", 1))
        degree = int(param(scenario, "degree", config.get_degree()))
        k = int(param(scenario, "k", 3))
        if k < 1:
            raise ScenarioParseError("normal form order k must be >= 1")
        radius = float(param(scenario, "section_radius", 0.5))
        return [WorkItem("normal form", _normal_form, (family, lam, point, period, degree, k, radius))]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        if not outcome.ok:
            writer.write_json("normal_form.json", outcome.error)
            return outcome.error
        writer.write_json("normal_form.json", outcome.value)
        return {k: v for k, v in outcome.value.items() if k not in ("normal_form", "section")}
