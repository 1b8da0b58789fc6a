"""
Scan commands: tangency detection, scaling fits, continuation, moduli
profiles and type-change detection.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..bidisk.graphs import GraphInBidisk
from ..core.artifacts import (
    ArtifactWriter,
    curve_table,
    events_table,
    profile_table,
    scan_result_summary,
    scan_result_table,
    type_change_table,
)
from ..core.errors import PreconditionError, ScenarioParseError
from ..core.models import ContinuationCurve, Scenario, TangencyEvent
from ..henon.family import ParametricFamily
from ..henon.local import LocalMap
from ..scan import (
    ConstraintSystem,
    GermPullBack,
    MultiplierLevelConstraint,
    ParameterWindow,
    ParametricGraph,
    SaddleTracker,
    TangencyConstraint,
    ToyPullBack,
    VerticalGraphFamily,
    count_per_index,
    detect_tangencies,
    detect_type_change,
    fit_scaling,
    moduli_probe,
    moduli_profile,
    secondary_sequence,
    segment_problem,
    trace_constraint_curve,
    verify_curve,
)
from .base_command import (
    BaseCommand,
    ItemOutcome,
    WorkItem,
    as_complex,
    as_point,
    param,
    parse_range,
    polynomial_terms,
    positive,
    real_axis,
    scenario_family,
)

logger = logging.getLogger(__name__)

GRAPH_VARIABLES = ("lam", "y")


def parametric_graph(expression: str, name: str) -> ParametricGraph:
    """x = F(lam, y) from a polynomial expression."""
    terms = {(p[0], p[1]): c for p, c in polynomial_terms(expression, GRAPH_VARIABLES).items()}
    degree = max([1, *(p + q for p, q in terms)])
    return ParametricGraph.from_terms(terms or {(0, 0): 0j}, degree, name)


def _window(raw: Any, where: str) -> ParameterWindow:
    """[re, im, radius] or {center = [re, im], radius = r}."""
    if isinstance(raw, dict):
        return ParameterWindow(as_complex(raw.get("center", 0.0), where), positive(raw["radius"], where))
    if isinstance(raw, list) and len(raw) == 3:
        return ParameterWindow(complex(float(raw[0]), float(raw[1])), positive(raw[2], where))
    raise ScenarioParseError(f"{where}: expected [re, im, radius], got {raw!r}")


def _write_events(writer: ArtifactWriter, stem: str, events: Sequence[TangencyEvent]) -> None:
    header, rows = events_table(events)
    writer.write_csv(f"{stem}.csv", header, rows)
    writer.write_json(f"{stem}.json", [e.model_dump(mode="json") for e in events])


class ScanTangencyCommand(BaseCommand):
    """All tangencies between x = F(lam, y) and x = G(lam, y) in a parameter disk."""

    name = "scan tangency"
    description = "Detect tangency parameters in a window (events.csv, events.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        unstable = parametric_graph(param(scenario, "unstable", required=True), "unstable")
        stable = parametric_graph(param(scenario, "stable", "0"), "stable")
        window = _window(param(scenario, "window", required=True), "window")
        y_radius = positive(param(scenario, "y_radius", 1.0), "y_radius")
        classify = bool(param(scenario, "classify", True))

        def run(rng: np.random.Generator) -> List[TangencyEvent]:
            return detect_tangencies(None, unstable, stable, window, y_radius, classify=classify, rng=rng)

        return [WorkItem("tangencies", run, needs_rng=True)]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        events = outcome.value if outcome.ok else []
        _write_events(writer, "events", events)
        return {"events": len(events), "parameters": [e.parameter[0] for e in events]}


def _stable_family(scenario: Scenario) -> VerticalGraphFamily:
    alpha = as_complex(param(scenario, "alpha", 1.0), "alpha")
    if scenario.family is None:
        return ToyPullBack(alpha, as_complex(param(scenario, "u", 2.0), "u"))
    family = scenario_family(scenario)
    local = family.at([0.0] * family.dim)
    if not isinstance(local, LocalMap):
        raise PreconditionError("pull-back families need a synthetic germ family")
    return GermPullBack(local, GraphInBidisk.vertical([alpha]), name=family.name)


def _scaling(
    unstable: ParametricGraph,
    stable: VerticalGraphFamily,
    n_values: List[int],
    bracket: Tuple[ParameterWindow, ParameterWindow],
    all_branches: bool,
    u0: Optional[complex],
    sigma: Optional[float],
    min_events: int,
) -> Dict[str, Any]:
    events = secondary_sequence(None, unstable, stable, n_values, bracket, all_branches=all_branches)
    result = fit_scaling(events, u0, sigma, min_events)
    return {"events": events, "fit": result, "counts": count_per_index(events)}


class ScanScalingCommand(BaseCommand):
    """Secondary tangency sequence against pulled-back stable graphs and its scaling fit."""

    name = "scan scaling"
    description = "Secondary tangencies lambda_n and the fit of -ln|lambda_n| (sequence.csv, fit.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        unstable = parametric_graph(param(scenario, "unstable", "(y - 0.3)**2 + lam"), "unstable")
        stable = _stable_family(scenario)
        n_values = parse_range(param(scenario, "n", "5..25"))
        raw = param(scenario, "bracket")
        if raw is None:
            radius = positive(param(scenario, "bracket_radius", 1.0), "bracket_radius")
            bracket = (ParameterWindow(0j, radius), ParameterWindow(0j, radius))
        else:
            if not isinstance(raw, list) or len(raw) != 2:
                raise ScenarioParseError("bracket needs two windows")
            bracket = (_window(raw[0], "bracket"), _window(raw[1], "bracket"))
        u0 = param(scenario, "u0")
        sigma = param(scenario, "sigma")
        args = (
            unstable,
            stable,
            n_values,
            bracket,
            bool(param(scenario, "all_branches", False)),
            as_complex(u0, "u0") if u0 is not None else None,
            float(sigma) if sigma is not None else None,
            int(param(scenario, "min_events", 8)),
        )
        return [WorkItem("secondary sequence", _scaling, args)]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        if not outcome.ok:
            writer.write_json("fit.json", outcome.error)
            return outcome.error
        value = outcome.value
        _write_events(writer, "sequence", value["events"])
        header, rows = scan_result_table(value["fit"])
        writer.write_csv("fit.csv", header, rows)
        summary = {**scan_result_summary(value["fit"]), "counts": value["counts"]}
        writer.write_json("fit.json", summary)
        return summary


def _constraint(scenario: Scenario, kind: str) -> Tuple[ConstraintSystem, np.ndarray]:
    if kind == "tangency":
        names = tuple(param(scenario, "names", ["l1", "l2", "y"]))
        constraint: ConstraintSystem = TangencyConstraint.from_expressions(
            str(param(scenario, "unstable", required=True)), str(param(scenario, "stable", "0")), names
        )
        seed = np.asarray(param(scenario, "seed", required=True), dtype=float)
    elif kind == "segment":
        start = param(scenario, "start", required=True)
        constraint = segment_problem(start, param(scenario, "end", required=True))
        seed = np.asarray(start, dtype=float)
    elif kind == "multiplier":
        family = scenario_family(scenario)
        constraint = MultiplierLevelConstraint(
            family,
            positive(param(scenario, "level", required=True), "level"),
            int(param(scenario, "period", 1)),
        )
        seed = MultiplierLevelConstraint.pack(
            [float(v) for v in param(scenario, "parameter", required=True)],
            as_point(param(scenario, "point", required=True)),
            as_complex(param(scenario, "mu", required=True), "mu"),
        )
    else:
        raise ScenarioParseError(f"unknown constraint kind: {kind!r} (tangency, segment, multiplier)")
    return constraint, seed


def _continue(
    constraint: ConstraintSystem,
    seed: np.ndarray,
    step: float,
    samples: Optional[int],
    length: Optional[float],
    direction: Optional[Sequence[float]],
) -> Dict[str, Any]:
    curve = trace_constraint_curve(constraint, seed, step, samples, length, direction)
    verification = verify_curve(constraint, curve)
    return {"curve": curve, "verification": verification}


class ScanContinueCommand(BaseCommand):
    """Pseudo-arclength continuation of a tangency, segment or multiplier-level curve."""

    name = "scan continue"
    description = "Trace a constraint curve (curve.csv, curve.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        constraint, seed = _constraint(scenario, str(param(scenario, "kind", "tangency")))
        samples = param(scenario, "samples")
        length = param(scenario, "length")
        if samples is None and length is None:
            samples = 50
        direction = param(scenario, "direction")
        args = (
            constraint,
            seed,
            positive(param(scenario, "step", 1e-2), "step"),
            int(samples) if samples is not None else None,
            float(length) if length is not None else None,
            direction,
        )
        return [WorkItem(constraint.name, _continue, args)]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        if not outcome.ok:
            writer.write_json("curve.json", outcome.error)
            return outcome.error
        curve: ContinuationCurve = outcome.value["curve"]
        check = outcome.value["verification"]
        header, rows = curve_table(curve)
        writer.write_csv("curve.csv", header, rows)
        summary = {
            "constraint": curve.constraint,
            "samples": len(curve.points),
            "arclength": curve.arclength[-1],
            "max_residual": max(curve.residuals),
            "verification": {
                "max_residual": check.max_residual,
                "max_displacement": check.max_displacement,
                "passed": check.passed,
            },
        }
        writer.write_json("curve.json", {**summary, "curve": curve.model_dump(mode="json")})
        return summary


def _moduli(
    family: ParametricFamily,
    start: List[float],
    end: Optional[List[float]],
    seed: Tuple[complex, complex],
    period: int,
    step: float,
) -> Any:
    if end is None:
        return moduli_probe(family.at(start), seed, period)
    constraint = segment_problem(start, end, family.parameters)
    span = float(np.linalg.norm(np.subtract(end, start)))
    curve = trace_constraint_curve(
        constraint, start, step, length=span, direction=np.subtract(end, start)
    )
    return moduli_profile(curve, SaddleTracker(family, seed, period))


class ScanModuliCommand(BaseCommand):
    """ln|u| / ln|s| at one parameter, or along a straight segment of a two-parameter family."""

    name = "scan moduli"
    description = "Moduli probe or profile (profile.csv, profile.json)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        family = scenario_family(scenario)
        start = [float(v) for v in param(scenario, "start", required=True)]
        end = param(scenario, "end")
        args = (
            family,
            start,
            [float(v) for v in end] if end is not None else None,
            as_point(param(scenario, "seed", required=True), "seed"),
            int(param(scenario, "period", 1)),
            positive(param(scenario, "step", 0.05), "step"),
        )
        return [WorkItem("moduli", _moduli, args)]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        if not outcome.ok:
            writer.write_json("profile.json", outcome.error)
            return outcome.error
        value = outcome.value
        if not hasattr(value, "samples"):
            payload = value.model_dump(mode="json")
            writer.write_json("probe.json", payload)
            return payload
        header, rows = profile_table(value)
        writer.write_csv("profile.csv", header, rows)
        summary = {
            "samples": len(value.samples),
            "spread": value.spread,
            "numerical_error": value.numerical_error,
            "non_constant": value.non_constant,
        }
        writer.write_json("profile.json", summary)
        return summary


class ScanTypeChangeCommand(BaseCommand):
    """Type changes of periodic points over a real parameter grid."""

    name = "scan type-change"
    description = "Detect periodic-point type changes over a grid (type_changes.csv)"

    def items(self, scenario: Scenario) -> List[WorkItem]:
        family = scenario_family(scenario)
        raw = param(scenario, "axes", required=True)
        if not isinstance(raw, list):
            raise ScenarioParseError("axes must be a list of [start, stop, count] triples")
        axes = [real_axis(a, "axes") for a in raw]
        max_period = int(param(scenario, "max_period", 1))
        radius = positive(param(scenario, "radius", 4.0), "radius")
        return [WorkItem("type changes", detect_type_change, (family, axes, max_period, radius))]

    def write(self, writer: ArtifactWriter, outcomes: List[ItemOutcome], scenario: Scenario) -> Any:
        outcome = outcomes[0]
        events = outcome.value if outcome.ok else []
        header, rows = type_change_table(events)
        writer.write_csv("type_changes.csv", header, rows)
        if not outcome.ok:
            return outcome.error
        return {"events": len(events), "kinds": [e.kind for e in events]}
