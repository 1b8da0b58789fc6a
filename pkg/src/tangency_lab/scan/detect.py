"""
Tangency detection in one-parameter families.

Both objects are graphs over the y-axis depending on the parameter:
the unstable piece x = F(lambda, y) and a stable (vertical) graph
x = G(lambda, y). A tangency is a solution of D = 0, dD/dy = 0 with
D = F - G, found by Newton in (lambda, y) from a multi-start grid.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..bidisk.graphs import GraphInBidisk
from ..bidisk.transform import graph_transform_n
from ..core.errors import (
    ExponentResolutionError,
    MissingEventError,
    MonodromyAmbiguityError,
    NumericalError,
    PreconditionError,
    ValidationError,
)
from ..core.models import Orientation, TangencyEvent, TangencyRecord
from ..germ.classify import classify_unfolding
from ..germ.germ import UnfoldingGerm
from ..henon.family import ParametricFamily
from ..henon.local import LocalMap
from ..series.roots import polynomial_roots
from ..series.truncated import TruncatedSeries1, TruncatedSeries2

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
MAX_ITERATIONS = 80
LAMBDA_DEDUP = 1e-6
Y_DEDUP = 1e-5
DEGENERATE_TOL = 1e-6


def _padded(series: TruncatedSeries2, degree: int) -> TruncatedSeries2:
    """Zero-pad to a larger degree; the tail still bounds everything not stored."""
    if degree <= series.degree:
        return series
    c = np.zeros((degree + 1, degree + 1), dtype=complex)
    c[: series.degree + 1, : series.degree + 1] = series.coeffs
    return TruncatedSeries2(c, series.radii, series.tail)


@dataclass(frozen=True)
class ParameterWindow:
    """The disk |lambda - center| <= radius."""

    center: complex
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValidationError(f"window radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))

    def contains(self, lam: complex) -> bool:
        return abs(complex(lam) - self.center) <= self.radius * (1.0 + 1e-12)


@dataclass(frozen=True)
class ParametricGraph:
    """x = F(lambda, y); lambda is variable 0 of the series and y variable 1."""

    series: TruncatedSeries2
    name: str = "graph"

    @classmethod
    def from_terms(
        cls, terms: Dict[Tuple[int, int], complex], degree: int, name: str = "graph"
    ) -> "ParametricGraph":
        """From {(lambda power, y power): coefficient}."""
        return cls(TruncatedSeries2.from_terms(terms, degree), name)

    @classmethod
    def constant(cls, value: complex, name: str = "graph") -> "ParametricGraph":
        return cls(TruncatedSeries2.constant(complex(value), 1), name)

    @classmethod
    def power_at(
        cls,
        y0: complex,
        power: int,
        lam_terms: Optional[Dict[int, complex]] = None,
        name: str = "unstable",
    ) -> "ParametricGraph":
        """x = (y - y0)^power + sum_k c_k lambda^k."""
        lam_terms = lam_terms or {}
        degree = max([power, *lam_terms.keys()])
        series = TruncatedSeries2.from_terms({(0, power): 1.0}, degree).recenter(0.0, -complex(y0))
        if lam_terms:
            series = series + TruncatedSeries2.from_terms({(k, 0): c for k, c in lam_terms.items()}, degree)
        return cls(series, name)

    @classmethod
    def from_graph(cls, graph: GraphInBidisk, name: Optional[str] = None) -> "ParametricGraph":
        """A parameter-independent vertical graph x = gamma(y / R)."""
        if graph.orientation is not Orientation.VERTICAL:
            raise PreconditionError("only vertical graphs are stable targets")
        coeffs = graph.series.coeffs / graph.domain_radius ** np.arange(graph.series.degree + 1)
        table = np.zeros((coeffs.size, coeffs.size), dtype=complex)
        table[0, :] = coeffs
        series = TruncatedSeries2(table, (1.0, graph.domain_radius), graph.series.tail)
        return cls(series, name or (graph.code or "stable"))

    def at(self, lam: complex) -> TruncatedSeries1:
        return self.series.restrict(0, lam)

    def evaluate(self, lam: complex, y: complex) -> complex:
        return complex(self.series.evaluate(lam, y))

    def minus(self, other: "ParametricGraph") -> TruncatedSeries2:
        """F - G at the larger of the two degrees."""
        degree = max(self.series.degree, other.series.degree)
        return _padded(self.series, degree) - _padded(other.series, degree)


class VerticalGraphFamily(ABC):
    """Indexed stable graphs Gamma_n, e.g. successive pull-backs."""

    name: str = "stable"

    @abstractmethod
    def graph(self, n: int) -> ParametricGraph:
        """The n-th graph of the family."""
        pass


@dataclass
class ToyPullBack(VerticalGraphFamily):
    """Gamma_n = {x = alpha u^-n}, the pull-backs of {x = alpha} under diag(u, s)."""

    alpha: complex = 1.0
    u: complex = 2.0
    name: str = "toy"

    def graph(self, n: int) -> ParametricGraph:
        return ParametricGraph.constant(complex(self.alpha) * complex(self.u) ** (-n), f"{self.name}[{n}]")


@dataclass
class GermPullBack(VerticalGraphFamily):
    """Pull-backs of a vertical graph by a parameter-independent germ."""

    local: LocalMap
    base: GraphInBidisk
    name: str = "pull-back"
    _history: List[GraphInBidisk] = field(default_factory=list, repr=False)

    def graph(self, n: int) -> ParametricGraph:
        if n < 0:
            raise ValidationError("pull-back index must be non-negative")
        if not self._history:
            self._history.append(self.base)
        missing = n + 1 - len(self._history)
        if missing > 0:
            history = graph_transform_n(self.local, self._history[-1], missing)
            self._history.extend(history.graphs[1:])
        return ParametricGraph.from_graph(self._history[n], f"{self.name}[{n}]")


@dataclass(frozen=True)
class _TangencySystem:
    d: TruncatedSeries2
    d_lam: TruncatedSeries2
    d_y: TruncatedSeries2
    d_ylam: TruncatedSeries2
    d_yy: TruncatedSeries2
    scale: float

    @classmethod
    def of(cls, difference: TruncatedSeries2) -> "_TangencySystem":
        if difference.degree < 2:
            difference = _padded(difference, 2)
        d_y = difference.derive(1)
        return cls(
            difference,
            difference.derive(0),
            d_y,
            d_y.derive(0),
            d_y.derive(1),
            max(1.0, difference.magnitude()),
        )

    def residual(self, lam: complex, y: complex) -> float:
        return abs(complex(self.d(lam, y))) + abs(complex(self.d_y(lam, y)))

    def newton(self, lam: complex, y: complex, tol: float) -> Tuple[complex, complex, float]:
        """
        Newton on (D, dD/dy) = 0.

        Raises:
            NumericalError: singular step away from a root, or no convergence
        """
        for _ in range(MAX_ITERATIONS):
            residual = self.residual(lam, y)
            if residual <= tol * self.scale:
                return lam, y, residual
            a, b = complex(self.d_lam(lam, y)), complex(self.d_y(lam, y))
            c, d = complex(self.d_ylam(lam, y)), complex(self.d_yy(lam, y))
            det = a * d - b * c
            if det == 0:
                raise NumericalError("singular Newton step", {"lambda": lam, "y": y})
            f1, f2 = complex(self.d(lam, y)), complex(self.d_y(lam, y))
            lam, y = lam - (d * f1 - b * f2) / det, y - (a * f2 - c * f1) / det
            if not (np.isfinite(lam) and np.isfinite(y)) or abs(lam) + abs(y) > 1e8:
                raise NumericalError("Newton diverged")
        raise NumericalError("Newton did not converge", {"residual": self.residual(lam, y)})

    def contact_order(self, lam: complex, y: complex) -> int:
        """Order of contact in y at the point minus one: 1 unless d^2D/dy^2 vanishes."""
        series = self.d_yy
        for j in range(2, self.d.degree + 1):
            if abs(complex(series(lam, y))) / math.factorial(j) > DEGENERATE_TOL * self.scale:
                return j - 1
            if series.degree == 0:
                break
            series = series.derive(1)
        return self.d.degree

    def refine(self, lam: complex, y: complex, tol: float) -> Tuple[complex, complex, float]:
        """
        Sharpen a root where Newton on (D, dD/dy) only converges linearly,
        by Newton on (D, d^h D/dy^h) with h the contact order. The refined
        point is kept only if it still solves (D, dD/dy) to the tolerance.
        """
        residual = self.residual(lam, y)
        h = self.contact_order(lam, y)
        if h < 2 or h >= self.d.degree:
            return lam, y, residual
        top = self.d_yy
        for _ in range(h - 2):
            top = top.derive(1)
        top_lam, top_y = top.derive(0), top.derive(1)

        new_lam, new_y = lam, y
        with np.errstate(all="ignore"):
            for _ in range(MAX_ITERATIONS):
                a, b = complex(self.d_lam(new_lam, new_y)), complex(self.d_y(new_lam, new_y))
                c, d = complex(top_lam(new_lam, new_y)), complex(top_y(new_lam, new_y))
                det = a * d - b * c
                if det == 0:
                    break
                f1, f2 = complex(self.d(new_lam, new_y)), complex(top(new_lam, new_y))
                step_lam, step_y = (d * f1 - b * f2) / det, (a * f2 - c * f1) / det
                new_lam, new_y = new_lam - step_lam, new_y - step_y
                if not (np.isfinite(new_lam) and np.isfinite(new_y)):
                    return lam, y, residual
                if abs(step_lam) + abs(step_y) <= 1e-15 * (1.0 + abs(new_lam) + abs(new_y)):
                    break
        refined = self.residual(new_lam, new_y)
        if refined > max(residual, tol * self.scale):
            return lam, y, residual
        logger.debug(f"degenerate root of contact order {h + 1} refined by {abs(new_y - y):.3g} in y")
        return new_lam, new_y, refined


def _seeds(
    system: _TangencySystem, window: ParameterWindow, y_radius: float, rings: int, angles: int
) -> Iterator[Tuple[complex, complex]]:
    radii = np.linspace(0.0, 0.9, rings + 1)
    for rho in radii:
        for theta in (2 * np.pi * (np.arange(angles) + 0.5) / angles if rho else [0.0]):
            lam = window.center + window.radius * rho * np.exp(1j * theta)
            ys = [y for y in polynomial_roots(system.d_y.restrict(0, lam).coeffs) if abs(y) <= 1.1 * y_radius]
            for y in ys or [0j]:
                yield complex(lam), complex(y)


def classify_event(
    difference: TruncatedSeries2, lam: complex, y: complex, rng: Optional[np.random.Generator] = None
) -> Tuple[Optional[TangencyRecord], Optional[str]]:
    """
    Classify the germ of the difference at a detected tangency.

    Returns:
        (record, None), or (None, reason) when the germ cannot be resolved
    """
    try:
        germ = UnfoldingGerm.from_difference(difference, lam, y)
        try:
            return classify_unfolding(germ, rng=rng), None
        except (ExponentResolutionError, MonodromyAmbiguityError) as e:
            logger.info(f"speed blocks unresolved at lambda={lam:.6g}: {e.message}")
            return classify_unfolding(germ, rng=rng, with_speed=False), None
    except (NumericalError, ValidationError) as e:
        logger.warning(f"tangency at lambda={lam:.6g} not classified: {e.message}")
        return None, f"{type(e).__name__}: {e.message}"


def detect_tangencies(
    family: Optional[ParametricFamily],
    unstable: ParametricGraph,
    stable: ParametricGraph,
    window: ParameterWindow,
    y_radius: float = 1.0,
    rings: int = 3,
    angles: int = 8,
    tol: float = NEWTON_TOL,
    classify: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> List[TangencyEvent]:
    """
    Every distinct tangency between the two graphs with lambda in the window
    and |y| < y_radius.

    Args:
        family: Optional one-parameter family the graphs belong to (box check)
        unstable: x = F(lambda, y)
        stable: x = G(lambda, y)
        window: Parameter disk searched
        y_radius: Radius of the y-disk both graphs live over
        rings, angles: Layout of the lambda seeds
        tol: Newton residual tolerance relative to the difference's scale
        classify: Attach a TangencyRecord to every event

    Returns:
        Events sorted by |lambda - center|, then by argument
    """
    if family is not None and family.dim != 1:
        raise PreconditionError("tangency detection needs a one-parameter family", {"dim": family.dim})
    difference = unstable.minus(stable)
    system = _TangencySystem.of(difference)

    roots: List[Tuple[complex, complex, float]] = []
    failures = 0
    for lam0, y0 in _seeds(system, window, y_radius, rings, angles):
        try:
            lam, y, residual = system.newton(lam0, y0, tol)
            lam, y, residual = system.refine(lam, y, tol)
        except NumericalError as e:
            failures += 1
            logger.debug(f"start ({lam0:.4g}, {y0:.4g}) failed: {e.message}")
            continue
        if not window.contains(lam) or abs(y) >= y_radius:
            continue
        if family is not None:
            try:
                family.check_box([lam])
            except ValidationError:
                continue
        lam_tol = LAMBDA_DEDUP * max(window.radius, abs(lam))
        if all(abs(lam - a) > lam_tol or abs(y - b) > Y_DEDUP for a, b, _ in roots):
            roots.append((lam, y, residual))

    roots.sort(key=lambda r: (round(abs(r[0] - window.center), 14), np.angle(r[0] - window.center)))
    logger.debug(f"{len(roots)} tangencies in window, {failures} failed starts")
    events = []
    for lam, y, residual in roots:
        record, error = classify_event(difference, lam, y, rng) if classify else (None, None)
        events.append(
            TangencyEvent(
                parameter=[lam],
                point=(y, unstable.evaluate(lam, y)),
                objects={"unstable": unstable.name, "stable": stable.name},
                record=record,
                classification_error=error,
                residual=residual,
            )
        )
    return events


def detect_tangency(
    family: Optional[ParametricFamily],
    unstable: ParametricGraph,
    stable: ParametricGraph,
    window: ParameterWindow,
    y_radius: float = 1.0,
    classify: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> Optional[TangencyEvent]:
    """
    The tangency of smallest |lambda| in the window, with its classified
    germ, or None when every start diverges or leaves the window.
    """
    events = detect_tangencies(family, unstable, stable, window, y_radius, classify=False)
    if not events:
        logger.info(f"no tangency between {unstable.name} and {stable.name} in the window")
        return None
    best = min(events, key=lambda e: abs(e.parameter[0]))
    if classify:
        difference = unstable.minus(stable)
        record, error = classify_event(difference, best.parameter[0], best.point[0], rng)
        best = best.model_copy(update={"record": record, "classification_error": error})
    return best


def _predicted_window(history: Sequence[Tuple[int, complex]], n: int, all_branches: bool) -> ParameterWindow:
    ns = np.array([k for k, _ in history], dtype=float)
    logs = -np.log(np.array([abs(lam) for _, lam in history]))
    slope = float(np.polyfit(ns, logs, 1)[0])
    (n1, lam1), (n2, lam2) = history[-2], history[-1]
    modulus = abs(lam2) * np.exp(-slope * (n - n2))
    if all_branches:
        return ParameterWindow(0j, 1.5 * modulus)
    turn = np.angle(lam2 / lam1) / (n2 - n1)
    center = modulus * np.exp(1j * (np.angle(lam2) + turn * (n - n2)))
    return ParameterWindow(center, 0.5 * modulus)


def secondary_sequence(
    family: Optional[ParametricFamily],
    unstable: ParametricGraph,
    stable: VerticalGraphFamily,
    n_values: Sequence[int],
    bracket: Tuple[ParameterWindow, ParameterWindow],
    all_branches: bool = False,
    y_radius: float = 1.0,
    classify: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> List[TangencyEvent]:
    """
    Tangencies between the unstable graph and Gamma_n for each n.

    The first two windows come from `bracket`; later ones are centered on
    the extrapolation of the events found so far. With `all_branches` the
    window is the disk around 0 reaching past the predicted modulus, so
    every branch (e.g. a conjugate pair) is kept.

    Raises:
        MissingEventError: no tangency in the window used for some n
    """
    n_values = list(n_values)
    if len(n_values) < 2:
        raise ValidationError("a secondary sequence needs at least two indices")
    history: List[Tuple[int, complex]] = []
    events: List[TangencyEvent] = []
    for i, n in enumerate(n_values):
        window = bracket[i] if i < 2 else _predicted_window(history, n, all_branches)
        target = stable.graph(n)
        found = detect_tangencies(
            family, unstable, target, window, y_radius, classify=classify, rng=rng
        )
        if not found:
            raise MissingEventError(
                f"no tangency for n = {n}",
                {"n": n, "center": window.center, "radius": window.radius},
            )
        if not all_branches and len(found) > 1:
            logger.warning(f"{len(found)} tangencies in the window for n = {n}; keeping the nearest")
            found = found[:1]
        for event in found:
            events.append(
                event.model_copy(
                    update={"index": n, "objects": {**event.objects, "duplicates": str(len(found) - 1)}}
                )
            )
        history.append((n, found[0].parameter[0]))
        logger.debug(f"n = {n}: |lambda_n| = {abs(found[0].parameter[0]):.6e}")
    logger.info(f"secondary sequence: {len(events)} events over {len(n_values)} indices")
    return events
