"""
Graph transforms.

The forward transform of a horizontal graph y = g(x) under F is the graph
of the image, x' = F1(t, g(t)), y' = F2(t, g(t)). Two engines compute it:

- "series": coefficient-space composition with the reversion of
  t -> F1(t, g(t)), for maps given as LocalMap germs;
- "collocation": Newton solves of F1(t, g(t)) = x_k at roots-of-unity
  nodes followed by an FFT refit, for any map with a numeric forward.

The pull-back of a vertical graph is a forward transform by the inverse
with the coordinates swapped. Single Hénon factors have their own
branch-aware pull-back used by the horseshoe.
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..config import config
from ..core.errors import (
    CollocationError,
    ConvergenceError,
    GraphEscapeError,
    PreconditionError,
    ValidationError,
)
from ..core.models import Orientation
from ..henon.local import LocalMap
from ..henon.maps import HenonFactor, PolynomialAutomorphism
from ..series.roots import polynomial_roots
from ..series.truncated import TruncatedSeries1, TruncatedSeries2, compose1, reversion, substitute
from .graphs import GraphInBidisk

logger = logging.getLogger(__name__)

HOMOTOPY_STEPS = 8
NEWTON_STEPS = 30
COLLOCATION_TOL = 1e-8


@dataclass(frozen=True)
class TransformHistory:
    """Graphs gamma_0..gamma_n and their derivative sup-norms."""

    graphs: List[GraphInBidisk]
    norms: List[Tuple[float, ...]]

    @property
    def final(self) -> GraphInBidisk:
        return self.graphs[-1]

    def norm_series(self, order: int) -> List[float]:
        return [n[order] for n in self.norms]


class SwappedInverse:
    """(x, y) -> S f^{-1} S (x, y) with S the coordinate swap, for numeric maps."""

    def __init__(self, map_: Any) -> None:
        self.map = map_

    def forward(self, z: Any, w: Any) -> Tuple[Any, Any]:
        p, q = self.map.inverse(w, z)
        return q, p


def _swap(s: TruncatedSeries2) -> TruncatedSeries2:
    return TruncatedSeries2(s.coeffs.T.copy(), (s.radii[1], s.radii[0]), s.tail)


def swapped_inverse_germ(local: LocalMap) -> LocalMap:
    """The germ S f^{-1} S, which turns a pull-back into a forward transform."""
    g1, g2 = local.inverse_germ().pair
    return LocalMap(_swap(g2), _swap(g1), name=f"swap({local.name}^-1)")


def _check_contained(graph: GraphInBidisk, step: int) -> None:
    slack = graph.containment_slack
    if not slack > 0:
        raise GraphEscapeError("graph escapes the bidisk", {"step": step, "slack": slack})


def series_step(local: LocalMap, graph: GraphInBidisk) -> GraphInBidisk:
    """One forward transform of a horizontal graph in coefficient space."""
    degree = graph.series.degree
    # constants are lifted to degree 1 so that t -> F1(t, c) can be reverted
    work = max(degree, 1)
    gamma = TruncatedSeries1(graph.series.coeffs, 1.0, 0.0).extend(work)
    t = TruncatedSeries1.variable(work)
    xi = substitute(local.f1, t, gamma, work)
    eta = substitute(local.f2, t, gamma, work)
    xi0 = complex(xi.coeffs[0])
    g = reversion(xi - xi0)
    image = compose1(eta, g)
    if xi0 != 0:
        image = image.recenter(-xi0)
    new = TruncatedSeries1(image.coeffs[: degree + 1], 1.0, 0.0)

    # invariance defect on a small circle doubles as the tail
    nodes = 0.5 * np.exp(2j * np.pi * np.arange(64) / 64)
    x1, y1 = local.forward(nodes, gamma.evaluate(nodes))
    defect = float(np.max(np.abs(new.evaluate(x1) - y1)))
    return GraphInBidisk(graph.orientation, TruncatedSeries1(new.coeffs, 1.0, defect), 1.0, graph.bound)


def _solve_preimages(map_: Any, gamma: TruncatedSeries1, targets: np.ndarray) -> np.ndarray:
    """t with F1(t, gamma(t)) = target, by homotopy from t = 0 and Newton."""

    def xi(t: np.ndarray) -> np.ndarray:
        return np.asarray(map_.forward(t, gamma.evaluate(t))[0], dtype=complex)

    h = 1e-6
    start = complex(xi(np.zeros(1))[0])
    t = np.zeros_like(targets)
    for m in range(1, HOMOTOPY_STEPS + 1):
        goal = start + (targets - start) * m / HOMOTOPY_STEPS
        for _ in range(NEWTON_STEPS):
            value = xi(t) - goal
            slope = (xi(t + h) - xi(t - h)) / (2 * h)
            if np.any(slope == 0):
                raise ConvergenceError("vanishing derivative in collocation solve")
            step = value / slope
            t = t - step
            if np.max(np.abs(step)) <= 1e-15 * (1.0 + float(np.max(np.abs(t)))):
                break
    if not np.all(np.isfinite(t)):
        raise ConvergenceError("collocation Newton diverged")
    return t


def collocation_step(map_: Any, graph: GraphInBidisk, tol: float = COLLOCATION_TOL) -> GraphInBidisk:
    """
    One forward transform of a horizontal graph by node collocation.

    Raises:
        GraphEscapeError: the preimage nodes leave the graph's domain
        CollocationError: the refit misses offset nodes by more than tol
    """
    degree = graph.series.degree
    gamma = graph.series
    size = 2 * (degree + 1)
    nodes = np.exp(2j * np.pi * np.arange(size) / size)
    t = _solve_preimages(map_, gamma, nodes)
    if np.max(np.abs(t)) >= 1.0:
        raise GraphEscapeError(
            "image graph is not defined over the unit disk", {"max_preimage": float(np.max(np.abs(t)))}
        )
    values = np.asarray(map_.forward(t, gamma.evaluate(t))[1], dtype=complex)
    coeffs = np.fft.fft(values)[: degree + 1] / size
    new = TruncatedSeries1(coeffs, 1.0, 0.0)

    offset = nodes * np.exp(1j * np.pi / size)
    t_off = _solve_preimages(map_, gamma, offset)
    expected = np.asarray(map_.forward(t_off, gamma.evaluate(t_off))[1], dtype=complex)
    residual = float(np.max(np.abs(new.evaluate(offset) - expected)))
    scale = max(1.0, float(np.max(np.abs(values))))
    if residual > tol * scale:
        raise CollocationError("collocation residual above tolerance", {"residual": residual, "tol": tol})
    return GraphInBidisk(graph.orientation, TruncatedSeries1(coeffs, 1.0, residual), 1.0, graph.bound)


def henon_pull_back(
    factor: HenonFactor,
    graph: GraphInBidisk,
    branch: int,
    degree: Optional[int] = None,
    tol: float = COLLOCATION_TOL,
) -> GraphInBidisk:
    """
    Pull back a vertical graph x = gamma(y) through one Hénon factor.

    A point (x, y) lands on the graph when P(x) + a y = gamma(x); for each
    node y the root is followed by Newton from the branch anchor (the
    roots of P ordered along their spread direction).

    Raises:
        CollocationError: refit residual above tol
        GraphEscapeError: the pulled-back graph leaves the frame
    """
    if graph.orientation is not Orientation.VERTICAL:
        raise PreconditionError("Hénon pull-back acts on vertical graphs")
    anchors = branch_anchors(factor)
    if not 0 <= branch < len(anchors):
        raise ValidationError(f"branch {branch} out of range")
    if degree is None:
        degree = max(graph.series.degree, config.get_graph_degree())
    radius = graph.domain_radius
    size = 2 * (degree + 1)
    nodes = radius * np.exp(2j * np.pi * np.arange(size) / size)
    offset = nodes * np.exp(1j * np.pi / size)

    def solve(y: np.ndarray) -> np.ndarray:
        x = np.full_like(y, anchors[branch])
        for _ in range(NEWTON_STEPS):
            value = factor.poly(x) + factor.a * y - graph.evaluate(x)
            slope = factor.poly_derivative(x) - graph.derivative(x, 1)
            step = value / slope
            x = x - step
            if np.max(np.abs(step)) <= 1e-15 * (1.0 + float(np.max(np.abs(x)))):
                break
        if not np.all(np.isfinite(x)):
            raise ConvergenceError("pull-back Newton diverged", {"branch": branch})
        return x

    values = solve(nodes)
    coeffs = np.fft.fft(values)[: degree + 1] / size
    series = TruncatedSeries1(coeffs, 1.0, 0.0)
    residual = float(np.max(np.abs(series.evaluate(offset / radius) - solve(offset))))
    if residual > tol * max(1.0, float(np.max(np.abs(values)))):
        raise CollocationError("pull-back residual above tolerance", {"residual": residual, "branch": branch})
    result = GraphInBidisk(
        Orientation.VERTICAL,
        TruncatedSeries1(coeffs, 1.0, residual),
        radius,
        graph.bound,
        (),
        f"{branch}{graph.code}",
    )
    _check_contained(result, 1)
    return result


def branch_anchors(factor: HenonFactor) -> List[complex]:
    """Roots of P ordered along the direction in which they spread."""
    roots = polynomial_roots(factor.coeffs)
    if roots.size < 2:
        return [complex(r) for r in roots]
    spread = roots[np.argmax(np.abs(roots - roots[0]))] - roots[0]
    direction = spread / abs(spread)
    return sorted((complex(r) for r in roots), key=lambda r: (r * np.conj(direction)).real)


def graph_transform_n(
    map_: Any,
    graph: GraphInBidisk,
    n: int,
    ell: int = 3,
    engine: str = "auto",
    word: Optional[Sequence[int]] = None,
) -> TransformHistory:
    """
    Iterate the graph transform n times and track derivative sup-norms.

    Horizontal graphs are pushed forward; vertical graphs are pulled back
    (forward by the coordinate-swapped inverse, or along an itinerary
    `word` of inverse branches for a single Hénon factor).

    Args:
        map_: LocalMap or PolynomialAutomorphism
        graph: Starting graph
        n: Number of steps
        ell: Highest derivative order tracked
        engine: "series", "collocation" or "auto"
        word: Hénon inverse branches, applied last symbol first

    Returns:
        TransformHistory with n + 1 graphs
    """
    if n < 0 or ell < 0:
        raise ValidationError("n and ell must be non-negative")
    if engine not in ("auto", "series", "collocation"):
        raise ValidationError(f"unknown transform engine: {engine}")
    current = graph.with_norms(ell)
    _check_contained(current, 0)
    graphs, norms = [current], [current.derivative_norms]

    if graph.orientation is Orientation.VERTICAL and isinstance(map_, PolynomialAutomorphism):
        if len(map_.factors) != 1:
            raise PreconditionError("vertical pull-back of an automorphism needs a single Hénon factor")
        factor = map_.factors[0]
        if word is None:
            anchors = branch_anchors(factor)
            nearest = int(np.argmin([abs(a - complex(current.evaluate(0.0))) for a in anchors]))
            word = [nearest] * n
        if len(word) != n:
            raise ValidationError("itinerary length must equal n")
        for branch in reversed(list(word)):
            current = henon_pull_back(factor, current, int(branch)).with_norms(ell)
            graphs.append(current)
            norms.append(current.derivative_norms)
        return TransformHistory(graphs, norms)

    acting: Any = map_
    if graph.orientation is Orientation.VERTICAL:
        acting = swapped_inverse_germ(map_) if isinstance(map_, LocalMap) else SwappedInverse(map_)
    if engine == "auto":
        engine = "series" if isinstance(acting, LocalMap) else "collocation"
    if engine == "series" and not isinstance(acting, LocalMap):
        raise PreconditionError("the series engine needs a germ given as series")

    for k in range(1, n + 1):
        step = series_step(acting, current) if engine == "series" else collocation_step(acting, current)
        step = GraphInBidisk(graph.orientation, step.series, 1.0, graph.bound, (), graph.code)
        _check_contained(step, k)
        current = step.with_norms(ell)
        graphs.append(current)
        norms.append(current.derivative_norms)
        logger.debug(f"graph transform step {k}: norms {current.derivative_norms}")
    logger.info(f"graph transform: {n} steps with the {engine} engine")
    return TransformHistory(graphs, norms)
