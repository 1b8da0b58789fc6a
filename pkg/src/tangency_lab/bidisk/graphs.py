"""
Graphs and horizontal submanifolds of the bidisk.

A vertical graph x = gamma(y) is stored as a series in the normalized
variable eta = y / R over the unit disk, R being the domain radius of the
frame; horizontal graphs y = g(x) likewise. A horizontal manifold is a
parameterized disk z -> (pi1(z), pi2(z)) whose first coordinate is a
branched cover of degree d.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..core.errors import InconsistentDegreeError, PreconditionError, ValidationError
from ..core.models import Orientation
from ..series.roots import RootCluster, roots_in_disk
from ..series.truncated import TruncatedSeries1

logger = logging.getLogger(__name__)

BOUNDARY_SAMPLES = 256


@dataclass(frozen=True)
class GraphInBidisk:
    """
    A horizontal (y = g(x)) or vertical (x = gamma(y)) graph.

    `series` is expressed in the normalized free variable v / domain_radius;
    `bound` is the radius of the dependent coordinate's disk.
    """

    orientation: Orientation
    series: TruncatedSeries1
    domain_radius: float = 1.0
    bound: float = 1.0
    derivative_norms: Tuple[float, ...] = ()
    code: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.series, TruncatedSeries1):
            raise ValidationError("a graph is a one-variable series")
        if self.domain_radius <= 0 or self.bound <= 0:
            raise ValidationError("graph radii must be positive")
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    @classmethod
    def vertical(
        cls, coeffs: Sequence[complex], domain_radius: float = 1.0, bound: float = 1.0, code: str = ""
    ) -> "GraphInBidisk":
        return cls(Orientation.VERTICAL, TruncatedSeries1.from_coeffs(coeffs), domain_radius, bound, (), code)

    @classmethod
    def horizontal(
        cls, coeffs: Sequence[complex], domain_radius: float = 1.0, bound: float = 1.0
    ) -> "GraphInBidisk":
        return cls(Orientation.HORIZONTAL, TruncatedSeries1.from_coeffs(coeffs), domain_radius, bound)

    def evaluate(self, v: Any) -> Any:
        return self.series.evaluate(np.asarray(v, dtype=complex) / self.domain_radius)

    def derivative(self, v: Any, order: int = 1) -> Any:
        """order-th derivative with respect to the unnormalized variable."""
        coeffs = npoly.polyder(self.series.coeffs, order) if order else self.series.coeffs
        eta = np.asarray(v, dtype=complex) / self.domain_radius
        return npoly.polyval(eta, coeffs) / self.domain_radius**order

    def point(self, v: Any) -> Tuple[Any, Any]:
        value = self.evaluate(v)
        if self.orientation is Orientation.VERTICAL:
            return value, v
        return v, value

    def boundary_sup(self, order: int = 0, samples: int = BOUNDARY_SAMPLES) -> float:
        """Max over the boundary circle of |derivative of the given order|."""
        v = self.domain_radius * np.exp(2j * np.pi * np.arange(samples) / samples)
        return float(np.max(np.abs(self.derivative(v, order))))

    @property
    def containment_slack(self) -> float:
        return self.bound - self.boundary_sup(0) - self.series.tail

    def with_norms(self, ell: int) -> "GraphInBidisk":
        """Record sup-norms of the derivatives of orders 0..ell."""
        norms = tuple(self.boundary_sup(j) for j in range(ell + 1))
        return GraphInBidisk(self.orientation, self.series, self.domain_radius, self.bound, norms, self.code)

    def shifted(self, offset: complex) -> "GraphInBidisk":
        """The translate of the graph by `offset` in the dependent coordinate."""
        return GraphInBidisk(
            self.orientation, self.series + complex(offset), self.domain_radius, self.bound, (), self.code
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "orientation": self.orientation.value,
            "code": self.code,
            "domain_radius": self.domain_radius,
            "bound": self.bound,
            "derivative_norms": list(self.derivative_norms),
            "series": self.series.to_json(),
        }


@dataclass(frozen=True)
class HorizontalManifold:
    """A parameterized disk z -> (pi1(z), pi2(z)), |z| < radius."""

    pi1: TruncatedSeries1
    pi2: TruncatedSeries1
    radius: float = 1.0
    bound: float = 1.0

    @classmethod
    def from_coeffs(
        cls, pi1: Sequence[complex], pi2: Sequence[complex], radius: float = 1.0, bound: float = 1.0
    ) -> "HorizontalManifold":
        return cls(
            TruncatedSeries1.from_coeffs(pi1, radius),
            TruncatedSeries1.from_coeffs(pi2, radius),
            radius,
            bound,
        )

    def point(self, z: Any) -> Tuple[Any, Any]:
        return self.pi1.evaluate(z), self.pi2.evaluate(z)

    @property
    def containment_slack(self) -> float:
        z = self.radius * np.exp(2j * np.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES)
        return self.bound - float(np.max(np.abs(self.pi2.evaluate(z))))

    @cached_property
    def degree(self) -> int:
        return horizontal_degree(self)

    @cached_property
    def tangencies(self) -> List[Tuple[complex, Tuple[complex, complex], int]]:
        return vertical_tangencies(self)


@dataclass(frozen=True)
class Intersection:
    parameter: complex
    point: Tuple[complex, complex]
    multiplicity: int


@dataclass(frozen=True)
class RHCheck:
    """Tangency count of a manifold against a graph family and its bound d - 1."""

    count: int
    bound: int
    holds: bool
    per_graph: List[int] = field(default_factory=list)


def horizontal_degree(
    V: HorizontalManifold, probes: int = 5, rng: Optional[np.random.Generator] = None
) -> int:
    """
    Degree of the branched cover z -> pi1(z), by counting preimages of
    random regular values in |x| < 0.5.

    Raises:
        PreconditionError: the manifold touches the horizontal boundary
        InconsistentDegreeError: probes disagree
    """
    if V.containment_slack <= 0:
        raise PreconditionError("manifold is not strictly inside the bidisk", {"slack": V.containment_slack})
    rng = rng if rng is not None else np.random.default_rng(0)
    counts = []
    for _ in range(probes):
        x0 = 0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        shifted = V.pi1.coeffs.copy()
        shifted[0] -= x0
        counts.append(sum(c.multiplicity for c in roots_in_disk(shifted, V.radius)))
    if len(set(counts)) != 1:
        raise InconsistentDegreeError("preimage counts disagree across probes", {"counts": counts})
    logger.debug(f"horizontal degree {counts[0]} from {probes} probes")
    return counts[0]


def vertical_tangencies(V: HorizontalManifold) -> List[Tuple[complex, Tuple[complex, complex], int]]:
    """
    Zeros of pi1' in the domain, each with its order.

    Raises:
        BoundaryAmbiguityError: a tangency on the domain boundary
    """
    derivative = npoly.polyder(V.pi1.coeffs)
    if derivative.size == 0 or not np.any(derivative[1:]):
        return []
    found = roots_in_disk(derivative, V.radius)
    return [(c.center, _as_point(V.point(c.center)), c.multiplicity) for c in found]


def _as_point(p: Tuple[Any, Any]) -> Tuple[complex, complex]:
    return complex(p[0]), complex(p[1])


def _compose_poly(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    result = np.array([outer[-1]], dtype=complex)
    for c in outer[-2::-1]:
        result = npoly.polyadd(npoly.polymul(result, inner), [c])
    return result


def intersect_graphs(V: HorizontalManifold, W: GraphInBidisk) -> List[Intersection]:
    """
    Intersection points of a horizontal manifold with a vertical graph,
    with multiplicities read off pi1(z) - gamma(pi2(z)).
    """
    if W.orientation is not Orientation.VERTICAL:
        raise PreconditionError("intersections are taken with vertical graphs")
    inner = V.pi2.coeffs / W.domain_radius
    difference = npoly.polysub(V.pi1.coeffs, _compose_poly(W.series.coeffs, inner))
    clusters: List[RootCluster] = roots_in_disk(difference, V.radius)
    return [Intersection(c.center, _as_point(V.point(c.center)), c.multiplicity) for c in clusters]


def tangency_count(V: HorizontalManifold, graphs: Sequence[GraphInBidisk]) -> List[int]:
    """Per graph, the sum of (multiplicity - 1) over its intersections with V."""
    return [sum(i.multiplicity - 1 for i in intersect_graphs(V, W)) for W in graphs]


def rh_check(V: HorizontalManifold, graphs: Sequence[GraphInBidisk], degree: Optional[int] = None) -> RHCheck:
    """Total tangency count against the Riemann-Hurwitz bound d - 1."""
    d = degree if degree is not None else V.degree
    per_graph = tangency_count(V, graphs)
    total = sum(per_graph)
    return RHCheck(total, d - 1, total <= d - 1, per_graph)


def split_tangency(V: HorizontalManifold, W: GraphInBidisk, offset: complex) -> List[Intersection]:
    """Intersections of V with the translate of W by `offset`."""
    return intersect_graphs(V, W.shifted(offset))


def random_rh_trial(
    rng: np.random.Generator, degree: int, max_graphs: int = 8
) -> Tuple[HorizontalManifold, List[GraphInBidisk]]:
    """
    A random degree-d horizontal manifold and a family of disjoint vertical
    graphs, the parallel lines x = v + beta y through its critical values
    (tangent there) padded with random transverse lines.
    """
    if degree < 1:
        raise ValidationError("degree must be positive")

    def small(size: int, scale: float) -> np.ndarray:
        return scale * (rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size))

    pi1 = np.zeros(degree + 1, dtype=complex)
    pi1[:degree] = small(degree, 0.05 / degree)
    pi1[degree] = 1.0
    pi2 = small(3, 0.25)
    V = HorizontalManifold.from_coeffs(pi1, pi2)
    beta = complex(small(1, 0.15)[0])

    reduced = npoly.polysub(pi1, beta * pi2)
    critical = npoly.polyroots(npoly.polyder(reduced)) if degree > 1 else np.zeros(0)
    values: List[complex] = []
    for zc in critical:
        if abs(zc) < 0.95:
            v = complex(npoly.polyval(zc, reduced))
            if all(abs(v - w) > 1e-9 for w in values):
                values.append(v)
    values = values[:max_graphs]
    extra = int(rng.integers(0, max_graphs - len(values) + 1))
    for v in small(extra, 0.5):
        if all(abs(v - w) > 1e-3 for w in values):
            values.append(complex(v))
    graphs = [GraphInBidisk.vertical([v, beta], code=f"line{k}") for k, v in enumerate(values)]
    return V, graphs
