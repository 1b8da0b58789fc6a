"""
Horseshoe frames: crossing certificates and stable vertical graphs.

For a single Hénon factor f(x, y) = (P(x) + a y, x) on the bidisk of radius R,
the frame is horseshoe-like when, for every sampled y, the first coordinate
maps each half of the x-disk (split along the line through the center
perpendicular to the spread of the roots of P) over the whole disk with
degree one. The stable set of the horseshoe is then a Cantor family of
vertical graphs indexed by itineraries.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from ..core.errors import CrossingVerificationError, PreconditionError
from ..henon.maps import HenonFactor, PolynomialAutomorphism
from ..saddle.periodic import periodic_census
from ..series.roots import winding_number
from .graphs import GraphInBidisk
from .transform import branch_anchors, henon_pull_back

logger = logging.getLogger(__name__)

CONTOUR_SAMPLES = 512


@dataclass(frozen=True)
class BidiskFrame:
    """The bidisk |x - center| < radius, |y - center| < radius."""

    center: complex = 0j
    radius: float = 1.0

    def normalize(self, point: Tuple[complex, complex]) -> Tuple[complex, complex]:
        return (point[0] - self.center) / self.radius, (point[1] - self.center) / self.radius

    def contains(self, point: Tuple[complex, complex]) -> bool:
        return abs(point[0] - self.center) < self.radius and abs(point[1] - self.center) < self.radius


@dataclass(frozen=True)
class CrossingCertificate:
    """Evidence that each half of the frame crosses it with degree one."""

    frame: BidiskFrame
    min_boundary_modulus: float
    windings: Tuple[int, ...]
    samples: int


@dataclass(frozen=True)
class HorseshoeFamily:
    frame: BidiskFrame
    length: int
    graphs: List[GraphInBidisk]
    certificate: CrossingCertificate
    min_gap: float
    disjoint: bool
    gaps: Dict[Tuple[str, str], float] = field(default_factory=dict)

    @property
    def codes(self) -> List[str]:
        return [g.code for g in self.graphs]


def _single_factor(map_: Any) -> HenonFactor:
    if isinstance(map_, HenonFactor):
        return map_
    if isinstance(map_, PolynomialAutomorphism) and len(map_.factors) == 1:
        return map_.factors[0]
    raise PreconditionError("horseshoe frames are certified for a single Hénon factor")


def _half_contour(frame: BidiskFrame, direction: complex, side: int, samples: int) -> np.ndarray:
    """Closed boundary of the half-disk on the given side of the separator."""
    phi = np.angle(direction) + (0.0 if side > 0 else np.pi)
    arc = frame.center + frame.radius * np.exp(1j * (phi + np.linspace(-np.pi / 2, np.pi / 2, samples)))
    normal = np.exp(1j * (phi + np.pi / 2))
    tau = np.linspace(0.0, 1.0, samples)[1:]
    chord = frame.center + frame.radius * normal * (1.0 - 2.0 * tau)
    return np.concatenate([arc, chord])


def crossing_certificate(map_: Any, frame: BidiskFrame, y_samples: int = 16) -> CrossingCertificate:
    """
    Check that the first coordinate maps each half of the x-disk over the
    frame with degree one, for y on a polar grid of the frame.

    Raises:
        CrossingVerificationError: some half fails the containment or
            winding test (the map is not horseshoe-like on the frame)
    """
    factor = _single_factor(map_)
    if factor.degree != 2:
        raise PreconditionError("crossing certificates are implemented for quadratic factors")
    anchors = branch_anchors(factor)
    spread = anchors[-1] - anchors[0]
    if abs(spread) == 0:
        raise CrossingVerificationError("polynomial has a double root: no separated branches")
    direction = spread / abs(spread)

    angles = np.exp(2j * np.pi * np.arange(y_samples) / y_samples)
    ys = [frame.center] + [frame.center + r * frame.radius * a for r in (0.5, 1.0) for a in angles]
    worst = np.inf
    windings = []
    for side in (-1, 1):
        contour = _half_contour(frame, direction, side, CONTOUR_SAMPLES)
        for y in ys:
            image = factor.poly(contour) + factor.a * y - frame.center
            modulus = float(np.min(np.abs(image)))
            worst = min(worst, modulus)
            if modulus <= frame.radius:
                raise CrossingVerificationError(
                    "image of the half-disk boundary enters the frame",
                    {"side": side, "y": complex(y), "min_modulus": modulus, "radius": frame.radius},
                )
            winding = winding_number(np.append(image, image[0]))
            if winding != 1:
                raise CrossingVerificationError(
                    "half-disk does not cross the frame with degree one",
                    {"side": side, "y": complex(y), "winding": winding},
                )
        windings.append(1)
    logger.info(f"crossing certificate: min boundary modulus {worst:.4g} > radius {frame.radius}")
    return CrossingCertificate(frame, worst, tuple(windings), len(ys))


def pairwise_gaps(graphs: List[GraphInBidisk], samples: int = 256) -> Dict[Tuple[str, str], float]:
    """
    Minimum boundary distance between each pair of vertical graphs; a pair
    with a nonzero winding of the difference intersects and gets gap 0.
    """
    gaps: Dict[Tuple[str, str], float] = {}
    if not graphs:
        return gaps
    radius = graphs[0].domain_radius
    y = radius * np.exp(2j * np.pi * np.arange(samples + 1) / samples)
    values = [g.evaluate(y) for g in graphs]
    for i, j in itertools.combinations(range(len(graphs)), 2):
        difference = values[i] - values[j]
        gap = float(np.min(np.abs(difference)))
        if gap > 0 and winding_number(difference) != 0:
            gap = 0.0
        gaps[(graphs[i].code, graphs[j].code)] = gap
    return gaps


def horseshoe_stable_graphs(
    map_: Any, frame: BidiskFrame, length: int, degree: int = 32
) -> HorseshoeFamily:
    """
    One vertical graph per itinerary word of the given length.

    The graph with code s0 s1 ... s(L-1) is the pull-back of the center line
    through branches s(L-1), ..., s0, so its points visit the halves
    s0, s1, ... under forward iteration.

    Raises:
        CrossingVerificationError: the frame is not horseshoe-like
    """
    if length < 1:
        raise PreconditionError("itinerary length must be positive")
    factor = _single_factor(map_)
    certificate = crossing_certificate(factor, frame)
    base = GraphInBidisk.vertical([frame.center], domain_radius=frame.radius, bound=frame.radius)
    level = [base]
    for _ in range(length):
        level = [
            henon_pull_back(factor, graph, branch, degree)
            for branch in range(factor.degree)
            for graph in level
        ]
    level.sort(key=lambda g: g.code)
    gaps = pairwise_gaps(level)
    min_gap = min(gaps.values()) if gaps else float("inf")
    logger.info(f"horseshoe: {len(level)} stable graphs of length {length}, min gap {min_gap:.3g}")
    return HorseshoeFamily(frame, length, level, certificate, min_gap, min_gap > 0, gaps)


def horseshoe_census(map_: Any, n: int) -> List[Tuple[Tuple[int, ...], Tuple[complex, complex]]]:
    """Period-n points of a horseshoe factor by itinerary."""
    factor = _single_factor(map_)
    return periodic_census(PolynomialAutomorphism((factor,)), n)
