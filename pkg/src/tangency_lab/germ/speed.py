"""
Speed exponents of vertical-tangency branches.

For lambda near 0 the tangency points t*(lambda) are the h small roots of
d/dt phi(lambda, .), and x(lambda) = phi(lambda, t*(lambda)) is the abscissa
of the tangency. Roots are grouped into blocks by their monodromy around
lambda = 0; on each block |x| ~ |lambda|^sigma with sigma = p / h_j.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import (
    ExponentResolutionError,
    MonodromyAmbiguityError,
    PreconditionError,
)
from ..core.models import SpeedBlock
from ..series.roots import RootCluster, polynomial_roots
from ..series.truncated import TruncatedSeries2
from .germ import UnfoldingGerm
from .multiplicity import multiplicity_resultant, perturbed_solutions

logger = logging.getLogger(__name__)

DEFAULT_RAYS = 8
DEFAULT_RADII = tuple(np.geomspace(1e-2, 1e-5, 7))
MONODROMY_STEPS = 64
RAY_SUBSTEPS = 12
COLLISION_TOL = 1e-9
SNAP_TOL = 0.02
FIT_RESIDUAL_TOL = 0.1


@dataclass(frozen=True)
class SpeedReport:
    blocks: List[SpeedBlock]
    raw_exponents: List[float]
    fit_residual: float


@dataclass(frozen=True)
class SemicontinuityReport:
    """Multiplicities of the tangencies of phi - offset near the base."""

    base_m: int
    offset: complex
    nearby: List[Tuple[complex, complex, int]]

    @property
    def max_m(self) -> int:
        return max((m for _, _, m in self.nearby), default=0)

    @property
    def holds(self) -> bool:
        return self.max_m <= self.base_m


def _derivative_in_t(germ: UnfoldingGerm, lam: complex, n: int) -> np.ndarray:
    p = germ.t_polynomial(lam, n)
    return p[1:] * np.arange(1, p.size)


def near_tangencies(germ: UnfoldingGerm, lam: complex, h: int, n: int) -> List[RootCluster]:
    """
    The h roots of d/dt phi(lam, .) nearest to 0, roots closer than the
    collision tolerance merged into one cluster.

    Raises:
        MonodromyAmbiguityError: small and far roots are not separated
    """
    q = _derivative_in_t(germ, lam, n)
    # structural zeros give an exact multiple root at 0
    zeros = 0
    while zeros < q.size - 1 and q[zeros] == 0:
        zeros += 1
    roots = sorted([0j] * zeros + list(polynomial_roots(q[zeros:])), key=abs)
    if len(roots) < h:
        raise MonodromyAmbiguityError(
            "fewer tangency roots than the order", {"found": len(roots), "order": h}
        )
    small = roots[:h]
    if len(roots) > h and abs(roots[h]) <= 2.0 * abs(small[-1]):
        raise MonodromyAmbiguityError(
            "small tangency roots are not separated from the far ones",
            {"largest_small": abs(small[-1]), "smallest_far": abs(roots[h])},
        )
    clusters: List[List[complex]] = []
    for z in small:
        for group in clusters:
            if abs(z - group[0]) <= COLLISION_TOL:
                group.append(z)
                break
        else:
            clusters.append([z])
    return [RootCluster(complex(np.mean(g)), len(g)) for g in clusters]


def _match(previous: Sequence[complex], clusters: List[RootCluster]) -> List[int]:
    """Index into `clusters` of the nearest new cluster for each tracked root."""
    centers = np.array([c.center for c in clusters])
    if centers.size > 1:
        gaps = np.abs(centers[:, None] - centers[None, :]) + np.eye(centers.size)
        if np.min(gaps) <= COLLISION_TOL:
            raise MonodromyAmbiguityError("tangency roots collide", {"gap": float(np.min(gaps))})
    picks = [int(np.argmin(np.abs(centers - z))) for z in previous]
    if len(set(picks)) != len(picks):
        raise MonodromyAmbiguityError("nearest-neighbour tracking is not one-to-one")
    return picks


def monodromy_blocks(
    germ: UnfoldingGerm, radius: float, h: int, n: int, steps: int = MONODROMY_STEPS
) -> Tuple[List[List[int]], List[int], List[List[complex]]]:
    """
    Track the small tangency roots once around |lambda| = radius.

    Returns:
        (cycles of cluster labels, multiplicity per label, positions per step)
    """
    start = near_tangencies(germ, radius, h, n)
    positions = [c.center for c in start]
    multiplicities = [c.multiplicity for c in start]
    history = [list(positions)]
    for k in range(1, steps + 1):
        lam = radius * np.exp(2j * np.pi * k / steps)
        clusters = near_tangencies(germ, lam, h, n)
        picks = _match(positions, clusters)
        if [clusters[p].multiplicity for p in picks] != multiplicities:
            raise MonodromyAmbiguityError("cluster multiplicities change along the loop")
        positions = [clusters[p].center for p in picks]
        history.append(list(positions))

    start_centers = np.array([c.center for c in start])
    permutation = [int(np.argmin(np.abs(start_centers - z))) for z in positions]
    cycles: List[List[int]] = []
    seen = set()
    for label in range(len(start)):
        if label in seen:
            continue
        cycle = []
        current = label
        while current not in seen:
            seen.add(current)
            cycle.append(current)
            current = permutation[current]
        cycles.append(cycle)
    return cycles, multiplicities, history


def _fit_slope(radii: np.ndarray, values: np.ndarray) -> Tuple[float, float]:
    if np.any(values == 0):
        raise ExponentResolutionError("tangency abscissa vanishes on a sampled radius")
    x, y = np.log(radii), np.log(np.abs(values))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(np.max(np.abs(y - (slope * x + intercept))))


def _track_along_ray(
    germ: UnfoldingGerm,
    theta: float,
    start: List[complex],
    radii: np.ndarray,
    h: int,
    n: int,
    phi: TruncatedSeries2,
) -> np.ndarray:
    """phi(lambda, t*) per tracked root at each radius on the ray."""
    positions = list(start)
    values = np.zeros((len(radii), len(start)), dtype=complex)
    current = radii[0]
    for i, target in enumerate(radii):
        if target != current:
            for r in np.geomspace(current, target, RAY_SUBSTEPS)[1:]:
                clusters = near_tangencies(germ, r * np.exp(1j * theta), h, n)
                positions = [clusters[p].center for p in _match(positions, clusters)]
        current = target
        lam = target * np.exp(1j * theta)
        values[i] = phi.evaluate(np.full(len(positions), lam), np.array(positions))
    return values


def snap_exponent(sigma: float, size: int) -> Fraction:
    """
    The nearest p / size to a measured exponent.

    Raises:
        ExponentResolutionError: sigma is farther than SNAP_TOL from it
    """
    snapped = Fraction(round(sigma * size), size)
    if abs(sigma - float(snapped)) > SNAP_TOL:
        raise ExponentResolutionError(
            "speed exponent is not close to a rational p/h_j",
            {"sigma": sigma, "nearest": str(snapped), "block_size": size},
        )
    return snapped


def speed_exponents(
    germ: UnfoldingGerm,
    rays: int = DEFAULT_RAYS,
    radii: Sequence[float] = DEFAULT_RADII,
    m: Optional[int] = None,
) -> SpeedReport:
    """
    Blocks (h_j, sigma_j) of the vertical-tangency branches.

    Raises:
        MonodromyAmbiguityError: roots collide or tracking is ambiguous
        ExponentResolutionError: a fit is too rough, an exponent is farther
            than the snapping tolerance from every p/h_j, or sum h_j sigma_j != m
    """
    if MONODROMY_STEPS % rays:
        raise PreconditionError(f"ray count must divide {MONODROMY_STEPS}")
    radii_arr = np.asarray(sorted(radii, reverse=True), dtype=float)
    h = germ.h
    n = germ.weierstrass_degree()
    cycles, multiplicities, history = monodromy_blocks(germ, float(radii_arr[0]), h, n)
    label_block = {label: b for b, cycle in enumerate(cycles) for label in cycle}

    slopes: Dict[int, List[float]] = {b: [] for b in range(len(cycles))}
    worst = 0.0
    for r in range(rays):
        theta = 2 * np.pi * r / rays
        start = history[r * MONODROMY_STEPS // rays]
        values = _track_along_ray(germ, theta, start, radii_arr, h, n, germ.phi)
        for label in range(len(start)):
            slope, residual = _fit_slope(radii_arr, values[:, label])
            slopes[label_block[label]].append(slope)
            worst = max(worst, residual)
    if worst > FIT_RESIDUAL_TOL:
        raise ExponentResolutionError("speed exponent not resolved at the sampled radii", {"residual": worst})

    blocks: List[SpeedBlock] = []
    raw: List[float] = []
    for b, cycle in enumerate(cycles):
        size = sum(multiplicities[label] for label in cycle)
        sigma = float(np.mean(slopes[b]))
        blocks.append(SpeedBlock.of(size, snap_exponent(sigma, size)))
        raw.append(sigma)
    blocks.sort(key=lambda blk: (blk.sigma, blk.size))

    if m is not None:
        total = sum(blk.size * blk.sigma for blk in blocks)
        if total != m:
            raise ExponentResolutionError(
                "speed blocks do not account for the multiplicity",
                {"sum": str(total), "m": m},
            )
    logger.debug(f"speed blocks {[(b.size, b.exponent) for b in blocks]}, residual {worst:.3g}")
    return SpeedReport(blocks, raw, worst)


def secondary_exponent(
    germ: UnfoldingGerm, rays: int = DEFAULT_RAYS, radii: Sequence[float] = DEFAULT_RADII
) -> Tuple[float, float]:
    """
    Exponent of |x(lambda) - d lambda|, d = d/dlambda phi(0, 0), along the rays.

    Returns:
        (fitted exponent, worst fit residual)
    """
    d = germ.phi.coefficient(1, 0)
    if d == 0:
        raise PreconditionError("secondary exponent needs a positive-speed germ (d != 0)")
    reduced = germ.phi.coeffs.copy()
    reduced[1, 0] = 0.0
    phi = TruncatedSeries2(reduced, germ.phi.radii, germ.phi.tail)
    h, n = germ.h, germ.weierstrass_degree()
    radii_arr = np.asarray(sorted(radii, reverse=True), dtype=float)
    exponents, worst = [], 0.0
    for r in range(rays):
        lam = radii_arr * np.exp(2j * np.pi * (r + 0.5) / rays)
        sizes = []
        for point in lam:
            clusters = near_tangencies(germ, point, h, n)
            centers = np.array([c.center for c in clusters])
            sizes.append(float(np.max(np.abs(phi.evaluate(np.full(centers.size, point), centers)))))
        slope, residual = _fit_slope(radii_arr, np.array(sizes))
        exponents.append(slope)
        worst = max(worst, residual)
    return float(np.mean(exponents)), worst


def semicontinuity_probe(germ: UnfoldingGerm, offset: complex, window: float = 0.1) -> SemicontinuityReport:
    """
    Classify the tangencies of phi - offset near the base and compare their
    multiplicities with the base multiplicity.
    """
    base_m = multiplicity_resultant(germ)
    shifted = germ.phi - complex(offset)
    nearby = []
    for lam, t in perturbed_solutions(germ, (complex(offset), 0j), window):
        local = UnfoldingGerm.from_difference(shifted, lam, t)
        nearby.append((lam, t, multiplicity_resultant(local)))
    logger.info(f"semicontinuity probe: base m = {base_m}, nearby {[m for _, _, m in nearby]}")
    return SemicontinuityReport(base_m, complex(offset), nearby)
