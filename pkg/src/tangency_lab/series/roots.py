"""
Polynomial root utilities with multiplicities.

Roots come from the companion matrix, are polished by Newton on the original
polynomial, clustered, and each cluster receives the multiplicity given by
the first non-vanishing Taylor coefficient at its center.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..core.errors import BoundaryAmbiguityError, ConvergenceError, ValidationError
from .truncated import _binomial_shift

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-3
MULTIPLICITY_TOL = 1e-8


@dataclass(frozen=True)
class RootCluster:
    """A root with its multiplicity."""

    center: complex
    multiplicity: int


def _trim(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0:
        raise ValidationError("the zero polynomial has no isolated roots")
    last = c.size - 1
    while last > 0 and abs(c[last]) <= 1e-14 * scale:
        last -= 1
    return c[: last + 1]


def polish(coeffs: np.ndarray, z: complex, steps: int = 4) -> complex:
    """Newton polish of an approximate root, accepting only improving steps."""
    deriv = npoly.polyder(coeffs)
    value = npoly.polyval(z, coeffs)
    for _ in range(steps):
        slope = npoly.polyval(z, deriv)
        if slope == 0:
            break
        trial = z - value / slope
        trial_value = npoly.polyval(trial, coeffs)
        if abs(trial_value) >= abs(value):
            break
        z, value = trial, trial_value
    return complex(z)


def polynomial_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """
    All roots of sum c_k z^k (coefficients lowest degree first).

    Returns:
        Array of roots, polished, in no particular order
    """
    c = _trim(coeffs)
    if c.size == 1:
        return np.zeros(0, dtype=complex)
    raw = npoly.polyroots(c)
    return np.array([polish(c, z) for z in raw], dtype=complex)


def multiplicity_at(
    coeffs: Sequence[complex], z: complex, rel_tol: float = MULTIPLICITY_TOL
) -> int:
    """Index of the first Taylor coefficient at z above rel_tol * max|c|."""
    c = _trim(coeffs)
    scale = float(np.max(np.abs(c)))
    taylor = _binomial_shift(c.size - 1, complex(z)) @ c
    for k, value in enumerate(taylor):
        if abs(value) > rel_tol * scale:
            return k
    return c.size - 1


def root_clusters(
    coeffs: Sequence[complex],
    cluster_tol: float = CLUSTER_TOL,
    rel_tol: float = MULTIPLICITY_TOL,
) -> List[RootCluster]:
    """
    Distinct roots with multiplicities.

    Raises:
        BoundaryAmbiguityError: a cluster is neither a single multiple root
            nor a set of simple roots at the declared tolerances
    """
    c = _trim(coeffs)
    roots = list(polynomial_roots(c))
    # single-linkage clustering
    groups: List[List[complex]] = []
    for z in roots:
        merged = [g for g in groups if min(abs(z - w) for w in g) < cluster_tol]
        group = [z]
        for g in merged:
            group.extend(g)
            groups.remove(g)
        groups.append(group)

    clusters: List[RootCluster] = []
    for group in groups:
        if len(group) == 1:
            clusters.append(RootCluster(complex(group[0]), 1))
            continue
        center = complex(np.mean(group))
        k = multiplicity_at(c, center, rel_tol)
        if k == len(group):
            clusters.append(RootCluster(center, k))
        elif k == 0:
            clusters.extend(RootCluster(complex(z), 1) for z in group)
        else:
            raise BoundaryAmbiguityError(
                "root cluster multiplicity is ambiguous",
                {"center": center, "size": len(group), "vanishing_order": k},
            )
    clusters.sort(key=lambda r: (round(r.center.real, 12), round(r.center.imag, 12)))
    return clusters


def roots_in_disk(
    coeffs: Sequence[complex],
    radius: float,
    center: complex = 0j,
    boundary_tol: float = 1e-8,
) -> List[RootCluster]:
    """
    Roots inside |z - center| < radius.

    Raises:
        BoundaryAmbiguityError: a root lies on the circle within boundary_tol
    """
    inside: List[RootCluster] = []
    for cluster in root_clusters(coeffs):
        distance = abs(cluster.center - center)
        if abs(distance - radius) <= boundary_tol * max(1.0, radius):
            raise BoundaryAmbiguityError(
                "root on the domain boundary",
                {"root": cluster.center, "radius": radius},
            )
        if distance < radius:
            inside.append(cluster)
    return inside


def winding_count(
    func: Callable[[np.ndarray], np.ndarray],
    radius: float,
    center: complex = 0j,
    samples: int = 2048,
) -> int:
    """
    Number of zeros (with multiplicity) of an analytic function in a disk,
    by the argument principle on the boundary circle.

    Raises:
        ConvergenceError: the function nearly vanishes on the circle or the
            sampled phase is too coarse to unwrap
    """
    theta = np.linspace(0.0, 2.0 * np.pi, samples + 1)
    return winding_number(func(center + radius * np.exp(1j * theta)))


def winding_number(values: np.ndarray) -> int:
    """
    Winding number about 0 of a closed sampled curve (first sample repeated last).

    Raises:
        ConvergenceError: the curve nearly passes through 0 or is undersampled
    """
    values = np.asarray(values, dtype=complex)
    if np.min(np.abs(values)) <= 1e-14 * max(1.0, float(np.max(np.abs(values)))):
        raise ConvergenceError("curve passes through the origin")
    steps = np.angle(values[1:] / values[:-1])
    if np.max(np.abs(steps)) > 2.5:
        raise ConvergenceError("phase increments too large for winding count", {"samples": values.size})
    return int(round(float(np.sum(steps)) / (2.0 * np.pi)))
