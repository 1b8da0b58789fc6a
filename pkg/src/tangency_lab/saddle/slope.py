"""
Projectivized dynamics along the stable axis and the zero-slope section.

At (0, y) a tangent vector (1, m) of a normal-form germ is mapped to slope

    m' = s (m + y a(y)) / (u (1 + y b(y))),   a = g2(0, .), b = g1(0, .),

over the base point s y. The section m = zeta(y) invariant under this map
marks the directions whose slope decays faster than (s/u)^n.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..core.errors import PreconditionError, ResonanceError, SmallDivisorError
from ..series.truncated import TruncatedSeries1
from .normal_form import NormalFormGerm
from .resonance import detect_resonance, margins

logger = logging.getLogger(__name__)

SMALL_DIVISOR_FLOOR = 1e-12


@dataclass(frozen=True)
class SlopeTrace:
    """Iterated slopes and their deviations from the zero-slope section."""

    base_points: List[complex]
    slopes: List[complex]
    deviations: List[complex]

    def ratios(self, burn_in: int = 0) -> List[complex]:
        d = self.deviations
        return [d[i + 1] / d[i] for i in range(burn_in, len(d) - 1) if d[i] != 0]


def _axis_series(nf: NormalFormGerm, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    def pad(c: np.ndarray) -> np.ndarray:
        return np.concatenate([c, np.zeros(max(0, degree + 1 - c.size), dtype=complex)])[: degree + 1]

    return pad(nf.g2.restrict(0, 0.0).coeffs), pad(nf.g1.restrict(0, 0.0).coeffs)


def projective_step(nf: NormalFormGerm, y: complex, m: complex) -> Tuple[complex, complex]:
    """One step of the projectivized map (y, m) -> (s y, m')."""
    a = complex(nf.g2.evaluate(0.0, y))
    b = complex(nf.g1.evaluate(0.0, y))
    new_m = nf.s * (m + y * a) / (nf.u * (1.0 + y * b))
    return nf.s * y, new_m


def zero_slope_section(
    nf: NormalFormGerm, degree: int, check_resonance: bool = True
) -> TruncatedSeries1:
    """
    Series zeta with zeta(s y) = s (zeta(y) + y a(y)) / (u (1 + y b(y))).

    Coefficients follow zeta_j (s^j - s/u) = (s/u) a_{j-1} - sum_{i<j} s^i zeta_i b_{j-1-i},
    zeta_0 = 0.

    Raises:
        ResonanceError: a resonance up to order k'(rho)
        SmallDivisorError: s^j - s/u below the floor
    """
    u, s = nf.u, nf.s
    if check_resonance:
        _, _, k_prime = margins(u, s, 1)
        found = detect_resonance(u, s, max(k_prime, 2))
        if found:
            raise ResonanceError(f"resonance {found[0]} below order k'", {"pair": found[0]})
    a, b = _axis_series(nf, degree)
    q = s / u
    zeta = np.zeros(degree + 1, dtype=complex)
    for j in range(1, degree + 1):
        divisor = s**j - q
        if abs(divisor) <= SMALL_DIVISOR_FLOOR:
            raise SmallDivisorError(f"small divisor at slope order {j}", {"order": j, "divisor": divisor})
        known = q * a[j - 1] - sum(s**i * zeta[i] * b[j - 1 - i] for i in range(j))
        zeta[j] = known / divisor
    return TruncatedSeries1(zeta, nf.g1.radii[1])


def section_residual(nf: NormalFormGerm, zeta: TruncatedSeries1, radius: float, samples: int = 64) -> float:
    """max over |y| = radius of |zeta(s y) - m'(y, zeta(y))|."""
    y = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    a = nf.g2.evaluate(np.zeros_like(y), y)
    b = nf.g1.evaluate(np.zeros_like(y), y)
    image = nf.s * (zeta.evaluate(y) + y * a) / (nf.u * (1.0 + y * b))
    return float(np.max(np.abs(zeta.evaluate(nf.s * y) - image)))


def dynamical_slope_nonzero(
    nf: NormalFormGerm,
    y: complex,
    m: complex,
    zeta: Optional[TruncatedSeries1] = None,
    tol: float = 1e-8,
) -> bool:
    """
    True iff the direction (1, m) at (0, y) is off the zero-slope section.

    Raises:
        PreconditionError: y outside the germ's radius or m not finite
    """
    if not np.isfinite(m):
        raise PreconditionError("slope must be finite")
    if abs(y) > nf.g1.radii[1]:
        raise PreconditionError("base point outside the germ's radius", {"y": complex(y)})
    zeta = zeta if zeta is not None else zero_slope_section(nf, nf.degree)
    reference = complex(zeta.evaluate(y))
    return abs(complex(m) - reference) > tol * max(1.0, abs(reference))


def slope_decay_ratios(
    nf: NormalFormGerm,
    y0: complex,
    m0: complex,
    iterations: int = 20,
    zeta: Optional[TruncatedSeries1] = None,
) -> SlopeTrace:
    """Iterate the projectivized map from (y0, m0) and track the section deviation."""
    zeta = zeta if zeta is not None else zero_slope_section(nf, nf.degree)
    y, m = complex(y0), complex(m0)
    trace = SlopeTrace([y], [m], [m - complex(zeta.evaluate(y))])
    for _ in range(iterations):
        y, m = projective_step(nf, y, m)
        trace.base_points.append(y)
        trace.slopes.append(m)
        trace.deviations.append(m - complex(zeta.evaluate(y)))
    return trace
