"""
Moduli and Jacobian profiles along curves, and type changes of periodic
points over parameter grids.
"""

import logging
import math
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import (
    ConvergenceError,
    SaddleContinuationError,
    SingularMatrixError,
    TrackingLossError,
    ValidationError,
)
from ..core.models import (
    ContinuationCurve,
    ModuliProfile,
    ModuliSample,
    PeriodicReport,
    SaddleKind,
    TypeChangeEvent,
)
from ..henon.family import ParametricFamily, member_factory
from ..henon.maps import PolynomialAutomorphism, apply
from ..saddle.periodic import find_periodic, grid_census, periodic_report

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-8
MAX_BISECTIONS = 80
DISTINCT_TOL = 1e-7

Member = Callable[[Sequence[complex]], Any]


def map_jacobian(map_: Any, point: Sequence[complex]) -> complex:
    """The Jacobian determinant of one application of the map."""
    if isinstance(map_, PolynomialAutomorphism):
        return map_.jacobian_determinant
    return complex(np.linalg.det(map_.derivative(point)))


def moduli_sample(map_: Any, report: PeriodicReport, parameter: Sequence[float]) -> ModuliSample:
    """ln|u| / ln|s| and the multiplier identity at a saddle."""
    if report.saddle is None:
        raise SaddleContinuationError("periodic point is not a saddle", {"kind": report.kind.value})
    u, s = report.saddle.u, report.saddle.s
    jac = map_jacobian(map_, report.point)
    return ModuliSample(
        parameter=[float(v) for v in parameter],
        moduli=math.log(abs(u)) / math.log(abs(s)),
        jacobian=jac,
        identity_error=abs(u * s - jac**report.period),
    )


def moduli_probe(map_: Any, seed: Sequence[complex], period: int = 1) -> ModuliSample:
    """Single-point moduli value at the saddle found from the seed."""
    report = find_periodic(map_, period, seed)
    return moduli_sample(map_, report, [])


class SaddleTracker:
    """Follows one saddle periodic point through a family by seeded Newton."""

    def __init__(
        self,
        family: ParametricFamily,
        seed: Sequence[complex],
        period: int = 1,
        max_jump: float = 0.5,
        member: Optional[Member] = None,
    ):
        self.family = family
        self.period = period
        self.max_jump = max_jump
        self._member = member or member_factory(family)
        self._point = (complex(seed[0]), complex(seed[1]))

    @property
    def point(self) -> Tuple[complex, complex]:
        return self._point

    def at(self, lam: Sequence[complex]) -> Tuple[Any, PeriodicReport]:
        """
        The saddle at lambda, continued from the last position.

        Raises:
            SaddleContinuationError: Newton fails (multiplier 1), the point
                jumps, or it stops being a saddle
        """
        map_ = self._member(lam)
        try:
            report = find_periodic(map_, self.period, self._point)
        except (SingularMatrixError, ConvergenceError) as e:
            raise SaddleContinuationError(
                f"saddle lost at lambda={list(lam)}: {e.message}", {"parameter": list(lam)}
            ) from e
        jump = max(abs(report.point[0] - self._point[0]), abs(report.point[1] - self._point[1]))
        if jump > self.max_jump:
            raise SaddleContinuationError(
                "saddle continuation jumped", {"parameter": list(lam), "jump": jump}
            )
        if report.kind is not SaddleKind.SADDLE:
            raise SaddleContinuationError(
                "periodic point is no longer a saddle", {"parameter": list(lam), "kind": report.kind.value}
            )
        self._point = report.point
        return map_, report


def moduli_profile(
    curve: ContinuationCurve, tracker: SaddleTracker, parameter_dims: Optional[int] = None
) -> ModuliProfile:
    """
    ln|u_lambda| / ln|s_lambda| and jac(f_lambda) per curve sample.

    The profile is flagged non-constant when the spread exceeds ten times
    the propagated numerical error.
    """
    dims = parameter_dims or tracker.family.dim
    samples: List[ModuliSample] = []
    worst = 0.0
    for point in curve.points:
        lam = [complex(v) for v in point[:dims]]
        map_, report = tracker.at(lam)
        sample = moduli_sample(map_, report, point[:dims])
        samples.append(sample)
        saddle = report.saddle
        assert saddle is not None
        relative = sample.identity_error / abs(saddle.u * saddle.s) + report.residual + 1e-15
        worst = max(worst, relative * (1.0 + abs(sample.moduli)) / abs(math.log(abs(saddle.s))))
    values = [s.moduli for s in samples]
    spread = max(values) - min(values)
    profile = ModuliProfile(
        samples=samples, spread=spread, numerical_error=worst, non_constant=spread > 10 * worst
    )
    logger.info(f"moduli profile: {len(samples)} samples, spread {spread:.4g}, error {worst:.2e}")
    return profile


# type changes


def _initial_points(map_: Any, period: int, radius: float) -> List[Tuple[complex, complex]]:
    """Points of exact period `period` to track along a grid line."""
    if not isinstance(map_, PolynomialAutomorphism):
        # synthetic germs fix the origin for every parameter
        return [(0j, 0j)]
    points = []
    for p in grid_census(map_, period, radius):
        lower = False
        for d in range(1, period):
            if period % d == 0:
                q = apply(map_, p, "forward", d)
                if max(abs(q[0] - p[0]), abs(q[1] - p[1])) <= 1e-8 * (1.0 + abs(p[0])):
                    lower = True
        if not lower:
            points.append(p)
    return points


def _track(map_: Any, period: int, seed: Tuple[complex, complex], cell: Any) -> PeriodicReport:
    if not isinstance(map_, PolynomialAutomorphism):
        return periodic_report(map_, (0j, 0j), period)
    try:
        return find_periodic(map_, period, seed)
    except (SingularMatrixError, ConvergenceError) as e:
        raise TrackingLossError(f"periodic point lost: {e.message}", {"cell": cell, "seed": seed}) from e


def _gaps(report: PeriodicReport) -> Tuple[float, float]:
    return abs(report.multipliers[0]) - 1.0, abs(report.multipliers[1]) - 1.0


def _crossing(old: PeriodicReport, new: PeriodicReport) -> Optional[int]:
    for i, (g0, g1) in enumerate(zip(_gaps(old), _gaps(new))):
        if (g0 < 0) != (g1 < 0):
            return i
    return None


def _refine(
    member: Member,
    period: int,
    lam0: Sequence[complex],
    lam1: Sequence[complex],
    old: PeriodicReport,
    new: PeriodicReport,
    index: int,
) -> TypeChangeEvent:
    """Bisection on the segment until | |mu| - 1 | <= BISECTION_TOL."""
    a, b = np.asarray(lam0, dtype=complex), np.asarray(lam1, dtype=complex)
    lo, hi = 0.0, 1.0
    lo_report, mid_report = old, old
    g_lo = _gaps(old)[index]
    mid = lo
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        lam = a + mid * (b - a)
        mid_report = _track(member(lam), period, lo_report.point, list(lam))
        g_mid = _gaps(mid_report)[index]
        if abs(g_mid) <= BISECTION_TOL:
            break
        if (g_mid < 0) == (g_lo < 0):
            lo, lo_report, g_lo = mid, mid_report, g_mid
        else:
            hi = mid
    lam = a + mid * (b - a)
    return TypeChangeEvent(
        parameter=[float(v.real) for v in lam],
        period=period,
        kind=f"{old.kind.value}->{new.kind.value}",
        modulus_gap=abs(_gaps(mid_report)[index]),
    )


def _scan_line(
    member: Member, line: List[Tuple[complex, ...]], period: int, radius: float
) -> List[TypeChangeEvent]:
    first = member(line[0])
    reports = [_track(first, period, p, [line[0]]) for p in _initial_points(first, period, radius)]
    events: List[TypeChangeEvent] = []
    for j in range(1, len(line)):
        map_ = member(line[j])
        cell = [list(line[j - 1]), list(line[j])]
        moved = [_track(map_, period, r.point, cell) for r in reports]
        for x in range(len(moved)):
            for y in range(x):
                gap = max(abs(moved[x].point[k] - moved[y].point[k]) for k in range(2))
                if gap <= DISTINCT_TOL:
                    raise TrackingLossError("two tracked points merged", {"cell": cell})
        for old, new in zip(reports, moved):
            index = _crossing(old, new)
            if index is not None:
                events.append(_refine(member, period, line[j - 1], line[j], old, new, index))
        reports = moved
    return events


def detect_type_change(
    family: ParametricFamily,
    axes: Sequence[Sequence[float]],
    max_period: int = 1,
    radius: float = 4.0,
) -> List[TypeChangeEvent]:
    """
    Parameters where a periodic point changes type, over a real grid.

    Periodic points found at the start of each grid line are tracked along
    it; when some multiplier modulus crosses 1 between adjacent samples the
    crossing is refined by bisection. Two-parameter grids are scanned along
    both axes.

    Args:
        family: One- or two-parameter family
        axes: Real sample values per parameter
        max_period: Periods 1..max_period are tracked
        radius: Census radius for the tracked points

    Raises:
        TrackingLossError: a point is lost between adjacent cells
    """
    if len(axes) != family.dim:
        raise ValidationError(f"expected {family.dim} grid axes, got {len(axes)}")
    member = member_factory(family)
    grids = [np.asarray(a, dtype=float) for a in axes]
    lines: List[List[Tuple[complex, ...]]] = []
    if family.dim == 1:
        lines.append([(complex(v),) for v in grids[0]])
    else:
        for a in grids[0]:
            lines.append([(complex(a), complex(c)) for c in grids[1]])
        for c in grids[1]:
            lines.append([(complex(a), complex(c)) for a in grids[0]])

    events: List[TypeChangeEvent] = []
    for period in range(1, max_period + 1):
        for line in lines:
            if len(line) > 1:
                events.extend(_scan_line(member, line, period, radius))
    logger.info(f"type-change scan over {len(lines)} lines: {len(events)} events")
    return events
