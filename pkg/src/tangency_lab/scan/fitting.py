"""Scaling-law regression over secondary tangency sequences."""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from ..core.errors import NonMonotoneSequenceError, PreconditionError
from ..core.models import ResonanceClosure, ScanResult, TangencyEvent
from ..saddle.resonance import detect_resonance

logger = logging.getLogger(__name__)

MIN_EVENTS = 8


def representatives(events: Sequence[TangencyEvent]) -> Dict[int, TangencyEvent]:
    """One event per index n, the one of smallest |lambda|."""
    chosen: Dict[int, TangencyEvent] = {}
    for event in events:
        if event.index is None:
            raise PreconditionError("scaling fits need events carrying their index n")
        best = chosen.get(event.index)
        if best is None or event.modulus < best.modulus:
            chosen[event.index] = event
    return dict(sorted(chosen.items()))


def fit_scaling(
    events: Sequence[TangencyEvent],
    u0: Optional[complex] = None,
    sigma: Optional[float] = None,
    min_events: int = MIN_EVENTS,
) -> ScanResult:
    """
    Least-squares slope of -ln|lambda_n| against n.

    Args:
        events: Indexed events (several per n allowed)
        u0: Unstable multiplier at the base parameter
        sigma: Speed exponent; with u0 gives the target ln|u0| / sigma
        min_events: Minimal number of distinct indices

    Raises:
        PreconditionError: fewer than min_events indices
        NonMonotoneSequenceError: |lambda_n| not strictly decreasing in n
    """
    chosen = representatives(events)
    if len(chosen) < min_events:
        raise PreconditionError(
            f"scaling fit needs at least {min_events} indices, got {len(chosen)}",
            {"indices": list(chosen)},
        )
    ns = np.array(list(chosen), dtype=float)
    moduli = np.array([e.modulus for e in chosen.values()])
    for k in range(1, len(moduli)):
        if not moduli[k] < moduli[k - 1]:
            raise NonMonotoneSequenceError(
                "|lambda_n| is not strictly decreasing",
                {"n": int(ns[k]), "previous": float(moduli[k - 1]), "current": float(moduli[k])},
            )
    logs = -np.log(moduli)
    slope, intercept = np.polyfit(ns, logs, 1)
    fit_residual = float(np.sqrt(np.mean((logs - (slope * ns + intercept)) ** 2)))

    target = deviation = None
    if u0 is not None and sigma is not None:
        target = math.log(abs(complex(u0))) / float(sigma)
        deviation = abs(float(slope) - target) / abs(target)
    logger.info(
        f"scaling fit over n = {int(ns[0])}..{int(ns[-1])}: slope {slope:.6f}"
        + (f", target {target:.6f}, deviation {deviation:.2%}" if target is not None else "")
    )
    return ScanResult(
        indices=[int(n) for n in ns],
        parameters=[e.parameter[0] for e in chosen.values()],
        slope=float(slope),
        intercept=float(intercept),
        fit_residual=fit_residual,
        target=target,
        deviation=deviation,
    )


def count_per_index(events: Sequence[TangencyEvent]) -> Dict[int, int]:
    """Number of tangency parameters found for each n."""
    counts: Dict[int, int] = {}
    for event in events:
        if event.index is not None:
            counts[event.index] = counts.get(event.index, 0) + 1
    return dict(sorted(counts.items()))


def resonance_closure(
    u0: complex, s0: complex, m: int, h: int, q: int, tol: float = 1e-9
) -> ResonanceClosure:
    """
    Combine lambda_n^q ~ (s0 / u0)^n with lambda_n^m ~ u0^(-n h) into the
    relation u0^(hq - m) s0^m = 1 and check it with the resonance detector.

    Raises:
        PreconditionError: hq - m < 1, so the relation is not a resonance
    """
    a, b = h * q - m, m
    if a < 1 or b < 1:
        raise PreconditionError("scaling exponents give no positive resonance", {"a": a, "b": b})
    u0, s0 = complex(u0), complex(s0)
    error = abs(u0**a * s0**b - 1.0)
    detected = detect_resonance(u0, s0, max(a + b, 2), tol)
    confirmed = (a, b) in detected
    if not confirmed:
        logger.warning(f"inferred resonance u^{a} s^{b} = 1 not confirmed (error {error:.2e})")
    return ResonanceClosure(a=a, b=b, relation_error=error, detected=detected, confirmed=confirmed)
