"""
Resonance suite: the detector against a vectorized lattice scan on random
and constructed multiplier pairs.
"""

import logging
from typing import List, Tuple

import numpy as np

from ..core.models import CriterionResult
from ..saddle import detect_resonance
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

PAIRS = 100
ORDER = 12
TOL = 1e-9


def lattice_scan(u: complex, s: complex, k: int, tol: float = TOL) -> List[Tuple[int, int]]:
    """(a, b) with a + b <= k and |exp(a log u + b log s) - 1| <= tol, all at once."""
    a, b = np.meshgrid(np.arange(1, k), np.arange(1, k), indexing="ij")
    inside = a + b <= k
    gap = np.abs(np.exp(a * np.log(complex(u)) + b * np.log(complex(s))) - 1.0)
    hits = np.argwhere(inside & (gap <= tol))
    return sorted((int(a[i, j]), int(b[i, j])) for i, j in hits)


def _random_pair(rng: np.random.Generator, resonant: bool) -> Tuple[complex, complex]:
    u = rng.uniform(1.2, 3.0) * np.exp(2j * np.pi * rng.uniform())
    if not resonant:
        s = rng.uniform(0.2, 0.9) * np.exp(2j * np.pi * rng.uniform())
        return complex(u), complex(s)
    b = int(rng.integers(1, ORDER))
    a = int(rng.integers(1, ORDER - b + 1))
    turn = int(rng.integers(0, b))
    s = np.exp((-a * np.log(u) + 2j * np.pi * turn) / b)
    return complex(u), complex(s)


def _agreement(rng: np.random.Generator) -> CriterionResult:
    disagreements = []
    resonant = 0
    for i in range(PAIRS):
        u, s = _random_pair(rng, resonant=i % 2 == 1)
        detected = detect_resonance(u, s, ORDER, TOL)
        if detected:
            resonant += 1
        if detected != lattice_scan(u, s, ORDER):
            disagreements.append(f"u={u:.6g} s={s:.6g}")
    return criterion(
        "detector agrees with the lattice scan",
        PAIRS - len(disagreements),
        PAIRS,
        not disagreements,
        f"{resonant} resonant pairs; " + "; ".join(disagreements[:5]),
    )


def _positives(rng: np.random.Generator) -> List[CriterionResult]:
    cases = {
        (2.0, 0.5): [(a, a) for a in range(1, ORDER // 2 + 1)],
        (4.0, 0.5): [(a, 2 * a) for a in range(1, ORDER // 3 + 1)],
    }
    lines = []
    for (u, s), expected in cases.items():
        found = detect_resonance(u, s, ORDER, TOL)
        lines.append(criterion(f"resonances of ({u:g}, {s:g})", found, expected, found == expected))
    return lines


class ResonanceSuite(BaseSuite):
    """Exhaustive checks of the resonance detector."""

    name = "resonance"
    description = "Detector vs lattice scan on 100 pairs, constructed positives (2, 1/2), (4, 1/2)"

    def checks(self) -> List[Check]:
        return [("lattice agreement", _agreement), ("constructed positives", _positives)]
