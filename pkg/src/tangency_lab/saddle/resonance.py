"""
Multiplicative resonances u^a s^b = 1 and the non-resonance margins.
"""

import logging
import math
from typing import List, Tuple

from ..core.errors import PreconditionError

logger = logging.getLogger(__name__)

RESONANCE_TOL = 1e-9
CONDITIONING_BAND = 1e-4


def detect_resonance(
    u: complex, s: complex, k: int, tol: float = RESONANCE_TOL
) -> List[Tuple[int, int]]:
    """
    All (a, b) with a, b >= 1, a + b <= k and |u^a s^b - 1| <= tol.

    Near-resonances inside (tol, 1e-4] are logged as conditioning warnings.

    Args:
        u: Unstable multiplier, |u| > 1
        s: Stable multiplier, |s| < 1
        k: Maximal order a + b, at least 2
        tol: Absolute resonance tolerance

    Returns:
        Lexicographically sorted list of resonant pairs
    """
    u, s = complex(u), complex(s)
    if not (abs(s) < 1.0 < abs(u)):
        raise PreconditionError("resonance scan needs |s| < 1 < |u|", {"u": u, "s": s})
    if k < 2:
        raise PreconditionError(f"resonance order must be >= 2, got {k}")

    found: List[Tuple[int, int]] = []
    for a in range(1, k):
        ua = u**a
        for b in range(1, k - a + 1):
            gap = abs(ua * s**b - 1.0)
            if gap <= tol:
                found.append((a, b))
            elif gap <= CONDITIONING_BAND:
                logger.warning(
                    f"Near-resonance u^{a} s^{b}: |u^a s^b - 1| = {gap:.2e}; "
                    f"homological divisors are poorly conditioned"
                )
    return found


def margins(u: complex, s: complex, ell: int) -> Tuple[float, int, int]:
    """
    Margin rho with 1 + rho <= |u| <= 1 + 1/rho and 1 + rho <= 1/|s| <= 1 + 1/rho,
    together with the regularity order r(ell, rho) and the slope order k'(rho).

    Returns:
        (rho, r, k_prime), r and k_prime rounded up to integers
    """
    mu, ms = abs(complex(u)), abs(complex(s))
    if mu <= 1.0 or ms >= 1.0 or ms == 0.0:
        raise PreconditionError(
            "margins need |s| < 1 < |u| (degenerate multiplier)", {"u": complex(u), "s": complex(s)}
        )
    eu, es = mu - 1.0, 1.0 / ms - 1.0
    rho = min(eu, es, 1.0 / eu, 1.0 / es)
    ratio = math.log(1.0 + 1.0 / rho) / math.log(1.0 + rho)
    r = math.ceil(2.0 + (1.0 + ratio) * ell - 1e-9)
    k_prime = math.ceil(2.0 + ratio - 1e-9)
    return rho, r, k_prime
