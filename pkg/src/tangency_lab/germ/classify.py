"""Classification of a tangency germ into a TangencyRecord."""

import logging
from typing import Optional

import numpy as np

from ..core.errors import AlgorithmDisagreementError, ValidationError
from ..core.models import TangencyRecord
from .germ import UnfoldingGerm
from .multiplicity import multiplicity_counting, multiplicity_resultant
from .speed import speed_exponents

logger = logging.getLogger(__name__)

JACOBIAN_TOL = 1e-10


def lift_jacobian(germ: UnfoldingGerm) -> np.ndarray:
    """Jacobian of (phi, d/dt phi) with respect to (lambda, t) at the origin."""
    phi = germ.phi
    return np.array(
        [
            [phi.coefficient(1, 0), phi.coefficient(0, 1)],
            [phi.coefficient(1, 1), 2 * phi.coefficient(0, 2)],
        ],
        dtype=complex,
    )


def classify_unfolding(
    germ: UnfoldingGerm, rng: Optional[np.random.Generator] = None, with_speed: bool = True
) -> TangencyRecord:
    """
    Order h, multiplicity m (cross-checked by two algorithms), speed blocks,
    and the quadratic/positive-speed verdict.

    Raises:
        AlgorithmDisagreementError: the resultant and counting multiplicities
            differ, or the h = 1 transversality check contradicts m
    """
    h = germ.h
    m_resultant = multiplicity_resultant(germ)
    counted = multiplicity_counting(germ, rng=rng)
    if m_resultant != counted.m:
        raise AlgorithmDisagreementError(
            "multiplicity algorithms disagree",
            {"resultant": m_resultant, "counting": counted.m},
        )
    m = m_resultant
    if m < h:
        raise ValidationError("multiplicity below the order of tangency", {"h": h, "m": m})

    residuals = {"resultant_order": float(m_resultant)}
    if h == 1:
        det = abs(np.linalg.det(lift_jacobian(germ)))
        residuals["lift_jacobian"] = float(det)
        nonsingular = det > JACOBIAN_TOL * germ.scale**2
        if nonsingular != (m == 1):
            raise AlgorithmDisagreementError(
                "lift transversality contradicts the multiplicity",
                {"jacobian": float(det), "m": m},
            )

    blocks = []
    if with_speed:
        report = speed_exponents(germ, m=m)
        blocks = report.blocks
        residuals["speed_fit"] = report.fit_residual
        if sum(b.size for b in blocks) != h:
            raise AlgorithmDisagreementError(
                "speed blocks do not account for the order", {"blocks": sum(b.size for b in blocks), "h": h}
            )

    record = TangencyRecord(
        h=h,
        m=m,
        blocks=blocks,
        quadratic_positive_speed=(h == 1 and m == 1),
        residuals=residuals,
    )
    logger.info(f"classified germ: h={h}, m={m}, blocks={[(b.size, b.exponent) for b in blocks]}")
    return record
