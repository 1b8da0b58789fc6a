"""Tangency germs: order, multiplicity, speed exponents and classification."""

from .classify import classify_unfolding, lift_jacobian
from .germ import UnfoldingGerm, order_of_tangency, random_monomial_germ
from .multiplicity import (
    MultiplicityCount,
    multiplicity_counting,
    multiplicity_resultant,
    perturbed_solutions,
    resultant_coefficients,
    sylvester_matrix,
)
from .speed import (
    SemicontinuityReport,
    SpeedReport,
    monodromy_blocks,
    near_tangencies,
    secondary_exponent,
    semicontinuity_probe,
    snap_exponent,
    speed_exponents,
)

__all__ = [
    "UnfoldingGerm",
    "order_of_tangency",
    "random_monomial_germ",
    "multiplicity_resultant",
    "multiplicity_counting",
    "MultiplicityCount",
    "perturbed_solutions",
    "resultant_coefficients",
    "sylvester_matrix",
    "speed_exponents",
    "snap_exponent",
    "SpeedReport",
    "monodromy_blocks",
    "near_tangencies",
    "secondary_exponent",
    "semicontinuity_probe",
    "SemicontinuityReport",
    "classify_unfolding",
    "lift_jacobian",
]
