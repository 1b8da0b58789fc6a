"""Generalized Hénon maps, parametric families and local germs."""

from .family import (
    FamilyJet,
    ParametricFamily,
    family_eval,
    family_from_dict,
    linear_family,
    load_family,
    member_factory,
    quadratic_henon_family,
    synthetic_family,
)
from .local import LocalMap, conjugated_evaluation, localize
from .maps import (
    HenonFactor,
    PlaneMap,
    PolynomialAutomorphism,
    apply,
    derivative,
    quadratic_henon,
)

__all__ = [
    "HenonFactor",
    "PolynomialAutomorphism",
    "PlaneMap",
    "quadratic_henon",
    "apply",
    "derivative",
    "LocalMap",
    "localize",
    "conjugated_evaluation",
    "ParametricFamily",
    "FamilyJet",
    "family_eval",
    "family_from_dict",
    "load_family",
    "member_factory",
    "quadratic_henon_family",
    "synthetic_family",
    "linear_family",
]
