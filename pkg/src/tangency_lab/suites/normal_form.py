"""Normal-form suite: flatness, conjugacy, zero-slope section and slope decay."""

from typing import List

import numpy as np

from ..core.models import CriterionResult
from ..henon import LocalMap
from ..saddle import normal_form_star_k, section_residual, slope_decay_ratios, zero_slope_section
from .base_suite import BaseSuite, Check, criterion, within

FLATNESS_TOL = 1e-10
RESIDUAL_TOL = 1e-8
RATIO_TOL = 0.03
DEGREE = 10
ORDER = 3
SECTION_RADIUS = 0.5


def _saddle_germ() -> LocalMap:
    return LocalMap.from_terms(
        {(1, 0): 2.0, (2, 0): 0.1, (1, 1): 0.05, (0, 2): 0.1},
        {(0, 1): 1.0 / 3.0, (2, 0): 0.1, (0, 2): 0.05},
        DEGREE,
    )


def _normal_form(rng: np.random.Generator) -> List[CriterionResult]:
    local = _saddle_germ()
    nf = normal_form_star_k(local, ORDER)
    flatness = nf.flatness()
    residual = nf.residual(local)
    zeta = zero_slope_section(nf, nf.degree)
    invariance = section_residual(nf, zeta, SECTION_RADIUS)
    trace = slope_decay_ratios(nf, 0.5, complex(zeta.evaluate(0.5)) + 1.0, iterations=30, zeta=zeta)
    ratio = trace.ratios()[-1]
    return [
        criterion(f"coefficients below degree {ORDER}", flatness, FLATNESS_TOL, flatness < FLATNESS_TOL),
        criterion("conjugacy residual", residual, RESIDUAL_TOL, residual <= RESIDUAL_TOL),
        criterion("zero-slope section invariance", invariance, RESIDUAL_TOL, invariance <= RESIDUAL_TOL),
        within("slope deviation ratio vs |s/u|", abs(ratio), abs(nf.s / nf.u), RATIO_TOL),
    ]


class NormalFormSuite(BaseSuite):
    """Checks of the (u x (1 + y g1), s y (1 + x g2)) normal form of a saddle germ."""

    name = "normal-form"
    description = "Normal form invariants, zero-slope section and slope decay ratio"

    def checks(self) -> List[Check]:
        return [("normal form", _normal_form)]
