"""Saddle points, resonances, invariant manifolds, normal forms and slopes."""

from .manifolds import ManifoldGerm, manifold_germ
from .normal_form import NormalFormGerm, koenigs_linearize, normal_form_star_k
from .periodic import (
    classify_multipliers,
    find_periodic,
    grid_census,
    periodic_census,
    periodic_report,
)
from .resonance import detect_resonance, margins
from .slope import (
    SlopeTrace,
    dynamical_slope_nonzero,
    section_residual,
    slope_decay_ratios,
    zero_slope_section,
)

__all__ = [
    "find_periodic",
    "periodic_report",
    "classify_multipliers",
    "grid_census",
    "periodic_census",
    "detect_resonance",
    "margins",
    "ManifoldGerm",
    "manifold_germ",
    "NormalFormGerm",
    "normal_form_star_k",
    "koenigs_linearize",
    "SlopeTrace",
    "zero_slope_section",
    "section_residual",
    "dynamical_slope_nonzero",
    "slope_decay_ratios",
]
