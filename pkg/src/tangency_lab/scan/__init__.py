"""Parameter-space experiments: tangency detection, scaling fits, continuation and profiles."""

from .asymptotics import distance_to_graph, return_index, verify_local_asymptotics
from .continuation import (
    ConstraintSystem,
    CurveVerification,
    FunctionConstraint,
    MultiplierLevelConstraint,
    TangencyConstraint,
    segment_problem,
    trace_constraint_curve,
    verify_curve,
)
from .detect import (
    GermPullBack,
    ParameterWindow,
    ParametricGraph,
    ToyPullBack,
    VerticalGraphFamily,
    classify_event,
    detect_tangencies,
    detect_tangency,
    secondary_sequence,
)
from .fitting import count_per_index, fit_scaling, representatives, resonance_closure
from .moduli import (
    SaddleTracker,
    detect_type_change,
    map_jacobian,
    moduli_probe,
    moduli_profile,
    moduli_sample,
)

__all__ = [
    "ParameterWindow",
    "ParametricGraph",
    "VerticalGraphFamily",
    "ToyPullBack",
    "GermPullBack",
    "detect_tangency",
    "detect_tangencies",
    "classify_event",
    "secondary_sequence",
    "fit_scaling",
    "representatives",
    "count_per_index",
    "resonance_closure",
    "ConstraintSystem",
    "FunctionConstraint",
    "TangencyConstraint",
    "MultiplierLevelConstraint",
    "segment_problem",
    "trace_constraint_curve",
    "verify_curve",
    "CurveVerification",
    "SaddleTracker",
    "moduli_profile",
    "moduli_sample",
    "moduli_probe",
    "map_jacobian",
    "detect_type_change",
    "verify_local_asymptotics",
    "distance_to_graph",
    "return_index",
]
