"""
Error hierarchy for tangency-lab.

Every failure raised by the numerical modules derives from LabError. The
three families map onto CLI exit statuses: scenario parse errors (2),
validation errors (3) and numerical failures (4).
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all tangency-lab errors."""

    exit_code = 4

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form used in error records and reports."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


class ScenarioParseError(LabError):
    """Scenario or family file could not be parsed."""

    exit_code = 2


class ValidationError(LabError):
    """Input parsed but violates a documented precondition."""

    exit_code = 3


class UnknownSuiteError(ValidationError):
    """Requested verification suite is not registered."""


class PreconditionError(ValidationError):
    """Operation called outside its declared domain."""


class NumericalError(LabError):
    """A computation failed or could not certify its result."""

    exit_code = 4


# series-core


class DegreeUnderflowError(NumericalError):
    """Derivative of a degree-0 series."""


class DomainViolationError(NumericalError):
    """Inner series leaves the validity disk of the outer series."""


class NonInvertibleGermError(NumericalError):
    """Reversion of a germ whose linear coefficient vanishes."""


class SmallDivisorError(NumericalError):
    """A homological divisor fell below the small-divisor floor."""


# saddle-lab


class ResonanceError(NumericalError):
    """A multiplicative resonance u^a s^b = 1 obstructs the normal form."""


class ConvergenceError(NumericalError):
    """Newton or fixed-point iteration did not converge."""


class SingularMatrixError(NumericalError):
    """A Newton matrix is numerically singular."""


class SaddleContinuationError(NumericalError):
    """A saddle could not be followed (a multiplier reached modulus one)."""


# tangency-germ


class OrderExceedsTruncationError(NumericalError):
    """Order of tangency is at least the truncation degree."""


class PersistentTangencyError(NumericalError):
    """Resultant vanishes identically: the tangency persists."""


class TruncationTooSmallError(NumericalError):
    """Truncation degree cannot resolve the multiplicity."""


class CountInstabilityError(NumericalError):
    """Solution counts differ between two perturbation draws."""


class ExponentResolutionError(NumericalError):
    """A speed exponent could not be resolved at the sampled radii."""


class MonodromyAmbiguityError(NumericalError):
    """Root tracking along a parameter loop was ambiguous."""


class AlgorithmDisagreementError(NumericalError):
    """Independent algorithms returned different integer invariants."""


# bidisk-geometry


class BoundaryAmbiguityError(NumericalError):
    """A root sits on the domain boundary within tolerance."""


class InconsistentDegreeError(NumericalError):
    """Probe lines disagree on the degree of a horizontal manifold."""


class GraphEscapeError(NumericalError):
    """A transformed graph left the bidisk."""


class CollocationError(NumericalError):
    """Collocation residual of a refitted graph is above tolerance."""


class CrossingVerificationError(NumericalError):
    """The map does not cross the frame like a horseshoe."""


# bifurcation-scan


class MissingEventError(NumericalError):
    """No tangency was found in a predicted window."""


class NonMonotoneSequenceError(NumericalError):
    """|lambda_n| is not strictly decreasing."""


class CurveSingularityError(NumericalError):
    """Constraint Jacobian lost rank along a continuation curve."""


class StepFailureError(NumericalError):
    """Continuation corrector failed after the allowed step halvings."""


class TrackingLossError(NumericalError):
    """A periodic point was lost between adjacent grid cells."""


class EscapeError(NumericalError):
    """An orbit left the germ's bidisk."""
