"""
Core data models for tangency-lab.

This module defines the Pydantic models used for the records the laboratory
produces: saddle data, tangency classifications, scan results, continuation
curves, suite reports and run manifests. Numeric heavy objects (series, maps,
graphs) are frozen dataclasses living next to their algorithms.
"""

from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer


def _to_complex(value: Any) -> Any:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return value


Complex = Annotated[
    complex,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list, when_used="json"),
]


class SaddleKind(str, Enum):
    """Type of a periodic point by multiplier moduli."""
    SADDLE = "saddle"
    SINK = "sink"
    SOURCE = "source"
    INDETERMINATE = "indeterminate"


class BranchKind(str, Enum):
    """Invariant manifold branch."""
    STABLE = "stable"
    UNSTABLE = "unstable"


class Orientation(str, Enum):
    """Orientation of a graph in the bidisk."""
    HORIZONTAL = "horizontal"  # y = g(x)
    VERTICAL = "vertical"      # x = gamma(y)


class SpeedBlock(BaseModel):
    """A monodromy block of vertical-tangency branches with its speed exponent."""
    model_config = ConfigDict(frozen=True)

    size: int = Field(..., ge=1, description="Block size h_j (number of branches)")
    exponent: str = Field(..., description="Speed exponent sigma_j as a reduced fraction 'p/q'")

    @property
    def sigma(self) -> Fraction:
        return Fraction(self.exponent)

    @classmethod
    def of(cls, size: int, sigma: Fraction) -> "SpeedBlock":
        return cls(size=size, exponent=f"{sigma.numerator}/{sigma.denominator}")


class TangencyRecord(BaseModel):
    """Classification of a tangency germ."""
    model_config = ConfigDict(frozen=True)

    h: int = Field(..., ge=1, description="Order of tangency (order of contact minus one)")
    m: int = Field(..., ge=1, description="Intersection multiplicity of C and C-dot")
    blocks: List[SpeedBlock] = Field(default_factory=list, description="Speed-exponent blocks")
    quadratic_positive_speed: bool = Field(..., description="True iff h = 1 and m = 1")
    residuals: Dict[str, float] = Field(
        default_factory=dict,
        description="Diagnostic residuals of the classification steps"
    )

    def to_output(self) -> Dict[str, Any]:
        """Compact JSON form: h, m, blocks as [h_j, 'p/q'] and the verdict."""
        return {
            "h": self.h,
            "m": self.m,
            "blocks": [[b.size, b.exponent] for b in self.blocks],
            "quadratic_positive_speed": self.quadratic_positive_speed,
        }


class SaddleData(BaseModel):
    """A saddle periodic point with multipliers, eigenvectors and margin."""
    model_config = ConfigDict(frozen=True)

    point: Tuple[Complex, Complex] = Field(..., description="Periodic point p")
    period: int = Field(..., ge=1, description="Period n")
    u: Complex = Field(..., description="Unstable multiplier, |u| > 1")
    s: Complex = Field(..., description="Stable multiplier, |s| < 1")
    e_u: Tuple[Complex, Complex] = Field(..., description="Unit unstable eigenvector")
    e_s: Tuple[Complex, Complex] = Field(..., description="Unit stable eigenvector")
    residual: float = Field(..., ge=0, description="Norm of f^n(p) - p")
    rho: float = Field(..., gt=0, description="Non-resonance margin rho")


class PeriodicReport(BaseModel):
    """Outcome of a periodic-point search, whatever its type."""
    model_config = ConfigDict(frozen=True)

    kind: SaddleKind = Field(..., description="Classification by multiplier moduli")
    point: Tuple[Complex, Complex] = Field(..., description="Periodic point")
    period: int = Field(..., ge=1, description="Period")
    multipliers: Tuple[Complex, Complex] = Field(
        ..., description="Eigenvalues of Df^n, larger modulus first"
    )
    residual: float = Field(..., ge=0, description="Norm of f^n(p) - p")
    iterations: int = Field(0, description="Newton iterations used")
    saddle: Optional[SaddleData] = Field(None, description="Saddle data when kind is saddle")


class TangencyEvent(BaseModel):
    """A tangency found in a parameter family."""
    model_config = ConfigDict(frozen=True)

    parameter: List[Complex] = Field(..., description="Tangency parameter lambda*")
    point: Tuple[Complex, Complex] = Field(..., description="Tangency point (y*, x*)")
    objects: Dict[str, str] = Field(
        default_factory=dict,
        description="Participating objects (unstable branch id, stable graph id)"
    )
    index: Optional[int] = Field(None, description="Pull-back index n for secondary tangencies")
    record: Optional[TangencyRecord] = Field(None, description="Classified germ")
    classification_error: Optional[str] = Field(
        None, description="Why the germ could not be classified, when it could not"
    )
    residual: float = Field(..., ge=0, description="Newton residual at the event")

    @property
    def modulus(self) -> float:
        return abs(self.parameter[0])


class ScanResult(BaseModel):
    """Scaling-law fit over a sequence of tangency parameters."""
    model_config = ConfigDict(frozen=True)

    indices: List[int] = Field(..., description="Index sequence n")
    parameters: List[Complex] = Field(..., description="Parameters lambda_n")
    slope: float = Field(..., description="Least-squares slope of -ln|lambda_n| versus n")
    intercept: float = Field(..., description="Fit intercept")
    fit_residual: float = Field(..., ge=0, description="RMS residual of the fit")
    target: Optional[float] = Field(None, description="Comparison value ln|u0|/sigma")
    deviation: Optional[float] = Field(None, description="Relative deviation from the target")


class ContinuationCurve(BaseModel):
    """Samples of a pseudo-arclength continuation in real unknowns."""
    model_config = ConfigDict(frozen=True)

    constraint: str = Field(..., description="Name of the constraint system")
    unknowns: List[str] = Field(..., description="Names of the real unknowns")
    points: List[List[float]] = Field(..., description="Corrected samples")
    arclength: List[float] = Field(..., description="Cumulative arclength per sample")
    residuals: List[float] = Field(..., description="Constraint residual per sample")
    step: float = Field(..., gt=0, description="Declared predictor step")
    tangent: List[float] = Field(default_factory=list, description="Last tangent, for restarts")


class ModuliSample(BaseModel):
    """Moduli value and Jacobian at one curve sample."""
    model_config = ConfigDict(frozen=True)

    parameter: List[float] = Field(..., description="Curve sample (parameter part)")
    moduli: float = Field(..., description="ln|u| / ln|s|")
    jacobian: Complex = Field(..., description="Constant Jacobian of the map")
    identity_error: float = Field(..., ge=0, description="|u s - jac^n|")


class ModuliProfile(BaseModel):
    """Moduli profile along a curve."""
    model_config = ConfigDict(frozen=True)

    samples: List[ModuliSample] = Field(..., description="Per-sample values")
    spread: float = Field(..., ge=0, description="max - min of the moduli values")
    numerical_error: float = Field(..., ge=0, description="Propagated numerical error estimate")
    non_constant: bool = Field(..., description="spread exceeds 10x the numerical error")


class TypeChangeEvent(BaseModel):
    """A periodic point changing type between grid samples."""
    model_config = ConfigDict(frozen=True)

    parameter: List[float] = Field(..., description="Refined crossing parameter")
    period: int = Field(..., ge=1, description="Period of the tracked point")
    kind: str = Field(..., description="Transition, e.g. 'sink->saddle'")
    modulus_gap: float = Field(..., ge=0, description="| |mu| - 1 | at the refined parameter")


class AsymptoticsReport(BaseModel):
    """Distance decay and return-index bound along pulled-back stable graphs."""
    model_config = ConfigDict(frozen=True)

    indices: List[int] = Field(..., description="n values")
    distances: List[float] = Field(..., description="d(r_n, Delta^u)")
    distance_slope: float = Field(..., description="Fitted slope of -ln d versus n")
    slope_target: float = Field(..., description="ln|u|")
    slope_deviation: float = Field(..., description="Relative deviation of the slope")
    return_indices: List[int] = Field(..., description="Return index m_n")
    ratio: float = Field(..., description="|ln|u| / ln|s||")
    bound: float = Field(..., ge=0, description="max |m_n - ratio n|")


class ResonanceClosure(BaseModel):
    """Integer relation inferred from two scaling laws, checked against the detector."""
    model_config = ConfigDict(frozen=True)

    a: int = Field(..., description="Exponent of u0")
    b: int = Field(..., description="Exponent of s0")
    relation_error: float = Field(..., ge=0, description="|u0^a s0^b - 1|")
    detected: List[Tuple[int, int]] = Field(default_factory=list, description="detect_resonance output")
    confirmed: bool = Field(..., description="(a, b) is among the detected resonances")


class CriterionResult(BaseModel):
    """One line of a verification report."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Criterion name")
    measured: Any = Field(..., description="Measured value")
    tolerance: Any = Field(None, description="Declared tolerance or target")
    passed: bool = Field(..., description="Verdict")
    detail: str = Field(default="", description="Additional notes or error message")


class SuiteReport(BaseModel):
    """Complete report of one verification suite."""
    model_config = ConfigDict(frozen=True)

    suite: str = Field(..., description="Suite name")
    criteria: List[CriterionResult] = Field(default_factory=list, description="Criterion lines")
    duration: float = Field(0.0, ge=0, description="Wall time in seconds")
    seed: int = Field(..., description="Seed of the suite generator")

    @property
    def passed(self) -> bool:
        return bool(self.criteria) and all(c.passed for c in self.criteria)


class Scenario(BaseModel):
    """A batch scenario read from a TOML file."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    command: str = Field(..., description="Operation name, e.g. 'germ-suite' or 'scan scaling'")
    family: Optional[Path] = Field(None, description="Family file reference")
    params: Dict[str, Any] = Field(default_factory=dict, description="Operation parameters")
    output_dir: Path = Field(..., description="Output directory")
    seed: int = Field(..., description="Random seed, recorded in outputs")
    tol: float = Field(..., gt=0, description="Relative tolerance")


class ManifestEntry(BaseModel):
    """A produced artifact with its content digest."""
    model_config = ConfigDict(frozen=True)

    path: str = Field(..., description="Path relative to the output directory")
    sha256: str = Field(..., description="Content digest of the body")
    size: int = Field(..., ge=0, description="Size in bytes")


class Manifest(BaseModel):
    """Index of every artifact written by a run."""
    model_config = ConfigDict(frozen=True)

    command: str = Field(..., description="Scenario command")
    seed: int = Field(..., description="Seed used")
    settings: Dict[str, Any] = Field(default_factory=dict, description="Effective configuration")
    entries: List[ManifestEntry] = Field(default_factory=list, description="Produced files")
    warnings: List[str] = Field(default_factory=list, description="Warnings collected during the run")
    errors: List[Dict[str, Any]] = Field(default_factory=list, description="Per-item error records")
