"""
Pseudo-arclength continuation of real constraint curves.

A constraint system is G: R^(N+1) -> R^N. Samples are corrected by Newton
on G together with the hyperplane orthogonal to the tangent through the
predictor; the tangent is the null vector of the Jacobian (SVD).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..core.errors import (
    ConvergenceError,
    CurveSingularityError,
    PreconditionError,
    StepFailureError,
    ValidationError,
)
from ..core.models import ContinuationCurve
from ..henon.family import ParametricFamily, member_factory
from ..henon.maps import apply, derivative

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-2
CORRECTOR_TOL = 1e-10
MAX_HALVINGS = 5
CORRECTOR_ITERATIONS = 25
RANK_TOL = 1e-8
FD_STEP = 1e-7


class ConstraintSystem(ABC):
    """N real equations in N + 1 real unknowns."""

    name: str = "constraint"
    unknowns: Tuple[str, ...] = ()

    @abstractmethod
    def residual(self, x: np.ndarray) -> np.ndarray:
        pass

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Central finite differences; subclasses override with exact derivatives."""
        x = np.asarray(x, dtype=float)
        columns = []
        for i in range(x.size):
            h = FD_STEP * (1.0 + abs(x[i]))
            e = np.zeros_like(x)
            e[i] = h
            columns.append((self.residual(x + e) - self.residual(x - e)) / (2 * h))
        return np.array(columns).T

    def norm(self, x: np.ndarray) -> float:
        return float(np.max(np.abs(self.residual(x))))


class FunctionConstraint(ConstraintSystem):
    """A constraint given by plain callables."""

    def __init__(
        self,
        residual: Callable[[np.ndarray], Sequence[float]],
        unknowns: Sequence[str],
        jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        name: str = "function",
    ):
        self._residual = residual
        self._jacobian = jacobian
        self.unknowns = tuple(unknowns)
        self.name = name

    def residual(self, x: np.ndarray) -> np.ndarray:
        return np.atleast_1d(np.asarray(self._residual(np.asarray(x, dtype=float)), dtype=float))

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        if self._jacobian is None:
            return super().jacobian(x)
        return np.atleast_2d(np.asarray(self._jacobian(np.asarray(x, dtype=float)), dtype=float))


def segment_problem(
    start: Sequence[float], end: Sequence[float], unknowns: Sequence[str] = ("a", "c")
) -> FunctionConstraint:
    """The straight segment from start to end in a real parameter plane."""
    p, q = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    if p.size != 2 or q.size != 2 or np.allclose(p, q):
        raise ValidationError("a segment needs two distinct points of the plane")
    direction = (q - p) / np.linalg.norm(q - p)
    normal = np.array([-direction[1], direction[0]])
    return FunctionConstraint(
        lambda x: [float(normal @ (x - p))],
        unknowns,
        lambda x: normal[None, :],
        name="segment",
    )


class TangencyConstraint(ConstraintSystem):
    """
    Persistent tangency of two graphs over a real two-parameter slice:
    D = 0 and dD/dy = 0 in the unknowns (lambda1, lambda2, y), D = F - G.
    """

    def __init__(self, unstable: sympy.Expr, stable: sympy.Expr, symbols: Sequence[sympy.Symbol]):
        if len(symbols) != 3:
            raise ValidationError("tangency constraints have unknowns (lambda1, lambda2, y)")
        self.unknowns = tuple(str(s) for s in symbols)
        self.name = "persistent-tangency"
        d = sympy.expand(unstable - stable)
        equations = [d, sympy.diff(d, symbols[2])]
        gradient = [[sympy.diff(e, s) for s in symbols] for e in equations]
        self._equations = sympy.lambdify(symbols, equations, modules="numpy")
        self._gradient = sympy.lambdify(symbols, gradient, modules="numpy")

    @classmethod
    def from_expressions(
        cls, unstable: str, stable: str, names: Sequence[str] = ("l1", "l2", "y")
    ) -> "TangencyConstraint":
        """Build from text expressions x = F(l1, l2, y) and x = G(l1, l2, y)."""
        symbols = sympy.symbols(list(names))
        local = {str(s): s for s in symbols}
        try:
            f, g = sympy.sympify(unstable, locals=local), sympy.sympify(stable, locals=local)
        except sympy.SympifyError as e:
            raise ValidationError(f"cannot parse tangency expressions: {e}") from e
        return cls(f, g, symbols)

    def residual(self, x: np.ndarray) -> np.ndarray:
        return np.real(np.array(self._equations(*x), dtype=complex))

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        rows = self._gradient(*x)
        return np.real(np.array([[complex(v) for v in row] for row in rows]))


class MultiplierLevelConstraint(ConstraintSystem):
    """
    A period-n point p with multiplier mu of modulus `level`, over a real
    two-parameter slice of a Hénon family.

    Unknowns: (lambda1, lambda2, Re z, Im z, Re w, Im w, Re mu, Im mu).
    Equations: f^n(p) = p, det(Df^n(p) - mu) = 0 and |mu|^2 = level^2.
    """

    def __init__(self, family: ParametricFamily, level: float, period: int = 1):
        if family.dim != 2 or family.is_synthetic:
            raise PreconditionError("multiplier levels are traced over two-parameter Hénon families")
        if level <= 0 or period < 1:
            raise ValidationError("level must be positive and period >= 1")
        self.family = family
        self.level = float(level)
        self.period = period
        self.unknowns = (*family.parameters, "re_z", "im_z", "re_w", "im_w", "re_mu", "im_mu")
        self.name = f"multiplier-level-{level:g}"
        self._member = member_factory(family)

    @staticmethod
    def pack(lam: Sequence[float], point: Sequence[complex], mu: complex) -> np.ndarray:
        z, w = complex(point[0]), complex(point[1])
        mu = complex(mu)
        return np.array([lam[0], lam[1], z.real, z.imag, w.real, w.imag, mu.real, mu.imag], dtype=float)

    def residual(self, x: np.ndarray) -> np.ndarray:
        map_ = self._member((x[0], x[1]))
        z, w, mu = complex(x[2], x[3]), complex(x[4], x[5]), complex(x[6], x[7])
        fz, fw = apply(map_, (z, w), "forward", self.period)
        char = np.linalg.det(derivative(map_, (z, w), self.period) - mu * np.eye(2))
        values = [fz - z, fw - w, char]
        out = [v for c in values for v in (complex(c).real, complex(c).imag)]
        out.append(abs(mu) ** 2 - self.level**2)
        return np.array(out, dtype=float)


@dataclass(frozen=True)
class CurveVerification:
    """Independent re-solve of every curve sample."""

    max_residual: float
    max_displacement: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _project(constraint: ConstraintSystem, x0: np.ndarray, tol: float) -> np.ndarray:
    """Minimal-norm Newton onto G = 0."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(CORRECTOR_ITERATIONS):
        g = constraint.residual(x)
        dx = np.linalg.pinv(constraint.jacobian(x)) @ g
        x = x - dx
        if np.max(np.abs(g)) <= tol and np.linalg.norm(dx) <= 1e-12 * (1.0 + np.linalg.norm(x)):
            break
    if constraint.norm(x) > tol:
        raise ConvergenceError("projection onto the constraint failed", {"residual": constraint.norm(x)})
    return x


def _tangent(constraint: ConstraintSystem, x: np.ndarray, orient: Optional[np.ndarray]) -> np.ndarray:
    jac = constraint.jacobian(x)
    if jac.shape[1] != jac.shape[0] + 1:
        raise ValidationError(
            "constraint must have one more unknown than equations", {"shape": list(jac.shape)}
        )
    _, sv, vt = np.linalg.svd(jac)
    if sv[-1] <= RANK_TOL * max(sv[0], 1e-300):
        raise CurveSingularityError(
            "constraint Jacobian lost rank", {"location": [float(v) for v in x], "sigma_min": float(sv[-1])}
        )
    t = vt[-1]
    if orient is not None and float(t @ orient) < 0:
        t = -t
    return t / np.linalg.norm(t)


def _correct(
    constraint: ConstraintSystem, predictor: np.ndarray, tangent: np.ndarray, tol: float
) -> np.ndarray:
    x = predictor.copy()
    for _ in range(CORRECTOR_ITERATIONS):
        g = constraint.residual(x)
        system = np.vstack([constraint.jacobian(x), tangent[None, :]])
        rhs = np.concatenate([g, [float(tangent @ (x - predictor))]])
        try:
            dx = np.linalg.solve(system, rhs)
        except np.linalg.LinAlgError as e:
            raise ConvergenceError("singular corrector system") from e
        x = x - dx
        if not np.all(np.isfinite(x)):
            raise ConvergenceError("corrector diverged")
        if constraint.norm(x) <= tol and np.linalg.norm(dx) <= 1e-12 * (1.0 + np.linalg.norm(x)):
            return x
    if constraint.norm(x) <= tol:
        return x
    raise ConvergenceError("corrector did not converge", {"residual": constraint.norm(x)})


def trace_constraint_curve(
    constraint: ConstraintSystem,
    seed: Sequence[float],
    step: float = DEFAULT_STEP,
    samples: Optional[int] = None,
    length: Optional[float] = None,
    direction: Optional[Sequence[float]] = None,
    tol: float = CORRECTOR_TOL,
    max_halvings: int = MAX_HALVINGS,
) -> ContinuationCurve:
    """
    Follow the curve G = 0 from a seed.

    Args:
        constraint: The constraint system
        seed: Starting point (projected onto the curve first)
        step: Predictor step; consecutive samples are at most this far apart
        samples: Maximal number of samples, seed included
        length: Arclength to cover
        direction: Orientation hint for the first tangent
        tol: Corrector residual tolerance
        max_halvings: Step halvings allowed before giving up

    Raises:
        PreconditionError: the seed cannot be put on the curve
        CurveSingularityError: rank drop (location reported, not stepped over)
        StepFailureError: corrector failure after all halvings
    """
    if samples is None and length is None:
        raise ValidationError("give a sample count or an arclength")
    if step <= 0:
        raise ValidationError("step must be positive")
    try:
        x = _project(constraint, np.asarray(seed, dtype=float), tol)
    except ConvergenceError as e:
        raise PreconditionError("seed does not satisfy the constraint", e.details) from e

    orient = None if direction is None else np.asarray(direction, dtype=float)
    t = _tangent(constraint, x, orient)
    points: List[np.ndarray] = [x]
    arclength = [0.0]
    residuals = [constraint.norm(x)]

    def more() -> bool:
        if samples is not None and len(points) >= samples:
            return False
        return length is None or arclength[-1] < length * (1 - 1e-12)

    while more():
        h = step if length is None else min(step, length - arclength[-1])
        for _ in range(max_halvings + 1):
            try:
                x_new = _correct(constraint, x + h * t, t, tol)
                chord = float(np.linalg.norm(x_new - x))
                for _ in range(5):
                    if chord <= step:
                        break
                    h *= 0.999 * step / chord
                    x_new = _correct(constraint, x + h * t, t, tol)
                    chord = float(np.linalg.norm(x_new - x))
                break
            except ConvergenceError:
                h /= 2.0
                logger.debug(f"corrector failed, step halved to {h:.3g}")
        else:
            raise StepFailureError(
                "continuation step failed after halvings",
                {"location": [float(v) for v in x], "halvings": max_halvings},
            )
        t = _tangent(constraint, x_new, t)
        x = x_new
        points.append(x)
        arclength.append(arclength[-1] + chord)
        residuals.append(constraint.norm(x))

    logger.info(
        f"{constraint.name}: {len(points)} samples over arclength {arclength[-1]:.4g}, "
        f"max residual {max(residuals):.2e}"
    )
    return ContinuationCurve(
        constraint=constraint.name,
        unknowns=list(constraint.unknowns),
        points=[[float(v) for v in p] for p in points],
        arclength=arclength,
        residuals=residuals,
        step=step,
        tangent=[float(v) for v in t],
    )


def verify_curve(
    constraint: ConstraintSystem, curve: ContinuationCurve, tol: float = CORRECTOR_TOL
) -> CurveVerification:
    """Re-solve every sample from scratch by minimal-norm Newton."""
    worst_residual, worst_move = 0.0, 0.0
    for point in curve.points:
        x0 = np.asarray(point, dtype=float)
        worst_residual = max(worst_residual, constraint.norm(x0))
        try:
            x = _project(constraint, x0, tol)
        except ConvergenceError:
            return CurveVerification(float("inf"), float("inf"), tol)
        worst_move = max(worst_move, float(np.linalg.norm(x - x0)))
    return CurveVerification(worst_residual, worst_move, tol)
