"""
Local maps given by a pair of two-variable truncated series, and the
localization of a polynomial automorphism at a periodic point.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from ..config import config
from ..core.errors import PreconditionError, SingularMatrixError, ValidationError
from ..series.truncated import (
    TruncatedSeries1,
    TruncatedSeries2,
    compose2,
    invert_map,
    linear_part,
    substitute,
)
from .maps import Point, apply

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalMap:
    """
    A holomorphic germ (x, y) -> (f1(x, y), f2(x, y)) near the origin.

    Shares the forward/derivative interface of PolynomialAutomorphism, so
    saddle and scan operations accept either.
    """

    f1: TruncatedSeries2
    f2: TruncatedSeries2
    name: str = "germ"

    def __post_init__(self) -> None:
        if not (isinstance(self.f1, TruncatedSeries2) and isinstance(self.f2, TruncatedSeries2)):
            raise ValidationError("local map components must be two-variable series")

    @classmethod
    def linear(
        cls, matrix: Any, degree: int = 1, radii: Tuple[float, float] = (1.0, 1.0)
    ) -> "LocalMap":
        m = np.asarray(matrix, dtype=complex)
        f1 = TruncatedSeries2.from_terms({(1, 0): m[0, 0], (0, 1): m[0, 1]}, degree, radii)
        f2 = TruncatedSeries2.from_terms({(1, 0): m[1, 0], (0, 1): m[1, 1]}, degree, radii)
        return cls(f1, f2, name="linear")

    @classmethod
    def from_terms(
        cls,
        terms1: dict,
        terms2: dict,
        degree: int,
        radii: Tuple[float, float] = (1.0, 1.0),
        name: str = "germ",
    ) -> "LocalMap":
        return cls(
            TruncatedSeries2.from_terms(terms1, degree, radii),
            TruncatedSeries2.from_terms(terms2, degree, radii),
            name,
        )

    @property
    def degree(self) -> int:
        return min(self.f1.degree, self.f2.degree)

    @property
    def pair(self) -> Tuple[TruncatedSeries2, TruncatedSeries2]:
        return self.f1, self.f2

    @property
    def linear_matrix(self) -> np.ndarray:
        return linear_part(self.pair)

    @property
    def fixes_origin(self) -> bool:
        scale = max(self.f1.magnitude(), self.f2.magnitude(), 1.0)
        tol = config.get_rel_tol() * scale
        return abs(self.f1.coefficient(0, 0)) <= tol and abs(self.f2.coefficient(0, 0)) <= tol

    @property
    def is_diagonal(self) -> bool:
        m = self.linear_matrix
        scale = max(float(np.max(np.abs(m))), 1e-300)
        return abs(m[0, 1]) <= 1e-12 * scale and abs(m[1, 0]) <= 1e-12 * scale

    def forward(self, z: Any, w: Any) -> Point:
        if isinstance(z, (TruncatedSeries1, TruncatedSeries2)):
            return substitute(self.f1, z, w), substitute(self.f2, z, w)
        return self.f1.evaluate(z, w), self.f2.evaluate(z, w)

    def inverse(self, z: Any, w: Any) -> Point:
        g1, g2 = self.inverse_germ().pair
        if isinstance(z, (TruncatedSeries1, TruncatedSeries2)):
            return substitute(g1, z, w), substitute(g2, z, w)
        return _newton_inverse(self, complex(z), complex(w), g1(z, w), g2(z, w))

    def inverse_germ(self) -> "LocalMap":
        g1, g2 = invert_map(self.pair)
        return LocalMap(g1, g2, name=f"{self.name}^-1")

    def derivative(self, point: Sequence[complex]) -> np.ndarray:
        x, y = complex(point[0]), complex(point[1])
        return np.array(
            [
                [self.f1.derive(0)(x, y), self.f1.derive(1)(x, y)],
                [self.f2.derive(0)(x, y), self.f2.derive(1)(x, y)],
            ],
            dtype=complex,
        )

    def compose(self, other: "LocalMap") -> "LocalMap":
        """self o other as a germ."""
        return LocalMap(
            compose2(self.f1, other.f1, other.f2),
            compose2(self.f2, other.f1, other.f2),
            name=f"{self.name}o{other.name}",
        )

    def iterate(self, n: int) -> "LocalMap":
        result = self
        for _ in range(n - 1):
            result = self.compose(result)
        return result

    def residual_against(self, other: "LocalMap", radius: float, samples: int = 64) -> float:
        """Sampled sup of |self - other| on the torus |x| = |y| = radius."""
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        x = radius * np.exp(1j * theta)[:, None]
        y = radius * np.exp(1j * (theta[None, :] + 0.37))
        d1 = np.abs(self.f1(x, y) - other.f1(x, y))
        d2 = np.abs(self.f2(x, y) - other.f2(x, y))
        return float(max(np.max(d1), np.max(d2)))


def _newton_inverse(
    germ: LocalMap, x: complex, y: complex, x0: complex, y0: complex, steps: int = 20
) -> Point:
    target = np.array([x, y])
    guess = np.array([x0, y0], dtype=complex)
    for _ in range(steps):
        fx, fy = germ.forward(guess[0], guess[1])
        defect = np.array([fx, fy], dtype=complex) - target
        if np.max(np.abs(defect)) <= 1e-15 * (1.0 + np.max(np.abs(target))):
            break
        guess = guess - np.linalg.solve(germ.derivative(guess), defect)
    return complex(guess[0]), complex(guess[1])


def localize(
    map_: Any,
    fixed_point: Sequence[complex],
    frame: Any,
    degree: int,
    period: int = 1,
    radii: Tuple[float, float] = (1.0, 1.0),
    tol: Optional[float] = None,
) -> LocalMap:
    """
    Germ of map^period at a periodic point in the coordinates p + frame (x, y).

    Args:
        map_: PolynomialAutomorphism or LocalMap
        fixed_point: Periodic point p
        frame: 2x2 matrix whose columns are the new coordinate directions
        degree: Truncation degree D
        period: Period of p
        radii: Bidisk radii of the germ
        tol: Periodicity tolerance (relative), default 1e-8

    Raises:
        PreconditionError: p is not periodic of the declared period
        SingularMatrixError: the frame is not invertible
    """
    tol = 1e-8 if tol is None else tol
    p = np.array([complex(fixed_point[0]), complex(fixed_point[1])])
    image = np.array(apply(map_, (p[0], p[1]), "forward", period), dtype=complex)
    defect = float(np.max(np.abs(image - p)))
    if defect > tol * (1.0 + float(np.max(np.abs(p)))):
        raise PreconditionError(
            "point is not periodic of the declared period",
            {"period": period, "defect": defect},
        )
    m = np.asarray(frame, dtype=complex)
    det = np.linalg.det(m)
    if abs(det) <= 1e-12 * max(1.0, float(np.max(np.abs(m))) ** 2):
        raise SingularMatrixError("frame matrix is singular", {"det": complex(det)})
    inv = np.linalg.inv(m)

    x = TruncatedSeries2.variable(0, degree, radii)
    y = TruncatedSeries2.variable(1, degree, radii)
    z = x * m[0, 0] + y * m[0, 1] + p[0]
    w = x * m[1, 0] + y * m[1, 1] + p[1]
    z, w = apply(map_, (z, w), "forward", period)
    dz, dw = z - p[0], w - p[1]
    g1 = dz * inv[0, 0] + dw * inv[0, 1]
    g2 = dz * inv[1, 0] + dw * inv[1, 1]

    # the constant term is the periodicity defect
    g1 = _drop_constant(g1)
    g2 = _drop_constant(g2)
    logger.debug(f"localized map at {p} (period {period}, degree {degree})")
    return LocalMap(g1, g2, name="localized")


def _drop_constant(s: TruncatedSeries2) -> TruncatedSeries2:
    c = s.coeffs.copy()
    c[0, 0] = 0.0
    return TruncatedSeries2(c, s.radii, s.tail)


def conjugated_evaluation(
    map_: Any, fixed_point: Sequence[complex], frame: Any, x: Any, y: Any, period: int = 1
) -> Point:
    """frame^-1 (map^period(p + frame (x, y)) - p), evaluated directly."""
    m = np.asarray(frame, dtype=complex)
    inv = np.linalg.inv(m)
    p0, p1 = complex(fixed_point[0]), complex(fixed_point[1])
    z = p0 + m[0, 0] * x + m[0, 1] * y
    w = p1 + m[1, 0] * x + m[1, 1] * y
    z, w = apply(map_, (z, w), "forward", period)
    dz, dw = z - p0, w - p1
    return inv[0, 0] * dz + inv[0, 1] * dw, inv[1, 0] * dz + inv[1, 1] * dw
