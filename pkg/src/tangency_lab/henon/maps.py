"""
Generalized Hénon maps h_{P,a}(z, w) = (a w + P(z), z) and their compositions.

Evaluation is written with plain arithmetic so the same code runs on complex
scalars, numpy arrays and truncated series.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, List, Protocol, Sequence, Tuple

import numpy as np

from ..core.errors import PreconditionError, ValidationError

logger = logging.getLogger(__name__)

Point = Tuple[Any, Any]


def horner(coeffs: Sequence[complex], z: Any) -> Any:
    """Evaluate sum c_k z^k for scalars, arrays or series."""
    result: Any = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * z + c
    return result


class PlaneMap(Protocol):
    """Anything the saddle and scan modules can iterate."""

    def forward(self, z: Any, w: Any) -> Point: ...

    def derivative(self, point: Sequence[complex]) -> np.ndarray: ...


@dataclass(frozen=True)
class HenonFactor:
    """
    A single factor h_{P,a}.

    `coeffs` holds P lowest degree first. a = 0 is accepted for evaluation on
    the zero-Jacobian locus; such factors are not invertible.
    """

    coeffs: np.ndarray
    a: complex

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        while c.size > 1 and c[-1] == 0:
            c = c[:-1]
        if c.size < 3:
            raise ValidationError(f"Hénon polynomial must have degree >= 2, got {c.size - 1}")
        if not np.all(np.isfinite(c)) or not np.isfinite(complex(self.a)):
            raise ValidationError("Hénon factor coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "a", complex(self.a))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_invertible(self) -> bool:
        return self.a != 0

    def poly(self, z: Any) -> Any:
        return horner(list(self.coeffs), z)

    def poly_derivative(self, z: Any) -> Any:
        d = [k * self.coeffs[k] for k in range(1, self.coeffs.size)]
        return horner(d, z)

    def forward(self, z: Any, w: Any) -> Point:
        return w * self.a + self.poly(z), z

    def inverse(self, z: Any, w: Any) -> Point:
        if not self.is_invertible:
            raise PreconditionError("factor with zero Jacobian coefficient is not invertible")
        return w, (z - self.poly(w)) * (1.0 / self.a)

    def jacobian(self, z: complex) -> np.ndarray:
        return np.array([[self.poly_derivative(z), self.a], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class PolynomialAutomorphism:
    """
    Composition h_1 o h_2 o ... o h_k; the rightmost factor acts first.
    """

    factors: Tuple[HenonFactor, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise ValidationError("a polynomial automorphism needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def dynamical_degree(self) -> int:
        return int(np.prod([f.degree for f in self.factors]))

    @property
    def jacobian_determinant(self) -> complex:
        """The constant Jacobian prod(-a_i)."""
        return complex(np.prod([-f.a for f in self.factors]))

    @property
    def is_invertible(self) -> bool:
        return all(f.is_invertible for f in self.factors)

    def forward(self, z: Any, w: Any) -> Point:
        for factor in reversed(self.factors):
            z, w = factor.forward(z, w)
        return z, w

    def inverse(self, z: Any, w: Any) -> Point:
        for factor in self.factors:
            z, w = factor.inverse(z, w)
        return z, w

    def derivative(self, point: Sequence[complex]) -> np.ndarray:
        z, w = complex(point[0]), complex(point[1])
        matrix = np.eye(2, dtype=complex)
        for factor in reversed(self.factors):
            matrix = factor.jacobian(z) @ matrix
            z, w = factor.forward(z, w)
        return matrix

    def compose(self, other: "PolynomialAutomorphism") -> "PolynomialAutomorphism":
        """self o other."""
        return PolynomialAutomorphism(self.factors + other.factors)

    def iterate(self, n: int) -> "PolynomialAutomorphism":
        if n < 1:
            raise ValidationError("iterate needs n >= 1")
        return PolynomialAutomorphism(self.factors * n)


def quadratic_henon(a: complex, c: complex) -> PolynomialAutomorphism:
    """f_{a,c}(z, w) = (z^2 + c + a w, z)."""
    return PolynomialAutomorphism((HenonFactor(np.array([c, 0.0, 1.0]), a),))


def apply(map_: Any, point: Sequence[Any], direction: str = "forward", n: int = 1) -> Point:
    """
    Apply a map (or its inverse) n times to a point.

    Args:
        map_: PolynomialAutomorphism or LocalMap
        point: (z, w) as scalars, arrays or series
        direction: "forward" or "inverse"
        n: Number of applications
    """
    if direction not in ("forward", "inverse"):
        raise ValidationError(f"unknown direction: {direction}")
    z, w = point
    step = map_.forward if direction == "forward" else map_.inverse
    for _ in range(n):
        z, w = step(z, w)
    return z, w


def derivative(map_: Any, point: Sequence[complex], n: int = 1) -> np.ndarray:
    """Derivative of map^n at a point by the chain rule."""
    z, w = complex(point[0]), complex(point[1])
    matrix = np.eye(2, dtype=complex)
    for _ in range(n):
        matrix = map_.derivative((z, w)) @ matrix
        z, w = map_.forward(z, w)
    return matrix


def random_points(rng: np.random.Generator, count: int, radius: float = 1.0) -> List[Tuple[complex, complex]]:
    """Uniform random points of the bidisk of the given radius."""
    r = radius * np.sqrt(rng.random((count, 2)))
    theta = 2.0 * np.pi * rng.random((count, 2))
    pts = r * np.exp(1j * theta)
    return [(complex(p[0]), complex(p[1])) for p in pts]


def max_roundtrip_error(map_: PolynomialAutomorphism, points: Iterable[Tuple[complex, complex]]) -> float:
    """max |inverse(forward(p)) - p| over the given points."""
    worst = 0.0
    for z, w in points:
        fz, fw = map_.forward(z, w)
        bz, bw = map_.inverse(fz, fw)
        worst = max(worst, abs(bz - z), abs(bw - w))
    logger.debug(f"round-trip error {worst:.3e}")
    return worst
