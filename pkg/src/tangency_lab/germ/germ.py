"""
Unfolding germs phi(lambda, t) of a tangency at lambda = 0, t = 0.

The two-variable series stores lambda as variable 0 and the local
coordinate t as variable 1.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..config import config
from ..core.errors import OrderExceedsTruncationError, PreconditionError, ValidationError
from ..series.truncated import TruncatedSeries1, TruncatedSeries2, series_from_json

logger = logging.getLogger(__name__)


def order_of_tangency(phi0: TruncatedSeries1, scale: Optional[float] = None) -> int:
    """
    Order h of a tangency: h + 1 is the index of the first coefficient of
    phi(0, .) above the relative tolerance.

    Args:
        phi0: The germ at the base parameter, a series in t
        scale: Magnitude the tolerance is relative to (default max(1, max|c|))

    Raises:
        PreconditionError: phi0(0) or phi0'(0) does not vanish
        OrderExceedsTruncationError: no coefficient is significant ("h >= D")
    """
    scale = scale if scale is not None else max(1.0, phi0.magnitude())
    tol = config.get_rel_tol() * scale
    if abs(phi0.coefficient(0)) > tol or abs(phi0.coefficient(1)) > tol:
        raise PreconditionError(
            "no tangency at the base point",
            {"value": phi0.coefficient(0), "slope": phi0.coefficient(1)},
        )
    for k in range(2, phi0.degree + 1):
        if abs(phi0.coeffs[k]) > tol:
            return k - 1
    raise OrderExceedsTruncationError(
        f"order of tangency is at least {phi0.degree}", {"order_at_least": phi0.degree}
    )


@dataclass(frozen=True)
class UnfoldingGerm:
    """
    phi(lambda, t) with a tangency at the origin.

    Invariants: phi(0, 0) = 0 and d/dt phi(0, 0) = 0 within tolerance, and
    phi(0, .) not identically zero through the truncation degree.
    """

    phi: TruncatedSeries2
    base_parameter: complex = 0j
    base_point: complex = 0j

    def __post_init__(self) -> None:
        if not isinstance(self.phi, TruncatedSeries2):
            raise ValidationError("an unfolding germ is a two-variable series")
        order_of_tangency(self.phi.restrict(0, 0.0), self.scale)

    @property
    def scale(self) -> float:
        return max(1.0, self.phi.magnitude())

    @property
    def degree(self) -> int:
        return self.phi.degree

    @property
    def h(self) -> int:
        return order_of_tangency(self.phi.restrict(0, 0.0), self.scale)

    @classmethod
    def from_terms(
        cls, terms: Dict[Tuple[int, int], complex], degree: int, radii: Tuple[float, float] = (1.0, 1.0)
    ) -> "UnfoldingGerm":
        """Germ from {(lambda power, t power): coefficient}."""
        return cls(TruncatedSeries2.from_terms(terms, degree, radii))

    @classmethod
    def from_difference(
        cls, difference: TruncatedSeries2, base_parameter: complex, base_point: complex
    ) -> "UnfoldingGerm":
        """
        Recenter a lambda-dependent difference function at a detected
        tangency; the constant and t-linear terms, zero up to tolerance,
        are snapped to exactly zero.
        """
        shifted = difference.recenter(base_parameter, base_point)
        c = shifted.coeffs.copy()
        tol = config.get_rel_tol() * max(1.0, shifted.magnitude()) * 1e3
        if abs(c[0, 0]) > tol or abs(c[0, 1]) > tol:
            raise PreconditionError(
                "difference has no tangency at the given base",
                {"value": complex(c[0, 0]), "slope": complex(c[0, 1])},
            )
        c[0, 0] = 0.0
        c[0, 1] = 0.0
        germ = TruncatedSeries2(c, shifted.radii, shifted.tail)
        return cls(germ, complex(base_parameter), complex(base_point))

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "UnfoldingGerm":
        series = series_from_json(payload)
        if not isinstance(series, TruncatedSeries2):
            raise ValidationError("germ payload must be a two-variable series")
        return cls(series)

    def t_polynomial(self, lam: complex, t_degree: int) -> np.ndarray:
        """Coefficients in t of phi(lam, .) up to t_degree."""
        return self.phi.restrict(0, lam).coeffs[: t_degree + 1]

    def weierstrass_degree(self) -> int:
        """
        t-degree kept by the Weierstrass-style truncation: h + 2, or h + 1
        when the t^(h+2) coefficient of phi(0, .) vanishes.
        """
        h = self.h
        phi0 = self.phi.restrict(0, 0.0)
        tol = config.get_rel_tol() * self.scale
        if h + 2 <= phi0.degree and abs(phi0.coeffs[h + 2]) > tol:
            return h + 2
        return h + 1

    def to_json(self) -> Dict[str, Any]:
        return {
            "base_parameter": [self.base_parameter.real, self.base_parameter.imag],
            "base_point": [self.base_point.real, self.base_point.imag],
            "phi": self.phi.to_json(),
        }


def random_monomial_germ(
    rng: np.random.Generator, h: int, k: int, degree: int = 10, extras: int = 3
) -> Tuple[UnfoldingGerm, int]:
    """
    A germ unit * (t^(h+1) + a lambda^k + higher weighted terms) with
    multiplicity h * k.

    Extra monomials lambda^p t^q have weighted degree p/k + q/(h+1) > 1, so
    the multiplicity of the quasi-homogeneous part is unchanged.
    """
    if h < 1 or k < 1:
        raise ValidationError("h and k must be positive")

    def draw() -> complex:
        return complex(rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()))

    terms: Dict[Tuple[int, int], complex] = {(0, h + 1): 1.0, (k, 0): draw()}
    for _ in range(extras):
        p, q = int(rng.integers(0, k + 2)), int(rng.integers(0, h + 3))
        if p * (h + 1) + q * k > k * (h + 1) and (p, q) not in terms and p + q < degree:
            terms[(p, q)] = 0.3 * draw()
    core = TruncatedSeries2.from_terms(terms, degree)
    unit = TruncatedSeries2.from_terms({(0, 0): 1.0, (1, 0): 0.2 * draw(), (0, 1): 0.2 * draw()}, degree)
    phi = core * unit
    return UnfoldingGerm(phi), h * k
