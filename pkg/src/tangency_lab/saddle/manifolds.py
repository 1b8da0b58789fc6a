"""
Invariant-manifold germs W with f^n(W(t)) = W(mu t), solved order by order.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.errors import SmallDivisorError
from ..core.models import BranchKind, SaddleData
from ..henon.maps import apply, derivative
from ..series.truncated import TruncatedSeries1

logger = logging.getLogger(__name__)

SMALL_DIVISOR_FLOOR = 1e-12


@dataclass(frozen=True)
class ManifoldGerm:
    """Parameterization t -> W(t) of a local stable or unstable manifold."""

    saddle: SaddleData
    kind: BranchKind
    components: Tuple[TruncatedSeries1, TruncatedSeries1]
    multiplier: complex
    radius: float

    @property
    def degree(self) -> int:
        return self.components[0].degree

    def evaluate(self, t: Any) -> Tuple[Any, Any]:
        return self.components[0].evaluate(t), self.components[1].evaluate(t)

    def residual(self, map_: Any, radius: Optional[float] = None, samples: int = 64) -> float:
        """max over |t| = radius of |f^n(W(t)) - W(mu t)|."""
        r = self.radius if radius is None else radius
        t = r * np.exp(2j * np.pi * np.arange(samples) / samples)
        z, w = apply(map_, self.evaluate(t), "forward", self.saddle.period)
        lz, lw = self.evaluate(self.multiplier * t)
        return float(max(np.max(np.abs(z - lz)), np.max(np.abs(w - lw))))

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "radius": self.radius,
            "components": [c.to_json() for c in self.components],
        }


def manifold_germ(
    map_: Any,
    saddle: SaddleData,
    kind: BranchKind,
    degree: int,
    radius: float = 0.1,
) -> ManifoldGerm:
    """
    Solve (Df^n(p) - mu^j I) W_j = -E_j for j = 2..D.

    E_j is the degree-j coefficient of f^n(W(t)) - W(mu t) computed with the
    current W (whose degree-j coefficient is still zero).

    Raises:
        SmallDivisorError: Df^n - mu^j I is numerically singular at some j
    """
    kind = BranchKind(kind)
    mu = complex(saddle.u if kind == BranchKind.UNSTABLE else saddle.s)
    e = np.array(saddle.e_u if kind == BranchKind.UNSTABLE else saddle.e_s, dtype=complex)
    p = np.array(saddle.point, dtype=complex)
    jac = derivative(map_, p, saddle.period)

    coeffs = np.zeros((2, degree + 1), dtype=complex)
    coeffs[:, 0] = p
    if degree >= 1:
        coeffs[:, 1] = e
    powers = mu ** np.arange(degree + 1)

    for j in range(2, degree + 1):
        wz = TruncatedSeries1(coeffs[0], radius)
        ww = TruncatedSeries1(coeffs[1], radius)
        fz, fw = apply(map_, (wz, ww), "forward", saddle.period)
        error = np.array(
            [fz.coefficient(j) - powers[j] * coeffs[0, j], fw.coefficient(j) - powers[j] * coeffs[1, j]]
        )
        system = jac - powers[j] * np.eye(2)
        smallest = float(np.linalg.svd(system, compute_uv=False)[-1])
        if smallest <= SMALL_DIVISOR_FLOOR * (1.0 + abs(powers[j])):
            raise SmallDivisorError(
                f"small divisor at order {j} of the {kind.value} manifold",
                {"order": j, "sigma_min": smallest},
            )
        coeffs[:, j] = -np.linalg.solve(system, error)

    germ = ManifoldGerm(
        saddle=saddle,
        kind=kind,
        components=(TruncatedSeries1(coeffs[0], radius), TruncatedSeries1(coeffs[1], radius)),
        multiplier=mu,
        radius=radius,
    )
    logger.debug(f"{kind.value} manifold germ of degree {degree}, residual {germ.residual(map_):.2e}")
    return germ
