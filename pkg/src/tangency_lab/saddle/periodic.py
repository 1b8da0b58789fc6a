"""
Periodic points: Newton search, classification and censuses.
"""

import itertools
import logging
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..config import config
from ..core.errors import (
    ConvergenceError,
    PreconditionError,
    SingularMatrixError,
    ValidationError,
)
from ..core.models import PeriodicReport, SaddleData, SaddleKind
from ..henon.maps import PolynomialAutomorphism, apply, derivative
from ..series.roots import polynomial_roots
from .resonance import margins

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 100
TYPE_BAND = 1e-6


def classify_multipliers(mu1: complex, mu2: complex, band: float = TYPE_BAND) -> SaddleKind:
    """Saddle, sink, source, or indeterminate when a modulus is within band of 1."""
    m1, m2 = abs(mu1), abs(mu2)
    if abs(m1 - 1.0) <= band or abs(m2 - 1.0) <= band:
        return SaddleKind.INDETERMINATE
    if m1 < 1.0 and m2 < 1.0:
        return SaddleKind.SINK
    if m1 > 1.0 and m2 > 1.0:
        return SaddleKind.SOURCE
    return SaddleKind.SADDLE


def _check_invertible(map_: Any) -> None:
    if isinstance(map_, PolynomialAutomorphism) and not map_.is_invertible:
        raise PreconditionError(
            "saddle operations are undefined on the zero-Jacobian locus",
            {"jacobian": map_.jacobian_determinant},
        )


def periodic_report(
    map_: Any, point: Sequence[complex], n: int, residual: float = 0.0, iterations: int = 0
) -> PeriodicReport:
    """Classify a (converged) periodic point and attach saddle data when it is a saddle."""
    p = (complex(point[0]), complex(point[1]))
    jac = derivative(map_, p, n)
    values, vectors = np.linalg.eig(jac)
    order = np.argsort(-np.abs(values))
    values, vectors = values[order], vectors[:, order]
    kind = classify_multipliers(values[0], values[1])

    saddle = None
    if kind == SaddleKind.SADDLE:
        u, s = complex(values[0]), complex(values[1])
        e_u = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
        e_s = vectors[:, 1] / np.linalg.norm(vectors[:, 1])
        rho, _, _ = margins(u, s, 1)
        saddle = SaddleData(
            point=p,
            period=n,
            u=u,
            s=s,
            e_u=(complex(e_u[0]), complex(e_u[1])),
            e_s=(complex(e_s[0]), complex(e_s[1])),
            residual=residual,
            rho=rho,
        )
        if isinstance(map_, PolynomialAutomorphism):
            expected = map_.jacobian_determinant**n
            gap = abs(u * s - expected)
            if gap > 1e-10 * (1.0 + abs(expected)):
                logger.warning(f"Multiplier identity off by {gap:.2e} at {p}")

    return PeriodicReport(
        kind=kind,
        point=p,
        period=n,
        multipliers=(complex(values[0]), complex(values[1])),
        residual=residual,
        iterations=iterations,
        saddle=saddle,
    )


def find_periodic(
    map_: Any,
    n: int,
    seed: Sequence[complex],
    tol: Optional[float] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> PeriodicReport:
    """
    Newton on f^n(p) - p from a seed, then classification.

    Args:
        map_: PolynomialAutomorphism or LocalMap
        n: Period
        seed: Starting point
        tol: Residual tolerance (default 1e-12 relative)
        max_iterations: Iteration cap

    Raises:
        ConvergenceError: divergence or iteration cap
        SingularMatrixError: Df^n - I is singular (a multiplier equals 1)
    """
    if n < 1:
        raise ValidationError(f"period must be >= 1, got {n}")
    _check_invertible(map_)
    tol = 1e-12 if tol is None else tol
    p = np.array([complex(seed[0]), complex(seed[1])])

    for iteration in range(1, max_iterations + 1):
        image = np.array(apply(map_, (p[0], p[1]), "forward", n), dtype=complex)
        defect = image - p
        residual = float(np.max(np.abs(defect)))
        if residual <= tol * (1.0 + float(np.max(np.abs(p)))):
            logger.debug(f"period-{n} point converged in {iteration} iterations")
            return periodic_report(map_, p, n, residual, iteration)
        newton = derivative(map_, p, n) - np.eye(2)
        scale = 1.0 + float(np.max(np.abs(newton)))
        if abs(np.linalg.det(newton)) <= 1e-14 * scale**2:
            raise SingularMatrixError(
                "Newton matrix Df^n - I is singular (multiplier 1)",
                {"point": (complex(p[0]), complex(p[1])), "period": n},
            )
        p = p - np.linalg.solve(newton, defect)
        if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > 1e8:
            raise ConvergenceError("Newton diverged", {"period": n, "iteration": iteration})

    raise ConvergenceError(
        f"Newton did not converge in {max_iterations} iterations",
        {"period": n, "residual": residual},
    )


def _dedupe(points: List[np.ndarray], tol: float) -> List[np.ndarray]:
    unique: List[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol * (1.0 + np.max(np.abs(q))) for q in unique):
            unique.append(p)
    unique.sort(key=lambda q: (round(q[0].real, 9), round(q[0].imag, 9), round(q[1].real, 9)))
    return unique


def _newton_arrays(
    map_: PolynomialAutomorphism, z: np.ndarray, w: np.ndarray, n: int, iterations: int = 60
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized Newton on f^n(p) - p over many seeds."""
    for _ in range(iterations):
        fz, fw = z.copy(), w.copy()
        m11 = np.ones_like(z)
        m12 = np.zeros_like(z)
        m21 = np.zeros_like(z)
        m22 = np.ones_like(z)
        for _ in range(n):
            for factor in reversed(map_.factors):
                d = factor.poly_derivative(fz)
                m11, m12, m21, m22 = d * m11 + factor.a * m21, d * m12 + factor.a * m22, m11, m12
                fz, fw = factor.forward(fz, fw)
        g1, g2 = fz - z, fw - w
        a11, a12, a21, a22 = m11 - 1.0, m12, m21, m22 - 1.0
        det = a11 * a22 - a12 * a21
        with np.errstate(all="ignore"):
            dz = (a22 * g1 - a12 * g2) / det
            dw = (a11 * g2 - a21 * g1) / det
            z = z - dz
            w = w - dw
        z = np.where(np.isfinite(z) & (np.abs(z) < 1e6), z, np.nan)
        w = np.where(np.isfinite(w) & (np.abs(w) < 1e6), w, np.nan)
    fz, fw = apply(map_, (z, w), "forward", n)
    with np.errstate(invalid="ignore"):
        residual = np.maximum(np.abs(fz - z), np.abs(fw - w))
    return z, w, residual


def grid_census(
    map_: PolynomialAutomorphism,
    n: int,
    radius: float,
    grid: int = 7,
    tol: float = 1e-9,
) -> List[Tuple[complex, complex]]:
    """
    Period-n points in the bidisk of the given radius, by grid-seeded Newton
    with deduplication.
    """
    _check_invertible(map_)
    axis = np.linspace(-radius, radius, grid)
    plane = (axis[:, None] + 1j * axis[None, :]).ravel()
    z0, w0 = np.meshgrid(plane, plane, indexing="ij")
    z, w, residual = _newton_arrays(map_, z0.ravel(), w0.ravel(), n)
    ok = np.isfinite(residual) & (residual <= tol * (1.0 + np.abs(z)))
    ok &= (np.abs(z) <= radius) & (np.abs(w) <= radius)
    points = _dedupe([np.array([a, b]) for a, b in zip(z[ok], w[ok])], 1e-7)
    logger.info(f"grid census: {len(points)} period-{n} points from {z.size} seeds")
    return [(complex(p[0]), complex(p[1])) for p in points]


def _inverse_branch(coeffs: np.ndarray, value: complex, current: complex) -> complex:
    """Root of P(x) = value closest to the current iterate."""
    c = coeffs.copy()
    c[0] -= value
    if c.size == 3:
        # closed form for quadratics, branch chosen by proximity
        disc = np.sqrt(c[1] ** 2 - 4 * c[2] * c[0] + 0j)
        r1, r2 = (-c[1] + disc) / (2 * c[2]), (-c[1] - disc) / (2 * c[2])
        return complex(r1 if abs(r1 - current) <= abs(r2 - current) else r2)
    roots = polynomial_roots(c)
    return complex(roots[np.argmin(np.abs(roots - current))])


def periodic_census(
    map_: PolynomialAutomorphism,
    n: int,
    sweeps: int = 200,
    tol: float = 1e-11,
) -> List[Tuple[Tuple[int, ...], Tuple[complex, complex]]]:
    """
    All period-n points of a single Hénon factor in its horseshoe regime,
    enumerated by itinerary.

    The orbit z_k with w_k = z_{k-1} satisfies P(z_k) = z_{k+1} - a z_{k-1};
    each itinerary picks an inverse branch of P per step. Jacobi sweeps
    converge when the branches are separated, then Newton polishes the point.

    Returns:
        List of (itinerary, periodic point) sorted by itinerary
    """
    if len(map_.factors) != 1:
        raise PreconditionError("itinerary census needs a single Hénon factor")
    factor = map_.factors[0]
    _check_invertible(map_)
    coeffs = np.array(factor.coeffs, dtype=complex)
    d = factor.degree
    # branch anchors: preimages of the "typical" value 0 ordered by real part
    anchors = sorted(polynomial_roots(coeffs), key=lambda r: (r.real, r.imag))
    results = []
    for word in itertools.product(range(d), repeat=n):
        z = np.array([anchors[i] for i in word], dtype=complex)
        for _ in range(sweeps):
            new = np.array(
                [
                    _inverse_branch(coeffs, z[(k + 1) % n] - factor.a * z[(k - 1) % n], z[k])
                    for k in range(n)
                ]
            )
            step = float(np.max(np.abs(new - z)))
            z = new
            if step <= 1e-14 * (1.0 + float(np.max(np.abs(z)))):
                break
        seed = (z[0], z[n - 1])
        try:
            report = find_periodic(map_, n, seed, tol=tol)
        except ConvergenceError as e:
            logger.warning(f"itinerary {word} failed to polish: {e.message}")
            continue
        results.append((tuple(word), report.point))
    logger.info(f"itinerary census: {len(results)} period-{n} points")
    return results
