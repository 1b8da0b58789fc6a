"""
Intersection multiplicity of C = {phi = 0} and C' = {d/dt phi = 0} at the
origin, by two independent algorithms:

- the vanishing order in lambda of the t-resultant of (phi, d/dt phi) after
  a Weierstrass-style truncation in t;
- the number of solutions of {phi = e1, d/dt phi = e2} near the origin for
  small generic (e1, e2), by seeded Newton polished to full precision and
  deduplicated relative to the size of each solution.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..core.errors import (
    CountInstabilityError,
    PersistentTangencyError,
    TruncationTooSmallError,
)
from .germ import UnfoldingGerm

logger = logging.getLogger(__name__)

RESULTANT_TOL = 1e-8
DEDUP_REL = 1e-6
POLISH_TOL = 1e-11


@dataclass(frozen=True)
class MultiplicityCount:
    """Solutions of the perturbed system and the ε draws that produced them."""

    m: int
    solutions: List[Tuple[complex, complex]]
    perturbations: List[Tuple[complex, complex]]


def sylvester_matrix(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Sylvester matrix of two polynomials given lowest degree first."""
    a, b = p[::-1], q[::-1]
    n, m = a.size - 1, b.size - 1
    size = n + m
    mat = np.zeros((size, size), dtype=complex)
    for row in range(m):
        mat[row, row : row + n + 1] = a
    for row in range(n):
        mat[m + row, row : row + m + 1] = b
    return mat


def resultant_coefficients(germ: UnfoldingGerm, t_degree: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """
    Taylor coefficients in lambda of Res_t(phi, d/dt phi), recovered by FFT
    from samples on the unit lambda-circle.

    Returns:
        (coefficients, Hadamard scale of the sampled Sylvester matrices)
    """
    n = t_degree if t_degree is not None else germ.weierstrass_degree()
    lam_degree = germ.degree
    samples = 1
    while samples < lam_degree * (2 * n - 1) + 1:
        samples *= 2
    lam = np.exp(2j * np.pi * np.arange(samples) / samples)
    values = np.empty(samples, dtype=complex)
    hadamard = 0.0
    for k, point in enumerate(lam):
        p = germ.t_polynomial(point, n)
        q = p[1:] * np.arange(1, n + 1)
        mat = sylvester_matrix(p, q)
        values[k] = np.linalg.det(mat)
        hadamard = max(hadamard, float(np.prod(np.linalg.norm(mat, axis=1))))
    return np.fft.fft(values) / samples, hadamard


def multiplicity_resultant(germ: UnfoldingGerm) -> int:
    """
    m as the lambda-vanishing order of the t-resultant of (phi, d/dt phi).

    Raises:
        PersistentTangencyError: the resultant vanishes identically
        TruncationTooSmallError: m exceeds the lambda-degree of a truncated germ
    """
    coeffs, hadamard = resultant_coefficients(germ)
    magnitude = float(np.max(np.abs(coeffs)))
    if magnitude <= 1e-12 * max(hadamard, 1e-300):
        raise PersistentTangencyError(
            "resultant vanishes identically: the tangency persists", {"magnitude": magnitude}
        )
    m = int(np.argmax(np.abs(coeffs) > RESULTANT_TOL * magnitude))
    if not germ.phi.is_exact and m > germ.degree:
        raise TruncationTooSmallError(
            "multiplicity exceeds the resolved lambda-degree",
            {"m_at_least": germ.degree, "tail": germ.phi.tail},
        )
    logger.debug(f"resultant multiplicity {m}")
    return m


def perturbed_solutions(
    germ: UnfoldingGerm, eps: Tuple[complex, complex], window: float, iterations: int = 80
) -> List[Tuple[complex, complex]]:
    phi = germ.phi
    phi_l, phi_t = phi.derive(0), phi.derive(1)
    phi_tl, phi_tt = phi_t.derive(0), phi_t.derive(1)

    radii = np.geomspace(1e-6, 0.3, 10)
    angles = np.exp(2j * np.pi * (np.arange(8) + 0.25) / 8)
    axis = np.concatenate([[0.0], (radii[:, None] * angles[None, :]).ravel()])
    lam, t = np.meshgrid(axis, axis, indexing="ij")
    lam, t = lam.ravel().astype(complex), t.ravel().astype(complex)

    def newton_step(lv: np.ndarray, tv: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        f1 = phi.evaluate(lv, tv) - eps[0]
        f2 = phi_t.evaluate(lv, tv) - eps[1]
        a, b = phi_l.evaluate(lv, tv), phi_t.evaluate(lv, tv)
        c, d = phi_tl.evaluate(lv, tv), phi_tt.evaluate(lv, tv)
        det = a * d - b * c
        return (d * f1 - b * f2) / det, (a * f2 - c * f1) / det

    # seeds stop once their step is negligible against the point itself
    converged = np.zeros(lam.shape, dtype=bool)
    active = np.ones(lam.shape, dtype=bool)
    floor = max(abs(eps[0]), abs(eps[1]))
    # diverging seeds overflow harmlessly to nan
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            dl, dt = newton_step(lam[idx], t[idx])
            lam[idx], t[idx] = lam[idx] - dl, t[idx] - dt
            size = np.abs(lam[idx]) + np.abs(t[idx])
            step = np.abs(dl) + np.abs(dt)
            finite = np.isfinite(step) & np.isfinite(size) & (size < 10.0)
            done = finite & (step <= POLISH_TOL * (size + floor))
            converged[idx[done]] = True
            active[idx[done | ~finite]] = False
        # two more full steps on the converged points
        idx = np.flatnonzero(converged)
        for _ in range(2):
            dl, dt = newton_step(lam[idx], t[idx])
            lam[idx], t[idx] = lam[idx] - dl, t[idx] - dt
        residual = np.abs(phi.evaluate(lam, t) - eps[0]) + np.abs(phi_t.evaluate(lam, t) - eps[1])
    scale = germ.scale * floor
    ok = converged & np.isfinite(residual) & (residual <= 1e-3 * scale)
    ok &= (np.abs(lam) < window) & (np.abs(t) < window)

    # points are the same solution when they agree relative to their size
    found: List[Tuple[complex, complex]] = []
    for lv, tv in zip(lam[ok], t[ok]):
        size = abs(lv) + abs(tv) + floor
        if all(abs(lv - a) + abs(tv - b) > DEDUP_REL * size for a, b in found):
            found.append((complex(lv), complex(tv)))
    found.sort(key=lambda p: (round(p[0].real, 12), round(p[0].imag, 12), round(p[1].real, 12)))
    return found


def multiplicity_counting(
    germ: UnfoldingGerm,
    eps: float = 1e-10,
    window: float = 0.1,
    rng: Optional[np.random.Generator] = None,
) -> MultiplicityCount:
    """
    m as the number of solutions of {phi = e1, d/dt phi = e2} in the window,
    for two random draws of (e1, e2) of size eps.

    Raises:
        CountInstabilityError: the two draws disagree
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    counts, draws, last = [], [], []
    for _ in range(2):
        phases = np.exp(2j * np.pi * rng.uniform(size=2))
        pair = (complex(eps * phases[0]), complex(eps * phases[1]))
        last = perturbed_solutions(germ, pair, window)
        counts.append(len(last))
        draws.append(pair)
    if counts[0] != counts[1]:
        raise CountInstabilityError(
            "solution count differs between perturbation draws",
            {"counts": counts, "eps": eps, "window": window},
        )
    logger.debug(f"counting multiplicity {counts[0]}")
    return MultiplicityCount(counts[0], last, draws)
