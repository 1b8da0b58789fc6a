"""
Normal form (u x (1 + y g1), s y (1 + x g2)) of a saddle germ, and Koenigs
linearization inside the separatrices.

The reduction runs in three stages on truncated series:

1. degree-by-degree elimination of all nonlinear terms of degree <= k + 1;
2. straightening of the unstable manifold to {y = 0} and of the stable
   manifold to {x = 0};
3. Koenigs linearization of the restrictions to both axes.

Every stage is a coordinate change C; the map becomes C^-1 o f o C and the
accumulated change Phi satisfies f o Phi = Phi o f_nf.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Tuple

import numpy as np

from ..config import config
from ..core.errors import PreconditionError, ResonanceError, SmallDivisorError
from ..henon.local import LocalMap
from ..series.truncated import (
    TruncatedSeries1,
    TruncatedSeries2,
    _triangle,
    compose1,
    compose2,
    invert_map,
    reversion,
    solve_homological,
    substitute,
)
from .resonance import detect_resonance

logger = logging.getLogger(__name__)

SMALL_DIVISOR_FLOOR = 1e-9

Pair = Tuple[TruncatedSeries2, TruncatedSeries2]


@dataclass(frozen=True)
class NormalFormGerm:
    """
    A germ in normal form together with the coordinate change producing it.

    g1, g2 have all monomials of total degree >= k.
    """

    u: complex
    s: complex
    g1: TruncatedSeries2
    g2: TruncatedSeries2
    k: int
    change: LocalMap
    degree: int

    @property
    def g_norms(self) -> Tuple[float, float]:
        return self.g1.sup_estimate(), self.g2.sup_estimate()

    @classmethod
    def from_components(
        cls, u: complex, s: complex, g1: TruncatedSeries2, g2: TruncatedSeries2, k: int
    ) -> "NormalFormGerm":
        """Wrap explicit g1, g2 (identity coordinate change)."""
        degree = min(g1.degree, g2.degree) + 2
        return cls(complex(u), complex(s), g1, g2, k, _identity(degree, g1.radii), degree)

    def as_local_map(self) -> LocalMap:
        """The germ (u x (1 + y g1), s y (1 + x g2)) at degree D."""
        d = self.degree
        c1 = np.zeros((d + 1, d + 1), dtype=complex)
        c2 = np.zeros((d + 1, d + 1), dtype=complex)
        c1[1, 0] = self.u
        c2[0, 1] = self.s
        m = min(self.g1.degree, d - 2)
        c1[1 : m + 2, 1 : m + 2] += self.u * self.g1.coeffs[: m + 1, : m + 1]
        m = min(self.g2.degree, d - 2)
        c2[1 : m + 2, 1 : m + 2] += self.s * self.g2.coeffs[: m + 1, : m + 1]
        mask = _triangle(d)
        radii = self.g1.radii
        return LocalMap(
            TruncatedSeries2(c1 * mask, radii, abs(self.u) * self.g1.tail),
            TruncatedSeries2(c2 * mask, radii, abs(self.s) * self.g2.tail),
            name="normal-form",
        )

    def flatness(self) -> float:
        """Largest |coefficient| of g1, g2 below total degree k."""
        worst = 0.0
        for g in (self.g1, self.g2):
            for (i, j), value in g.terms().items():
                if i + j < self.k:
                    worst = max(worst, abs(value))
        return worst

    def residual(self, original: LocalMap) -> float:
        """Coefficient-wise max |f o Phi - Phi o f_nf| through the working degree."""
        nf = self.as_local_map().pair
        lhs = _compose_pair(original.pair, self.change.pair, self.degree)
        rhs = _compose_pair(self.change.pair, nf, self.degree)
        gaps = [np.max(np.abs(lhs[i].coeffs - rhs[i].coeffs)) for i in range(2)]
        return float(max(gaps))

    def to_json(self) -> Dict[str, Any]:
        return {
            "u": [self.u.real, self.u.imag],
            "s": [self.s.real, self.s.imag],
            "k": self.k,
            "g1": self.g1.to_json(),
            "g2": self.g2.to_json(),
            "change": [self.change.f1.to_json(), self.change.f2.to_json()],
        }


def _identity(degree: int, radii: Tuple[float, float] = (1.0, 1.0)) -> LocalMap:
    return LocalMap(
        TruncatedSeries2.variable(0, degree, radii),
        TruncatedSeries2.variable(1, degree, radii),
        name="identity",
    )


def _compose_pair(outer: Pair, inner: Pair, degree: int) -> Pair:
    return (
        compose2(outer[0], inner[0], inner[1], degree),
        compose2(outer[1], inner[0], inner[1], degree),
    )


def _conjugate(f: Pair, change: Pair, degree: int) -> Pair:
    """change^-1 o f o change."""
    inverse = invert_map(change)
    return _compose_pair(inverse, _compose_pair(f, change, degree), degree)


def _homogeneous(s: TruncatedSeries2, d: int) -> TruncatedSeries2:
    idx = np.arange(s.degree + 1)
    mask = (idx[:, None] + idx[None, :]) == d
    return TruncatedSeries2(s.coeffs * mask, s.radii)


def _negligible(values: np.ndarray, scale: float) -> bool:
    return bool(np.max(np.abs(values), initial=0.0) <= config.get_rel_tol() * max(scale, 1e-300) * 1e-2)


def koenigs_linearize(h: TruncatedSeries1, k: int, floor: float = SMALL_DIVISOR_FLOOR) -> TruncatedSeries1:
    """
    phi with phi(h(x)) = mu phi(x) and phi(x) = x + O(x^{k+2}).

    The multiplier mu = h'(0) may be expanding or contracting (|mu| != 0, 1).

    Raises:
        PreconditionError: h(0) != 0, |mu| in {0, 1}, or a coefficient of
            x^2..x^{k+1} does not vanish
    """
    mu = h.coefficient(1)
    scale = max(h.magnitude(), 1e-300)
    tol = max(config.get_rel_tol() * scale, 1e-12)
    if abs(h.coefficient(0)) > tol:
        raise PreconditionError("Koenigs linearization needs h(0) = 0")
    if abs(mu) == 0.0 or abs(abs(mu) - 1.0) <= 1e-6:
        raise PreconditionError("Koenigs linearization needs |h'(0)| != 0, 1", {"multiplier": mu})
    for j in range(2, min(k + 1, h.degree) + 1):
        if abs(h.coefficient(j)) > tol:
            raise PreconditionError(
                f"coefficient of x^{j} must vanish", {"degree": j, "value": h.coefficient(j)}
            )

    degree = h.degree
    hexact = TruncatedSeries1(h.coeffs, h.radius, 0.0)
    phi = np.zeros(degree + 1, dtype=complex)
    phi[1] = 1.0
    for j in range(k + 2, degree + 1):
        trial = TruncatedSeries1(phi, h.radius, 0.0)
        error = compose1(trial, hexact).coefficient(j) - mu * phi[j]
        divisor = mu**j - mu
        if abs(divisor) <= floor:
            raise SmallDivisorError(f"small divisor at order {j}", {"order": j, "divisor": divisor})
        phi[j] = -error / divisor
    return TruncatedSeries1(phi, h.radius, 0.0)


def _solve_graph(
    residual: Callable[[np.ndarray], TruncatedSeries1],
    divisor: Callable[[int], complex],
    degree: int,
    start: int,
) -> np.ndarray:
    """Order-by-order solve c_j = E_j / divisor(j), E computed with c_j = 0."""
    coeffs = np.zeros(degree + 1, dtype=complex)
    for j in range(start, degree + 1):
        e = residual(coeffs).coefficient(j)
        d = divisor(j)
        if abs(d) <= SMALL_DIVISOR_FLOOR:
            raise SmallDivisorError(f"small divisor at order {j}", {"order": j, "divisor": d})
        coeffs[j] = e / d
    return coeffs


def normal_form_star_k(local: LocalMap, k: int) -> NormalFormGerm:
    """
    Bring a saddle germ with diagonal linear part to the form
    (u x (1 + y g1), s y (1 + x g2)) with g1, g2 of order >= k.

    Args:
        local: Germ fixing the origin with linear part diag(u, s)
        k: Flatness order, k >= 1

    Raises:
        PreconditionError: non-diagonal or non-saddle linear part, or
            truncation degree below k + 2
        ResonanceError: u^a s^b = 1 for some a + b <= k + 1
        SmallDivisorError: a divisor fell below the floor
    """
    if k < 1:
        raise PreconditionError(f"normal form order must be >= 1, got {k}")
    if not local.fixes_origin or not local.is_diagonal:
        raise PreconditionError("normal form needs a germ fixing the origin with diagonal linear part")
    lin = local.linear_matrix
    u, s = complex(lin[0, 0]), complex(lin[1, 1])
    if not abs(s) < 1.0 < abs(u):
        raise PreconditionError("normal form needs |s| < 1 < |u| on the diagonal", {"u": u, "s": s})
    degree = local.degree
    if degree < k + 2:
        raise PreconditionError(
            f"truncation degree {degree} below k + 2 = {k + 2}", {"degree": degree, "k": k}
        )
    resonances = detect_resonance(u, s, k + 1)
    if resonances:
        a, b = resonances[0]
        raise ResonanceError(f"resonance u^{a} s^{b} = 1", {"pair": (a, b), "all": resonances})

    radii = local.f1.radii
    f: Pair = (local.f1.truncate(degree), local.f2.truncate(degree))
    scale = max(f[0].magnitude(), f[1].magnitude())
    phi = _identity(degree, radii).pair
    x = TruncatedSeries2.variable(0, degree, radii)
    y = TruncatedSeries2.variable(1, degree, radii)

    def apply_change(change: Pair) -> None:
        nonlocal f, phi
        f = _conjugate(f, change, degree)
        phi = _compose_pair(phi, change, degree)

    # stage 1: eliminate degrees 2..k+1
    for d in range(2, k + 2):
        r1, r2 = _homogeneous(f[0], d), _homogeneous(f[1], d)
        if _negligible(r1.coeffs, scale) and _negligible(r2.coeffs, scale):
            continue
        h1 = solve_homological(r1, lambda i, j: u**i * s**j - u, SMALL_DIVISOR_FLOOR)
        h2 = solve_homological(r2, lambda i, j: u**i * s**j - s, SMALL_DIVISOR_FLOOR)
        apply_change((x + h1, y + h2))
        logger.debug(f"normal form: eliminated degree {d}")

    # stage 2a: unstable manifold y = w(x)
    t = TruncatedSeries1.variable(degree, radii[0])

    def unstable_residual(c: np.ndarray) -> TruncatedSeries1:
        graph = TruncatedSeries1(c, radii[0])
        image_x = substitute(f[0], t, graph, degree)
        return substitute(f[1], t, graph, degree) - _compose_exact(graph, image_x)

    wu = _solve_graph(unstable_residual, lambda j: u**j - s, degree, 2)
    if not _negligible(wu, scale):
        graph = _lift(wu, 0, degree, radii)
        apply_change((x, y + graph))

    # stage 2b: stable manifold x = v(y)
    t = TruncatedSeries1.variable(degree, radii[1])

    def stable_residual(c: np.ndarray) -> TruncatedSeries1:
        graph = TruncatedSeries1(c, radii[1])
        image_y = substitute(f[1], graph, t, degree)
        return substitute(f[0], graph, t, degree) - _compose_exact(graph, image_y)

    ws = _solve_graph(stable_residual, lambda j: s**j - u, degree, 2)
    if not _negligible(ws, scale):
        graph = _lift(ws, 1, degree, radii)
        apply_change((x + graph, y))

    # stage 3: Koenigs on both axes
    hu = f[0].restrict(1, 0.0)
    ku = koenigs_linearize(TruncatedSeries1(hu.coeffs, radii[0], 0.0), k)
    if not _negligible(ku.coeffs[2:], scale):
        inverse = reversion(ku)
        apply_change((_lift(inverse.coeffs, 0, degree, radii), y))
    hs = f[1].restrict(0, 0.0)
    ks = koenigs_linearize(TruncatedSeries1(hs.coeffs, radii[1], 0.0), k)
    if not _negligible(ks.coeffs[2:], scale):
        inverse = reversion(ks)
        apply_change((x, _lift(inverse.coeffs, 1, degree, radii)))

    g1 = (f[0] - x * u).divide_by_variable(0).divide_by_variable(1) * (1.0 / u)
    g2 = (f[1] - y * s).divide_by_variable(0).divide_by_variable(1) * (1.0 / s)

    nf = NormalFormGerm(u, s, g1, g2, k, LocalMap(phi[0], phi[1], name="change"), degree)
    logger.info(
        f"normal form (k={k}, D={degree}): flatness {nf.flatness():.1e}, |g| = "
        f"({nf.g_norms[0]:.3g}, {nf.g_norms[1]:.3g})"
    )
    return nf


def _compose_exact(outer: TruncatedSeries1, inner: TruncatedSeries1) -> TruncatedSeries1:
    """outer o inner on coefficients only (inner(0) = 0)."""
    one = TruncatedSeries1.constant(1.0, inner.degree, inner.radius)
    exact_inner = TruncatedSeries1(inner.coeffs, inner.radius, 0.0)
    result = one * outer.coefficient(outer.degree)
    for c in reversed(outer.coeffs[:-1]):
        result = result * exact_inner + c
    return TruncatedSeries1(result.coeffs, inner.radius, 0.0)


def _lift(coeffs: np.ndarray, index: int, degree: int, radii: Tuple[float, float]) -> TruncatedSeries2:
    """A one-variable series in x (index 0) or y (index 1) as a two-variable series."""
    c = np.zeros((degree + 1, degree + 1), dtype=complex)
    n = min(len(coeffs), degree + 1)
    if index == 0:
        c[:n, 0] = coeffs[:n]
    else:
        c[0, :n] = coeffs[:n]
    return TruncatedSeries2(c, radii)

