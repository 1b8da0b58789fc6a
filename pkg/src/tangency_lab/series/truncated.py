"""
Truncated complex power series in one and two variables.

A series carries its coefficient table, a truncation degree, a validity
radius (one per variable) and a tail bound: a sup-estimate of the dropped
remainder on the disk (bidisk) of validity. Arithmetic truncates to the
smallest input degree and moves everything it drops into the tail, so the
tail of a result built from polynomials is the honest size of what was cut.

Tail bounds are conservative estimates, not validated enclosures.
"""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..config import config
from ..core.errors import (
    DegreeUnderflowError,
    DomainViolationError,
    NonInvertibleGermError,
    PreconditionError,
    SmallDivisorError,
    ValidationError,
)

logger = logging.getLogger(__name__)

Scalar = Union[complex, float, int]


def _is_scalar(value: Any) -> bool:
    return isinstance(value, numbers.Number) or (
        isinstance(value, np.generic) and np.isscalar(value)
    )


def _triangle(degree: int) -> np.ndarray:
    idx = np.arange(degree + 1)
    return (idx[:, None] + idx[None, :]) <= degree


def _scaled(tail: float, factor: float) -> float:
    # an infinite tail times an exact zero stays zero
    if tail == 0.0 or factor == 0.0:
        return 0.0
    return tail * factor


def _binomial_shift(degree: int, center: complex) -> np.ndarray:
    """Matrix B with (B @ c)_k = sum_j C(j, k) center^(j-k) c_j."""
    b = np.zeros((degree + 1, degree + 1), dtype=complex)
    for j in range(degree + 1):
        for k in range(j + 1):
            b[k, j] = math.comb(j, k) * center ** (j - k)
    return b


@dataclass(frozen=True)
class TruncatedSeries1:
    """
    Power series sum c_k t^k, k <= D, valid on |t| <= radius up to `tail`.
    """

    coeffs: np.ndarray
    radius: float = 1.0
    tail: float = 0.0

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise ValidationError("series needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("series coefficients must be finite")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValidationError(f"validity radius must be positive, got {self.radius}")
        if not self.tail >= 0:
            raise ValidationError(f"tail bound must be >= 0, got {self.tail}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "tail", float(self.tail))

    # construction

    @classmethod
    def from_coeffs(
        cls, coeffs: Iterable[Scalar], radius: float = 1.0, tail: float = 0.0
    ) -> "TruncatedSeries1":
        return cls(np.asarray(list(coeffs), dtype=complex), radius, tail)

    @classmethod
    def zero(cls, degree: int, radius: float = 1.0) -> "TruncatedSeries1":
        return cls(np.zeros(degree + 1, dtype=complex), radius)

    @classmethod
    def constant(cls, value: Scalar, degree: int, radius: float = 1.0) -> "TruncatedSeries1":
        c = np.zeros(degree + 1, dtype=complex)
        c[0] = value
        return cls(c, radius)

    @classmethod
    def variable(cls, degree: int, radius: float = 1.0) -> "TruncatedSeries1":
        c = np.zeros(max(degree, 1) + 1, dtype=complex)
        c[1] = 1.0
        return cls(c[: degree + 1] if degree >= 1 else c, radius)

    # inspection

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def nvars(self) -> int:
        return 1

    @property
    def is_exact(self) -> bool:
        """True when the series is an exact polynomial (no tail)."""
        return self.tail == 0.0

    def magnitude(self) -> float:
        """Per-series magnitude scale max|c_k|."""
        return float(np.max(np.abs(self.coeffs)))

    def sup_estimate(self, radius: Optional[float] = None) -> float:
        """Sum of |c_k| r^k plus the tail: a bound for the sup on |t| <= r."""
        return self.polynomial_sup(radius) + self.tail

    def polynomial_sup(self, radius: Optional[float] = None) -> float:
        r = self.radius if radius is None else radius
        return float(np.sum(np.abs(self.coeffs) * r ** np.arange(self.degree + 1)))

    def __call__(self, t: Any) -> Any:
        return self.evaluate(t)

    def evaluate(self, t: Any) -> Any:
        """Evaluate the truncated polynomial (vectorized over numpy arrays)."""
        return npoly.polyval(np.asarray(t, dtype=complex), self.coeffs)

    def coefficient(self, k: int) -> complex:
        return complex(self.coeffs[k]) if 0 <= k <= self.degree else 0j

    # reshaping

    def truncate(self, degree: int) -> "TruncatedSeries1":
        if degree >= self.degree:
            return self
        dropped = self.coeffs[degree + 1 :]
        extra = float(np.sum(np.abs(dropped) * self.radius ** np.arange(degree + 1, self.degree + 1)))
        return TruncatedSeries1(self.coeffs[: degree + 1], self.radius, self.tail + extra)

    def extend(self, degree: int) -> "TruncatedSeries1":
        """Zero-pad an exact polynomial to a larger truncation degree."""
        if degree <= self.degree:
            return self.truncate(degree)
        if not self.is_exact:
            raise PreconditionError(
                "only exact polynomials can be extended", {"tail": self.tail}
            )
        c = np.zeros(degree + 1, dtype=complex)
        c[: self.degree + 1] = self.coeffs
        return TruncatedSeries1(c, self.radius, 0.0)

    def with_radius(self, radius: float) -> "TruncatedSeries1":
        return TruncatedSeries1(self.coeffs, radius, self.tail)

    def recenter(self, center: Scalar) -> "TruncatedSeries1":
        """Exact Taylor re-expansion t -> center + t of the polynomial part."""
        shifted = _binomial_shift(self.degree, complex(center)) @ self.coeffs
        radius = max(self.radius - abs(center), 1e-300)
        return TruncatedSeries1(shifted, radius, self.tail)

    def scale_variable(self, factor: Scalar) -> "TruncatedSeries1":
        """The series t -> f(factor * t)."""
        factor = complex(factor)
        c = self.coeffs * factor ** np.arange(self.degree + 1)
        return TruncatedSeries1(c, self.radius / abs(factor), self.tail)

    # arithmetic

    def _coerce(self, other: Any) -> "TruncatedSeries1":
        if isinstance(other, TruncatedSeries1):
            return other
        if _is_scalar(other):
            return TruncatedSeries1.constant(complex(other), self.degree, self.radius)
        raise TypeError(f"cannot combine TruncatedSeries1 with {type(other).__name__}")

    def __add__(self, other: Any) -> "TruncatedSeries1":
        if not (_is_scalar(other) or isinstance(other, TruncatedSeries1)):
            return NotImplemented
        return series_arith(self, self._coerce(other), "add")

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries1":
        return TruncatedSeries1(-self.coeffs, self.radius, self.tail)

    def __sub__(self, other: Any) -> "TruncatedSeries1":
        if not (_is_scalar(other) or isinstance(other, TruncatedSeries1)):
            return NotImplemented
        return series_arith(self, -self._coerce(other), "add")

    def __rsub__(self, other: Any) -> "TruncatedSeries1":
        return (-self).__add__(other)

    def __mul__(self, other: Any) -> "TruncatedSeries1":
        if _is_scalar(other):
            value = complex(other)
            return TruncatedSeries1(self.coeffs * value, self.radius, _scaled(self.tail, abs(value)))
        if not isinstance(other, TruncatedSeries1):
            return NotImplemented
        return series_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "TruncatedSeries1":
        if not _is_scalar(other):
            return NotImplemented
        return self * (1.0 / complex(other))

    def __pow__(self, exponent: int) -> "TruncatedSeries1":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValidationError("series powers need a non-negative integer exponent")
        result = TruncatedSeries1.constant(1.0, self.degree, self.radius)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def derive(self) -> "TruncatedSeries1":
        return series_arith(self, None, "derive")

    # serialization

    def to_json(self) -> Dict[str, Any]:
        return {
            "vars": 1,
            "degree": self.degree,
            "radius": [self.radius],
            "tail": self.tail,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }


@dataclass(frozen=True)
class TruncatedSeries2:
    """
    Power series sum c_ij x^i y^j over i + j <= D on the bidisk of radii (r1, r2).

    The coefficient table is stored as a dense (D+1) x (D+1) array whose
    entries with i + j > D are zero.
    """

    coeffs: np.ndarray
    radii: Tuple[float, float] = (1.0, 1.0)
    tail: float = 0.0

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError("two-variable series needs a square coefficient table")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("series coefficients must be finite")
        degree = arr.shape[0] - 1
        mask = _triangle(degree)
        if np.any(arr[~mask] != 0):
            raise ValidationError("coefficient table must be total-degree triangular")
        r1, r2 = (float(r) for r in self.radii)
        if not (r1 > 0 and r2 > 0):
            raise ValidationError(f"validity radii must be positive, got {self.radii}")
        if not self.tail >= 0:
            raise ValidationError(f"tail bound must be >= 0, got {self.tail}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "radii", (r1, r2))
        object.__setattr__(self, "tail", float(self.tail))

    # construction

    @classmethod
    def zero(cls, degree: int, radii: Tuple[float, float] = (1.0, 1.0)) -> "TruncatedSeries2":
        return cls(np.zeros((degree + 1, degree + 1), dtype=complex), radii)

    @classmethod
    def constant(
        cls, value: Scalar, degree: int, radii: Tuple[float, float] = (1.0, 1.0)
    ) -> "TruncatedSeries2":
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        c[0, 0] = value
        return cls(c, radii)

    @classmethod
    def from_terms(
        cls,
        terms: Dict[Tuple[int, int], Scalar],
        degree: int,
        radii: Tuple[float, float] = (1.0, 1.0),
    ) -> "TruncatedSeries2":
        """Build from a {(i, j): coefficient} mapping; terms above D go to the tail."""
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        tail = 0.0
        for (i, j), value in terms.items():
            if i + j <= degree:
                c[i, j] += value
            else:
                tail += abs(value) * radii[0] ** i * radii[1] ** j
        return cls(c, radii, tail)

    @classmethod
    def variable(
        cls, index: int, degree: int, radii: Tuple[float, float] = (1.0, 1.0)
    ) -> "TruncatedSeries2":
        key = (1, 0) if index == 0 else (0, 1)
        return cls.from_terms({key: 1.0}, degree, radii)

    # inspection

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def nvars(self) -> int:
        return 2

    @property
    def is_exact(self) -> bool:
        return self.tail == 0.0

    def magnitude(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def sup_estimate(self, radii: Optional[Tuple[float, float]] = None) -> float:
        return self.polynomial_sup(radii) + self.tail

    def polynomial_sup(self, radii: Optional[Tuple[float, float]] = None) -> float:
        r1, r2 = self.radii if radii is None else radii
        idx = np.arange(self.degree + 1)
        weights = np.outer(r1**idx, r2**idx)
        return float(np.sum(np.abs(self.coeffs) * weights))

    def coefficient(self, i: int, j: int) -> complex:
        if i < 0 or j < 0 or i + j > self.degree:
            return 0j
        return complex(self.coeffs[i, j])

    def terms(self) -> Dict[Tuple[int, int], complex]:
        """Nonzero monomials as {(i, j): coefficient}."""
        rows, cols = np.nonzero(self.coeffs)
        return {(int(i), int(j)): complex(self.coeffs[i, j]) for i, j in zip(rows, cols)}

    def __call__(self, x: Any, y: Any) -> Any:
        return self.evaluate(x, y)

    def evaluate(self, x: Any, y: Any) -> Any:
        return npoly.polyval2d(
            np.asarray(x, dtype=complex), np.asarray(y, dtype=complex), self.coeffs
        )

    def restrict(self, index: int, value: Scalar = 0.0) -> TruncatedSeries1:
        """One-variable series obtained by freezing variable `index` at `value`."""
        value = complex(value)
        powers = value ** np.arange(self.degree + 1)
        if index == 0:
            coeffs = powers @ self.coeffs
            radius = self.radii[1]
        else:
            coeffs = self.coeffs @ powers
            radius = self.radii[0]
        return TruncatedSeries1(coeffs, radius, self.tail)

    # reshaping

    def truncate(self, degree: int) -> "TruncatedSeries2":
        if degree >= self.degree:
            return self
        keep = self.coeffs[: degree + 1, : degree + 1] * _triangle(degree)
        idx = np.arange(self.degree + 1)
        weights = np.outer(self.radii[0] ** idx, self.radii[1] ** idx)
        dropped = ~_triangle(degree)
        big = np.zeros_like(self.coeffs, dtype=bool)
        big[: degree + 1, : degree + 1] = dropped
        big[degree + 1 :, :] = True
        big[:, degree + 1 :] = True
        extra = float(np.sum(np.abs(self.coeffs[big]) * weights[big]))
        return TruncatedSeries2(keep, self.radii, self.tail + extra)

    def extend(self, degree: int) -> "TruncatedSeries2":
        if degree <= self.degree:
            return self.truncate(degree)
        if not self.is_exact:
            raise PreconditionError("only exact polynomials can be extended", {"tail": self.tail})
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        c[: self.degree + 1, : self.degree + 1] = self.coeffs
        return TruncatedSeries2(c, self.radii, 0.0)

    def with_radii(self, radii: Tuple[float, float]) -> "TruncatedSeries2":
        return TruncatedSeries2(self.coeffs, radii, self.tail)

    def recenter(self, a: Scalar, b: Scalar) -> "TruncatedSeries2":
        """Exact Taylor re-expansion (x, y) -> (a + x, b + y) of the polynomial part."""
        bx = _binomial_shift(self.degree, complex(a))
        by = _binomial_shift(self.degree, complex(b))
        shifted = bx @ self.coeffs @ by.T
        shifted = shifted * _triangle(self.degree)
        radii = (
            max(self.radii[0] - abs(a), 1e-300),
            max(self.radii[1] - abs(b), 1e-300),
        )
        return TruncatedSeries2(shifted, radii, self.tail)

    def divide_by_variable(self, index: int) -> "TruncatedSeries2":
        """Exact division by x (index 0) or y (index 1); the result has degree D - 1."""
        if self.degree == 0:
            raise DegreeUnderflowError("cannot divide a degree-0 series by a variable")
        scale = max(self.magnitude(), 1e-300)
        edge = self.coeffs[0, :] if index == 0 else self.coeffs[:, 0]
        if np.max(np.abs(edge)) > config.get_rel_tol() * scale * 1e2:
            raise PreconditionError(
                "series is not divisible by the requested variable",
                {"variable": index, "residual": float(np.max(np.abs(edge)))},
            )
        d = self.degree - 1
        c = np.zeros((d + 1, d + 1), dtype=complex)
        if index == 0:
            c[:, :] = self.coeffs[1:, : d + 1]
        else:
            c[:, :] = self.coeffs[: d + 1, 1:]
        c = c * _triangle(d)
        r = self.radii[index]
        return TruncatedSeries2(c, self.radii, self.tail / r)

    # arithmetic

    def _coerce(self, other: Any) -> "TruncatedSeries2":
        if isinstance(other, TruncatedSeries2):
            return other
        if _is_scalar(other):
            return TruncatedSeries2.constant(complex(other), self.degree, self.radii)
        raise TypeError(f"cannot combine TruncatedSeries2 with {type(other).__name__}")

    def __add__(self, other: Any) -> "TruncatedSeries2":
        if not (_is_scalar(other) or isinstance(other, TruncatedSeries2)):
            return NotImplemented
        return series_arith(self, self._coerce(other), "add")

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries2":
        return TruncatedSeries2(-self.coeffs, self.radii, self.tail)

    def __sub__(self, other: Any) -> "TruncatedSeries2":
        if not (_is_scalar(other) or isinstance(other, TruncatedSeries2)):
            return NotImplemented
        return series_arith(self, -self._coerce(other), "add")

    def __rsub__(self, other: Any) -> "TruncatedSeries2":
        return (-self).__add__(other)

    def __mul__(self, other: Any) -> "TruncatedSeries2":
        if _is_scalar(other):
            value = complex(other)
            return TruncatedSeries2(self.coeffs * value, self.radii, _scaled(self.tail, abs(value)))
        if not isinstance(other, TruncatedSeries2):
            return NotImplemented
        return series_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "TruncatedSeries2":
        if not _is_scalar(other):
            return NotImplemented
        return self * (1.0 / complex(other))

    def __pow__(self, exponent: int) -> "TruncatedSeries2":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValidationError("series powers need a non-negative integer exponent")
        result = TruncatedSeries2.constant(1.0, self.degree, self.radii)
        for _ in range(exponent):
            result = result * self
        return result

    def derive(self, index: int = 0) -> "TruncatedSeries2":
        return series_arith(self, None, "derive", var=index)

    def to_json(self) -> Dict[str, Any]:
        coeffs = []
        for i in range(self.degree + 1):
            for j in range(self.degree + 1 - i):
                c = self.coeffs[i, j]
                coeffs.append([float(c.real), float(c.imag)])
        return {
            "vars": 2,
            "degree": self.degree,
            "radius": [self.radii[0], self.radii[1]],
            "tail": self.tail,
            "coeffs": coeffs,
        }


TruncatedSeries = Union[TruncatedSeries1, TruncatedSeries2]


def series_from_json(payload: Dict[str, Any]) -> TruncatedSeries:
    """
    Decode the shared series JSON object.

    Args:
        payload: {"vars", "degree", "radius", "tail", "coeffs"} mapping

    Returns:
        TruncatedSeries1 or TruncatedSeries2
    """
    try:
        nvars = int(payload["vars"])
        degree = int(payload["degree"])
        radius = [float(r) for r in payload.get("radius", [1.0] * nvars)]
        tail = float(payload.get("tail", 0.0))
        values = [complex(float(re), float(im)) for re, im in payload["coeffs"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed series payload: {e}") from e

    if nvars == 1:
        if len(values) != degree + 1:
            raise ValidationError(
                f"expected {degree + 1} coefficients, found {len(values)}"
            )
        return TruncatedSeries1(np.array(values), radius[0], tail)
    if nvars == 2:
        expected = (degree + 1) * (degree + 2) // 2
        if len(values) != expected:
            raise ValidationError(f"expected {expected} coefficients, found {len(values)}")
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        it = iter(values)
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                c[i, j] = next(it)
        r2 = radius[1] if len(radius) > 1 else radius[0]
        return TruncatedSeries2(c, (radius[0], r2), tail)
    raise ValidationError(f"unsupported variable count {nvars}")


# operations


def _product_1(a: TruncatedSeries1, b: TruncatedSeries1) -> TruncatedSeries1:
    degree = min(a.degree, b.degree)
    radius = min(a.radius, b.radius)
    full = np.convolve(a.coeffs, b.coeffs)
    powers = radius ** np.arange(full.size)
    dropped = float(np.sum(np.abs(full[degree + 1 :]) * powers[degree + 1 :]))
    sup_a = a.polynomial_sup(radius)
    sup_b = b.polynomial_sup(radius)
    cross = _scaled(a.tail, sup_b) + _scaled(b.tail, sup_a) + _scaled(a.tail, b.tail)
    return TruncatedSeries1(full[: degree + 1], radius, dropped + cross)


def _product_2(a: TruncatedSeries2, b: TruncatedSeries2) -> TruncatedSeries2:
    degree = min(a.degree, b.degree)
    radii = (min(a.radii[0], b.radii[0]), min(a.radii[1], b.radii[1]))
    size = a.degree + b.degree + 1
    full = np.zeros((size, size), dtype=complex)
    db = b.degree + 1
    for (i, j), value in a.terms().items():
        full[i : i + db, j : j + db] += value * b.coeffs
    idx = np.arange(size)
    weights = np.outer(radii[0] ** idx, radii[1] ** idx)
    keep_mask = np.zeros((size, size), dtype=bool)
    keep_mask[: degree + 1, : degree + 1] = _triangle(degree)
    dropped = float(np.sum(np.abs(full[~keep_mask]) * weights[~keep_mask]))
    sup_a = a.polynomial_sup(radii)
    sup_b = b.polynomial_sup(radii)
    cross = _scaled(a.tail, sup_b) + _scaled(b.tail, sup_a) + _scaled(a.tail, b.tail)
    kept = full[: degree + 1, : degree + 1] * _triangle(degree)
    return TruncatedSeries2(kept, radii, dropped + cross)


def series_arith(
    a: TruncatedSeries, b: Optional[TruncatedSeries], kind: str, var: int = 0
) -> TruncatedSeries:
    """
    Add, multiply or differentiate truncated series.

    Args:
        a: First operand
        b: Second operand (ignored for "derive")
        kind: "add", "mul" or "derive"
        var: Variable index for two-variable derivatives

    Returns:
        Result truncated to min(D_a, D_b) (derive: D_a - 1)
    """
    if kind == "derive":
        if a.degree == 0:
            raise DegreeUnderflowError("cannot differentiate a degree-0 series")
        if isinstance(a, TruncatedSeries1):
            c = a.coeffs[1:] * np.arange(1, a.degree + 1)
            if a.is_exact:
                return TruncatedSeries1(c, a.radius, 0.0)
            # Cauchy estimate on the half disk
            return TruncatedSeries1(c, a.radius / 2.0, 2.0 * a.tail / a.radius)
        d = a.degree - 1
        c = np.zeros((d + 1, d + 1), dtype=complex)
        idx = np.arange(1, a.degree + 1)
        if var == 0:
            c[:, :] = (a.coeffs[1:, :] * idx[:, None])[:, : d + 1]
        else:
            c[:, :] = (a.coeffs[:, 1:] * idx[None, :])[: d + 1, :]
        c = c * _triangle(d)
        if a.is_exact:
            return TruncatedSeries2(c, a.radii, 0.0)
        radii = list(a.radii)
        radii[var] /= 2.0
        return TruncatedSeries2(c, (radii[0], radii[1]), 2.0 * a.tail / a.radii[var])

    if b is None or a.nvars != b.nvars:
        raise ValidationError("series operands must have the same number of variables")

    if kind == "add":
        degree = min(a.degree, b.degree)
        if isinstance(a, TruncatedSeries1):
            radius = min(a.radius, b.radius)  # type: ignore[union-attr]
            ta = a.with_radius(radius).truncate(degree)
            tb = b.with_radius(radius).truncate(degree)  # type: ignore[union-attr]
            return TruncatedSeries1(ta.coeffs + tb.coeffs, radius, ta.tail + tb.tail)
        radii = (min(a.radii[0], b.radii[0]), min(a.radii[1], b.radii[1]))  # type: ignore[union-attr]
        ta2 = a.with_radii(radii).truncate(degree)  # type: ignore[union-attr]
        tb2 = b.with_radii(radii).truncate(degree)  # type: ignore[union-attr]
        return TruncatedSeries2(ta2.coeffs + tb2.coeffs, radii, ta2.tail + tb2.tail)

    if kind == "mul":
        if isinstance(a, TruncatedSeries1):
            return _product_1(a, b)  # type: ignore[arg-type]
        return _product_2(a, b)  # type: ignore[arg-type]

    raise ValidationError(f"unknown series operation: {kind}")


def _horner(coeffs: Sequence[complex], inner: Any, one: Any) -> Any:
    result = one * coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * inner + c
    return result


def compose1(outer: TruncatedSeries1, inner: TruncatedSeries1) -> TruncatedSeries1:
    """
    Compose outer(inner(t)).

    The result has degree D_outer when `inner` is an exact polynomial and
    min(D_outer, D_inner) otherwise. When the image of the inner disk does
    not fit in the outer disk the validity radius is shrunk.

    Raises:
        DomainViolationError: inner(0) plus the inner tail already leaves the
            outer disk.
    """
    degree = outer.degree if inner.is_exact else min(outer.degree, inner.degree)
    inner = inner.extend(degree) if inner.degree < degree else inner.truncate(degree)

    c0 = abs(inner.coeffs[0])
    if c0 + inner.tail >= outer.radius:
        raise DomainViolationError(
            "inner series starts outside the outer validity disk",
            {"inner_at_zero": c0, "inner_tail": inner.tail, "outer_radius": outer.radius},
        )
    abs_c = np.abs(inner.coeffs[1:])

    def growth(r: float) -> float:
        return c0 + float(np.sum(abs_c * r ** np.arange(1, inner.degree + 1))) + inner.tail

    radius = inner.radius
    if growth(radius) > outer.radius:
        lo, hi = 0.0, radius
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if growth(mid) <= outer.radius:
                lo = mid
            else:
                hi = mid
        if lo <= 0.0:
            raise DomainViolationError(
                "inner series leaves the outer validity disk",
                {"outer_radius": outer.radius},
            )
        logger.debug(f"compose1 shrinks validity radius {radius:g} -> {lo:g}")
        radius = lo
    inner = inner.with_radius(radius)

    one = TruncatedSeries1.constant(1.0, degree, radius)
    result = _horner(list(outer.coeffs), inner, one)
    return TruncatedSeries1(result.coeffs, radius, result.tail + outer.tail)


def reversion(f: TruncatedSeries1) -> TruncatedSeries1:
    """
    Compositional inverse g with f(g(t)) = t through degree D.

    Raises:
        PreconditionError: f(0) != 0
        NonInvertibleGermError: |f'(0)| below tolerance
    """
    tol = config.get_rel_tol()
    scale = max(f.magnitude(), 1e-300)
    if abs(f.coeffs[0]) > tol * scale:
        raise PreconditionError("reversion needs f(0) = 0", {"f0": complex(f.coeffs[0])})
    if f.degree < 1 or abs(f.coeffs[1]) <= tol * scale:
        raise NonInvertibleGermError(
            "germ is not invertible: vanishing linear coefficient",
            {"f1": complex(f.coeffs[1]) if f.degree >= 1 else 0j},
        )
    a1 = complex(f.coeffs[1])
    degree = f.degree
    fp = TruncatedSeries1(np.concatenate([[0j], f.coeffs[1:]]), f.radius, 0.0)
    g = np.zeros(degree + 1, dtype=complex)
    g[1] = 1.0 / a1
    radius = 0.5 * min(1.0, abs(a1)) * f.radius
    for j in range(2, degree + 1):
        trial = TruncatedSeries1(g, radius, 0.0)
        composed = _horner(list(fp.coeffs), trial, TruncatedSeries1.constant(1.0, degree, radius))
        g[j] = -composed.coeffs[j] / a1
    result = TruncatedSeries1(g, radius, 0.0)

    # tail from the sampled defect of f(g(t)) = t on the circle of validity
    theta = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    t = radius * np.exp(1j * theta)
    defect = np.max(np.abs(f.evaluate(result.evaluate(t)) - t))
    return TruncatedSeries1(g, radius, float(defect) / abs(a1) + f.tail / abs(a1))


def solve_homological(
    rhs: TruncatedSeries2,
    eigen_factor: Callable[[int, int], complex],
    floor: float = 1e-9,
) -> TruncatedSeries2:
    """
    Per-monomial division w_ij = rhs_ij / eigen_factor(i, j).

    Args:
        rhs: Right-hand side
        eigen_factor: Divisor for each monomial present in rhs
        floor: Small-divisor floor

    Raises:
        SmallDivisorError: some present monomial has |divisor| <= floor;
            the offending (i, j) is reported
    """
    scale = rhs.magnitude()
    tol = config.get_rel_tol() * scale
    out = np.zeros_like(rhs.coeffs)
    worst = math.inf
    for (i, j), value in rhs.terms().items():
        if abs(value) <= tol:
            continue
        divisor = complex(eigen_factor(i, j))
        if abs(divisor) <= floor:
            raise SmallDivisorError(
                f"small divisor at monomial ({i}, {j})",
                {"monomial": (i, j), "divisor": divisor},
            )
        worst = min(worst, abs(divisor))
        out[i, j] = value / divisor
    tail = rhs.tail / worst if math.isfinite(worst) else rhs.tail
    return TruncatedSeries2(out, rhs.radii, tail)


def substitute(
    f: TruncatedSeries2,
    p: Any,
    q: Any,
    degree: Optional[int] = None,
) -> Any:
    """
    Evaluate a two-variable series on series arguments, f(p, q).

    `p` and `q` are both TruncatedSeries1 (result TruncatedSeries1) or both
    TruncatedSeries2 (result TruncatedSeries2). Exact arguments are padded
    to `degree` (default: the largest argument degree when both are exact,
    the smallest otherwise).
    """
    if degree is None:
        if p.is_exact and q.is_exact:
            degree = max(p.degree, q.degree)
        else:
            degree = min(p.degree, q.degree)
    p = p.extend(degree) if p.degree < degree else p.truncate(degree)
    q = q.extend(degree) if q.degree < degree else q.truncate(degree)

    if isinstance(p, TruncatedSeries1):
        radius = min(p.radius, q.radius)
        p, q = p.with_radius(radius), q.with_radius(radius)
        one: Any = TruncatedSeries1.constant(1.0, degree, radius)
    else:
        radii = (min(p.radii[0], q.radii[0]), min(p.radii[1], q.radii[1]))
        p, q = p.with_radii(radii), q.with_radii(radii)
        one = TruncatedSeries2.constant(1.0, degree, radii)

    result = one * 0.0
    p_power = one
    for i in range(f.degree + 1):
        row = [complex(c) for c in f.coeffs[i, : f.degree + 1 - i]]
        if any(row):
            result = result + p_power * _horner(row, q, one)
        if i < f.degree:
            p_power = p_power * p
    if f.tail:
        if isinstance(result, TruncatedSeries1):
            result = TruncatedSeries1(result.coeffs, result.radius, result.tail + f.tail)
        else:
            result = TruncatedSeries2(result.coeffs, result.radii, result.tail + f.tail)
    return result


def compose2(
    f: TruncatedSeries2, p: TruncatedSeries2, q: TruncatedSeries2, degree: Optional[int] = None
) -> TruncatedSeries2:
    """f(p(x, y), q(x, y)) for two-variable series."""
    return substitute(f, p, q, degree)


def linear_part(pair: Tuple[TruncatedSeries2, TruncatedSeries2]) -> np.ndarray:
    """Jacobian matrix at the origin of a pair of two-variable series."""
    f1, f2 = pair
    return np.array(
        [[f1.coefficient(1, 0), f1.coefficient(0, 1)], [f2.coefficient(1, 0), f2.coefficient(0, 1)]],
        dtype=complex,
    )


def invert_map(
    pair: Tuple[TruncatedSeries2, TruncatedSeries2],
) -> Tuple[TruncatedSeries2, TruncatedSeries2]:
    """
    Inverse germ of a map fixing the origin with invertible linear part.

    Each fixed-point sweep G <- L^{-1}(id - N(G)) gains one order.
    """
    f1, f2 = pair
    degree = min(f1.degree, f2.degree)
    lin = linear_part(pair)
    if abs(np.linalg.det(lin)) <= config.get_rel_tol():
        raise NonInvertibleGermError("linear part is singular", {"det": complex(np.linalg.det(lin))})
    if abs(f1.coefficient(0, 0)) > 0 or abs(f2.coefficient(0, 0)) > 0:
        raise PreconditionError("map must fix the origin")
    inv = np.linalg.inv(lin)
    radii = f1.radii
    x = TruncatedSeries2.variable(0, degree, radii)
    y = TruncatedSeries2.variable(1, degree, radii)

    def nonlinear(s: TruncatedSeries2) -> TruncatedSeries2:
        c = s.coeffs.copy()
        c[0, 0] = 0.0
        c[1, 0] = 0.0
        c[0, 1] = 0.0
        return TruncatedSeries2(c, s.radii, s.tail)

    n1, n2 = nonlinear(f1), nonlinear(f2)
    g1 = x * inv[0, 0] + y * inv[0, 1]
    g2 = x * inv[1, 0] + y * inv[1, 1]
    for _ in range(degree):
        r1 = x - compose2(n1, g1, g2, degree)
        r2 = y - compose2(n2, g1, g2, degree)
        g1 = r1 * inv[0, 0] + r2 * inv[0, 1]
        g2 = r1 * inv[1, 0] + r2 * inv[1, 1]
    return g1, g2


def ensure_series_pair(
    pair: Sequence[TruncatedSeries2],
) -> Tuple[TruncatedSeries2, TruncatedSeries2]:
    if len(pair) != 2 or not all(isinstance(s, TruncatedSeries2) for s in pair):
        raise ValidationError("a local map is a pair of two-variable series")
    return pair[0], pair[1]
