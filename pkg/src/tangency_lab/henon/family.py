"""
Parametric families of Hénon compositions and synthetic local germs.

Coefficients are polynomials in the parameters. Hénon families come from
sympy expressions (so parameter derivatives are exact); synthetic families
are sums of lambda-monomials times two-variable series.
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..core.errors import ScenarioParseError, ValidationError
from ..series.truncated import TruncatedSeries2, series_from_json
from .local import LocalMap
from .maps import HenonFactor, PolynomialAutomorphism

logger = logging.getLogger(__name__)

Box = Dict[str, Tuple[Tuple[float, float], Tuple[float, float]]]
Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class FactorTemplate:
    """A Hénon factor whose coefficients are polynomial expressions in the parameters."""

    jacobian: sympy.Expr
    polynomial: Tuple[sympy.Expr, ...]


@dataclass(frozen=True)
class SyntheticTemplate:
    """
    Germ components F_k(lambda; x, y) = sum_p lambda^p S_{k,p}(x, y).

    Each component maps a parameter multi-index to a two-variable series.
    """

    x_terms: Dict[Monomial, TruncatedSeries2]
    y_terms: Dict[Monomial, TruncatedSeries2]


@dataclass(frozen=True)
class FamilyJet:
    """
    A family member with its coefficient-wise parameter derivatives.

    For Hénon families `partials[k][i]` is (dP coefficients, da) of factor i
    with respect to parameter k; for synthetic families it is the pair of
    derivative series (dF1, dF2).
    """

    map: Union[PolynomialAutomorphism, LocalMap]
    parameter: Tuple[complex, ...]
    partials: List[Any] = field(default_factory=list)

    def parameter_derivative(self, point: Sequence[complex]) -> np.ndarray:
        """
        Derivative of lambda -> f_lambda(point), one row per parameter.
        """
        rows = []
        for partial in self.partials:
            if isinstance(self.map, LocalMap):
                d1, d2 = partial
                rows.append([complex(d1(point[0], point[1])), complex(d2(point[0], point[1]))])
                continue
            z, w = complex(point[0]), complex(point[1])
            dz, dw = 0j, 0j
            for factor, (dp, da) in zip(reversed(self.map.factors), reversed(partial)):
                new_dz = (
                    da * w
                    + factor.a * dw
                    + complex(np.polynomial.polynomial.polyval(z, dp))
                    + factor.poly_derivative(z) * dz
                )
                z, w = factor.forward(z, w)
                dz, dw = new_dz, dz
            rows.append([dz, dw])
        return np.array(rows, dtype=complex)


@dataclass(frozen=True)
class ParametricFamily:
    """
    A family lambda -> f_lambda with lambda in C^dim, dim in {1, 2}.
    """

    name: str
    parameters: Tuple[str, ...]
    box: Box
    factors: Tuple[FactorTemplate, ...] = ()
    synthetic: Optional[SyntheticTemplate] = None

    def __post_init__(self) -> None:
        if len(self.parameters) not in (1, 2):
            raise ValidationError(f"families have 1 or 2 parameters, got {len(self.parameters)}")
        if bool(self.factors) == (self.synthetic is not None):
            raise ValidationError("a family is either a Hénon composition or a synthetic germ")
        missing = [p for p in self.parameters if p not in self.box]
        if missing:
            raise ValidationError(f"parameter box missing for {missing}")

    @property
    def dim(self) -> int:
        return len(self.parameters)

    @property
    def is_synthetic(self) -> bool:
        return self.synthetic is not None

    @property
    def symbols(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(p) for p in self.parameters)

    def check_box(self, lam: Sequence[complex]) -> Tuple[complex, ...]:
        values = tuple(complex(v) for v in lam)
        if len(values) != self.dim:
            raise ValidationError(f"expected {self.dim} parameter values, got {len(values)}")
        for name, value in zip(self.parameters, values):
            (re_lo, re_hi), (im_lo, im_hi) = self.box[name]
            slack = 1e-12
            inside_re = re_lo - slack <= value.real <= re_hi + slack
            if not (inside_re and im_lo - slack <= value.imag <= im_hi + slack):
                raise ValidationError(
                    f"parameter {name} = {value} outside the declared box",
                    {"parameter": name, "value": value},
                )
        return values

    def at(self, lam: Sequence[complex]) -> Union[PolynomialAutomorphism, LocalMap]:
        return family_eval(self, lam, 0).map


def _evaluate(expr: sympy.Expr, symbols: Sequence[sympy.Symbol], values: Sequence[complex]) -> complex:
    return complex(expr.subs(dict(zip(symbols, values))).evalf())


def _monomial_value(power: Monomial, values: Sequence[complex]) -> complex:
    out = 1.0 + 0j
    for p, v in zip(power, values):
        out *= v**p
    return out


def _monomial_partial(power: Monomial, values: Sequence[complex], k: int) -> complex:
    if power[k] == 0:
        return 0j
    shifted = list(power)
    shifted[k] -= 1
    return power[k] * _monomial_value(tuple(shifted), values)


def _sum_terms(
    terms: Dict[Monomial, TruncatedSeries2], weight: Callable[[Monomial], complex]
) -> TruncatedSeries2:
    items = list(terms.items())
    total = items[0][1] * weight(items[0][0])
    for power, series in items[1:]:
        total = total + series * weight(power)
    return total


def family_eval(
    family: ParametricFamily, lam: Sequence[complex], jet_order: int = 0
) -> FamilyJet:
    """
    Evaluate a family member, optionally with exact parameter derivatives.

    Args:
        family: The family
        lam: Parameter value in C^dim
        jet_order: 0 for the map only, 1 to add coefficient-wise derivatives

    Raises:
        ValidationError: lambda outside the declared box
    """
    if jet_order not in (0, 1):
        raise ValidationError(f"jet order must be 0 or 1, got {jet_order}")
    values = family.check_box(lam)
    symbols = family.symbols

    if family.synthetic is not None:
        syn = family.synthetic
        f1 = _sum_terms(syn.x_terms, lambda p: _monomial_value(p, values))
        f2 = _sum_terms(syn.y_terms, lambda p: _monomial_value(p, values))
        germ = LocalMap(f1, f2, name=family.name)
        partials: List[Any] = []
        if jet_order == 1:
            for k in range(family.dim):
                partials.append(
                    (
                        _sum_terms(syn.x_terms, lambda p, k=k: _monomial_partial(p, values, k)),
                        _sum_terms(syn.y_terms, lambda p, k=k: _monomial_partial(p, values, k)),
                    )
                )
        return FamilyJet(germ, values, partials)

    factors = []
    for template in family.factors:
        coeffs = np.array([_evaluate(e, symbols, values) for e in template.polynomial])
        factors.append(HenonFactor(coeffs, _evaluate(template.jacobian, symbols, values)))
    automorphism = PolynomialAutomorphism(tuple(factors))
    partials = []
    if jet_order == 1:
        for sym in symbols:
            per_factor = []
            for template in family.factors:
                dp = np.array(
                    [_evaluate(sympy.diff(e, sym), symbols, values) for e in template.polynomial]
                )
                da = _evaluate(sympy.diff(template.jacobian, sym), symbols, values)
                per_factor.append((dp, da))
            partials.append(per_factor)
    return FamilyJet(automorphism, values, partials)


def member_factory(
    family: ParametricFamily,
) -> Callable[[Sequence[complex]], Union[PolynomialAutomorphism, LocalMap]]:
    """
    A fast lambda -> f_lambda for repeated evaluation (continuation, grids).

    Hénon coefficient expressions are compiled once with sympy.lambdify; the
    parameter box is not checked.
    """
    if family.synthetic is not None:
        return lambda lam: family_eval(family, lam, 0).map

    compiled = [
        sympy.lambdify(family.symbols, [t.jacobian, *t.polynomial], modules="numpy")
        for t in family.factors
    ]

    def member(lam: Sequence[complex]) -> PolynomialAutomorphism:
        values = [complex(v) for v in lam]
        factors = []
        for fn in compiled:
            jac, *coeffs = (complex(v) for v in fn(*values))
            factors.append(HenonFactor(np.array(coeffs, dtype=complex), jac))
        return PolynomialAutomorphism(tuple(factors))

    return member


# constructors


def _default_box(names: Sequence[str], bound: float = 10.0) -> Box:
    return {n: ((-bound, bound), (-bound, bound)) for n in names}


def quadratic_henon_family(box: Optional[Box] = None) -> ParametricFamily:
    """The family f_{a,c}(z, w) = (z^2 + c + a w, z) over lambda = (a, c)."""
    a, c = sympy.symbols("a c")
    template = FactorTemplate(a, (c, sympy.Integer(0), sympy.Integer(1)))
    return ParametricFamily(
        name="quadratic-henon",
        parameters=("a", "c"),
        box=box or _default_box(("a", "c")),
        factors=(template,),
    )


def synthetic_family(
    name: str,
    x_terms: Dict[Monomial, TruncatedSeries2],
    y_terms: Dict[Monomial, TruncatedSeries2],
    parameters: Sequence[str] = ("lam",),
    box: Optional[Box] = None,
) -> ParametricFamily:
    """A synthetic germ family; every component must fix the origin."""
    for terms in (x_terms, y_terms):
        for power, series in terms.items():
            if len(power) != len(parameters):
                raise ValidationError(f"monomial {power} does not match {len(parameters)} parameters")
            if series.coefficient(0, 0) != 0:
                raise ValidationError("synthetic families must fix the origin for all parameters")
    return ParametricFamily(
        name=name,
        parameters=tuple(parameters),
        box=box or _default_box(parameters, 1.0),
        synthetic=SyntheticTemplate(dict(x_terms), dict(y_terms)),
    )


def linear_family(
    u_terms: Dict[int, complex], s_terms: Dict[int, complex], bound: float = 1.0
) -> ParametricFamily:
    """diag(u(lambda), s(lambda)) with u, s polynomial in one parameter."""
    x_terms = {(p,): TruncatedSeries2.from_terms({(1, 0): v}, 1) for p, v in u_terms.items()}
    y_terms = {(p,): TruncatedSeries2.from_terms({(0, 1): v}, 1) for p, v in s_terms.items()}
    return synthetic_family(
        "linear", x_terms, y_terms, ("lam",), {"lam": ((-bound, bound), (-bound, bound))}
    )


# family files


def _parse_expr(text: Any, symbols: Dict[str, sympy.Symbol], where: str) -> sympy.Expr:
    try:
        expr = sympy.sympify(str(text), locals=symbols)
        if expr.free_symbols - set(symbols.values()):
            raise ScenarioParseError(f"{where}: unknown symbols {expr.free_symbols - set(symbols.values())}")
        if symbols:
            sympy.Poly(expr, *symbols.values())
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
        raise ScenarioParseError(f"{where}: not a polynomial expression: {text!r}") from e
    return expr


def _parse_box(raw: Dict[str, Any], names: Sequence[str]) -> Box:
    box: Box = {}
    for name in names:
        entry = raw.get(name)
        if entry is None:
            raise ScenarioParseError(f"[box] has no entry for parameter {name}")
        try:
            re = (float(entry["re"][0]), float(entry["re"][1]))
            im = (float(entry.get("im", [0.0, 0.0])[0]), float(entry.get("im", [0.0, 0.0])[1]))
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise ScenarioParseError(f"[box] entry for {name} is malformed") from e
        box[name] = (re, im)
    return box


def family_from_dict(data: Dict[str, Any]) -> ParametricFamily:
    """Build a family from the parsed TOML mapping."""
    try:
        name = str(data.get("name", "family"))
        names = [str(p) for p in data["parameters"]]
    except (KeyError, TypeError) as e:
        raise ScenarioParseError("family needs a 'parameters' list") from e
    symbols = {n: sympy.Symbol(n) for n in names}
    box = _parse_box(data.get("box", {}), names)

    if "synthetic" in data:
        block = data["synthetic"]
        components = []
        for key in ("x", "y"):
            terms: Dict[Monomial, TruncatedSeries2] = {}
            for item in block.get(key, []):
                power = item.get("power", [0] * len(names))
                power = tuple(int(p) for p in (power if isinstance(power, list) else [power]))
                series = series_from_json(item["series"])
                if not isinstance(series, TruncatedSeries2):
                    raise ScenarioParseError("synthetic components must be two-variable series")
                terms[power] = terms[power] + series if power in terms else series
            if not terms:
                raise ScenarioParseError(f"[synthetic] has no '{key}' terms")
            components.append(terms)
        return synthetic_family(name, components[0], components[1], names, box)

    factors = []
    for i, raw in enumerate(data.get("factors", [])):
        where = f"factor {i}"
        if "polynomial" not in raw or "jacobian" not in raw:
            raise ScenarioParseError(f"{where} needs 'polynomial' and 'jacobian'")
        poly = tuple(_parse_expr(c, symbols, where) for c in raw["polynomial"])
        factors.append(FactorTemplate(_parse_expr(raw["jacobian"], symbols, where), poly))
    if not factors:
        raise ScenarioParseError("family file defines neither factors nor a synthetic block")
    return ParametricFamily(name=name, parameters=tuple(names), box=box, factors=tuple(factors))


def load_family(path: Path) -> ParametricFamily:
    """
    Read a family definition file.

    Raises:
        ScenarioParseError: unreadable TOML or malformed definitions
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ScenarioParseError(f"cannot read family file {path}: {e}") from e
    family = family_from_dict(data)
    logger.info(f"Loaded family '{family.name}' with parameters {family.parameters}")
    return family
