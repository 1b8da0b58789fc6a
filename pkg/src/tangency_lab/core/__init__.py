"""Core models, errors, scenario engine and artifact writers for tangency-lab."""

from .errors import LabError, NumericalError, ScenarioParseError, ValidationError

__all__ = [
    "LabError",
    "NumericalError",
    "ScenarioParseError",
    "ValidationError",
]
