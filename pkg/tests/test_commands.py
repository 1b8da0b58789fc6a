"""
Tests for the scenario command registry and parameter helpers.
"""

import numpy as np
import pytest

from tangency_lab.commands import COMMANDS, get_command
from tangency_lab.commands.base_command import (
    as_complex,
    as_point,
    parse_range,
    polynomial_terms,
    positive,
    real_axis,
)
from tangency_lab.commands.germ_commands import germ_from_expression, oracle_expressions
from tangency_lab.core.errors import ScenarioParseError, ValidationError
from tangency_lab.core.scenario_engine import build_scenario


class TestRegistry:
    """Test command lookup."""

    @pytest.mark.parametrize("name", ["germ classify", "germ-classify", "germ_classify", "germ  classify"])
    def test_name_spellings(self, name):
        assert get_command(name) is COMMANDS["germ classify"]

    def test_germ_suite_keeps_its_hyphen(self):
        assert get_command("germ-suite").name == "germ-suite"

    def test_unknown_command(self):
        with pytest.raises(ValidationError) as exc:
            get_command("scan everything")

        assert "scan scaling" in exc.value.details["known"]


class TestParameterHelpers:
    """Test scenario parameter conversion."""

    def test_ranges(self):
        assert parse_range("5..8") == [5, 6, 7, 8]
        assert parse_range([5, 9]) == [5, 9]
        assert parse_range(3) == [3]

    @pytest.mark.parametrize("text", ["5-8", "8..5", "a..b"])
    def test_malformed_ranges(self, text):
        with pytest.raises(ScenarioParseError):
            parse_range(text)

    def test_complex_values(self):
        assert as_complex([1.0, -2.0]) == 1 - 2j
        assert as_complex("0.5 + 1j") == 0.5 + 1j
        assert as_point([0.5, [0.0, 1.0]]) == (0.5, 1j)

    def test_bad_complex_value(self):
        with pytest.raises(ScenarioParseError):
            as_complex([1.0, 2.0, 3.0])

    def test_real_axis(self):
        assert np.allclose(real_axis([-8, -6, 3], "c"), [-8.0, -7.0, -6.0])

    def test_positive(self):
        with pytest.raises(ValidationError):
            positive(0, "radius")


class TestGermExpressions:
    """Test germs written as polynomial expressions."""

    def test_polynomial_terms(self):
        terms = polynomial_terms("t**3 + 2*lam*t - lam**2", ("lam", "t"))

        assert terms == {(0, 3): 1, (1, 1): 2, (2, 0): -1}

    def test_unknown_symbol(self):
        with pytest.raises(ScenarioParseError):
            polynomial_terms("t**2 + mu", ("lam", "t"))

    def test_germ_from_expression(self):
        germ = germ_from_expression("t**3 + lam**2", degree=6)

        assert germ.h == 2

    def test_oracle_expressions(self):
        assert oracle_expressions(1, 2) == ["t**2 + lam**1", "t**2 + lam**2"]

    def test_classify_needs_a_source(self, tmp_path):
        scenario = build_scenario("germ classify", {}, output_dir=tmp_path)

        with pytest.raises(ScenarioParseError):
            get_command("germ classify").items(scenario)
