"""
Tests for the tangency-lab command line.
"""

import json

import click
import pytest
from click.testing import CliRunner

from tangency_lab.cli import collect_params, main, parse_value


class TestParameterParsing:
    """Test option values parsed as TOML."""

    def test_toml_values(self):
        assert parse_value("[0.1, -6]") == [0.1, -6]
        assert parse_value("true") is True
        assert parse_value('"t**2 + lam"') == "t**2 + lam"

    def test_raw_text_fallback(self):
        assert parse_value("5..25") == "5..25"

    def test_pairs_override_named_options(self):
        params = collect_params(("k=6", "tol = 1e-8"), k="4", u="2.0", s=None)

        assert params == {"k": 6, "u": 2.0, "tol": 1e-8}

    def test_pair_without_equals(self):
        with pytest.raises(click.BadParameter):
            collect_params(("k6",))


class TestCommands:
    """Test the command line end to end."""

    def setup_method(self):
        self.runner = CliRunner()

    def test_suites_listing(self):
        result = self.runner.invoke(main, ["suites"])

        assert result.exit_code == 0
        assert "scaling-laws" in result.output
        assert "germ classify" in result.output

    def test_unknown_suite(self):
        result = self.runner.invoke(main, ["verify", "moduli"])

        assert result.exit_code == 3

    def test_resonance_suite_as_json(self):
        result = self.runner.invoke(main, ["verify", "resonance", "--json"])

        assert result.exit_code == 0
        lines = [json.loads(line) for line in result.output.splitlines() if line.startswith("{")]
        assert [line["suite"] for line in lines] == ["resonance"] * 3
        assert all(line["passed"] for line in lines)

    def test_non_positive_tolerance(self):
        result = self.runner.invoke(main, ["--tol", "0", "suites"])

        assert result.exit_code == 2

    def test_germ_classify(self, tmp_path):
        result = self.runner.invoke(main, ["--out", str(tmp_path), "germ", "classify", "t**2 + lam"])

        assert result.exit_code == 0
        record = json.loads((tmp_path / "record.json").read_text())
        assert (record["h"], record["m"]) == (1, 1)
        assert record["blocks"] == [[1, "1/1"]]
        assert record["quadratic_positive_speed"] is True
        assert (tmp_path / "manifest.json").exists()

    def test_persistent_tangency_exit_code(self, tmp_path):
        result = self.runner.invoke(main, ["--out", str(tmp_path), "germ", "classify", "t**2"])

        assert result.exit_code == 4
        assert "PersistentTangencyError" in result.output

    def test_germ_classify_needs_input(self):
        result = self.runner.invoke(main, ["germ", "classify"])

        assert result.exit_code == 2

    def test_saddle_resonance(self, tmp_path):
        args = ["--out", str(tmp_path), "saddle", "resonance", "--u", "2", "--s", "0.5", "--k", "4"]
        result = self.runner.invoke(main, args)

        assert result.exit_code == 0
        stored = json.loads((tmp_path / "resonances.json").read_text())
        assert stored["pairs"] == [[1, 1], [2, 2]]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "saddle resonance"

    def test_run_scenario_file(self, tmp_path):
        scenario = tmp_path / "resonance.toml"
        scenario.write_text('command = "saddle resonance"\n[params]\nu = 4.0\ns = 0.5\nk = 6\n')
        args = ["--out", str(tmp_path / "out"), "--seed", "9", "run", str(scenario)]
        result = self.runner.invoke(main, args)

        assert result.exit_code == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["seed"] == 9
        stored = json.loads((tmp_path / "out" / "resonances.json").read_text())
        assert stored["pairs"] == [[1, 2], [2, 4]]

    def test_malformed_scenario_file(self, tmp_path):
        scenario = tmp_path / "bad.toml"
        scenario.write_text('command = "saddle resonance"\nspeed = 3\n')
        result = self.runner.invoke(main, ["run", str(scenario)])

        assert result.exit_code == 2
