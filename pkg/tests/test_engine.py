"""
Tests for scenario loading and the scenario engine.
"""

import json
import logging
from unittest.mock import patch

import pytest

from tangency_lab.commands import WorkItem
from tangency_lab.commands.saddle_commands import SaddleResonanceCommand
from tangency_lab.core.errors import PersistentTangencyError, ScenarioParseError, ValidationError
from tangency_lab.core.scenario_engine import ScenarioEngine, build_scenario, load_scenario

RESONANCE_SCENARIO = """
command = "saddle resonance"
seed = 5

[params]
u = 2.0
s = 0.5
k = 4
"""


def _persistent() -> None:
    raise PersistentTangencyError("phi vanishes identically in lambda")


def _warn() -> str:
    logging.getLogger("tangency_lab.scan").warning("window holds two tangencies")
    return "done"


def _draw(rng):
    return float(rng.random())


class TestScenarioLoading:
    """Test scenario files and their validation."""

    def test_load_resonance_scenario(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text(RESONANCE_SCENARIO)
        scenario = load_scenario(path, out=tmp_path / "out")

        assert scenario.command == "saddle resonance"
        assert scenario.seed == 5
        assert scenario.params == {"u": 2.0, "s": 0.5, "k": 4}
        assert scenario.output_dir == tmp_path / "out"

    def test_command_line_overrides_file(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text(RESONANCE_SCENARIO)
        scenario = load_scenario(path, seed=11, tol=1e-8, out=tmp_path)

        assert scenario.seed == 11
        assert scenario.tol == 1e-8

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text(RESONANCE_SCENARIO + '\ncolour = "blue"\n')

        with pytest.raises(ScenarioParseError):
            load_scenario(path)

    def test_missing_command(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text("seed = 1\n")

        with pytest.raises(ScenarioParseError):
            load_scenario(path)

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text("command = \n")

        with pytest.raises(ScenarioParseError):
            load_scenario(path)

    def test_family_resolves_next_to_scenario(self, tmp_path):
        (tmp_path / "family.toml").write_text("")
        path = tmp_path / "scenario.toml"
        path.write_text('command = "scan moduli"\nfamily = "family.toml"\n')

        assert load_scenario(path).family == tmp_path / "family.toml"

    def test_missing_family_file(self, tmp_path):
        with pytest.raises(ValidationError) as exc:
            build_scenario("scan moduli", family=tmp_path / "absent.toml")

        assert exc.value.exit_code == 3

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValidationError):
            build_scenario("saddle resonance", tol=-1.0)


class TestScenarioEngine:
    """Test running scenarios end to end."""

    @pytest.mark.asyncio
    async def test_resonance_run(self, tmp_path):
        scenario = build_scenario(
            "saddle resonance", {"u": 2.0, "s": 0.5, "k": 4}, output_dir=tmp_path, seed=3
        )
        result = await ScenarioEngine(threads=2).run(scenario, timestamp=False)

        assert result.exit_code == 0
        assert [e.path for e in result.manifest.entries] == ["resonances.json"]
        assert result.manifest.settings["tol"] == scenario.tol
        stored = json.loads((tmp_path / "resonances.json").read_text())
        assert stored["pairs"] == [[1, 1], [2, 2]]
        assert stored["regularity_order"] == 4

    @pytest.mark.asyncio
    async def test_failed_item_sets_exit_code(self, tmp_path):
        scenario = build_scenario("saddle resonance", {"u": 2.0, "s": 0.5}, output_dir=tmp_path)
        items = [WorkItem("persistent", _persistent)]

        with patch.object(SaddleResonanceCommand, "items", return_value=items):
            result = await ScenarioEngine().run(scenario)

        assert result.exit_code == 4
        assert result.errors[0]["error"] == "PersistentTangencyError"
        assert result.manifest.errors[0]["item"] == "persistent"

    @pytest.mark.asyncio
    async def test_warnings_reach_the_manifest(self, tmp_path):
        scenario = build_scenario("saddle resonance", {"u": 2.0, "s": 0.5}, output_dir=tmp_path)

        with patch.object(SaddleResonanceCommand, "items", return_value=[WorkItem("warn", _warn)]):
            result = await ScenarioEngine().run(scenario)

        assert result.exit_code == 0
        assert result.manifest.warnings == ["tangency_lab.scan: window holds two tangencies"]

    @pytest.mark.asyncio
    async def test_unknown_command(self, tmp_path):
        scenario = build_scenario("saddle wander", output_dir=tmp_path)

        with pytest.raises(ValidationError):
            await ScenarioEngine().run(scenario)

    @pytest.mark.asyncio
    async def test_item_generators_are_reproducible(self):
        """Each item draws from its own generator spawned from the seed."""
        items = [WorkItem(f"draw {i}", _draw, needs_rng=True) for i in range(3)]
        engine = ScenarioEngine(threads=3)

        first = [o.value for o in await engine.run_items(items, seed=42)]
        second = [o.value for o in await ScenarioEngine(threads=1).run_items(items, seed=42)]

        assert first == second
        assert len(set(first)) == 3
