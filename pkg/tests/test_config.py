"""
Tests for environment configuration and command-line overrides.
"""

import os
from pathlib import Path
from unittest.mock import patch

from tangency_lab.config import LabConfig


class TestLabConfig:
    """Test the configuration layers."""

    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            config = LabConfig()

            assert config.get_rel_tol() == 1e-10
            assert config.get_degree() == 12
            assert config.get_graph_degree() == 32
            assert config.get_threads() == 4
            assert config.get_output_dir() == Path("lab-output")
            assert not config.is_debug_mode()

    def test_environment_values(self):
        env = {"TANGENCY_LAB_DEGREE": "20", "TANGENCY_LAB_SEED": "7", "TANGENCY_LAB_DEBUG_MODE": "true"}
        with patch.dict(os.environ, env, clear=True):
            config = LabConfig()

            assert config.get_degree() == 20
            assert config.get_seed() == 7
            assert config.is_debug_mode()

    def test_invalid_value_falls_back(self):
        with patch.dict(os.environ, {"TANGENCY_LAB_THREADS": "many"}, clear=True):
            assert LabConfig().get_threads() == 4

    def test_non_positive_tolerance_falls_back(self):
        with patch.dict(os.environ, {"TANGENCY_LAB_REL_TOL": "0"}, clear=True):
            assert LabConfig().get_rel_tol() == 1e-10

    def test_overrides_beat_environment(self):
        with patch.dict(os.environ, {"TANGENCY_LAB_DEGREE": "20"}, clear=True):
            config = LabConfig()
            config.override(degree=8, threads=None)

            assert config.get_degree() == 8
            assert config.get_threads() == 4

            config.reset_overrides()
            assert config.get_degree() == 20

    def test_scoped_overrides_are_restored(self):
        with patch.dict(os.environ, {}, clear=True):
            config = LabConfig()
            config.override(degree=8)

            with config.scoped(rel_tol=1e-6, degree=10):
                assert config.get_rel_tol() == 1e-6
                assert config.get_degree() == 10

            assert config.get_rel_tol() == 1e-10
            assert config.get_degree() == 8

    def test_summary_records_seed(self):
        with patch.dict(os.environ, {}, clear=True):
            summary = LabConfig().summary(seed=99)

            assert summary["seed"] == 99
            assert set(summary) == {"rel_tol", "degree", "graph_degree", "threads", "seed"}
