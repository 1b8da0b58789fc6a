"""
Tests for artifact formatting and the run manifest.
"""

import json

import numpy as np

from tangency_lab.core.artifacts import (
    MANIFEST_NAME,
    ArtifactWriter,
    dumps,
    events_table,
    format_number,
    scan_result_table,
    to_plain,
)
from tangency_lab.core.models import ScanResult, TangencyEvent, TangencyRecord


class TestFormatting:
    """Test CSV cells and JSON conversion."""

    def test_floats_keep_seventeen_digits(self):
        assert format_number(0.1) == "0.10000000000000001"
        assert float(format_number(1 / 3)) == 1 / 3

    def test_complex_cells(self):
        assert format_number(1 + 2j) == "1+2j"
        assert format_number(complex(0.5, 0.0)) == "0.5"

    def test_integers_and_missing_values(self):
        assert format_number(np.int64(7)) == "7"
        assert format_number(True) == "True"
        assert format_number(None) == ""

    def test_to_plain_splits_complex(self):
        payload = {"u": 2 + 1j, "grid": np.array([1.0, 2.0]), 3: np.float64(0.5)}

        assert to_plain(payload) == {"u": [2.0, 1.0], "grid": [1.0, 2.0], "3": 0.5}

    def test_dumps_is_canonical(self):
        assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


class TestTables:
    """Test the CSV exporters."""

    def test_scan_result_rows(self):
        result = ScanResult(
            indices=[1, 2], parameters=[0.5, 0.25j], slope=0.69, intercept=0.0, fit_residual=0.0
        )
        header, rows = scan_result_table(result)

        assert header == ["n", "re_lambda", "im_lambda", "abs_lambda"]
        assert rows[1] == [2, 0.0, 0.25, 0.25]

    def test_events_carry_classification(self):
        record = TangencyRecord(h=1, m=1, quadratic_positive_speed=True)
        events = [
            TangencyEvent(parameter=[0.125], point=(0.3, 0.0), residual=1e-14, index=3, record=record),
            TangencyEvent(parameter=[0.0625], point=(0.3, 0.0), residual=1e-14, index=4),
        ]
        _, rows = events_table(events)

        assert rows[0][-2:] == [1, 1]
        assert rows[1][-2:] == [None, None]


class TestArtifactWriter:
    """Test file writing and the manifest."""

    def test_manifest_lists_files(self, tmp_path):
        writer = ArtifactWriter(tmp_path, timestamp=False)
        writer.write_json("summary.json", {"m": 1})
        writer.write_csv("table.csv", ["n", "value"], [[1, 0.5]])
        manifest = writer.write_manifest("scan scaling", 7, {"degree": 12})

        stored = json.loads((tmp_path / MANIFEST_NAME).read_text())
        assert [e.path for e in manifest.entries] == ["summary.json", "table.csv"]
        assert stored["seed"] == 7
        assert stored["settings"] == {"degree": 12}
        assert (tmp_path / "table.csv").read_text() == "n,value\n1,0.5\n"

    def test_timestamp_line_is_not_digested(self, tmp_path):
        """Reruns differing only in the '# generated' line share digests."""
        plain = ArtifactWriter(tmp_path / "plain", timestamp=False)
        stamped = ArtifactWriter(tmp_path / "stamped", timestamp=True)
        plain.write_csv("t.csv", ["x"], [[1.5]])
        stamped.write_csv("t.csv", ["x"], [[1.5]])

        assert (tmp_path / "stamped" / "t.csv").read_text().startswith("# generated")
        assert plain.entries[0].sha256 == stamped.entries[0].sha256
        assert plain.entries[0].size < stamped.entries[0].size

    def test_rewrite_replaces_entry(self, tmp_path):
        writer = ArtifactWriter(tmp_path, timestamp=False)
        writer.write_json("a.json", {"v": 1})
        writer.write_json("a.json", {"v": 2})

        assert len(writer.entries) == 1
        assert json.loads((tmp_path / "a.json").read_text()) == {"v": 2}

    def test_errors_are_recorded(self, tmp_path):
        writer = ArtifactWriter(tmp_path)
        manifest = writer.write_manifest(
            "germ classify", 1, errors=[{"error": "PersistentTangencyError", "value": 1j}]
        )

        assert manifest.errors == [{"error": "PersistentTangencyError", "value": [0.0, 1.0]}]
        assert manifest.entries == []
