import json

import numpy as np
import pytest

from src.core.data_io import canonical_json, export_csv, ingest_csv, load_report, persist_report
from src.core.errors import CsvParseError, DomainError, ReportIOError, SchemaError
from src.core.loadgen import LoadProfile


def write(tmp_path, text, name="profiles.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestIngestCsv:
    def test_reads_profiles(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,10\n0,1,20\n1,1,40\n1,0,30\n")
        profiles = ingest_csv(path)
        assert list(profiles) == [0, 1]
        assert list(profiles[1].series) == [30, 40]

    def test_export_then_ingest(self, tmp_path):
        profiles = {0: LoadProfile([1, 2, 3]), 3: LoadProfile([0, 0, 7])}
        path = tmp_path / "out.csv"
        export_csv(profiles, path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "meter_id,interval,wh"
        assert ingest_csv(path) == profiles

    def test_wrong_header(self, tmp_path):
        path = write(tmp_path, "meter,interval,wh\n0,0,1\n")
        with pytest.raises(CsvParseError) as info:
            ingest_csv(path)
        assert info.value.line == 1

    @pytest.mark.parametrize("bad", ["abc", "1.5", "", "inf"])
    def test_non_integer_reports_line(self, tmp_path, bad):
        path = write(tmp_path, f"meter_id,interval,wh\n0,0,1\n0,1,2\n0,2,{bad}\n")
        with pytest.raises(CsvParseError) as info:
            ingest_csv(path)
        assert info.value.line == 4

    def test_extra_field_reports_line(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,1\n0,1,2,9\n")
        with pytest.raises(CsvParseError) as info:
            ingest_csv(path)
        assert info.value.line == 3
        assert str(info.value).startswith("line 3:")

    def test_negative_energy(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,-5\n")
        with pytest.raises(CsvParseError, match="negative"):
            ingest_csv(path)

    def test_bound(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,5\n0,1,100\n")
        assert len(ingest_csv(path, bound=101)[0]) == 2
        with pytest.raises(DomainError, match="bound") as info:
            ingest_csv(path, bound=100)
        assert not isinstance(info.value, CsvParseError)

    def test_duplicates(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,5\n0,1,6\n0,0,7\n")
        with pytest.raises(CsvParseError) as info:
            ingest_csv(path)
        assert info.value.line == 4

    def test_gaps(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,5\n0,2,6\n")
        with pytest.raises(SchemaError, match="dense"):
            ingest_csv(path)

    def test_ragged(self, tmp_path):
        path = write(tmp_path, "meter_id,interval,wh\n0,0,5\n0,1,6\n1,0,7\n")
        with pytest.raises(SchemaError, match="ragged"):
            ingest_csv(path)

    def test_empty(self, tmp_path):
        with pytest.raises(SchemaError):
            ingest_csv(write(tmp_path, ""))
        with pytest.raises(SchemaError):
            ingest_csv(write(tmp_path, "meter_id,interval,wh\n", name="header.csv"))


class TestReports:
    def test_canonical_json(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'

    def test_persist_and_load(self, tmp_path):
        report = {"success_rate": 0.5, "metadata": {"scheme": "additive-random"}, "wins": np.int64(3).item()}
        path = tmp_path / "report.json"
        persist_report(report, path)
        assert load_report(path) == report
        assert path.read_text(encoding="utf-8").endswith("}\n")
        assert [p.name for p in tmp_path.iterdir()] == ["report.json"]

    def test_overwrites_atomically(self, tmp_path):
        path = tmp_path / "report.json"
        persist_report({"run": 1}, path)
        persist_report({"run": 2}, path)
        assert json.loads(path.read_text(encoding="utf-8")) == {"run": 2}

    def test_unwritable_path(self, tmp_path):
        target = tmp_path / "missing" / "report.json"
        with pytest.raises(ReportIOError) as info:
            persist_report({}, target)
        assert info.value.path == str(target)

    def test_missing_report(self, tmp_path):
        with pytest.raises(ReportIOError):
            load_report(tmp_path / "nope.json")
