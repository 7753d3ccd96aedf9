import json
import math

import pytest

from uadet.errors import ConfigError
from uadet.experiments import ExperimentSpec, ResultRow
from uadet.output import (
    CSV_COLUMNS,
    COMPARE_COLUMNS,
    compare_rows,
    compare_to_csv,
    read_rows_csv,
    rows_to_csv,
    rows_to_jsonl,
    write_rows,
)
from uadet.runner import run


def sample_rows():
    spec = ExperimentSpec(framework="cs", N=32, k=3, sweep=[16, 24], trials=30, seed=2)
    return run(spec)


def csa_sample_rows():
    spec = ExperimentSpec(framework="csa", N=32, k=3,
                          sweep=[4, 12], trials=30, seed=2,
                          degree_distribution={2: 0.5, 3: 0.5})
    return run(spec)


class TestCsv:
    def test_header_and_row_count(self):
        text = rows_to_csv(sample_rows())
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3

    def test_noiseless_snr_field_is_empty(self):
        line = rows_to_csv(sample_rows()).strip().split("\n")[1]
        assert line.split(",")[CSV_COLUMNS.index("snr_bit_db")] == ""

    def test_floats_round_trip_exactly(self, tmp_path):
        rows = sample_rows()
        p = tmp_path / "rows.csv"
        write_rows(rows, p, "csv")
        back = read_rows_csv(p)
        assert [r.model_dump() for r in back] == [r.model_dump() for r in rows]

    def test_write_is_reproducible_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_rows(sample_rows(), a, "csv")
        write_rows(sample_rows(), b, "csv")
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            write_rows(sample_rows(), tmp_path / "x", "parquet")

    def test_read_rejects_foreign_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ConfigError):
            read_rows_csv(p)

    def test_read_rejects_short_records(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text(",".join(CSV_COLUMNS) + "\ncs,32\n")
        with pytest.raises(ConfigError) as exc:
            read_rows_csv(p)
        assert ":2:" in str(exc.value)

    def test_read_rejects_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ConfigError):
            read_rows_csv(p)


class TestJsonl:
    def test_every_line_tagged_and_parseable(self):
        text = rows_to_jsonl(sample_rows())
        lines = text.strip().split("\n")
        assert len(lines) == 2
        for line in lines:
            obj = json.loads(line)
            assert obj["schema_version"] == 1
            assert obj["snr_bit_db"] is None
            assert set(CSV_COLUMNS) <= set(obj)

    def test_infeasible_rows_serialize(self):
        spec = ExperimentSpec(framework="csa", N=32, k=3, sweep=[4], trials=5)
        rows = run(spec)  # max degree 8 cannot fit in 4 slots
        obj = json.loads(rows_to_jsonl(rows).strip())
        assert obj["infeasible"] is True
        assert math.isnan(obj["mdr"])
        csv_line = rows_to_csv(rows).strip().split("\n")[1]
        assert "nan" in csv_line


class TestCompare:
    def test_join_on_frame_symbols(self):
        cs = sample_rows()  # m in {16, 24}
        csa = csa_sample_rows()  # m in {20, 60}
        table = compare_rows(cs, csa)
        assert [e["m"] for e in table] == [16, 20, 24, 60]
        by_m = {e["m"]: e for e in table}
        assert by_m[16]["cs_flr"] is not None
        assert by_m[16]["csa_plr"] is None
        assert by_m[20]["csa_plr"] is not None
        assert by_m[20]["cs_mdr"] is None

    def test_empty_inputs_give_empty_table(self):
        assert compare_rows([], []) == []
        assert compare_to_csv([]) == ",".join(COMPARE_COLUMNS) + "\n"

    def test_framework_mixup_rejected(self):
        with pytest.raises(ConfigError):
            compare_rows(csa_sample_rows(), [])
        with pytest.raises(ConfigError):
            compare_rows([], sample_rows())

    def test_csv_rendering(self):
        table = compare_rows(sample_rows(), csa_sample_rows())
        text = compare_to_csv(table)
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(COMPARE_COLUMNS)
        assert len(lines) == 5
