import json
import os

from hypothesis import given, strategies as st

from wilton_lab.artifacts import (MOMENT_COLUMNS, atomic_write_text, moment_row,
                                  moment_table_json, read_csv_rows, rows_to_csv)
from wilton_lab.moments import moment_g


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    p = tmp_path / "a.json"
    atomic_write_text(str(p), "one\n")
    atomic_write_text(str(p), "two\n")
    assert p.read_text() == "two\n"
    assert os.listdir(tmp_path) == ["a.json"]


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_floats_round_trip(vals):
    rows = [{"K": i, "value": v} for i, v in enumerate(vals)]
    text = rows_to_csv(("K", "value"), rows, {"seed": 1})
    assert text.startswith("# config: ")
    back = read_csv_rows(text)
    assert [float(r["value"]) for r in back] == vals


def test_csv_mirrors_json():
    est = moment_g(3, budget=20_000, seed=1)
    row = moment_row(est)
    doc = json.loads(moment_table_json({"seed": 1}, [row]))
    csv_row = read_csv_rows(rows_to_csv(MOMENT_COLUMNS, [row]))[0]
    assert list(csv_row) == list(MOMENT_COLUMNS)
    for k in ("value", "std_error", "prediction", "ratio", "ratio_to_gamma", "bias_bound"):
        assert float(csv_row[k]) == doc["rows"][0][k]
    assert csv_row["wall_seconds"] == "" and doc["rows"][0]["wall_seconds"] is None
