import csv
import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from dimred.report import (CSV_HEADER, CheckReport, compare, from_json, read_report, to_csv,
                           to_json, write_report)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
inputs = st.dictionaries(st.sampled_from(["n", "z", "x", "label"]),
                         st.one_of(st.integers(-10, 10), finite, st.text(max_size=5)), max_size=3)
provenances = st.sampled_from(["PAPER", "TRIVIAL", "DERIVED:oracle", "DERIVED:a, b"])


@st.composite
def reports(draw):
    value, ref = draw(finite), draw(finite)
    stderr = draw(st.one_of(st.none(), st.floats(0, 1e3)))
    tol = draw(st.floats(0, 1e3))
    err = abs(value - ref)
    if not math.isfinite(err):
        err = 0.0
    return CheckReport(draw(st.text(min_size=1, max_size=8)), draw(inputs), value, ref,
                       draw(provenances), err, tol, stderr, draw(st.one_of(st.none(), finite)))


def test_pass_flag_is_derived():
    assert compare("c", {}, 1.0, 1.0 + 1e-9, "TRIVIAL", 1e-8).passed
    assert not compare("c", {}, 1.0, 1.1, "TRIVIAL", 1e-8).passed
    mc = compare("c", {}, 1.0, 1.05, "TRIVIAL", 0.0, stderr=0.02)
    assert mc.tol == pytest.approx(0.06) and mc.passed
    assert not CheckReport("c", {}, 1, 2, "PAPER", math.nan, 1.0).passed


def test_bad_provenance_and_tolerance():
    with pytest.raises(ValueError):
        CheckReport("c", {}, 1, 1, "DERIVED", 0.0, 1.0)
    with pytest.raises(ValueError):
        CheckReport("c", {}, 1, 1, "guess", 0.0, 1.0)
    with pytest.raises(ValueError):
        CheckReport("c", {}, 1, 1, "PAPER", 0.0, -1.0)


def test_empty_outputs():
    assert json.loads(to_json([])) == []
    rows = list(csv.reader(io.StringIO(to_csv([]), newline="")))
    assert rows == [CSV_HEADER]


@given(st.lists(reports(), max_size=6))
def test_json_round_trip(reps):
    assert from_json(to_json(reps)) == reps
    assert to_json(from_json(to_json(reps))) == to_json(reps)


@given(st.lists(reports(), min_size=1, max_size=6))
def test_csv_field_count_constant(reps):
    rows = list(csv.reader(io.StringIO(to_csv(reps), newline="")))
    assert rows[0] == CSV_HEADER
    assert {len(r) for r in rows} == {len(CSV_HEADER)}
    assert len(rows) == len(reps) + 1


def test_floats_keep_seventeen_digits():
    r = compare("c", {"x": 0.1}, 1 / 3, 0.1, "TRIVIAL", 1.0)
    text = to_json([r])
    assert "0.33333333333333331" in text and '"x": 0.10000000000000001' in text
    assert from_json(text)[0].value == 1 / 3


def test_non_finite_values_survive():
    r = CheckReport("c", {}, math.inf, 1.0, "TRIVIAL", math.inf, 1.0)
    back = from_json(to_json([r]))[0]
    assert back.value == math.inf and not back.passed


def test_tampered_pass_flag_rejected():
    text = to_json([compare("c", {}, 1.0, 2.0, "TRIVIAL", 0.1)]).replace('"pass": false', '"pass": true')
    with pytest.raises(ValueError):
        from_json(text)


def test_write_and_read_files(tmp_path):
    reps = [compare("a", {"n": 1}, 1.0, 1.0, "PAPER", 0.0)]
    write_report(reps, tmp_path / "r.json")
    assert read_report(tmp_path / "r.json") == reps
    write_report(reps, tmp_path / "r.csv", "csv")
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == ",".join(CSV_HEADER)
    with pytest.raises(ValueError):
        write_report(reps, tmp_path / "r.txt", "xml")
    with pytest.raises(OSError):
        write_report(reps, tmp_path / "missing" / "r.json")
