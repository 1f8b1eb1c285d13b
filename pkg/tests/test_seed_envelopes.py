# tests/test_seed_envelopes.py

import pytest

from declab.core.envelope_config import ENVELOPES
from declab.seed.seed_envelopes import check_envelope, freeze_envelope, load_envelopes, regression_check


def test_shipped_table_matches_the_fallback(envelopes):
    assert set(envelopes) == set(ENVELOPES)
    for name, entry in ENVELOPES.items():
        assert envelopes[name]["rule"] == entry["rule"]
        # pending stable rows get their value on first measurement
        if entry["value"] is not None:
            assert envelopes[name]["value"] == pytest.approx(entry["value"])


def test_missing_csv_falls_back(tmp_path):
    assert load_envelopes(tmp_path / "absent.csv") == {k: dict(v) for k, v in ENVELOPES.items()}


def test_bad_rows_are_skipped(tmp_path):
    path = tmp_path / "envelopes.csv"
    path.write_text("name,value,rule,note\nok,2.0,upper,\nodd,abc,upper,x\nsideways,1.0,middle,y\nopen,,upper,z\n")
    table = load_envelopes(path)
    assert table == {"ok": {"value": 2.0, "rule": "upper", "note": ""}}


def test_pending_stable_rows_load_without_a_value(tmp_path):
    path = tmp_path / "envelopes.csv"
    path.write_text("name,value,rule,note\nlater,,stable,first run\n")
    assert load_envelopes(path) == {"later": {"value": None, "rule": "stable", "note": "first run"}}


def test_unrecognized_columns_fall_back(tmp_path):
    path = tmp_path / "envelopes.csv"
    path.write_text("label,limit\nx,1\n")
    assert set(load_envelopes(path)) == set(ENVELOPES)


def test_check_envelope_rules():
    table = {"cap": {"value": 2.0, "rule": "upper", "note": ""}, "floor": {"value": 1.0, "rule": "lower", "note": ""},
             "level": {"value": 10.0, "rule": "stable", "note": ""},
             "later": {"value": None, "rule": "stable", "note": ""}}
    assert check_envelope("cap", 2.0, table) and not check_envelope("cap", 2.1, table)
    assert check_envelope("floor", 1.5, table) and not check_envelope("floor", 0.5, table)
    assert check_envelope("level", 10.4, table) and check_envelope("level", 9.6, table)
    assert not check_envelope("level", 10.6, table) and not check_envelope("level", 9.4, table)
    assert check_envelope("unknown", 1.0, table) is None
    assert check_envelope("later", 1.0, table) is None


def test_freeze_replaces_and_widens(tmp_path):
    path = tmp_path / "envelopes.csv"
    freeze_envelope("ratio", 2.0, path, margin=0.1, note="first")
    entry = freeze_envelope("ratio", 3.0, path, margin=0.1, note="second")
    assert entry["value"] == pytest.approx(3.3)
    table = load_envelopes(path)
    assert list(table) == ["ratio"] and table["ratio"]["note"] == "second"
    low = freeze_envelope("floor", 2.0, path, margin=0.5, rule="lower")
    assert low["value"] == pytest.approx(1.0)
    assert freeze_envelope("level", 2.0, path, margin=0.5, rule="stable")["value"] == 2.0
    with pytest.raises(ValueError):
        freeze_envelope("x", 1.0, path, rule="sideways")


def test_regression_check_freezes_then_compares(tmp_path):
    path = tmp_path / "envelopes.csv"
    path.write_text("name,value,rule,note\nlater,,stable,first run\nother,,stable,\n")
    assert regression_check("later", 4.0, path)
    table = load_envelopes(path)
    assert table["later"] == {"value": 4.0, "rule": "stable", "note": "first run"}
    assert table["other"]["value"] is None
    assert regression_check("later", 4.1, path)
    assert not regression_check("later", 4.4, path)
    assert not regression_check("later", 3.7, path)


def test_regression_check_adds_missing_rows(tmp_path):
    path = tmp_path / "envelopes.csv"
    assert regression_check("fresh", 0.5, path)
    table = load_envelopes(path)
    assert table["fresh"]["value"] == 0.5
    assert set(ENVELOPES) <= set(table)


def test_regression_check_defers_to_bound_rules(tmp_path):
    path = tmp_path / "envelopes.csv"
    path.write_text("name,value,rule,note\ncap,2.0,upper,\n")
    assert regression_check("cap", 1.0, path) and not regression_check("cap", 3.0, path)
