"""Atomic writes, deterministic cells, table round-trips, config parsing."""

from datetime import datetime

import pytest

from wikigrok.fileio import (
    DataError,
    atomic_write_text,
    fmt_value,
    load_config,
    parse_timestamp,
    read_table,
    render_table,
    write_table,
)


def test_atomic_write_creates_parents_and_leaves_no_temp(tmp_path):
    target = tmp_path / "deep" / "nested" / "file.txt"
    atomic_write_text(target, "hello")
    assert target.read_text(encoding="utf-8") == "hello"
    atomic_write_text(target, "replaced")
    assert target.read_text(encoding="utf-8") == "replaced"
    leftovers = [p for p in target.parent.iterdir() if p.name != "file.txt"]
    assert leftovers == []


def test_fmt_value_rules():
    assert fmt_value(None) == ""
    assert fmt_value(True) == "1"
    assert fmt_value(False) == "0"
    assert fmt_value(3) == "3"
    assert fmt_value("text") == "text"
    assert fmt_value(0.1) == "0.1"
    assert fmt_value(1 / 3) == "0.3333333333"          # %.10g
    assert fmt_value(1234567890123.0) == "1.23456789e+12"
    assert fmt_value(float("nan")) == "nan"


def test_render_table_quotes_and_line_endings():
    text = render_table(["a", "b"], [["x,y", 0.5], [None, True]])
    assert text == 'a,b\n"x,y",0.5\n,1\n'
    tsv = render_table(["a", "b"], [["plain", 2]], delimiter="\t")
    assert tsv == "a\tb\nplain\t2\n"


def test_table_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    write_table(path, ["name", "score"], [["alpha", 0.25], ["be,ta", 2]])
    header, rows = read_table(path)
    assert header == ["name", "score"]
    assert rows == [["alpha", "0.25"], ["be,ta", "2"]]
    with pytest.raises(DataError):
        read_table(tmp_path / "absent.csv")


def test_parse_timestamp_formats():
    assert parse_timestamp("2025-11-03") == datetime(2025, 11, 3)
    assert parse_timestamp("2025-11-03 10:30:00") == datetime(2025, 11, 3, 10, 30)
    assert parse_timestamp("2025-11-03T10:30:00") == datetime(2025, 11, 3, 10, 30)
    assert parse_timestamp("2025-11-03T10:30:00Z") == datetime(2025, 11, 3, 10, 30)
    # numeric offsets collapse onto the same clock
    assert parse_timestamp("2025-11-03T12:30:00+02:00") == datetime(2025, 11, 3, 10, 30)
    for bad in ("", "   ", "yesterday", "2025-13-03"):
        with pytest.raises(ValueError):
            parse_timestamp(bad)


def test_load_config(tmp_path):
    path = tmp_path / "pipeline.cfg"
    path.write_text(
        "# pipeline settings\n"
        "month = 2025-11\n"
        "\n"
        "window-start=2025-10-27\n"
        "note = spaced  value\n"
        "month = 2025-12\n",   # later duplicate wins
        encoding="utf-8",
    )
    config = load_config(path)
    assert config == {
        "month": "2025-12",
        "window-start": "2025-10-27",
        "note": "spaced  value",
    }
    with pytest.raises(DataError):
        load_config(tmp_path / "nope.cfg")


def test_load_config_rejects_lines_without_equals(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("month 2025-11\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_config(path)
