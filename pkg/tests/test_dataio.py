import math

import numpy as np
import pytest

from hombeat.dataio import format_float, read_csv, read_hom_trace, write_csv


# ---------------------------------------------------------------------------
# number formatting


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.0, "0"),
        (370.44, "370.44"),
        (0.001, "0.001"),
        (999999.0, "999999"),
        (-0.5, "-0.5"),
        (1e-12, "1e-12"),
        (0.0001, "1e-04"),
        (1e6, "1e+06"),
        (-2.5e12, "-2.5e+12"),
        (math.nan, "nan"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
    ],
)
def test_format_float_cases(value, expected):
    assert format_float(value) == expected


def test_format_float_round_trips_12_digits():
    values = [math.pi, 1.2345678901234e-7, 9.876543210987e11, -4.4e-300, 2.0 / 3.0]
    for v in values:
        back = float(format_float(v))
        assert back == pytest.approx(v, rel=1e-11)


# ---------------------------------------------------------------------------
# CSV round trip


def test_write_read_round_trip(tmp_path):
    path = tmp_path / "doc.csv"
    x = np.linspace(-3e-12, 3e-12, 57)
    y = np.sin(x * 1e12) * 0.25 + 0.5
    write_csv(path, {"tau_s": x, "p": y}, {"alpha": 1e-12, "label": "demo", "count": 57})
    meta, columns = read_csv(path)
    assert meta["alpha"] == "1e-12"
    assert meta["label"] == "demo"
    assert meta["count"] == "57"
    np.testing.assert_allclose(columns["tau_s"], x, rtol=1e-11)
    np.testing.assert_allclose(columns["p"], y, rtol=1e-11)


def test_missing_cells_round_trip(tmp_path):
    path = tmp_path / "gaps.csv"
    write_csv(path, {"f": [1.0, 2.0, 3.0], "a": [0.5, None, 1.5]}, {})
    _, columns = read_csv(path)
    assert math.isnan(columns["a"][1])
    assert columns["a"][0] == 0.5


def test_mismatched_column_lengths_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", {"a": [1.0], "b": [1.0, 2.0]}, {})


def test_read_rejects_malformed_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# k=v\na,b\n1.0,2.0\n3.0\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_read_rejects_bad_cells(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1.0,spam\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_read_rejects_headerless_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# only=meta\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_read_hom_trace_requires_columns(tmp_path):
    path = tmp_path / "trace.csv"
    write_csv(path, {"time": [1.0, 2.0], "p": [0.1, 0.2]}, {})
    with pytest.raises(ValueError):
        read_hom_trace(path)


def test_read_hom_trace_rejects_gaps(tmp_path):
    path = tmp_path / "trace.csv"
    write_csv(path, {"tau_s": [1.0, 2.0], "p": [0.1, None]}, {})
    with pytest.raises(ValueError):
        read_hom_trace(path)
