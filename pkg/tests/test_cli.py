import json

import numpy as np
import pytest

from hombeat.cli import main
from hombeat.dataio import read_csv, write_csv


def run(args):
    return main(args)


# ---------------------------------------------------------------------------
# pipeline


def test_pipeline_prints_stages(capsys):
    assert run(["pipeline", "--l", "2", "--omega", "1e12"]) == 0
    out = capsys.readouterr().out
    assert "stage 4" in out
    assert "nu=+2e+12" in out
    assert "nu=-2e+12" in out


def test_pipeline_degenerate(capsys):
    assert run(["pipeline", "--l", "0", "--omega", "0"]) == 0
    out = capsys.readouterr().out
    assert "nu=+0" in out


def test_pipeline_rejects_negative_charge(capsys):
    assert run(["pipeline", "--l", "-1", "--omega", "1e12"]) == 2


def test_unknown_command_exits_2(capsys):
    assert run(["frobnicate"]) == 2


def test_no_command_exits_2(capsys):
    assert run([]) == 2


# ---------------------------------------------------------------------------
# jsa


def test_jsa_default_grid(tmp_path):
    out = tmp_path / "jsa.csv"
    assert run(["jsa", "--grid", "64", "--out", str(out)]) == 0
    meta, columns = read_csv(out)
    assert meta["command"] == "jsa"
    assert len(columns["amplitude"]) == 64 * 64
    assert columns["amplitude"].max() == pytest.approx(1.0, abs=1e-12)


def test_jsa_shifted_grid_and_svg(tmp_path):
    out = tmp_path / "jsa.csv"
    svg = tmp_path / "jsa.svg"
    code = run(
        ["jsa", "--grid", "64", "--rde-l", "2", "--rde-omega", "2e12",
         "--out", str(out), "--svg", str(svg)]
    )
    assert code == 0
    assert svg.exists()
    assert "<svg" in svg.read_text()
    meta, _ = read_csv(out)
    assert meta["rde_l"] == "2"


def test_jsa_rejects_tiny_grid(tmp_path):
    assert run(["jsa", "--grid", "8", "--out", str(tmp_path / "x.csv")]) == 2


def test_jsa_rejects_negative_charge(tmp_path):
    assert run(["jsa", "--rde-l", "-2", "--out", str(tmp_path / "x.csv")]) == 2


def test_jsa_unwritable_output_exits_3(tmp_path):
    missing_dir = tmp_path / "does" / "not" / "exist" / "jsa.csv"
    assert run(["jsa", "--grid", "16", "--out", str(missing_dir)]) == 3


# ---------------------------------------------------------------------------
# hom


def test_hom_closed_and_numeric_agree(tmp_path):
    closed = tmp_path / "closed.csv"
    numeric = tmp_path / "numeric.csv"
    base = ["hom", "--l", "2", "--omega", "2e12", "--tau-c", "1e-12",
            "--points", "61", "--tau-span", "3e-12"]
    assert run(base + ["--method", "closed", "--out", str(closed)]) == 0
    assert run(base + ["--method", "numeric", "--out", str(numeric)]) == 0
    _, c = read_csv(closed)
    _, n = read_csv(numeric)
    assert np.max(np.abs(c["p"] - n["p"])) < 1e-6


def test_hom_metadata(tmp_path):
    out = tmp_path / "hom.csv"
    assert run(["hom", "--omega", "0", "--points", "101", "--out", str(out)]) == 0
    meta, columns = read_csv(out)
    assert meta["method"] == "closed"
    assert meta["tau_c"] == "1e-12"
    assert columns["p"].min() == pytest.approx(0.0, abs=1e-12)


def test_hom_rejects_bad_span(tmp_path):
    assert run(["hom", "--tau-span", "-1", "--out", str(tmp_path / "x.csv")]) == 2


def test_hom_numeric_failure_exits_3(tmp_path, capsys):
    # a one-second delay makes the overlap integrand oscillate beyond any
    # subdivision budget
    code = run(
        ["hom", "--method", "numeric", "--tau-span", "1", "--points", "3",
         "--out", str(tmp_path / "x.csv")]
    )
    assert code == 3


# ---------------------------------------------------------------------------
# phasematch


def test_phasematch_crossing_cut_45(tmp_path):
    out = tmp_path / "pm.csv"
    assert run(["phasematch", "--cut-angle", "45", "--points", "201", "--out", str(out)]) == 0
    meta, columns = read_csv(out)
    assert float(meta["intersection_thz"]) == pytest.approx(370.44, abs=2.0)
    assert len(columns["freq_thz"]) == 201
    # fully solvable window: every angle cell populated
    assert not np.isnan(columns["angle_o_deg"]).any()
    assert not np.isnan(columns["angle_e_deg"]).any()


def test_phasematch_no_crossing_cut_40(tmp_path):
    out = tmp_path / "pm.csv"
    assert run(["phasematch", "--cut-angle", "40", "--points", "201", "--out", str(out)]) == 0
    meta, columns = read_csv(out)
    assert meta["intersection"] == "none"
    # unsolved frequencies appear as empty cells
    assert np.isnan(columns["angle_o_deg"]).any()


def test_phasematch_rejects_cut_out_of_range(tmp_path):
    assert run(["phasematch", "--cut-angle", "95", "--out", str(tmp_path / "x.csv")]) == 2


def test_phasematch_requires_cut(tmp_path):
    assert run(["phasematch", "--out", str(tmp_path / "x.csv")]) == 2


def test_phasematch_unsolvable_window_exits_3(tmp_path):
    code = run(
        ["phasematch", "--cut-angle", "40", "--f-min", "365", "--f-max", "376",
         "--points", "31", "--out", str(tmp_path / "x.csv")]
    )
    assert code == 3


def test_phasematch_custom_sellmeier_via_config(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(
        json.dumps(
            {
                "sellmeier_ordinary": [2.7359, 0.01878, 0.01822, 0.01354],
                "sellmeier_extraordinary": [2.3753, 0.01224, 0.01667, 0.01516],
                "sellmeier_provenance": "Kato 1986",
            }
        )
    )
    out = tmp_path / "pm.csv"
    code = run(
        ["phasematch", "--cut-angle", "45", "--points", "201",
         "--config", str(config), "--out", str(out)]
    )
    assert code == 0
    meta, _ = read_csv(out)
    assert meta["sellmeier"] == "Kato 1986"
    assert float(meta["intersection_thz"]) == pytest.approx(370.44, abs=2.0)


# ---------------------------------------------------------------------------
# estimate


def test_estimate_round_trip(tmp_path, capsys):
    trace_csv = tmp_path / "trace.csv"
    result_json = tmp_path / "result.json"
    assert run(
        ["hom", "--l", "2", "--omega", "2e12", "--tau-c", "1e-12",
         "--points", "1201", "--tau-span", "3e-12", "--out", str(trace_csv)]
    ) == 0
    assert run(["estimate", "--input", str(trace_csv), "--out", str(result_json)]) == 0
    payload = json.loads(result_json.read_text())
    assert payload["converged"]
    assert payload["beat_rad_per_s"] == pytest.approx(8e12, rel=0.005)


def test_estimate_writes_to_stdout(tmp_path, capsys):
    trace_csv = tmp_path / "trace.csv"
    run(["hom", "--omega", "0", "--points", "601", "--out", str(trace_csv)])
    capsys.readouterr()
    code = run(["estimate", "--input", str(trace_csv)])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["below_resolution"] is True


def test_estimate_flat_trace_exits_4(tmp_path, capsys):
    trace_csv = tmp_path / "flat.csv"
    taus = np.linspace(-3e-12, 3e-12, 101)
    write_csv(trace_csv, {"tau_s": taus, "p": np.full(101, 0.5)}, {})
    assert run(["estimate", "--input", str(trace_csv)]) == 4


def test_estimate_missing_file_exits_2(capsys):
    assert run(["estimate", "--input", "no-such-file.csv"]) == 2


def test_estimate_malformed_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("tau_s,p\n1.0,spam\n")
    assert run(["estimate", "--input", str(bad)]) == 2


# ---------------------------------------------------------------------------
# config layering and reproducibility


def test_config_presets_and_flag_override(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"l": 5, "omega": 3e12}))
    assert run(["pipeline", "--config", str(config), "--omega", "1e12"]) == 0
    out = capsys.readouterr().out
    assert "l=5" in out
    assert "omega_rot=1000000000000.0" in out


def test_bad_config_exits_2(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text("{not json")
    assert run(["pipeline", "--config", str(config)]) == 2


def test_outputs_reproduce_up_to_timestamp(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    base = ["hom", "--l", "2", "--omega", "2e12", "--points", "201"]
    assert run(base + ["--out", str(first)]) == 0
    assert run(base + ["--out", str(second)]) == 0

    def stripped(path):
        return [
            line
            for line in path.read_text().splitlines()
            if not line.startswith("# timestamp=")
        ]

    assert stripped(first) == stripped(second)
