import json

import numpy as np
import pandas as pd
import pytest

from junction.main import build_parser, main
from junction.services.io_service import read_solution
from junction.services.model_service import check_solution, first_integral_drift


def _read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_parser_exposes_all_subcommands():
    parser = build_parser()
    for command in ("solve", "series", "sweep", "table1"):
        args = parser.parse_args([command])
        assert callable(args.handler)


def test_solve_planck_case(tmp_path, capsys):
    out = tmp_path / "planck"
    code = main(["solve", "--nu", "0.5", "--delta-j", "0", "--grid-n", "100", "--out", str(out)])
    assert code == 0
    header = _read_json(out / "solution.json")
    assert header["class"] == "C"
    assert header["warnings"] == []
    assert header["extrapolation_drift"] <= 1e-14
    frame = pd.read_csv(out / "solution.csv", skiprows=1)
    assert list(frame.columns) == ["x", "E", "dE", "c_plus", "c_minus"]
    assert np.all(frame["E"] == 0.0)
    assert "class C" in capsys.readouterr().out


def test_solve_rejects_invalid_mobility(tmp_path, capsys):
    code = main(["solve", "--tau-plus", "1.2", "--delta-j", "0", "--out", str(tmp_path)])
    assert code == 1
    assert "error: DomainError: tau_plus" in capsys.readouterr().err


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("nu=0.5\ndelta_j=0\ncolour=blue\n", encoding="utf-8")
    code = main(["solve", "--config", str(config), "--out", str(tmp_path)])
    assert code == 1
    err = capsys.readouterr().err
    assert "ConfigError" in err and "colour" in err


def test_bad_flag_value_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--grid-n", "many"])
    assert info.value.code == 2


def test_flags_override_config_file(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("NU=0.5\ndelta_j=0\ngrid_n=40\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["solve", "--config", str(config), "--grid-n", "60", "--out", str(out)]) == 0
    header = _read_json(out / "solution.json")
    assert header["grid_n"] == 60
    assert header["params"]["nu"] == 0.5


def test_output_directory_from_environment(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("JUNCTION_OUTPUT_DIR", str(target))
    assert main(["solve", "--delta-j", "0", "--grid-n", "40"]) == 0
    assert (target / "solution.csv").exists()


def test_outputs_are_deterministic_and_round_trip(tmp_path):
    args = ["solve", "--nu", "1.1", "--delta-j", "-1.0", "--grid-n", "400"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("solution.csv", "solution.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    solution = read_solution(tmp_path / "a" / "solution.csv")
    assert solution.class_label.value == "B"
    assert first_integral_drift(solution) <= 1e-8
    assert check_solution(solution) == []


def test_formats_limit_outputs(tmp_path):
    assert main(["solve", "--delta-j", "0", "--grid-n", "40", "--formats", "json",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "solution.json").exists()
    assert not (tmp_path / "solution.csv").exists()


def test_series_writes_report_trace_and_snapshots(tmp_path, capsys):
    out = tmp_path / "series"
    code = main(["series", "--nu", "1.1", "--delta-j", "-1.0", "--grid-n", "200", "--n-max", "20",
                 "--snapshots", "1,5", "--dump-basis", "--out", str(out)])
    assert code == 0
    report = _read_json(out / "report.json")
    assert report["class"] == "B"
    assert report["apparent"] is True
    assert report["orders_computed"] == 20
    trace = pd.read_csv(out / "trace.csv")
    assert list(trace.columns) == ["n", "delta_0", "delta_1", "delta_half", "delta_bar",
                                   "unreliable"]
    assert len(trace) == 20
    assert (out / "snapshot_001.csv").exists() and (out / "snapshot_005.csv").exists()
    assert (out / "basis.csv").exists()
    assert (out / "reference.csv").exists()
    assert "n3" in capsys.readouterr().out


def test_empty_sweep_writes_empty_results(tmp_path, capsys):
    config = tmp_path / "sweep.env"
    config.write_text("nu=2.0\ndelta_j=\n", encoding="utf-8")
    code = main(["sweep", "--config", str(config), "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "sweep.jsonl").read_text(encoding="utf-8") == ""
    assert "0 cases" in capsys.readouterr().out
    assert _read_json(tmp_path / "sweep_summary.json")["cases"] == 0


def test_sweep_records_case_failures(tmp_path):
    code = main(["sweep", "--nu", "1.1", "--c0", "0.3,0.6", "--delta-j", "-1.0",
                 "--grid-n", "100", "--n-max", "10", "--out", str(tmp_path)])
    lines = (tmp_path / "sweep.jsonl").read_text(encoding="utf-8").splitlines()
    rows = [json.loads(line) for line in lines]
    assert [row["c0"] for row in rows] == [0.3, 0.6]
    assert rows[0]["verdict"] is not None
    assert rows[1]["error_type"] == "DomainError"
    assert code == 1


def test_sweep_ranges_and_parallel_jobs(tmp_path):
    code = main(["sweep", "--nu", "1.1", "--delta-j=-1.0:-0.5:0.5", "--grid-n", "100",
                 "--n-max", "8", "--jobs", "2", "--case-traces", "--out", str(tmp_path)])
    assert code == 0
    rows = [json.loads(line)
            for line in (tmp_path / "sweep.jsonl").read_text(encoding="utf-8").splitlines()]
    assert [row["delta_j"] for row in rows] == [-1.0, -0.5]
    assert len(list((tmp_path / "cases").iterdir())) == 2
