import json
import subprocess
import sys
import time

import pytest

from quarticsum import errors
from quarticsum.cli import (
    ExperimentConfig,
    ExperimentReport,
    emit_plot_data,
    geometric_grid,
    main,
    parse_plot_data,
    parse_scaled,
    run,
    validate,
)


def run_to(tmp_path, name, **kw):
    out = tmp_path / name
    rep = run(ExperimentConfig(out=str(out), **kw))
    return rep, out.read_bytes()


def test_count_row(tmp_path):
    rep, data = run_to(tmp_path, "c.json", subcommand="count", p=2, n_min=3)
    assert rep.rows[0]["count"] == 15
    doc = json.loads(data)
    assert set(doc) >= {"schema_version", "tool_version", "config", "rows", "timings"}
    assert doc["rows"][0]["count"] == 15


def test_fit_cubic_samples(tmp_path):
    rep, _ = run_to(tmp_path, "f.json", subcommand="fit", samples="16:4096,32:32768,64:262144")
    assert rep.rows[0]["slope"] == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize(
    "kw",
    [
        dict(subcommand="report", seed=7, fmt="json"),
        dict(subcommand="report", seed=7, fmt="csv"),
        dict(subcommand="moment", p=2, n_min=4, n_max=16, n_steps=3, fmt="csv"),
        dict(subcommand="weyl", k=8, n_min=12, alpha="2/7", fmt="json"),
    ],
)
def test_byte_identical_reruns(tmp_path, kw):
    _, a = run_to(tmp_path, "a", **kw)
    _, b = run_to(tmp_path, "b", **kw)
    assert a == b


def test_seed_changes_sampling(tmp_path):
    _, a = run_to(tmp_path, "a", subcommand="report", seed=1)
    _, b = run_to(tmp_path, "b", subcommand="report", seed=2)
    assert json.loads(a)["config"]["seed"] != json.loads(b)["config"]["seed"]
    assert all(json.loads(a)["verdicts"].values())


def test_single_row_csv():
    rep = ExperimentReport("0", {}, rows=[{"N": 8, "value": 1.5}])
    text = emit_plot_data(rep)
    assert text == "N,value\n8,1.5\n"
    assert len(text.splitlines()) == 2


def test_empty_report_rejected():
    with pytest.raises(errors.ParameterError):
        emit_plot_data(ExperimentReport("0", {}))


def test_I_sweep_columns_and_round_trip(tmp_path):
    rep, data = run_to(tmp_path, "i.csv", subcommand="moment", n_min=8, n_max=32, n_steps=3, fmt="csv")
    text = data.decode("utf-8")
    assert b"\r" not in data
    assert text.splitlines()[0].split(",")[:3] == ["N", "value", "log_value"]
    back = parse_plot_data(text)
    assert [r["N"] for r in back] == [8, 16, 32]
    for orig, parsed in zip(rep.rows, back):
        for k, v in orig.items():
            if isinstance(v, float):
                assert abs(parsed[k] - v) <= 1e-12 * max(1.0, abs(v))
            else:
                assert parsed[k] == v


def test_geometric_grid():
    assert geometric_grid(16, 128, 4) == [16, 32, 64, 128]
    assert geometric_grid(5, 5, 1) == [5]
    with pytest.raises(errors.ParameterError):
        geometric_grid(10, 5, 2)


def test_scaled_thresholds():
    assert parse_scaled("N^3", 4) == 64
    assert parse_scaled("1/2*N^2", 4) == 8
    assert parse_scaled("N^-3", 2) == parse_scaled("1/8", 2)
    assert parse_scaled("7/3", 99) * 3 == 7
    with pytest.raises(errors.ParameterError):
        parse_scaled("banana", 3)


def test_validation_is_fast_on_huge_grids():
    cfg = ExperimentConfig(subcommand="count", p=5, n_min=10**6)
    t = time.perf_counter()
    with pytest.raises(errors.BudgetExceeded):
        validate(cfg)
    assert time.perf_counter() - t < 0.1
    cfg = ExperimentConfig(subcommand="moment", p=3, n_min=10**5, method="quadrature")
    t = time.perf_counter()
    with pytest.raises(errors.BudgetExceeded):
        validate(cfg)
    assert time.perf_counter() - t < 0.1


@pytest.mark.parametrize(
    "argv,code",
    [
        (["count", "--p", "2", "--n-min", "3"], 0),
        (["count", "--p", "9"], 2),
        (["count", "--p", "5", "--n-min", "1000"], 3),
        (["count", "--budget", "10", "--n-min", "20"], 3),
        (["btransform", "--alpha", "0.7", "--n-min", "100"], 2),
        (["weyl", "--k", "5"], 2),
        (["fit"], 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_unwritable_output(tmp_path):
    assert main(["count", "--out", str(tmp_path / "missing" / "x.csv")]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "w.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "quarticsum", "weyl", "--k", "8", "--n-min", "10",
         "--alpha", "1/3", "--format", "csv", "--out", str(out)],
        capture_output=True,
    )
    assert proc.returncode == 0
    row = parse_plot_data(out.read_text())[0]
    assert row["H"] == 268_800_000


def test_btransform_rows(tmp_path):
    rep, _ = run_to(tmp_path, "b.json", subcommand="btransform", alpha="0.3", n_min=256, n_max=1024, n_steps=3)
    assert [r["N"] for r in rep.rows] == [256, 512, 1024]
    assert all(r["residual"] <= r["envelope"] for r in rep.rows)


def test_timings_opt_in(tmp_path):
    rep, data = run_to(tmp_path, "t.json", subcommand="count", p=2, n_min=3, timings=True)
    assert len(json.loads(data)["timings"]) == 1
