# Copyright © 2025 The linsys developers

"""
Tests for linsys.cli
"""

import argparse
import json

import pytest

from linsys.cli import EX_DATAERR
from linsys.cli import EX_NONMEMBER
from linsys.cli import EX_OK
from linsys.cli import EX_REJECT
from linsys.cli import EX_USAGE
from linsys.cli import RunConfig
from linsys.cli import main
from linsys.cli import parse_grid
from linsys.designs import gen_cox
from linsys.simulation import RejectionCurve


def _write_json(tmpdir, name, payload):
    _path = tmpdir.join(name)
    _path.write(payload if isinstance(payload, str) else json.dumps(payload))
    return str(_path)


@pytest.fixture
def cox_files(tmpdir):
    """Model JSON and data CSV of a Cox draw."""
    _data, _model = gen_cox(H=3, theta=-1.0, n=300, seed=1)
    _data_path = tmpdir.join("data.csv")
    _data.to_csv(str(_data_path), index=False)
    return _write_json(tmpdir, "model.json", _model.to_dict()), str(_data_path)


def test_parse_grid_range():
    """Both ends of lo:hi:step are included."""
    assert parse_grid("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert len(parse_grid("-1:1:0.1")) == 21
    assert len(parse_grid("0.40:0.85:0.005")) == 91


def test_parse_grid_list():
    """Comma-separated values."""
    assert parse_grid("20.5,22,24") == (20.5, 22.0, 24.0)


@pytest.mark.parametrize("test_input", ["1:0:0.1", "0:1:0", "0:1", "a,b", "", " , "])
def test_parse_grid_bad(test_input):
    """Malformed grids are argument errors."""
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid(test_input)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "fit"},
        {"command": "test", "design": "cox", "n": 100, "value": 0.0, "alpha": 0.5},
        {"command": "test", "design": "cox", "n": 100},
        {"command": "test"},
        {"command": "simulate", "design": "cox", "n": 100, "reps": 2},
        {"command": "simulate", "design": "cox", "grid": (0.0,), "reps": 2},
        {"command": "closure-check", "triple": "missing.json"},
        {"command": "closure-check", "fmt": "csv"},
        {"command": "plot", "curve": "-"},
        {"command": "test", "design": "goff", "n": 100, "value": 0.6, "j_star": 2},
    ],
)
def test_run_config_invalid(kwargs):
    """Inconsistent settings are rejected before anything runs."""
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_run_config_method_choice():
    """Method settings become a MethodChoice."""
    _config = RunConfig(
        command="simulate",
        design="cox",
        n=100,
        reps=1,
        grid=(0.0,),
        method="screening",
        j_star=2,
        cn_regime="low",
    )
    _choice = _config.method_choice()
    assert _choice.j_star == 2
    assert _choice.cn_regime.value == "low"
    assert _config.method_choice("direct").j_star is None


def test_closure_check_member(tmpdir, capsys):
    """a x1 = b with a = b = 1 is in C0."""
    _path = _write_json(tmpdir, "t.json", {"a0": None, "a1": [[1.0]], "beta": [1.0]})
    assert main(["closure-check", _path]) == EX_OK
    _report = json.loads(capsys.readouterr().out)
    assert _report["in_c0"]
    assert _report["in_closure"]


def test_closure_check_nonmember(tmpdir, capsys):
    """a = 1, b = -1 is outside the closure."""
    _path = _write_json(tmpdir, "t.json", {"a1": [[1.0]], "beta": [-1.0]})
    assert main(["closure-check", _path]) == EX_NONMEMBER
    assert not json.loads(capsys.readouterr().out)["in_closure"]


def test_closure_check_empty_a1(tmpdir):
    """An empty A1 is a data error."""
    _path = _write_json(tmpdir, "t.json", {"a1": [], "beta": [1.0]})
    assert main(["closure-check", _path]) == EX_DATAERR


@pytest.mark.parametrize(
    "payload",
    [
        {"a1": [[1.0, 2.0], [3.0]], "beta": [1.0, 1.0]},
        {"a1": [["x"]], "beta": [1.0]},
        {"a1": [[1.0]], "beta": ["one"]},
        {"a0": [[1.0], [2.0, 3.0]], "a1": [[1.0], [1.0]], "beta": [1.0, 1.0]},
    ],
)
def test_closure_check_schema_violation(tmpdir, payload):
    """Ragged or non-numeric arrays are data errors."""
    _path = _write_json(tmpdir, "t.json", payload)
    assert main(["closure-check", _path]) == EX_DATAERR


def test_closure_check_malformed(tmpdir, capsys):
    """Malformed JSON reports line and column."""
    _path = _write_json(tmpdir, "t.json", '{"a1": [[1.0]],\n "beta": [1.0,]}')
    assert main(["closure-check", _path]) == EX_DATAERR
    assert "t.json:2:" in capsys.readouterr().err


def test_closure_check_out_file(tmpdir):
    """--out writes the report to a file."""
    _path = _write_json(tmpdir, "t.json", {"a1": [[1.0]], "beta": [1.0]})
    _out = tmpdir.join("report.json")
    assert main(["closure-check", _path, "--out", str(_out)]) == EX_OK
    assert json.loads(_out.read())["in_c0"]


def test_missing_input_is_usage_error(tmpdir):
    """A path that does not exist is a usage error."""
    assert main(["closure-check", str(tmpdir.join("none.json"))]) == EX_USAGE


def test_alpha_half_is_usage_error():
    """The test needs alpha below 0.5."""
    assert main(["test", "--method", "screening", "--alpha", "0.5"]) == EX_USAGE


def test_unknown_command_exits_64():
    """argparse errors exit with 64."""
    with pytest.raises(SystemExit) as _exit:
        main(["fit"])
    assert _exit.value.code == EX_USAGE


def test_version(capsys):
    """--version prints the package version."""
    with pytest.raises(SystemExit) as _exit:
        main(["--version"])
    assert _exit.value.code == 0
    assert "linsys" in capsys.readouterr().out


def test_test_with_model(cox_files, capsys):
    """The test runs on a model JSON and a data CSV."""
    _model, _data = cox_files
    _code = main(["test", "--model", _model, "--data", _data, "--seed", "2"])
    _outcome = json.loads(capsys.readouterr().out)
    assert _code == (EX_REJECT if _outcome["reject"] else EX_OK)
    assert _outcome["n1"] + _outcome["n2"] == 300


def test_test_deterministic(cox_files, capsys):
    """Two runs with the same seed print the same outcome."""
    _model, _data = cox_files
    _argv = ["test", "--model", _model, "--data", _data, "--method", "screening"]
    main(_argv)
    _first = capsys.readouterr().out
    main(_argv)
    assert capsys.readouterr().out == _first


def test_test_multisplit(cox_files, capsys):
    """--splits combines several splits."""
    _model, _data = cox_files
    main(["test", "--model", _model, "--data", _data, "--splits", "3"])
    _outcome = json.loads(capsys.readouterr().out)
    assert len(_outcome["outcomes"]) == 3


def test_unknown_feature(tmpdir):
    """A model naming a missing column is a data error."""
    _model = _write_json(
        tmpdir,
        "model.json",
        {"b": [[{"kind": "constant", "value": 1.0}, {"kind": "mean", "feature": "q"}]]},
    )
    _data = tmpdir.join("data.csv")
    _data.write("a\n" + "\n".join(str(_i) for _i in range(10)) + "\n")
    assert main(["test", "--model", _model, "--data", str(_data)]) == EX_DATAERR


def test_non_numeric_data_column(tmpdir):
    """A feature column holding text is a data error."""
    _model = _write_json(
        tmpdir,
        "model.json",
        {"b": [[{"kind": "constant", "value": 1.0}, {"kind": "mean", "feature": "a"}]]},
    )
    _data = tmpdir.join("data.csv")
    _data.write("a\n" + "\n".join(["x", "1.0"] * 20) + "\n")
    assert main(["test", "--model", _model, "--data", str(_data)]) == EX_DATAERR


def test_design_and_model_exclusive(cox_files):
    """--design and --model cannot be combined."""
    _model, _data = cox_files
    _argv = ["test", "--model", _model, "--data", _data, "--design", "cox"]
    assert main(_argv + ["--n", "100", "--value", "0", "--H", "3"]) == EX_USAGE


def test_invert_design_csv(capsys):
    """invert prints one CSV row per grid value."""
    _argv = ["invert", "--design", "goff", "--n", "200", "--grid", "0.5,0.6,0.7"]
    assert main(_argv + ["--format", "csv", "--jobs", "1"]) == EX_OK
    _lines = capsys.readouterr().out.strip().splitlines()
    assert _lines[0] == "value,p_value,accepted"
    assert len(_lines) == 4


def test_invert_rejects_multisplit():
    """Test inversion runs one split per value."""
    _argv = ["invert", "--design", "goff", "--n", "200", "--grid", "0.6"]
    assert main(_argv + ["--splits", "2"]) == EX_USAGE


def test_simulate_grid_rows(capsys):
    """-1:1:0.1 yields 21 rows."""
    _argv = ["simulate", "--design", "cox", "--H", "3", "--n", "40", "--reps", "1"]
    _argv += ["--grid", "-1:1:0.1", "--seed", "7", "--jobs", "1"]
    assert main(_argv) == EX_OK
    _curve = RejectionCurve.from_csv(capsys.readouterr().out)
    assert len(_curve.grid) == 21
    assert _curve.grid[0] == -1.0
    assert _curve.grid[-1] == 1.0


def test_simulate_small_sample_is_usage_error(capsys):
    """--n too small for the screening weights is reported before any draw."""
    _argv = ["simulate", "--design", "goff", "--n", "20", "--reps", "1"]
    assert main(_argv + ["--grid", "0.62"]) == EX_USAGE
    assert "at least 31" in capsys.readouterr().err


def test_simulate_deterministic(capsys):
    """Two simulate runs with one seed print identical CSV."""
    _argv = ["simulate", "--design", "goff", "--n", "100", "--reps", "2"]
    _argv += ["--grid", "0.6,0.7", "--seed", "3", "--jobs", "1"]
    main(_argv)
    _first = capsys.readouterr().out
    main(_argv)
    assert capsys.readouterr().out == _first


def test_simulate_then_plot(tmpdir):
    """plot renders the CSV written by simulate."""
    _csv = tmpdir.join("curve.csv")
    _svg = tmpdir.join("curve.svg")
    _argv = ["simulate", "--design", "cox", "--H", "3", "--n", "40", "--reps", "1"]
    _argv += ["--grid", "-0.5:0.5:0.5", "--jobs", "1", "--out", str(_csv)]
    assert main(_argv) == EX_OK
    _argv = ["plot", str(_csv), "--design", "cox", "--out", str(_svg)]
    assert main(_argv) == EX_OK
    assert "<svg" in _svg.read()


def test_simulate_json(capsys):
    """--format json prints the curve as a JSON object."""
    _argv = ["simulate", "--design", "cox", "--H", "3", "--n", "40", "--reps", "1"]
    _argv += ["--grid", "0", "--method", "direct", "--format", "json"]
    assert main(_argv + ["--jobs", "1"]) == EX_OK
    _curve = json.loads(capsys.readouterr().out.replace("NaN", "null"))
    assert _curve["reps"] == 1
    assert _curve["reject_screening"] == [None]
