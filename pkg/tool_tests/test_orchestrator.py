"""
Tests for experiment configs, the result store, the runner and the command line.
"""

import json

import pytest
import yaml

from src.diagnostics import diagnostic_registry
from src.diagnostics.base_diagnostic import DiagnosticResponse
from src.models.experiment import load_config, parse_config
from src.orchestrator import ExperimentRunner, RunState, run
from src.orchestrator.runner import flagged_defaults, hashed_params, state_of
from src.storage import ResultStore, param_hash, read_csv
from src.utils.errors import ConfigurationError

SCHEDULE = {"name": "schedule", "params": {"p1": 2000, "L0": 1000, "K": 1}}
CHEEGER = {"name": "cheeger", "params": {"l": [2, 3], "d": [1]}}


def _write(tmp_path, config, name="experiment.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(config))
    return path


def _config(out, *diagnostics):
    return {"model": {"N": 2, "d": 1}, "diagnostics": list(diagnostics), "output": {"directory": str(out)}}


def test_config_requires_model():
    with pytest.raises(ConfigurationError) as exc:
        parse_config({"diagnostics": []})
    assert exc.value.field_path == "model"


def test_config_error_names_the_field():
    with pytest.raises(ConfigurationError) as exc:
        parse_config({"model": {"N": 0}})
    assert exc.value.field_path.startswith("model.")


def test_config_params_override_defaults():
    config = parse_config({"model": {"n": 2, "d": 1}, "geometry": {"L": 6}, "seed": 5,
                           "diagnostics": [{"name": "spectrum", "seed": 9, "params": {"L": 3}}]})
    params = config.params_for(config.diagnostics[0])
    assert params["n"] == 2
    assert params["L"] == 3
    assert params["seed"] == 9


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.yaml")


def test_json_config(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(_config(tmp_path / "out", SCHEDULE)))
    assert load_config(path).diagnostics[0].name == "schedule"


def test_flagged_defaults():
    config = parse_config(_config("out", SCHEDULE, {"name": "ils"}))
    flagged = flagged_defaults(config)
    assert "interaction.u0" in flagged
    assert "schedule.L0" in flagged
    assert "ils.l_star" in flagged
    explicit = parse_config({"model": {"N": 2, "interaction": {"u0": 0.5, "kernel": "triangular_bump"}}})
    assert "interaction.u0" not in flagged_defaults(explicit)


def test_store_header_and_rows(tmp_path):
    store = ResultStore(str(tmp_path), version="9.9")
    path = store.write_csv("cheeger", [{"l": 2, "E2": 0.5}, {"l": 3, "E2": 0.25, "extra": True}], {"a": 1})
    assert path.read_text().splitlines()[0] == "# qgraph-loc v9.9 schema=cheeger"
    rows = read_csv(path)
    assert rows[0] == {"l": "2", "E2": "0.5", "extra": ""}
    assert rows[1]["extra"] == "True"


def test_param_hash_ignores_key_order():
    assert param_hash({"a": 1, "b": [1, 2]}) == param_hash({"b": [1, 2], "a": 1})
    assert param_hash({"a": 1}) != param_hash({"a": 2})
    assert hashed_params({"a": 1, "workers": 4}) == {"a": 1}


def test_store_stays_in_its_directory(tmp_path):
    store = ResultStore(str(tmp_path))
    with pytest.raises(ConfigurationError):
        store.write_json("../escape", {})
    with pytest.raises(ConfigurationError):
        store.write_json(".hidden", {})


def test_experiment_run_writes_results(tmp_path):
    out = tmp_path / "out"
    code = run(_write(tmp_path, _config(out, SCHEDULE, CHEEGER)))
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert [r["state"] for r in manifest["runs"]] == ["reported", "passed"]
    assert any(name.startswith("schedule-") for name in manifest["files"])
    assert "interaction.u0" in manifest["flagged_defaults"]
    assert all((out / name).is_file() for name in manifest["files"])


def test_rerun_is_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(_write(tmp_path, _config(first, SCHEDULE, CHEEGER), "a.yaml")) == 0
    assert run(_write(tmp_path, _config(second, SCHEDULE, CHEEGER), "b.yaml")) == 0
    names = sorted(p.name for p in first.iterdir() if p.name != "manifest.json")
    assert names == sorted(p.name for p in second.iterdir() if p.name != "manifest.json")
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_out_flag_overrides_config(tmp_path):
    path = _write(tmp_path, _config(tmp_path / "ignored", SCHEDULE))
    assert run(path, out=str(tmp_path / "chosen")) == 0
    assert (tmp_path / "chosen" / "manifest.json").is_file()
    assert not (tmp_path / "ignored").exists()


def test_unknown_diagnostic_is_a_config_error(tmp_path):
    assert run(_write(tmp_path, _config(tmp_path / "out", {"name": "nope"}))) == 2


def test_invalid_config_exit_code(tmp_path):
    path = _write(tmp_path, {"model": {"N": 0}})
    assert run(path) == 2


def test_infeasible_schedule_exit_code(tmp_path):
    infeasible = {"name": "schedule", "params": {"p1": 5, "L0": 1000, "K": 1}}
    assert run(_write(tmp_path, _config(tmp_path / "out", infeasible, CHEEGER))) == 1


def test_failed_assertion_exit_code(tmp_path, mocker):
    failed = DiagnosticResponse(success=True, diagnostic="cheeger", schema_name="cheeger", passed=False,
                                assertable=True, rows=[{"l": 2}])
    mocker.patch.object(diagnostic_registry, "execute", return_value=failed)
    config = parse_config(_config(tmp_path / "out", CHEEGER))
    runner = ExperimentRunner(config)
    assert runner.run() == 1
    assert runner.records[0].state == RunState.FAILED


def test_solver_failure_exit_code(tmp_path, mocker):
    broken = DiagnosticResponse(success=False, diagnostic="spectrum", error="no convergence",
                                error_type="SolverFailureError", exit_code=3)
    mocker.patch.object(diagnostic_registry, "execute", return_value=broken)
    config = parse_config(_config(tmp_path / "out", {"name": "spectrum"}))
    runner = ExperimentRunner(config)
    assert runner.run() == 3
    assert runner.records[0].files == {}


def test_state_of_responses():
    assert state_of(DiagnosticResponse(success=True)) == RunState.REPORTED
    assert state_of(DiagnosticResponse(success=True, assertable=True, passed=True)) == RunState.PASSED
    assert state_of(DiagnosticResponse(success=False, exit_code=2)) == RunState.CONFIG_ERROR


def test_command_line_schedule(tmp_path):
    from run_experiment import main

    out = tmp_path / "cli"
    code = main(["schedule", "--N", "2", "--d", "1", "--p1", "2000", "--L0", "1000", "--K", "1",
                 "--out", str(out)])
    assert code == 0
    assert any(p.name.startswith("schedule-") for p in out.iterdir())


def test_command_line_run(tmp_path):
    from run_experiment import main

    path = _write(tmp_path, _config(tmp_path / "ignored", CHEEGER))
    assert main(["run", str(path), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "manifest.json").is_file()
