import filecmp
import subprocess
import sys

import numpy as np
import pytest
import yaml

from ncps_dyn.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from ncps_dyn.config import load_scenario, validate
from ncps_dyn.dynamics import Trajectory
from ncps_dyn.errors import ValidationError
from ncps_dyn.files import (
    TRAJECTORY_COLUMNS,
    columns_to_csv,
    read_csv_columns,
    read_trajectory_csv,
    write_trajectory_csv,
)

from scenarios import DEMOS, MALFORMED, demo_path, load_demo


def run(sub, config, out_dir, *extra):
    return main([sub, "--config", str(config), "--out-dir", str(out_dir), *extra])


def write_yaml(tmp_path, raw, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return path


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo_configs_validate(name):
    assert validate(load_demo(name), DEMOS[name]) == []


def test_uniform_demo_hits_hand_value(tmp_path):
    assert run("uniform", demo_path("uniform"), tmp_path) == EXIT_OK
    cols = read_csv_columns(tmp_path / "uniform_trajectory.csv")
    assert tuple(cols) == TRAJECTORY_COLUMNS
    k = int(np.argmin(np.abs(cols["t"] - np.pi)))
    assert cols["t"][k] == pytest.approx(np.pi, abs=1e-12)
    assert cols["x1"][k] == pytest.approx(-2.0, abs=1e-8)
    assert (tmp_path / "uniform_x1.svg").read_text().startswith("<?xml")


def test_brackets_demo_all_pass(tmp_path):
    assert run("brackets", demo_path("brackets"), tmp_path) == EXIT_OK
    report = (tmp_path / "brackets_report.txt").read_text()
    assert "overall: PASS" in report
    assert "FAIL" not in report


@pytest.mark.parametrize("name", ["uniform", "wep_violation", "brackets", "composite"])
def test_runs_are_byte_identical(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(DEMOS[name], demo_path(name), a) == EXIT_OK
    assert run(DEMOS[name], demo_path(name), b) == EXIT_OK
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
    assert mismatch == [] and errors == []


def test_seed_override_changes_sampled_report(tmp_path):
    run("brackets", demo_path("brackets"), tmp_path / "a")
    run("brackets", demo_path("brackets"), tmp_path / "b", "--seed", "7")
    a = (tmp_path / "a" / "brackets_report.txt").read_text()
    b = (tmp_path / "b" / "brackets_report.txt").read_text()
    assert "seed: 42" in a and "seed: 7" in b


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("NCPS_OUT_DIR", str(tmp_path / "env"))
    assert main(["brackets", "--config", str(demo_path("brackets"))]) == EXIT_OK
    assert (tmp_path / "env" / "brackets_report.txt").exists()


def test_validate_only_writes_nothing(tmp_path, capsys):
    assert run("kepler", demo_path("kepler"), tmp_path / "out", "--validate-only") == EXIT_OK
    assert not (tmp_path / "out").exists()
    assert "ok" in capsys.readouterr().out


def test_both_couplings_and_constants_is_one_problem():
    raw = load_demo("uniform")
    raw["bodies"][0]["B"] = 0.2
    assert len(validate(raw, "uniform")) == 1


def test_nonpositive_t_end_is_one_problem():
    raw = load_demo("uniform")
    raw["integrator"]["t_end"] = -1.0
    problems = validate(raw, "uniform")
    assert len(problems) == 1 and "t_end" in problems[0]


def test_every_problem_is_listed():
    raw = load_demo("wep_violation")
    raw["bodies"][0]["mass"] = 0
    raw["integrator"]["rel_tol"] = "fast"
    raw["extra"] = 1
    problems = validate(raw, "wep")
    assert len(problems) == 3
    assert any(p.startswith("extra") for p in problems)


def test_exponent_strings_read_as_numbers():
    # YAML 1.1 reads 1e-10 (no dot) as a string
    raw = yaml.safe_load("kind: brackets\ncheck:\n  tol: 1e-10\n")
    assert validate(raw, "brackets") == []


def test_load_scenario_raises_with_all_problems(tmp_path):
    raw = load_demo("uniform")
    raw["bodies"][0]["mass"] = -2
    raw["field"]["g"] = -1
    with pytest.raises(ValidationError) as info:
        load_scenario(write_yaml(tmp_path, raw))
    assert "bodies[0].mass" in str(info.value) and "field.g" in str(info.value)


@pytest.mark.parametrize("case", sorted(MALFORMED))
def test_malformed_configs_exit_2(tmp_path, capsys, case):
    sub, raw, key = MALFORMED[case]()
    assert run(sub, write_yaml(tmp_path, raw), tmp_path / "out") == EXIT_INVALID
    err = capsys.readouterr().err
    assert key in err
    assert not (tmp_path / "out").exists()


def test_unreadable_and_non_yaml_configs(tmp_path):
    assert run("uniform", tmp_path / "missing.yaml", tmp_path) == EXIT_INVALID
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: [uniform\n")
    assert run("uniform", bad, tmp_path) == EXIT_INVALID


def test_subcommand_must_match_kind(tmp_path):
    assert run("kepler", demo_path("uniform"), tmp_path) == EXIT_INVALID


def test_numerical_failure_exit_3(tmp_path, capsys):
    raw = load_demo("kepler")
    raw["initial"] = {"x": [1.0, 0.0, 0.0], "v": [0.0, 0.0, 0.0]}
    raw["integrator"].update({"t_end": 5.0, "r_min": 0.01})
    assert run("kepler", write_yaml(tmp_path, raw), tmp_path / "out") == EXIT_NUMERICAL
    assert "at t=" in capsys.readouterr().err


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ncps_dyn.cli", "brackets", "--config",
                           str(demo_path("brackets")), "--validate-only"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    n = 25
    traj = Trajectory(np.cumsum(rng.uniform(0.01, 1, n)), rng.normal(size=(n, 3)) * 1e3,
                      rng.normal(size=(n, 3)) * 1e-7, rng.normal(size=n), rng.normal(size=(n, 3)))
    path = write_trajectory_csv(tmp_path / "t.csv", traj)
    back = read_trajectory_csv(path)
    for attr in ("t", "x", "v", "energy", "angular_momentum"):
        assert np.array_equal(getattr(back, attr), getattr(traj, attr))


def test_csv_round_trip_of_demo_output(tmp_path):
    run("wep", demo_path("wep_violation"), tmp_path)
    for csv in tmp_path.glob("*.csv"):
        assert columns_to_csv(read_csv_columns(csv)) == csv.read_text()
