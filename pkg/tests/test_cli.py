import csv
import json

import pytest

from freqgate.cli import main
from freqgate.montecarlo import chunk_sizes, run_chunked, stream_id


def run(argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    return code


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, **sections):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(sections))
    return path


def test_simulate_gate_balanced(tmp_path):
    r = "0.7071"
    code = run(["simulate-gate", "--c0", r, "--c1", r, "--d0", r, "--d1", r,
                "--trials", 100_000, "--seed", 3, "--out", tmp_path])
    assert code == 0
    row = read_rows(tmp_path / "gate.csv")[0]
    rate, stderr = float(row["rate"]), float(row["stderr"])
    assert abs(rate - 0.25) < 3 * stderr
    manifest = json.loads((tmp_path / "gate.csv.manifest.json").read_text())
    assert manifest["master_seed"] == 3
    assert manifest["command"] == "simulate-gate"


def test_simulate_gate_null_outcome(tmp_path, capsys):
    code = run(["simulate-gate", "--c0", 1, "--c1", 0, "--d0", 1, "--d1", 0,
                "--trials", 1000, "--out", tmp_path])
    assert code == 0
    assert float(read_rows(tmp_path / "gate.csv")[0]["rate"]) == 0.0
    assert "null outcome" in capsys.readouterr().out
    assert json.loads((tmp_path / "gate_summary.json").read_text())["null_outcome"]


def test_simulate_gate_complex_literals(tmp_path):
    code = run(["simulate-gate", "--c0", "0.6", "--c1", "0.8i", "--d0", "0.6-0.8i", "--d1", "0",
                "--trials", 10, "--out", tmp_path])
    assert code == 0


def test_missing_flag_is_usage_error(tmp_path):
    assert run(["simulate-gate", "--c0", 1, "--c1", 0, "--d0", 1, "--out", tmp_path]) == 2


def test_bad_complex_literal_names_token(tmp_path, capsys):
    assert run(["simulate-gate", "--c0", "1+zz", "--c1", 0, "--d0", 1, "--d1", 0]) == 2
    assert "1+zz" in capsys.readouterr().err


def test_long_run_needs_flag(tmp_path):
    argv = ["simulate-gate", "--c0", 1, "--c1", 0, "--d0", 0, "--d1", 1,
            "--trials", 20_000_000, "--out", tmp_path]
    assert run(argv) == 2


def test_noise_sweep_doppler(tmp_path, capsys):
    code = run(["noise-sweep", "--param", "doppler", "--range", "0:3", "--steps", 31,
                "--out", tmp_path])
    assert code == 0
    rows = read_rows(tmp_path / "noise_doppler.csv")
    assert len(rows) == 31
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-12)
    assert "pass" in capsys.readouterr().out


def test_noise_sweep_common_arm_phase(tmp_path):
    code = run(["noise-sweep", "--param", "arm_phase", "--range", "0:6.283", "--steps", 64,
                "--out", tmp_path])
    assert code == 0
    rows = read_rows(tmp_path / "noise_arm_phase.csv")
    assert len(rows) == 64
    assert all(float(r["fidelity"]) > 1 - 1e-12 for r in rows)


def test_noise_sweep_path_mismatch(tmp_path):
    code = run(["noise-sweep", "--param", "path_mismatch", "--range", "0:10", "--steps", 11,
                "--out", tmp_path])
    assert code == 0
    rows = read_rows(tmp_path / "noise_path_mismatch.csv")
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0)
    # 1 mm of mismatch at a 16.1 GHz photon splitting: cos^2(0.337/2)
    assert float(rows[1]["fidelity"]) == pytest.approx(0.9719, abs=1e-4)


def test_noise_sweep_unknown_param(capsys):
    assert run(["noise-sweep", "--param", "bogus", "--range", "0:1", "--steps", 3]) == 2
    assert "doppler" in capsys.readouterr().err


def test_grow_cluster_table(tmp_path):
    code = run(["grow-cluster", "--n", 50, "--p-s", 0.5, "--trials", 100_000, "--seed", 1,
                "--out", tmp_path])
    assert code == 0
    row = read_rows(tmp_path / "growth.csv")[0]
    assert abs(float(row["empirical_mean"]) - 95.0) < 3 * float(row["empirical_stderr"])


def test_grow_cluster_single_qubits(tmp_path):
    assert run(["grow-cluster", "--n", 1, "--p-s", 1, "--trials", 10, "--out", tmp_path]) == 0
    row = read_rows(tmp_path / "growth.csv")[0]
    assert float(row["empirical_mean"]) == 1.0
    assert float(row["empirical_stderr"]) == 0.0


def test_grow_cluster_rejects_bad_probability():
    assert run(["grow-cluster", "--n", 5, "--p-s", 1.5]) == 2


def test_scaling_report(tmp_path):
    code = run(["scaling-report", "--target", 20, "--p-s", 0.9, 0.1, "--trials", 20,
                "--out", tmp_path])
    assert code == 0
    rows = read_rows(tmp_path / "scaling.csv")
    assert rows[0]["non_growing"] == "false"
    assert rows[1]["non_growing"] == "true"


def test_validate_config(tmp_path, capsys):
    good = write_config(tmp_path, efficiencies={"eta_d": 0.8, "eta_c": 0.5, "eta_b": 0.5})
    assert run(["validate-config", "--config", good]) == 0
    assert "config ok" in capsys.readouterr().out
    bad = write_config(tmp_path, efficiencies={"eta_d": 1.5},
                       species={"eta_b": 0.3}, noise={"wobble": 1})
    assert run(["validate-config", "--config", bad]) == 2
    err = capsys.readouterr().err
    assert "eta_d" in err and "wobble" in err


def test_global_flags_after_subcommand(tmp_path):
    code = run(["grow-cluster", "--n", 4, "--p-s", 0.5, "--trials", 100,
                "--seed", 9, "--out", tmp_path, "--workers", 1])
    assert code == 0
    assert json.loads((tmp_path / "growth.csv.manifest.json").read_text())["master_seed"] == 9


@pytest.mark.parametrize("argv", [
    ["simulate-gate", "--c0", "0.6", "--c1", "0.8", "--d0", "0.8", "--d1", "0.6",
     "--trials", 200_000],
    ["grow-cluster", "--n", 50, 20, "--p-s", 0.3, 0.9, "--trials", 150_000],
    ["scaling-report", "--target", 30, "--p-s", 0.8, "--trials", 30],
])
def test_results_independent_of_workers(tmp_path, argv):
    outputs = []
    for workers in (1, 3):
        out = tmp_path / f"w{workers}"
        assert run(argv + ["--seed", 11, "--workers", workers, "--out", out]) == 0
        name = {"simulate-gate": "gate.csv", "grow-cluster": "growth.csv",
                "scaling-report": "scaling.csv"}[argv[0]]
        outputs.append((out / name).read_bytes())
    assert outputs[0] == outputs[1]


def test_chunking_rule():
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert stream_id("a") != stream_id("b")
    parts = run_chunked(lambda k, r: (k, float(r.random())), 10, 5, 1, chunk_size=4)
    again = run_chunked(lambda k, r: (k, float(r.random())), 10, 5, 1, chunk_size=4)
    assert parts == again and [p[0] for p in parts] == [4, 4, 2]
