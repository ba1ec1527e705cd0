"""Command-line behavior: exit codes, reproducible stdout, bench report
shape, demo configs. Output shapes are pinned by the schemas under
docs/schemas/.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest
from jsonschema import Draft202012Validator

from qsim import backends, cli

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs" / "schemas"

BELL = "OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0], q[1];\n"


def _validator(name):
    with open(SCHEMA_DIR / name, encoding="utf-8") as fh:
        schema = json.load(fh)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


RUN_SCHEMA = _validator("run-result.schema.json")
BENCH_SCHEMA = _validator("bench-report.schema.json")
DEMO_SCHEMA = _validator("demo-result.schema.json")
CONFIG_SCHEMA = _validator("demo-config.schema.json")


@pytest.fixture(autouse=True)
def _restore_backend():
    # --backend flips the process-wide active backend; put it back
    name = backends.active().name
    yield
    backends.set_active(name)


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.qasm"
    path.write_text(BELL, encoding="utf-8")
    return str(path)


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# run ------------------------------------------------------------------


def test_run_emits_result_json(bell_file, capsys):
    code, out, err = run_cli(
        ["run", bell_file, "--nshots", "100", "--seed", "7"], capsys
    )
    assert code == cli.EXIT_OK
    payload = json.loads(out)
    RUN_SCHEMA.validate(payload)
    assert set(payload) == {"nqubits", "counts", "probabilities"}
    assert payload["nqubits"] == 2
    assert payload["probabilities"][0] == pytest.approx(0.5)
    assert payload["probabilities"][3] == pytest.approx(0.5)
    assert set(payload["counts"]) <= {"00", "11"}
    assert sum(payload["counts"].values()) == 100
    # timing goes to stderr only
    assert "elapsed_s" not in payload
    assert any(line.startswith("elapsed_s ") for line in err.splitlines())


def test_run_stdout_reproducible_for_fixed_seed(bell_file, capsys):
    args = ["run", bell_file, "--nshots", "2000", "--seed", "5", "--json"]
    code1, out1, _ = run_cli(args, capsys)
    code2, out2, _ = run_cli(args, capsys)
    assert code1 == code2 == cli.EXIT_OK
    assert out1 == out2
    _, out3, _ = run_cli(
        ["run", bell_file, "--nshots", "2000", "--seed", "6", "--json"],
        capsys,
    )
    assert json.loads(out3)["counts"] != json.loads(out1)["counts"]


def test_run_json_flag_compacts_output(bell_file, capsys):
    _, pretty, _ = run_cli(["run", bell_file], capsys)
    _, compact, _ = run_cli(["run", bell_file, "--json"], capsys)
    assert compact.count("\n") == 1
    assert len(compact) < len(pretty)
    assert json.loads(compact) == json.loads(pretty)


def test_run_backends_agree(bell_file, capsys):
    _, out_k, _ = run_cli(
        ["run", bell_file, "--backend", "kernel", "--json"], capsys
    )
    _, out_r, _ = run_cli(
        ["run", bell_file, "--backend", "reference", "--json"], capsys
    )
    probs_k = json.loads(out_k)["probabilities"]
    probs_r = json.loads(out_r)["probabilities"]
    assert probs_k == pytest.approx(probs_r, abs=1e-12)


def test_run_missing_file_is_usage_error(tmp_path, capsys):
    missing = str(tmp_path / "nope.qasm")
    code, out, err = run_cli(["run", missing], capsys)
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert missing in err


def test_run_parse_error_prefixes_filename(tmp_path, capsys):
    path = tmp_path / "bad.qasm"
    path.write_text("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n", encoding="utf-8")
    code, out, err = run_cli(["run", str(path)], capsys)
    assert code == cli.EXIT_PARSE
    assert out == ""
    assert f"{path}:3:1: unknown-gate" in err


def test_run_binary_file_is_parse_error(tmp_path, capsys):
    path = tmp_path / "blob.qasm"
    path.write_bytes(b"\xff\xfe\x00\x01binary")
    code, _, err = run_cli(["run", str(path)], capsys)
    assert code == cli.EXIT_PARSE
    assert "not a text file" in err


def test_run_negative_nshots_is_usage_error(bell_file, capsys):
    code, _, err = run_cli(["run", bell_file, "--nshots", "-5"], capsys)
    assert code == cli.EXIT_USAGE
    assert "--nshots" in err


def test_run_unknown_backend_is_usage_error(bell_file, capsys):
    code, _, err = run_cli(
        ["run", bell_file, "--backend", "imaginary"], capsys
    )
    assert code == cli.EXIT_USAGE
    assert "imaginary" in err
    assert "kernel" in err and "reference" in err


def test_run_save_then_init_round_trip(tmp_path, capsys):
    flip = tmp_path / "flip.qasm"
    flip.write_text("OPENQASM 2.0;\nqreg q[1];\nx q[0];\n", encoding="utf-8")
    saved = tmp_path / "state.bin"
    code, out, _ = run_cli(
        ["run", str(flip), "--save-state", str(saved)], capsys
    )
    assert code == cli.EXIT_OK
    assert json.loads(out)["probabilities"] == pytest.approx([0.0, 1.0])
    assert saved.exists()
    # a second X from the saved |1> lands back on |0>
    code, out, _ = run_cli(
        ["run", str(flip), "--init-state", str(saved)], capsys
    )
    assert code == cli.EXIT_OK
    assert json.loads(out)["probabilities"] == pytest.approx([1.0, 0.0])


def test_run_init_state_size_mismatch_is_exec_error(
    tmp_path, bell_file, capsys
):
    flip = tmp_path / "flip.qasm"
    flip.write_text("OPENQASM 2.0;\nqreg q[1];\nx q[0];\n", encoding="utf-8")
    saved = tmp_path / "one-qubit.bin"
    run_cli(["run", str(flip), "--save-state", str(saved)], capsys)
    code, _, err = run_cli(
        ["run", bell_file, "--init-state", str(saved)], capsys
    )
    assert code == cli.EXIT_EXEC
    assert "1" in err and "2" in err


def test_run_corrupt_init_state_is_exec_error(tmp_path, bell_file, capsys):
    garbage = tmp_path / "garbage.bin"
    garbage.write_text("this is not a state", encoding="utf-8")
    code, _, err = run_cli(
        ["run", bell_file, "--init-state", str(garbage)], capsys
    )
    assert code == cli.EXIT_EXEC
    assert "bad state file" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["bench"],  # --qubits is required
        ["demo", "vqe"],  # --config is required
        ["demo", "mystery", "--config", "x.json"],
        ["run"],
    ],
    ids=["empty", "unknown-command", "bench-no-qubits", "demo-no-config",
         "demo-unknown-name", "run-no-file"],
)
def test_usage_problems_exit_1(argv, capsys):
    code, out, _ = run_cli(argv, capsys)
    assert code == cli.EXIT_USAGE
    assert out == ""


# bench ----------------------------------------------------------------


def test_bench_report_shape_and_capacity_skip(capsys):
    code, out, _ = run_cli(
        ["bench", "--family", "qft", "--qubits", "2", "13",
         "--repeats", "1"], capsys
    )
    assert code == cli.EXIT_OK
    report = json.loads(out)
    BENCH_SCHEMA.validate(report)
    assert report["repeats"] == 3  # floor: medians of fewer runs are noise
    assert report["worker_count"] >= 1
    assert len(report["rows"]) == 4  # 2 sizes x (kernel, reference)
    by_key = {(r["backend"], r["n_qubits"]): r for r in report["rows"]}
    # small sizes are cross-checked against the dense backend
    assert by_key[("kernel", 2)]["correct"] is True
    assert by_key[("reference", 2)]["correct"] is True
    # 13 qubits exceeds the dense backend's capacity
    assert by_key[("reference", 13)] == {
        "backend": "reference", "family": "qft", "n_qubits": 13,
        "skipped": "capacity",
    }
    big = by_key[("kernel", 13)]
    assert big["correct"] is None  # too large to cross-check
    assert big["seconds_median"] >= 0.0
    # the kernel backend runs in place: one buffer for the whole circuit
    assert by_key[("kernel", 2)]["allocations"] == 1
    assert big["allocations"] == 1


def test_bench_random_layered_family(capsys):
    code, out, _ = run_cli(
        ["bench", "--family", "random-layered", "--qubits", "3",
         "--depth", "4", "--seed", "9"], capsys
    )
    assert code == cli.EXIT_OK
    report = json.loads(out)
    BENCH_SCHEMA.validate(report)
    assert all(r["family"] == "random-layered" for r in report["rows"])
    assert all(r["correct"] is True for r in report["rows"])


def test_bench_writes_out_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out, err = run_cli(
        ["bench", "--qubits", "2", "--backends", "kernel",
         "--out", str(out_path)], capsys
    )
    assert code == cli.EXIT_OK
    assert out == ""  # report went to the file, not stdout
    assert str(out_path) in err
    report = json.loads(out_path.read_text(encoding="utf-8"))
    BENCH_SCHEMA.validate(report)
    assert [r["backend"] for r in report["rows"]] == ["kernel"]


def test_bench_unknown_backend_is_usage_error(capsys):
    code, _, err = run_cli(
        ["bench", "--qubits", "2", "--backends", "imaginary"], capsys
    )
    assert code == cli.EXIT_USAGE
    assert "imaginary" in err


def test_bench_rejects_nonpositive_qubits(capsys):
    code, _, err = run_cli(["bench", "--qubits", "0"], capsys)
    assert code == cli.EXIT_USAGE
    assert "qubit count" in err


# demo -----------------------------------------------------------------


def _write_config(tmp_path, config):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return str(path)


def _run_demo(name, config, tmp_path, capsys):
    CONFIG_SCHEMA.validate(config)  # shipped schema accepts what we ship
    path = _write_config(tmp_path, config)
    code, out, err = run_cli(["demo", name, "--config", path], capsys)
    assert code == cli.EXIT_OK, err
    payload = json.loads(out)
    DEMO_SCHEMA.validate(payload)
    assert payload["demo"] == name
    assert payload["config"] == config
    return payload["result"]

def test_demo_grover(tmp_path, capsys):
    result = _run_demo(
        "grover",
        {"n": 3, "marked": [5], "iterations": 2, "nshots": 2000,
         "seed": 11},
        tmp_path, capsys,
    )
    assert result["iterations"] == 2
    assert result["predicted"] == pytest.approx(121 / 128, abs=1e-12)
    assert result["simulated"] == pytest.approx(result["predicted"],
                                                abs=1e-10)
    assert result["within_3_sigma"] is True


def test_demo_vqe(tmp_path, capsys):
    result = _run_demo(
        "vqe",
        {"hamiltonian": {"model": "tfim", "n": 2, "h": 0.5},
         "depth": 2, "budget": 800, "seed": 2},
        tmp_path, capsys,
    )
    assert result["evaluations"] <= 800
    assert len(result["params"]) == 6
    assert abs(result["error"]) < 1e-2
    assert result["energy"] == pytest.approx(
        result["ground_energy"] + result["error"], abs=1e-12
    )


def test_demo_qaoa(tmp_path, capsys):
    result = _run_demo(
        "qaoa",
        {"hamiltonian": {"model": "maxcut",
                         "edges": [[0, 1], [1, 2], [0, 2]]},
         "p": 2, "budget": 2000, "seed": 0},
        tmp_path, capsys,
    )
    assert result["ground_energy"] == pytest.approx(-2.0)
    assert result["energy"] == pytest.approx(-2.0, abs=1e-3)
    assert len(result["params"]) == 4


def test_demo_adiabatic(tmp_path, capsys):
    result = _run_demo(
        "adiabatic",
        {"hamiltonian": {"model": "tfim", "n": 2, "h": 0.5},
         "T": 10, "dt": 0.05},
        tmp_path, capsys,
    )
    assert result["steps"] == 200
    assert result["fidelity"] > 0.9
    assert result["final_energy"] >= result["ground_energy"] - 1e-9


def test_demo_falqon(tmp_path, capsys):
    result = _run_demo(
        "falqon",
        {"hamiltonian": {"model": "maxcut",
                         "edges": [[0, 1], [1, 2], [0, 2]]},
         "dt": 0.03, "steps": 150},
        tmp_path, capsys,
    )
    assert result["monotone"] is True
    assert result["ground_energy"] == pytest.approx(-2.0)
    assert result["final_energy"] == pytest.approx(-2.0, abs=0.1)
    assert result["min_energy"] <= result["final_energy"] + 1e-12


@pytest.mark.parametrize(
    "name,config,missing",
    [
        ("vqe", {}, "hamiltonian"),
        ("vqe", {"hamiltonian": {"model": "tfim", "n": 2}}, "depth"),
        ("grover", {"n": 3}, "marked"),
        ("falqon",
         {"hamiltonian": {"model": "maxcut", "edges": [[0, 1]]},
          "dt": 0.05},
         "steps"),
        ("adiabatic",
         {"hamiltonian": {"model": "tfim", "n": 2}, "T": 1.0},
         "dt"),
    ],
)
def test_demo_missing_field_is_usage_error(
    name, config, missing, tmp_path, capsys
):
    assert not CONFIG_SCHEMA.is_valid(config)  # schema agrees it's short
    path = _write_config(tmp_path, config)
    code, out, err = run_cli(["demo", name, "--config", path], capsys)
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert f"demo {name}: config missing required field '{missing}'" in err


def test_demo_wrong_field_type_is_usage_error(tmp_path, capsys):
    path = _write_config(tmp_path, {"n": "three", "marked": [1]})
    code, _, err = run_cli(["demo", "grover", "--config", path], capsys)
    assert code == cli.EXIT_USAGE
    assert "field 'n' must be int, got str" in err


def test_demo_invalid_json_config_is_usage_error(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = run_cli(["demo", "vqe", "--config", str(path)], capsys)
    assert code == cli.EXIT_USAGE
    assert "invalid JSON" in err


def test_demo_non_object_config_is_usage_error(tmp_path, capsys):
    path = _write_config(tmp_path, None)
    path = Path(path)
    path.write_text("[1, 2, 3]", encoding="utf-8")
    code, _, err = run_cli(["demo", "vqe", "--config", str(path)], capsys)
    assert code == cli.EXIT_USAGE
    assert "JSON object" in err


def test_demo_unknown_hamiltonian_model_is_usage_error(tmp_path, capsys):
    path = _write_config(
        tmp_path,
        {"hamiltonian": {"model": "heisenberg-4d", "n": 2}, "depth": 1},
    )
    code, _, err = run_cli(["demo", "vqe", "--config", path], capsys)
    assert code == cli.EXIT_USAGE
    assert "heisenberg-4d" in err


def test_demo_domain_error_is_usage_error(tmp_path, capsys):
    # marked index outside the register
    path = _write_config(tmp_path, {"n": 2, "marked": [9]})
    code, _, err = run_cli(["demo", "grover", "--config", path], capsys)
    assert code == cli.EXIT_USAGE
    assert err.startswith("qsim: ")


# process-level --------------------------------------------------------


def test_exit_codes_cross_process(tmp_path):
    """The installed entry point must hand the same codes to the shell."""
    good = tmp_path / "ok.qasm"
    good.write_text(BELL, encoding="utf-8")
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[1];\nwarp q[0];\n",
                   encoding="utf-8")
    env = dict(os.environ)
    ok = subprocess.run(
        [sys.executable, "-m", "qsim.cli", "run", str(good), "--json"],
        capture_output=True, text=True, env=env,
    )
    assert ok.returncode == cli.EXIT_OK, ok.stderr
    RUN_SCHEMA.validate(json.loads(ok.stdout))
    broken = subprocess.run(
        [sys.executable, "-m", "qsim.cli", "run", str(bad)],
        capture_output=True, text=True, env=env,
    )
    assert broken.returncode == cli.EXIT_PARSE
    assert "unknown-gate" in broken.stderr
