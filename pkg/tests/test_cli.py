import csv
import io
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from pathint.cli import EXIT_BOUND, EXIT_CAP, EXIT_USAGE, run

ROOT = Path(__file__).resolve().parents[1]
DOCS = ROOT / "docs"


def schema(name):
    return json.loads(resources.files("pathint").joinpath("schemas", name).read_text())


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dim_example(capsys):
    assert invoke(capsys, "dim", "--spec", "wiener", "--r", "1", "--K1", "1", "--eps", "0.1") == (
        0, "5\n", "")


def test_dim_methods(capsys):
    assert invoke(capsys, "dim", "--r", "2", "--eps", "0.01")[1] == "11\n"
    assert invoke(capsys, "dim", "--r", "2", "--eps", "0.1", "--method", "tail")[1] == "2\n"
    assert invoke(capsys, "dim", "--r", "2", "--K0", "2", "--eps", "0.1",
                  "--method", "d_up")[1] == "3\n"


def test_spectrum_trace(capsys):
    assert invoke(capsys, "spectrum", "--spec", "wiener", "--trace") == (0, "0.5\n", "")


def test_spectrum_json(capsys):
    code, out, _ = invoke(capsys, "spectrum", "--spec", "power_law", "--a", "1", "--k", "2",
                          "--eigen", "1", "--tail", "10")
    obj = json.loads(out)
    assert code == 0 and obj["eigenvalue"] == 1.0 and obj["tail_bound"] == pytest.approx(0.1)


def test_qae_demo_example(capsys):
    code, out, _ = invoke(capsys, "qae-demo", "--n", "4", "--delta", "0.5", "--seed", "7")
    obj = json.loads(out)
    assert code == 0
    assert obj["M"] == 32 and obj["queries"] == 2 * (32 - 1) + 1
    assert abs(obj["estimate"] - 0.5) <= 0.5
    assert obj["target_mean"] == 0.5 and obj["qubits"] == 2 + 5 + 1


def test_qae_demo_values_and_global_seed(capsys):
    a = invoke(capsys, "--seed", "3", "qae-demo", "--values", "1,-1,1,1", "--delta", "0.5")[1]
    b = invoke(capsys, "qae-demo", "--values", "1,-1,1,1", "--delta", "0.5", "--seed", "3")[1]
    assert a == b and json.loads(a)["seed"] == 3


def test_grid_info(capsys):
    code, out, _ = invoke(capsys, "grid-info", "--d", "2", "--m", "49")
    obj = json.loads(out)
    assert code == 0 and obj["n"] == "2401" and obj["n_digits"] == 4
    assert obj["worst_case_error_bound"] <= 0.05


def test_integrate_round_trip(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, out, _ = invoke(capsys, "integrate", "--config", str(DOCS / "example_config.json"),
                          "--out", str(out_file))
    assert code == 0 and out == ""
    report = json.loads(out_file.read_text())
    jsonschema.validate(report, schema("report.schema.json"))
    assert report["n"] == "2401"


@pytest.mark.parametrize("method", ["worst_case_classical", "monte_carlo",
                                    "quantum_statevector", "quantum_analytic"])
def test_every_method_report_validates(capsys, tmp_path, method):
    config = json.loads((DOCS / "example_config.json").read_text())
    config["method"] = method
    jsonschema.validate(config, schema("config.schema.json"))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config))
    code, out, _ = invoke(capsys, "integrate", "--config", str(path), "--timing")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("report.schema.json"))


def test_short_circuit_report_validates(capsys, tmp_path):
    config = json.loads((DOCS / "example_config.json").read_text())
    config.update(eps=3.0, splits=None)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config))
    code, out, _ = invoke(capsys, "integrate", "--config", str(path))
    assert code == 0
    jsonschema.validate(json.loads(out), schema("report.schema.json"))


def test_docs_schemas_match_package():
    for name in ("config.schema.json", "report.schema.json"):
        assert json.loads((DOCS / name).read_text()) == schema(name)


def test_bench_csv(capsys):
    code, out, err = invoke(capsys, "bench", "--eps", "0.2,0.1", "--methods",
                            "quantum_analytic,monte_carlo")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert out.splitlines()[0] == "eps,d,m,n_digits,mc_samples,q_queries,q_qubits,method,observed_error,seed"
    assert [(r["eps"], r["d"], r["m"], r["q_queries"]) for r in rows[::2]] == [
        ("0.2", "2", "49", "255"), ("0.1", "3", "97", "511")]


def test_bench_notes_skipped_classical(capsys):
    code, out, err = invoke(capsys, "bench", "--eps", "0.05", "--methods", "worst_case_classical")
    assert code == 0 and out.count("\n") == 1
    assert "skipped worst_case_classical" in err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--trace"],
    ["qae-demo", "--n", "8", "--delta", "0.2", "--reps", "3", "--seed", "1"],
    ["bench", "--eps", "0.2", "--trials", "2", "--seed", "4"],
    ["integrate", "--config", str(DOCS / "example_config.json")],
])
def test_byte_determinism(capsys, argv):
    assert invoke(capsys, *argv)[1] == invoke(capsys, *argv)[1]


@pytest.mark.parametrize("argv, code", [
    (["dim", "--eps", "0.1", "--bogus"], EXIT_USAGE),
    (["nope"], EXIT_USAGE),
    (["dim", "--eps", "-1"], EXIT_USAGE),
    (["qae-demo", "--delta", "0.5", "--reps", "2"], EXIT_USAGE),
    (["qae-demo", "--n", "3", "--values", "1,1", "--delta", "0.5"], EXIT_USAGE),
    (["integrate", "--config", "/nonexistent.json"], EXIT_USAGE),
    (["qae-demo", "--values", "0.5,1.5", "--delta", "0.5"], EXIT_BOUND),
    (["qae-demo", "--n", "4096", "--delta", "0.01", "--memory-cap", "1000"], EXIT_CAP),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = invoke(capsys, *argv)
    assert got == code
    assert out == ""
    assert err.count("\n") == 1 and err.startswith(f"pathint: error[{code}]: ")


def test_classical_cap_exit_code(capsys, tmp_path):
    config = json.loads((DOCS / "example_config.json").read_text())
    config.update(method="worst_case_classical", enumeration_cap=1000)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config))
    code, _, err = invoke(capsys, "integrate", "--config", str(path))
    assert code == EXIT_CAP and "49**2" in err


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        run(["bench", "--help"])
    out = capsys.readouterr().out
    for flag in ("--eps", "--methods", "--trials", "--seed", "--out", "--format"):
        assert flag in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pathint", "spectrum", "--trace"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout == "0.5\n"
