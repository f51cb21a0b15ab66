import json
from pathlib import Path

import jsonschema
import pytest

import main
from src.app import read_json_argument, rows_to_csv
from src.counting.counting import CSV_HEADER

SCHEMAS = Path(__file__).resolve().parent.parent / "schemas"
IDENTITY_GRAPH = json.dumps({"kind": "graph", "expr": {"op": "var"}, "domain": [0, 1]})


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text(encoding="utf-8"))


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(main, "setup_logging", lambda verbose=False, log_file=None: None)
    return tmp_path


def run_json(capsys, argv):
    code = main.run(argv)
    out = capsys.readouterr().out
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("envelope.json"))
    return doc


def test_help_exits_cleanly():
    assert main.run(["--help"]) == 0


def test_unknown_subcommand_is_a_usage_error():
    assert main.run(["bogus"]) == 2
    assert main.run(["modular", "phi"]) == 2


def test_modular_phi_output(capsys):
    doc = run_json(capsys, ["modular", "phi", "--level", "2"])
    assert doc["command"] == "modular phi"
    assert doc["precision_bits"] == 128
    result = doc["result"]
    jsonschema.validate(result, load_schema("modular_polynomial.json"))
    assert result["psi"] == 3
    assert result["symmetric"] is True


def test_precision_override(capsys):
    doc = run_json(capsys, ["--precision-bits", "256", "modular", "phi", "--level", "1"])
    assert doc["precision_bits"] == 256
    assert doc["config"]["precision"]["bits"] == 256


def test_level_above_bound_fails():
    assert main.run(["modular", "phi", "--level", "11"]) == 1


def test_torus_torsion_output(capsys):
    doc = run_json(capsys, ["torus", "torsion", "--curve", "x + y - 1", "--max-order", "12"])
    result = doc["result"]
    jsonschema.validate(result, load_schema("torsion.json"))
    assert result["count"] == 2
    assert sorted(p["exponents"] for p in result["points"]) == [[1, 5], [5, 1]]


def test_output_file(workspace):
    target = workspace / "phi.json"
    assert main.run(["--out", str(target), "modular", "phi", "--level", "1"]) == 0
    doc = json.loads(target.read_text(encoding="utf-8"))
    jsonschema.validate(doc, load_schema("envelope.json"))


def test_count_run_csv(capsys):
    argv = ["--format", "csv", "count", "run", "--set", IDENTITY_GRAPH, "--k", "1", "--tmin", "1", "--tmax", "3"]
    assert main.run(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert [line.split(",")[1] for line in lines[1:]] == ["2", "3", "5"]


def test_count_run_json_and_fit(capsys, workspace):
    series_csv = workspace / "series.csv"
    doc = run_json(
        capsys,
        ["count", "run", "--set", IDENTITY_GRAPH, "--k", "1", "--tmin", "10", "--tmax", "40",
         "--step", "10", "--csv", str(series_csv)],
    )
    jsonschema.validate(doc["result"], load_schema("count_series.json"))
    assert series_csv.exists()
    fit = run_json(capsys, ["count", "fit", str(series_csv)])["result"]
    assert 1.5 <= fit["epsilon_hat"] <= 2.5


def test_csv_is_refused_for_json_only_commands():
    assert main.run(["--format", "csv", "modular", "phi", "--level", "1"]) == 1


def test_demo_manin_mumford(capsys):
    doc = run_json(capsys, ["demo", "manin-mumford"])
    assert doc["command"] == "demo manin-mumford"
    jsonschema.validate(doc["result"], load_schema("demo.json"))
    assert doc["result"]["passed"] is True


def test_read_json_argument(workspace):
    path = workspace / "v.json"
    path.write_text('{"a": 1}', encoding="utf-8")
    assert read_json_argument(str(path)) == {"a": 1}
    assert read_json_argument("[1, 2]") == [1, 2]
    assert read_json_argument("x + y - 1") == "x + y - 1"
    assert read_json_argument(None) is None


def test_rows_to_csv():
    text = rows_to_csv([{"T": 1, "count": 2, "mode": "full", "min_margin": ""}])
    assert text == "T,count,mode,min_margin\n1,2,full,\n"
