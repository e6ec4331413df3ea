import json

import pytest
from click.testing import CliRunner

from skedfit import fixtures
from skedfit.cli import main
from skedfit.instance import save_instance


@pytest.fixture(scope="module")
def tiny_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "tiny.json"
    save_instance(fixtures.tiny_instance(), path)
    return str(path)


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


def test_solve_writes_breakdown(runner, tiny_file, tmp_path):
    out = tmp_path / "sol.json"
    result = runner.invoke(main, ["solve", "--instance", tiny_file,
                                  "--model", "ctc", "--out", str(out),
                                  "--store", str(tmp_path / "store")])
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert set(payload["breakdown"]) == {
        "fuel_emission_increment", "spilled_cost", "deviation_penalty",
        "swap_cost", "crew_service_cost", "revenue", "profit"}
    assert payload["verified"] is True


def test_max_swap_with_ctc_rejected(runner, tiny_file):
    result = runner.invoke(main, ["solve", "--instance", tiny_file,
                                  "--model", "ctc", "--max-swap", "3"])
    assert result.exit_code == 2


def test_missing_file_exit_code(runner):
    result = runner.invoke(main, ["solve", "--instance", "absent.json"])
    assert result.exit_code == 2


def test_unparseable_instance(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    result = runner.invoke(main, ["solve", "--instance", str(bad)])
    assert result.exit_code == 2


def test_whatif_sweep_length(runner, tiny_file):
    result = runner.invoke(main, ["whatif", "--instance", tiny_file,
                                  "--k-max", "1"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert len(payload["points"]) == 2


def test_oracle_command(runner, tiny_file):
    result = runner.invoke(main, ["oracle", "--instance", tiny_file,
                                  "--model", "ctc"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["combos_total"] == 1


def test_verify_command(runner, tiny_file, tmp_path):
    out = tmp_path / "sol.json"
    runner.invoke(main, ["solve", "--instance", tiny_file, "--model",
                         "ctc", "--out", str(out)])
    result = runner.invoke(main, ["verify", "--instance", tiny_file,
                                  "--solution", str(out)])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["ok"] is True


def test_verify_rejects_tampering(runner, tiny_file, tmp_path):
    out = tmp_path / "sol.json"
    runner.invoke(main, ["solve", "--instance", tiny_file, "--model",
                         "ctc", "--out", str(out)])
    payload = json.loads(out.read_text())
    payload["objective"] += 1000.0
    out.write_text(json.dumps(payload))
    result = runner.invoke(main, ["verify", "--instance", tiny_file,
                                  "--solution", str(out)])
    assert result.exit_code == 1


def test_sample_command(runner, tmp_path):
    out = tmp_path / "sample.json"
    result = runner.invoke(main, ["sample", "--out", str(out)])
    assert result.exit_code == 0
    assert json.loads(result.output)["existing_flights"] == 8


def test_ingest_command(runner, tmp_path):
    csv = tmp_path / "bts.csv"
    csv.write_text(
        "FL_DATE,OP_UNIQUE_CARRIER,TAIL_NUM,ORIGIN,DEST,"
        "CRS_DEP_TIME,CRS_ARR_TIME\n"
        "2018-03-01,UA,N1,ORD,MCO,0800,1104\n")
    out = tmp_path / "skeleton.json"
    result = runner.invoke(main, ["ingest", "--csv", str(csv), "--hub",
                                  "ORD", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_bench_single_variant(runner, tiny_file):
    result = runner.invoke(main, ["bench", "--instances", tiny_file,
                                  "--variants", "micq2+mc",
                                  "--model", "ctc"])
    assert result.exit_code == 0, result.output
    rows = json.loads(result.output)
    assert len(rows) == 1 and rows[0]["solved"] == 1
