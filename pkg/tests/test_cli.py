import json
import subprocess
import sys

from parley.cli import main


def test_run_evacuation_smoke(tmp_path):
    out = tmp_path / "report.json"
    code = main(["run", "evacuation", "--seed", "7", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["solved"]
    assert report["solution_time"] > 0
    assert report["planning_time"] is None  # deterministic by default


def test_run_unknown_scenario():
    assert main(["run", "bogus"]) == 2


def test_bad_flags_usage_error():
    assert main(["sweep", "--axis", "sideways", "--points", "1,2,3"]) == 2
    assert main(["sweep", "--axis", "agents", "--points", "x,y"]) == 2
    assert main(["sweep", "--axis", "agents", "--points", "4,5"]) == 2


def test_compare_reports_byte_identical(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["compare", "evacuation", "--seed", "7", "--out", str(out1)]) == 0
    table1 = capsys.readouterr().out
    assert main(["compare", "evacuation", "--seed", "7", "--out", str(out2)]) == 0
    table2 = capsys.readouterr().out
    assert out1.read_bytes() == out2.read_bytes()
    assert table1 == table2
    doc = json.loads(out1.read_text())
    assert doc["with_nli"]["solution_time"] < doc["without_nli"]["solution_time"]


def test_validate_good_and_bad(tmp_path):
    from parley.scenarios import museum_documents

    good = tmp_path / "good.json"
    good.write_text(json.dumps(museum_documents(0)))
    assert main(["validate", str(good)]) == 0

    doc = museum_documents(0)
    doc["entities"][0]["type"] = "gremlin"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_nlu_eval_scenario(capsys):
    assert main(["nlu-eval", "museum", "--seed", "3"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["nl_i_accuracy"] >= 0.95
    assert result["nle_accuracy"] >= 0.95


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "parley.cli", "run", "bogus"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "unknown scenario" in proc.stderr


def test_run_csv_and_traces(tmp_path):
    csv = tmp_path / "report.csv"
    traces = tmp_path / "traces.jsonl"
    code = main(
        ["run", "tradeshow", "--seed", "1", "--csv", str(csv), "--traces", str(traces)]
    )
    assert code == 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == (
        "scene,agents,nli,planning_time,replans,replan_time,solution_time,"
        "statements,questions,facts_overheard,parser_failures"
    )
    assert lines[1].startswith("tradeshow,4,1,")
    rows = [json.loads(l) for l in traces.read_text().strip().splitlines()]
    assert rows and all("stage1_us" in r and "bindings" in r for r in rows)


def test_compare_csv(tmp_path):
    csv = tmp_path / "compare.csv"
    assert main(["compare", "tradeshow", "--seed", "1", "--csv", str(csv)]) == 0
    lines = csv.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[2] == "1" and lines[2].split(",")[2] == "0"
