import json

import pytest

from vcglab.cli import load_repro_cases, main

AM06 = {
    "type": "single_minded",
    "items": 2,
    "bids": [{"bundle": [1], "value": 1}, {"bundle": [2], "value": 0}, {"bundle": [1, 2], "value": 1}],
}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="inst.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)

    return _write


def test_solve(write, capsys):
    assert main(["solve", write({"type": "matching", "values": [[2, 0], [1, 2]]})]) == 0
    assert capsys.readouterr().out.strip() == "welfare 4; A→1, B→2"
    assert main(["solve", write({"type": "matching", "values": [[0]]})]) == 0
    assert capsys.readouterr().out.startswith("welfare 0")
    assert main(["solve", write(AM06)]) == 0
    assert capsys.readouterr().out.startswith("welfare 1")


def test_solve_json(write, capsys):
    assert main(["solve", write({"type": "matching", "values": [[2, 0], [1, 2]]}), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"welfare": 4, "allocation": [{"buyer": 1, "item": 1}, {"buyer": 2, "item": 2}]}


def test_solve_invalid(write, capsys):
    assert main(["solve", write({"type": "matching", "values": [[1, -1]]})]) == 1
    assert "values[0][1]" in capsys.readouterr().err
    assert main(["solve", write("{oops")]) == 1


def test_mechanism_commands(write, capsys):
    third = write({"type": "matching", "values": [[0, 0], [1, 0]]})
    assert main(["mechanism", third, "--mechanism", "max-walrasian"]) == 0
    out = capsys.readouterr().out
    assert "prices (1, 0)" in out and "revenue 1" in out

    second = write({"type": "matching", "values": [[2, 0], [1, 2]]})
    assert main(["mechanism", second, "--mechanism", "vcg"]) == 0
    assert "revenue 0" in capsys.readouterr().out
    assert main(["mechanism", second, "--mechanism", "max-walrasian", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["prices"] == [{"num": 2, "den": 1}, {"num": 2, "den": 1}]
    assert doc["revenue"] == {"num": 4, "den": 1}


def test_mechanism_class_mismatch(write, capsys):
    assert main(["mechanism", write(AM06), "--mechanism", "min-walrasian"]) == 1
    assert "matching" in capsys.readouterr().err


def test_mechanism_posted_price(write, capsys):
    dist = {
        "type": "distribution",
        "items": 2,
        "types": [
            {"values": [0, 0], "prob": {"num": 1, "den": 2}},
            {"values": [1, 1], "prob": {"num": 1, "den": 2}},
        ],
    }
    assert main(["mechanism", write(dist), "--mechanism", "posted-price"]) == 0
    assert "expected revenue 1/2" in capsys.readouterr().out


def test_probe_grid(capsys):
    assert main(["probe", "--grid", "n=2,m=2,vmax=2,dmax=2", "--mechanism", "vcg", "--workers", "1"]) == 0
    captured = capsys.readouterr()
    lines = [json.loads(line) for line in captured.out.splitlines()]
    assert lines and "witnesses" in captured.err
    # The published example [[2,0],[1,0]], B item 2 +2, relabeled to canonical form.
    assert {
        "instance": {"type": "matching", "values": [[0, 1], [0, 2]]},
        "perturbation": {"buyer": 1, "target": 1, "delta": 2},
        "mechanism": "vcg",
        "revenue_before": {"num": 1, "den": 1},
        "revenue_after": {"num": 0, "den": 1},
    } in lines


def test_probe_single_buyer_is_empty(capsys):
    assert main(["probe", "--grid", "n=1,m=1,vmax=5", "--workers", "1"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "" and captured.err.strip() == "0 witnesses"


def test_probe_random_is_deterministic(capsys):
    args = ["probe", "--grid", "n=2,m=2,vmax=3,dmax=2", "--random", "seed=7", "trials=1000", "--workers", "1"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first and first


def test_probe_budget_exit_code(capsys):
    assert main(["probe", "--grid", "n=3,m=3,vmax=3", "--budget", "100", "--workers", "1"]) == 3
    assert "budget" in capsys.readouterr().err


def test_repro_all(capsys):
    assert main(["repro", "all"]) == 0
    out = capsys.readouterr().out
    assert "am06 VCG revenue: 1 → 0 PASS" in out
    assert "matching-max max-Walrasian revenue: 1 → 0 PASS" in out
    assert "hr15-relaxed posted-price revenue: 1/2 → 1/2 PASS (monotone)" in out


def test_repro_single_case_json(capsys):
    assert main(["repro", "matching-min", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["mechanism"] for r in rows} == {"vcg", "min-walrasian"}
    assert all(r["pass"] for r in rows)


def test_repro_unknown_case(capsys):
    assert main(["repro", "nope"]) == 1


def test_repro_mismatch_exit_code(monkeypatch, capsys):
    cases = load_repro_cases()
    cases[0]["expected"]["vcg"]["after"] = {"num": 5, "den": 1}
    monkeypatch.setattr("vcglab.cli.load_repro_cases", lambda: cases)
    assert main(["repro", "am06"]) == 2
    captured = capsys.readouterr()
    assert "FAIL" in captured.out and "expected 1 → 5, got 1 → 0" in captured.err


def test_fixture_cases_differ_by_one_change():
    for case in load_repro_cases():
        before, after = case["before"], case["after"]
        if before["type"] == "matching":
            diffs = [
                (a, b)
                for ra, rb in zip(before["values"], after["values"])
                for a, b in zip(ra, rb)
                if a != b
            ]
            assert len(diffs) == 1 and diffs[0][1] > diffs[0][0]
        elif before["type"] == "single_minded":
            diffs = [(a, b) for a, b in zip(before["bids"], after["bids"]) if a != b]
            assert len(diffs) == 1
            assert diffs[0][0]["bundle"] == diffs[0][1]["bundle"]
            assert diffs[0][1]["value"] > diffs[0][0]["value"]
        else:
            diffs = [(a, b) for a, b in zip(before["types"], after["types"]) if a != b]
            assert len(diffs) == 1
        for exp in case["expected"].values():
            assert exp["source"]
