import json
import os

import pytest

import spreadlab.cli as cli


def run(capsys, *argv):
    rc = cli.main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def run_json(capsys, *argv):
    rc, out, err = run(capsys, *argv)
    return rc, json.loads(out), err


def test_field_info(capsys):
    rc, rep, _ = run_json(capsys, "field", "info", "--q", "9")
    assert rc == 0
    assert rep["schema"] == "spreadlab/1"
    assert rep["q"] == 9 and rep["p"] == 3 and rep["degree"] == 2
    assert rep["modulus"] == [1, 0, 1]
    assert rep["modulus_str"] == "t^2 + 1"
    assert rep["generator"] == 4
    assert rep["has_tables"] is True


def test_spread_build_positional_and_flag_agree(capsys):
    rc1, out1, _ = run(capsys, "spread", "build", "desarguesian",
                       "--q", "3", "--n", "2", "--r", "2")
    rc2, out2, _ = run(capsys, "spread", "build", "--kind", "desarguesian",
                       "--q", "3", "--n", "2", "--r", "2")
    assert rc1 == rc2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert rep["valid"] is True
    assert rep["size"] == 10
    assert rep["normal_count"] == 10
    assert rep["desarguesian"] is True


def test_spread_build_output_is_deterministic(capsys):
    args = ("spread", "build", "sr", "--set", "dickson", "--q", "3", "--n", "2",
            "--r", "2")
    rc1, out1, _ = run(capsys, *args)
    rc2, out2, _ = run(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert rep["provenance"] == "S_2(spread_set(dickson(3,2)))"
    assert rep["desarguesian"] is False


def test_spread_verify_and_normals(capsys):
    rc, rep, _ = run_json(capsys, "spread", "verify", "t3", "--set", "field",
                          "--set0", "dickson", "--q", "3", "--n", "2")
    assert rc == 0 and rep["valid"] is True and rep["size"] == 91
    rc, rep, _ = run_json(capsys, "spread", "normals", "desarguesian",
                          "--q", "3", "--n", "2", "--r", "2")
    assert rc == 0
    assert rep["normal_count"] == 10
    assert rep["normal_indices"] == list(range(10))


def test_spread_maxgp(capsys):
    rc, rep, _ = run_json(capsys, "spread", "maxgp", "desarguesian",
                          "--q", "3", "--n", "2", "--r", "2")
    assert rc == 0
    assert rep["max_general_position"] == 3
    assert len(rep["witness_indices"]) == 3


def test_spread_build_unknown_kind(capsys):
    rc, out, err = run(capsys, "spread", "build", "bogus", "--q", "3", "--n", "2")
    assert rc == 2
    assert out == ""
    assert "unknown spread kind" in json.loads(err)["error"]


def test_spreadset_search(capsys):
    rc, rep, _ = run_json(capsys, "spreadset", "search", "--closure",
                          "multiplication", "--q", "2", "--n", "2")
    assert rc == 0
    assert rep["count"] == 1
    assert rep["sets"] == [[0, 7, 9, 14]]


def test_spreadset_search_budget_exhausted(capsys):
    rc, rep, _ = run_json(capsys, "spreadset", "search", "--closure", "addition",
                          "--q", "4", "--n", "2", "--budget", "50")
    assert rc == 1
    assert rep["error"] == "budget exceeded"


def test_spreadset_dickson(capsys):
    rc, rep, _ = run_json(capsys, "spreadset", "dickson", "--q", "3", "--n", "2")
    assert rc == 0
    assert rep["axioms_pass"] is True
    assert rep["associative"] is True
    assert rep["kernel_size"] == 3
    assert rep["multiplication_closed"] is True
    assert rep["addition_closed"] is False
    assert rep["codes"] == [0, 15, 21, 28, 41, 53, 56, 67, 79]


def test_spreadset_nuclei(capsys):
    rc, rep, _ = run_json(capsys, "spreadset", "nuclei", "--set", "dickson",
                          "--q", "3", "--n", "2")
    assert rc == 0
    assert rep["center"] == [0, 28, 56]
    assert rep["right_nucleus"] == [0, 15, 21, 28, 41, 53, 56, 67, 79]
    assert rep["middle_nucleus"] == rep["right_nucleus"]


def test_spreadset_axioms(capsys):
    rc, rep, _ = run_json(capsys, "spreadset", "axioms", "--set", "field",
                          "--q", "3", "--n", "2")
    assert rc == 0
    assert rep["pass"] is True
    assert rep["set"] == "field"
    assert all(v["pass"] for v in rep["axioms"].values())


def test_regulus_field_closed(capsys):
    rc, rep, _ = run_json(capsys, "regulus", "--set", "field", "--q", "3",
                          "--n", "2", "--q0", "3")
    assert rc == 0
    assert rep["closed"] is True
    assert "witness" not in rep


def test_regulus_dickson_not_closed(capsys):
    rc, rep, _ = run_json(capsys, "regulus", "--set", "dickson", "--q", "3",
                          "--n", "2", "--q0", "3")
    assert rc == 1
    assert rep["closed"] is False
    assert "pair" in rep["witness"] and "missing" in rep["witness"]


def test_regulus_requires_q0(capsys):
    rc, out, err = run(capsys, "regulus", "--set", "field", "--q", "3", "--n", "2")
    assert rc == 2
    assert "q0" in json.loads(err)["error"]


def test_closure_run_full(capsys):
    rc, rep, _ = run_json(capsys, "closure", "run", "--q", "9",
                          "--points", "81,9,1,91")
    assert rc == 0
    assert rep["mode"] == "full"
    assert rep["size"] == 13
    assert rep["points"] == [1, 9, 10, 11, 81, 82, 83, 90, 91, 92, 99, 100, 101]


def test_closure_run_restricted(capsys):
    rc, rep, _ = run_json(capsys, "closure", "run", "--q", "9",
                          "--points", "81,9,1,91", "--pivots", "81,9")
    assert rc == 0
    assert rep["mode"] == "restricted"
    assert rep["size"] == 6


def test_closure_lemma53(capsys):
    rc, rep, _ = run_json(capsys, "closure", "lemma53", "--q", "9",
                          "--trials", "5", "--seed", "1")
    assert rc == 0
    assert rep["pass"] is True
    assert rep["trials"] == 5
    assert rep["expected_affine_points"] == 9
    assert rep["failure_count"] == 0


def test_sperner_build(capsys):
    rc, rep, _ = run_json(capsys, "sperner", "build", "desarguesian",
                          "--q", "3", "--n", "2", "--r", "2")
    assert rc == 0
    assert rep["pass"] is True
    assert rep["v"] == 81 and rep["b"] == 90 and rep["classes"] == 10


def test_sperner_normals_threaded(capsys):
    rc, rep, _ = run_json(capsys, "sperner", "normals", "desarguesian",
                          "--q", "3", "--n", "2", "--r", "2", "--threads", "2")
    assert rc == 0
    assert rep["classes"] == 10
    assert rep["normal_count"] == 10
    assert all(r["normal"] for r in rep["lines"])


def test_sperner_export_stdout(capsys):
    rc, out, _ = run(capsys, "sperner", "export", "desarguesian",
                     "--q", "3", "--n", "2", "--r", "2")
    assert rc == 0
    lines = out.strip().split("\n")
    assert lines[0] == "# schema,spreadlab/1"
    assert lines[3] == "point,line,class"
    assert len(lines) == 4 + 90 * 9


def test_sperner_export_to_directory(tmp_path, capsys):
    out_dir = str(tmp_path / "designs")
    rc, rep, _ = run_json(capsys, "sperner", "export", "desarguesian",
                          "--q", "3", "--n", "2", "--r", "2", "--out", out_dir)
    assert rc == 0
    path = os.path.join(out_dir, "sperner_design.csv")
    assert rep["path"] == path
    with open(path) as fh:
        content = fh.read()
    assert content.startswith("# schema,spreadlab/1\n")
    assert rep["rows"] == content.count("\n")
    assert rep["bytes"] == len(content.encode())


def test_report_file_matches_stdout(tmp_path, capsys):
    out_dir = str(tmp_path / "reports")
    rc, out, _ = run(capsys, "field", "info", "--q", "9", "--out", out_dir)
    assert rc == 0
    with open(os.path.join(out_dir, "field_info.json")) as fh:
        assert fh.read() == out


def test_csv_format(capsys):
    rc, out, _ = run(capsys, "field", "info", "--q", "9", "--format", "csv")
    assert rc == 0
    lines = out.strip().split("\n")
    assert lines[0] == "key,value"
    kv = dict(line.split(",", 1) for line in lines[1:])
    assert kv["q"] == "9"
    assert kv["modulus[0]"] == "1"
    assert kv["schema"] == "spreadlab/1"


def test_scenario_list(capsys):
    rc, rep, _ = run_json(capsys, "scenario", "list")
    assert rc == 0
    names = [s["name"] for s in rep["scenarios"]]
    assert names == sorted(names)
    assert names == ["cor-5.6", "cor-6.2", "lemma-5.3", "lemma-5.4", "thm-3.1",
                     "thm-4.2", "thm-4.5", "thm-5.4", "thm-5.5", "thm-5.7",
                     "thm-6.1", "thm-7.5"]
    assert all(s["description"] for s in rep["scenarios"])


def test_scenario_run_passing(capsys):
    rc, rep, _ = run_json(capsys, "scenario", "run", "thm-4.2")
    assert rc == 0
    assert rep["pass"] is True
    assert rep["scenario"] == "thm-4.2"
    assert all(c["pass"] for c in rep["checks"])


def test_scenario_run_with_trials(capsys):
    rc, rep, _ = run_json(capsys, "scenario", "run", "lemma-5.3",
                          "--trials", "3", "--seed", "7")
    assert rc == 0
    assert rep["pass"] is True
    assert rep["params"]["trials"] == 3


def test_scenario_unknown(capsys):
    rc, out, err = run(capsys, "scenario", "run", "thm-0.0")
    assert rc == 2
    assert out == ""
    assert "error" in json.loads(err)
