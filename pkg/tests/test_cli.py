import json

import pytest

from predmatch.cli import main
from predmatch.core import Matching, read_instance, write_instance, write_matching
from predmatch.generators import figure1_instance


@pytest.fixture
def fig_files(tmp_path):
    inst, mu, _ = figure1_instance()
    write_instance(inst, tmp_path / "inst.json")
    write_matching(mu, tmp_path / "mu.json")
    write_matching(Matching.from_pairs([(0, 1), (1, 0), (2, 3), (3, 2)], 4), tmp_path / "bad.json")
    return tmp_path


def test_verify_stable(fig_files, capsys):
    assert main(["verify", str(fig_files / "inst.json"), str(fig_files / "mu.json")]) == 0
    assert capsys.readouterr().out.strip() == "stable; unique stable matching"


def test_verify_unstable(fig_files, capsys):
    assert main(["verify", str(fig_files / "inst.json"), str(fig_files / "bad.json")]) == 1
    assert capsys.readouterr().out.startswith("unstable; witness (r3,h2)")


def test_verify_truncated_file(fig_files, capsys):
    (fig_files / "cut.json").write_text("[1, 3, 0]")
    assert main(["verify", str(fig_files / "inst.json"), str(fig_files / "cut.json")]) == 2
    assert "record 3" in capsys.readouterr().err


def test_gen_train_and_runs(tmp_path, capsys):
    inst_p, pred_p = tmp_path / "i.json", tmp_path / "p.json"
    assert main(["gen", "--model", "tiered", "--n", "20", "--seed", "3", "--out", str(inst_p)]) == 0
    assert read_instance(inst_p).n == 20
    assert main(["train", "--model", "tiered", "--n", "20", "--k-train", "4", "--out", str(pred_p)]) == 0
    capsys.readouterr()
    for cmd in (["da", str(inst_p)], ["wda", str(inst_p), str(pred_p)], ["pda", str(inst_p), str(pred_p)],
                ["pda", str(inst_p), str(pred_p), "--once"]):
        assert main(cmd) == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec["proposals"] >= 1 and len(rec["matching"]) == 20
    assert main(["pda", str(inst_p), str(pred_p), "--out", str(tmp_path / "m.json")]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["verdict"] == "stable" and rec["perfect"]
    assert json.loads((tmp_path / "m.json").read_text()) == rec["matching"]


def test_experiment_command(tmp_path, capsys):
    out = tmp_path / "res"
    args = ["experiment", "--model", "mallows", "--n", "20", "--sweep", "0,0.5", "--k-train", "3",
            "--k-eval", "2", "--out", str(out)]
    assert main(args) == 0
    first = (out / "summary.csv").read_bytes()
    assert len(first.splitlines()) == 1 + 6
    assert main(args + ["--no-plots"]) == 0
    assert (out / "summary.csv").read_bytes() == first
    assert "phi=0" in capsys.readouterr().out


def _pairs(path, text):
    path.write_text(text)
    return str(path)


def test_gadget_disjoint(tmp_path, capsys):
    a = _pairs(tmp_path / "a", "1 2\n")
    b = _pairs(tmp_path / "b", "2 1\n")
    assert main(["gadget", "--m", "3", "--eta", "1", "--A", a, "--B", b, "--out", str(tmp_path / "g")]) == 0
    assert capsys.readouterr().out.strip() == "μ̂ stable; max error 0"
    rep = json.loads((tmp_path / "g" / "report.json").read_text())
    assert rep["disjoint"] and rep["predicted_stable"]


def test_gadget_intersecting(tmp_path, capsys):
    a = _pairs(tmp_path / "a", "1 2\n")
    b = _pairs(tmp_path / "b", "1 2\n3 1\n")
    assert main(["gadget", "--m", "3", "--eta", "1", "--A", a, "--B", b, "--out", str(tmp_path / "g")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("μ̂ unstable; repaired matching changes 6 agents; average error")
    assert "≤ 4" in out
    rep = json.loads((tmp_path / "g" / "report.json").read_text())
    assert rep["repair_stable"] and rep["repair_average_error"] <= 4
    assert rep["max_error"] > 1
    assert (tmp_path / "g" / "repaired.json").exists()


def test_gadget_empty_files(tmp_path, capsys):
    a = _pairs(tmp_path / "a", "")
    b = _pairs(tmp_path / "b", "")
    assert main(["gadget", "--m", "3", "--eta", "1", "--A", a, "--B", b, "--out", str(tmp_path / "g")]) == 0
    assert "stable" in capsys.readouterr().out


def test_gadget_promise_violation(tmp_path, capsys):
    a = _pairs(tmp_path / "a", "1 2\n2 3\n")
    assert main(["gadget", "--m", "3", "--eta", "1", "--A", a, "--B", a, "--out", str(tmp_path / "g")]) == 2
    assert "exceeds" in capsys.readouterr().err


def test_gadget_large_uses_repair(tmp_path, capsys):
    a = _pairs(tmp_path / "a", "2 5\n")
    assert main(["gadget", "--m", "8", "--eta", "2", "--A", a, "--B", a, "--out", str(tmp_path / "g")]) == 0
    rep = json.loads((tmp_path / "g" / "report.json").read_text())
    assert rep["reference"] == "repair" and rep["repair_changed_agents"] == 6
