import json

import pytest

from nested_drc import blocks as blk
from nested_drc import graph as gr
from nested_drc.cli import run


@pytest.fixture
def files(tmp_path):
    k3 = tmp_path / "k3.txt"
    gr.save_graph(gr.complete(3), k3)
    k4 = tmp_path / "k4.txt"
    gr.save_graph(gr.complete(4), k4)
    star = tmp_path / "star.spec"
    star.write_text(blk.format_block_spec(blk.star(3)))
    k12 = tmp_path / "k12.spec"
    k12.write_text(blk.format_block_spec(blk.star(2)))
    return {"k3": str(k3), "k4": str(k4), "star": str(star), "k12": str(k12), "dir": tmp_path}


def test_verify_k4_passes(files, capsys):
    assert run(["verify", "--graph", files["k4"], "--h", "2", "--r", "1"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS" in out


def test_hom_star_on_k3(files, capsys):
    assert run(["hom", "--graph", files["k3"], "--blocks", files["star"],
                "--format", "structured"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fields"]["hom"] == 24
    assert list(doc) == ["title", "guaranteed", "ok", "summary", "fields", "checks"]


def test_classify_is_byte_identical(files):
    outs = []
    for k in range(2):
        path = files["dir"] / f"table{k}.txt"
        assert run(["classify", "--graph", files["k4"], "--h", "2", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]


@pytest.mark.parametrize("fmt", ["csv", "structured"])
def test_classify_formats(files, capsys, fmt):
    assert run(["classify", "--graph", files["k4"], "--h", "2", "--format", fmt]) == 0
    assert capsys.readouterr().out


def test_alpha_override_tags_report(files, capsys):
    run(["theorem", "--graph", files["k4"], "--blocks", files["k12"], "--alpha", "0.001",
         "--format", "structured"])
    assert json.loads(capsys.readouterr().out)["guaranteed"] is False
    run(["verify", "--graph", files["k4"], "--h", "2", "--alpha", "0.001", "--format", "csv"])
    rows = capsys.readouterr().out.splitlines()[1:]
    assert rows and all(",false," in row for row in rows)


def test_blowup_round_trip(files):
    out = files["dir"] / "b.spec"
    assert run(["blowup", "--r", "2", "--t", "3", "--gamma", "1,2", "--anchors", "0,2;1,2",
                "--out", str(out)]) == 0
    b = blk.load_block_spec(out)
    assert b == blk.rt_blowup(2, 3, [1, 2], [(0, 2), (1, 2)])
    assert blk.format_block_spec(b) == out.read_text()


def test_density_and_tensor(files, capsys):
    assert run(["density", "--graph", files["k4"]]) == 0
    assert run(["tensor", "--graph", files["k3"], "--graph", files["k4"]]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_embed_runs(files, capsys):
    assert run(["embed", "--graph", files["k4"], "--blocks", files["k12"], "--trials", "200",
                "--seed", "7", "--format", "structured"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fields"]["trials"] == 200


def test_generator_graph_argument(capsys):
    assert run(["hom", "--graph", "gen:complete:3", "--blocks", "gen:star:3"]) == 0
    assert "hom: 24" in capsys.readouterr().out


def test_exit_codes(files, tmp_path):
    assert run(["frobnicate"]) == 2
    assert run([]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7\n")
    assert run(["density", "--graph", str(bad)]) == 3
    assert run(["density", "--graph", str(tmp_path / "missing.txt")]) == 3
    assert run(["verify", "--graph", files["k4"], "--h", "2", "--beta", "2"]) == 5
    assert run(["embed", "--graph", files["k4"], "--blocks", files["k12"],
                "--trials", "0"]) == 5
    assert run(["tensor", "--graph", "gen:complete:70", "--graph", "gen:complete:70"]) == 4


def test_override_checks_are_informational(capsys):
    code = run(["verify", "--graph", "gen:random:8,0.5", "--seed", "3", "--h", "2",
                "--alpha", "5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "FAILS" in out and " FAIL " not in out


def test_failing_asserted_check_gives_exit_one(monkeypatch, capsys):
    from nested_drc import cli
    from nested_drc.report import Check, Report

    def broken(args):
        rep = Report("forced")
        rep.add(Check("1 >= 2", "none", ">=", 1, 2, False))
        return rep

    monkeypatch.setitem(cli.HANDLERS, "density", broken)
    assert run(["density", "--graph", "gen:complete:3"]) == 1
    assert "FAIL 1 >= 2" in capsys.readouterr().out
