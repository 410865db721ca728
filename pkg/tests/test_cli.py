"""End-to-end runs of the ``rot`` command line."""

import json
import os

import pytest

from robust_transport.cli import main
from robust_transport import (
    EulerianCompetitor,
    build_example,
    serialize_competitor,
    serialize_instance,
    solve_eulerian,
)

from suite20 import build_suite


@pytest.fixture()
def inst_file(tmp_path):
    # diamond_mask_split: 4 edges, 2 scenarios, each masking one arm
    name, inst = build_suite()[4]
    path = tmp_path / "diamond.json"
    path.write_text(serialize_instance(inst))
    return str(path), inst


def run(argv):
    return main(argv)


def test_solve_writes_report(inst_file, tmp_path, capsys):
    path, _ = inst_file
    out = tmp_path / "report.json"
    code = run(
        ["solve", "--instance", path, "--model", "eulerian", "--seed", "5",
         "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["format"] == 1 and doc["mode"] == "eulerian"
    assert doc["admissible"]["ok"] is True
    assert doc["seed"] == 5 and doc["oriented"] is False


def test_solve_models_cover_all_three(inst_file, tmp_path):
    path, _ = inst_file
    for model in ("eulerian", "eulerian-oriented", "lagrangian"):
        out = tmp_path / f"{model}.json"
        assert run(["solve", "--instance", path, "--model", model,
                    "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["oriented"] is (model == "eulerian-oriented")
        if model == "eulerian-oriented":
            assert doc["oriented_consistent"] is True


def test_solve_report_bytes_stable(inst_file, tmp_path):
    path, _ = inst_file
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["solve", "--instance", path, "--model", "lagrangian", "--seed", "9"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_svg_and_figures(inst_file, tmp_path):
    path, _ = inst_file
    svg1 = tmp_path / "one.svg"
    svg2 = tmp_path / "two.svg"
    figs = tmp_path / "figs"
    argv = ["solve", "--instance", path, "--model", "eulerian",
            "--out", str(tmp_path / "r.json"), "--svg"]
    assert run(argv + [str(svg1), "--figures", str(figs)]) == 0
    assert run(argv + [str(svg2)]) == 0
    body = svg1.read_text()
    assert body.startswith("<svg")
    assert 'id="scenario-0"' in body and 'id="scenario-1"' in body
    assert "stroke-dasharray" in body  # each scenario kills one arm
    assert svg1.read_bytes() == svg2.read_bytes()
    names = sorted(os.listdir(figs))
    assert names == ["network.png", "trace.csv", "trace.png"]
    assert (figs / "trace.csv").read_text().startswith("iteration,energy")


def test_oracle_agrees_with_solver_on_small_instance(inst_file, tmp_path):
    path, _ = inst_file
    sol, ora = tmp_path / "s.json", tmp_path / "o.json"
    assert run(["solve", "--instance", path, "--model", "eulerian",
                "--out", str(sol)]) == 0
    assert run(["oracle", "--instance", path, "--model", "eulerian",
                "--out", str(ora)]) == 0
    e_solve = json.loads(sol.read_text())["energy"]["energy"]
    doc = json.loads(ora.read_text())
    assert doc["combos"] > 0 and doc["oriented"] is False
    assert e_solve == pytest.approx(doc["energy"]["energy"], abs=1e-6)


def test_oracle_size_guard_exit_code(tmp_path):
    inst = build_example("distance")  # 14 edges: over the oracle bound
    path = tmp_path / "big.json"
    path.write_text(serialize_instance(inst))
    assert run(["oracle", "--instance", str(path), "--model", "eulerian"]) == 3


def test_usage_errors_exit_one(tmp_path, capsys):
    assert run(["solve", "--model", "eulerian"]) == 1  # missing --instance
    assert run(["frobnicate"]) == 1
    assert run(["solve", "--instance", "nope.json", "--model", "eulerian"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["solve", "--instance", str(bad), "--model", "eulerian"]) == 1
    capsys.readouterr()


def test_validate_flags_bad_competitor(inst_file, tmp_path, capsys):
    path, inst = inst_file
    good = solve_eulerian(inst).competitor
    good_p = tmp_path / "good.json"
    good_p.write_text(serialize_competitor(good))
    assert run(["validate", "--instance", path,
                "--competitor", str(good_p)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is True and doc["competitor"]["ok"] is True

    n = inst.graph.n_edges
    cheat = EulerianCompetitor(
        theta=(0.0,) * n,
        flows=tuple((1.0,) + (0.0,) * (n - 1) for _ in range(inst.n_scenarios)),
    )
    bad_p = tmp_path / "cheat.json"
    bad_p.write_text(serialize_competitor(cheat))
    assert run(["validate", "--instance", path,
                "--competitor", str(bad_p)]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is False and doc["competitor"]["ok"] is False


def test_example_emits_loadable_instance(tmp_path):
    out = tmp_path / "ex.json"
    assert run(["example", "--name", "non_existence", "--detour", "0.5",
                "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["format"] == 1
    lengths = [e["length"] for e in doc["edges"]]
    assert 2.5 in lengths


def test_example_rejects_bad_parameters(capsys):
    assert run(["example", "--name", "limit", "--loops", "0"]) == 1
    assert run(["example", "--name", "no_such_family"]) == 1
    capsys.readouterr()


def test_verify_exit_codes_and_figures(tmp_path):
    out = tmp_path / "verdict.json"
    figs = tmp_path / "figs"
    assert run(["verify", "--name", "limit", "--out", str(out),
                "--figures", str(figs)]) == 0
    doc = json.loads(out.read_text())
    assert doc["ok"] is True and doc["example"] == "limit"
    assert all(c["ok"] for c in doc["claims"])
    assert sorted(os.listdir(figs)) == ["series.csv", "series.png"]


def test_energy_scores_competitor_file(inst_file, tmp_path, capsys):
    path, inst = inst_file
    rep = solve_eulerian(inst)
    comp_p = tmp_path / "comp.json"
    comp_p.write_text(serialize_competitor(rep.competitor))
    assert run(["energy", "--instance", path,
                "--competitor", str(comp_p)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "eulerian"
    assert doc["energy"] == pytest.approx(rep.energy.energy)
    assert doc["admissible"]["ok"] is True


def test_plot_overlays_competitor(inst_file, tmp_path):
    path, inst = inst_file
    rep = solve_eulerian(inst)
    comp_p = tmp_path / "comp.json"
    comp_p.write_text(serialize_competitor(rep.competitor))
    bare = tmp_path / "bare.svg"
    full = tmp_path / "full.svg"
    assert run(["plot", "--instance", path, "--out", str(bare)]) == 0
    assert run(["plot", "--instance", path, "--competitor", str(comp_p),
                "--width", "900", "--out", str(full)]) == 0
    assert bare.read_text() != full.read_text()
    assert 'width="900"' in full.read_text()


def test_version_runs(capsys):
    assert run(["--version"]) == 0
    assert "0.1.0" in capsys.readouterr().out
