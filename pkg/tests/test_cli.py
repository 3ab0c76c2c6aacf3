import json
import math
import xml.etree.ElementTree as ET

import pytest

from wmdubins import PlanResult, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


PLAN_FLAGS = ["--start", "0,0,0", "--goal", "4,2,1.0", "--rl", "1", "--rr", "1"]


def test_plan_emits_json_document(capsys):
    code, out, _ = run(capsys, "plan", *PLAN_FLAGS, "--mul", "0.5", "--mur", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"mode", "best", "candidates", "residual"}
    assert doc["mode"] == "weighted"
    best = doc["best"]
    assert best["cost"] > 0
    assert best["family"]
    for seg in best["segments"]:
        assert set(seg) == {"kind", "measure", "measure_unit"}
        assert seg["measure"] > 0  # zero-measure segments are stripped
        assert seg["measure_unit"] == ("m" if seg["kind"] == "S" else "rad")
    assert len(doc["residual"]) == 3
    assert doc["candidates"] == []


def test_plan_all_candidates_sorted(capsys):
    code, out, _ = run(capsys, "plan", *PLAN_FLAGS, "--all-candidates")
    assert code == 0
    doc = json.loads(out)
    costs = [c["cost"] for c in doc["candidates"]]
    assert costs and costs == sorted(costs)
    assert doc["best"]["cost"] == pytest.approx(costs[0])


def test_plan_degrees_flag_equivalent(capsys):
    code, rad_out, _ = run(
        capsys, "plan", "--start", "0,0,0", "--goal", "1,2,1.5707963267948966",
        "--rl", "1", "--rr", "1",
    )
    assert code == 0
    code, deg_out, _ = run(
        capsys, "plan", "--start", "0,0,0", "--goal", "1,2,90", "--deg",
        "--rl", "1", "--rr", "1",
    )
    assert code == 0
    assert json.loads(rad_out) == json.loads(deg_out)


def test_plan_trivial_goal_strips_all_segments(capsys):
    code, out, _ = run(
        capsys, "plan", "--start", "1,2,0.5", "--goal", "1,2,0.5", "--rl", "1", "--rr", "1"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["best"]["cost"] == 0.0
    assert doc["best"]["segments"] == []


def test_plan_writes_json_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "plan", *PLAN_FLAGS, "--json", str(target))
    assert code == 0
    assert out == ""
    doc = json.loads(target.read_text())
    assert doc["best"]["cost"] > 0


def test_plan_unwritable_output(capsys):
    code, _, err = run(capsys, "plan", *PLAN_FLAGS, "--json", "/nonexistent/dir/x.json")
    assert code == 1
    assert "cannot write" in err


def test_usage_errors_exit_one(capsys):
    cases = [
        [],  # no subcommand
        ["warp"],  # unknown subcommand
        ["plan", "--start", "0,0,0", "--goal", "1,1,0", "--rl", "1"],  # missing --rr
        ["plan", "--start", "0,0", "--goal", "1,1,0", "--rl", "1", "--rr", "1"],
        ["plan", "--start", "0,0,0", "--goal", "1,1,0", "--rl", "0", "--rr", "1"],
        ["plan", "--start", "0,0,0", "--goal", "1,1,0", "--rl", "1", "--rr", "1", "--mul", "-2"],
        ["sample", *PLAN_FLAGS, "--step", "0", "--csv", "x.csv"],
        ["verify", "--count", "-3"],
        ["verify", "--box", "0"],
        ["verify", "--r-range", "0,1", "--count", "0"],
        ["verify", "--r-range", "2,nope", "--count", "0"],
    ]
    for argv in cases:
        code = cli.main(argv)
        capsys.readouterr()
        assert code == 1, f"expected usage failure for {argv}"


def test_no_path_exit_code(monkeypatch, capsys, tmp_path):
    monkeypatch.setattr(cli, "plan", lambda req: PlanResult(best=None))
    code, _, err = run(capsys, "plan", *PLAN_FLAGS)
    assert code == 2
    assert "no path" in err
    code, _, _ = run(capsys, "sample", *PLAN_FLAGS, "--step", "0.5", "--csv", str(tmp_path / "a.csv"))
    assert code == 2
    code, _, _ = run(capsys, "svg", *PLAN_FLAGS, "--svg", str(tmp_path / "a.svg"))
    assert code == 2


def test_sample_straight_csv(tmp_path, capsys):
    target = tmp_path / "line.csv"
    code, _, _ = run(
        capsys, "sample", "--start", "0,0,0", "--goal", "1,0,0",
        "--rl", "1", "--rr", "1", "--step", "0.2", "--csv", str(target),
    )
    assert code == 0
    lines = target.read_text().strip().splitlines()
    assert lines[0] == "s,x,y,cost"
    assert len(lines) == 7  # header + 6 vertices at 0.2 m spacing
    last = lines[-1].split(",")
    assert [float(v) for v in last] == pytest.approx([1.0, 1.0, 0.0, 1.0], abs=1e-9)


def test_sample_cost_column_matches_plan(tmp_path, capsys):
    target = tmp_path / "path.csv"
    argv = ["--start", "0,0,0", "--goal", "4,2,1.0", "--rl", "1", "--rr", "1",
            "--mul", "0.5", "--mur", "0.5"]
    code, _, _ = run(capsys, "sample", *argv, "--step", "0.1", "--csv", str(target))
    assert code == 0
    code, out, _ = run(capsys, "plan", *argv)
    planned_cost = json.loads(out)["best"]["cost"]
    rows = [line.split(",") for line in target.read_text().strip().splitlines()[1:]]
    s = [float(r[0]) for r in rows]
    cost = [float(r[3]) for r in rows]
    assert s == sorted(s)
    assert cost == sorted(cost)
    assert cost[-1] == pytest.approx(planned_cost, abs=1e-9)
    assert all(c >= v - 1e-12 for c, v in zip(cost, s))  # penalties only add


def test_svg_renders_and_overlays(tmp_path, capsys):
    plain = tmp_path / "path.svg"
    code, _, _ = run(capsys, "svg", *PLAN_FLAGS, "--mul", "1", "--mur", "1",
                     "--svg", str(plain))
    assert code == 0
    root = ET.fromstring(plain.read_text())
    assert root.tag.endswith("svg")
    ns = {"s": "http://www.w3.org/2000/svg"}
    polylines = root.findall("s:polyline", ns)
    assert len(polylines) == 1

    overlay = tmp_path / "cmp.svg"
    code, _, _ = run(capsys, "svg", *PLAN_FLAGS, "--mul", "1", "--mur", "1",
                     "--compare-classical", "--svg", str(overlay))
    assert code == 0
    root = ET.fromstring(overlay.read_text())
    polylines = root.findall("s:polyline", ns)
    assert len(polylines) == 2
    assert any(p.get("stroke-dasharray") for p in polylines)


def test_svg_unwritable_output(capsys):
    code, _, err = run(capsys, "svg", *PLAN_FLAGS, "--svg", "/nonexistent/dir/p.svg")
    assert code == 1
    assert "cannot write" in err


def test_verify_report_deterministic(tmp_path, capsys):
    args = ["verify", "--seed", "3", "--count", "2", "--box", "6",
            "--r-range", "0.8,1.5", "--mu-range", "0.2,1.0"]
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    code, _, _ = run(capsys, *args, "--report", str(first))
    assert code == 0
    code, _, _ = run(capsys, *args, "--report", str(second))
    assert code == 0
    assert first.read_bytes() == second.read_bytes()
    doc = json.loads(first.read_text())
    assert doc["aggregate"] == {"consistent": 2}
    assert len(doc["instances"]) == 2
    for row in doc["instances"]:
        assert row["verdict"] == "consistent"
        assert row["planner_cost"] <= row["lattice_cost"] + 0.1 + 0.03 * row["planner_cost"]


def test_verify_inconsistent_exit_code(monkeypatch, capsys):
    from wmdubins.oracle import OracleReport

    def fake_verify(start, goal, spec):
        return OracleReport(
            planner_cost=2.0,
            lattice_cost=1.0,
            free_structure_cost=1.0,
            best_free_sequence="LS",
            verdict="oracle_beats_planner",
        )

    monkeypatch.setattr(cli, "verify_instance", fake_verify)
    code, out, _ = run(capsys, "verify", "--seed", "1", "--count", "1")
    assert code == 3
    doc = json.loads(out)
    assert doc["aggregate"] == {"oracle_beats_planner": 1}


def test_generate_scenarios_reproducible():
    a = cli.generate_scenarios(9, 4, (0.5, 2.0), (0.0, 1.0), 10.0)
    b = cli.generate_scenarios(9, 4, (0.5, 2.0), (0.0, 1.0), 10.0)
    assert a == b
    assert [sc.label for sc in a] == ["seed9-0", "seed9-1", "seed9-2", "seed9-3"]
    for sc in a:
        assert 0.5 <= sc.spec.radius_left <= 2.0
        assert 0.0 <= sc.spec.penalty_right <= 1.0
        assert abs(sc.goal.x) <= 5.0 and abs(sc.goal.y) <= 5.0
