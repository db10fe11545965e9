import json
import re

import pytest
from click.testing import CliRunner

from d2d_idnc.cli import main
from d2d_idnc.engine import TransmissionPlan, apply_plan
from d2d_idnc.session import loads_session, read_session
from d2d_idnc.topology import read_topology


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args])

    return invoke


def pair(data_dir, name):
    return ["--topology", data_dir / f"{name}.topo", "--session", data_dir / f"{name}.session"]


@pytest.mark.parametrize("scheduler, t", [("opt-idnc", 1), ("uncoded-bs", 4), ("netcam-wp", 1), ("cellular-only-idnc", 2)])
def test_solve_first_example(run, data_dir, scheduler, t):
    res = run("solve", *pair(data_dir, "example1"), "--scheduler", scheduler)
    assert res.exit_code == 0
    assert res.output.strip() == f"T = {t}"


def test_graph_higher_layer(run, data_dir, tmp_path):
    out = tmp_path / "g.dot"
    res = run("graph", *pair(data_dir, "example2"), "--layer", "higher", "--emit-graph", out)
    assert res.exit_code == 0
    dot = out.read_text()
    assert dot.count("[shape=box]") == 3 and dot.count(" -- ") == 1
    assert '"BS:p1" -- "BS:p3"' in dot


def test_trace_replays(run, data_dir):
    res = run("solve", *pair(data_dir, "example2"), "--scheduler", "uncoded-bs", "--trace")
    assert res.exit_code == 0
    state = read_session(data_dir / "example2.session")
    c = read_topology(data_dir / "example2.topo")
    plans = [TransmissionPlan.parse(m) for m in re.findall(r"^slot \d+: (.*?)(?:  \[.*\])?$", res.output, re.M)]
    assert len(plans) == 3
    for plan in plans:
        state = apply_plan(state, plan, c).new_state
    printed = res.output.split("final state:\n")[1].rsplit("T =", 1)[0]
    assert loads_session("\n".join(line.strip() for line in printed.splitlines())) == state
    assert "UE4 <- p1 via BS" in res.output


def test_solve_json(run, data_dir):
    res = run("solve", *pair(data_dir, "example1"), "--scheduler", "opt-idnc", "--json")
    assert json.loads(res.output)["completion_time"] == 1


def test_generators_are_deterministic(run, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for path in (a, b):
        assert run("gen-topology", "--users", 6, "--edge-prob", 0.4, "--seed", 3, "-o", path).exit_code == 0
    assert a.read_text() == b.read_text()
    assert run("gen-topology", "--users", 3, "--full", "-o", a).exit_code == 0
    assert a.read_text().count("edge") == 3
    assert run("gen-session", "--users", 4, "--packets", 5, "--seed", 1, "-o", b).exit_code == 0
    assert read_session(b).n_packets == 5


def test_bench(run, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("sweep: n_packets\nvalues: [3, 5]\nfixed: 4\ntrials: 4\n")
    csv_a, csv_b, svg, js = (tmp_path / n for n in ("a.csv", "b.csv", "s.svg", "s.json"))
    res = run("bench", "--config", cfg, "--out-csv", csv_a, "--out-svg", svg, "--out-json", js)
    assert res.exit_code == 0
    run("bench", "--config", cfg, "--out-csv", csv_b, "--jobs", 2)
    assert csv_a.read_bytes() == csv_b.read_bytes()
    assert svg.read_text().count("<polyline") == 4
    assert json.loads(js.read_text())["config"]["trials"] == 4


def test_exit_codes(run, data_dir, tmp_path):
    assert run("solve", "--bogus").exit_code == 2
    assert run("gen-topology", "--users", 3, "--full", "--edge-prob", 0.2, "-o", tmp_path / "x").exit_code == 2
    bad = tmp_path / "bad.topo"
    bad.write_text("users 3\nedge 1 9\n")
    assert run("solve", "--topology", bad, "--session", data_dir / "example1.session").exit_code == 2
    assert run("solve", *pair(data_dir, "example1")[:2], "--session", data_dir / "example2.session").exit_code == 2
    res = run("solve", *pair(data_dir, "example1"), "--scheduler", "opt-idnc", "--max-vertices", 2)
    assert res.exit_code == 3 and "netcam-wp" in res.output
    assert run("solve", "--topology", tmp_path / "none", "--session", tmp_path / "none").exit_code == 4
    assert run("graph", *pair(data_dir, "example1"), "--emit-graph", tmp_path / "no" / "g.dot").exit_code == 4
