"""Command-line entry point: ``d2d-idnc <subcommand>``.

Exit status: 0 success, 2 usage or malformed input, 3 capacity or
infeasible plan, 4 file I/O failure.
"""

from __future__ import annotations

import json
import logging
import sys

import click

from . import conflict_graph as cg
from .errors import CapacityError, FeasibilityError, InvalidSpecError
from .harness import load_config, run_trials, write_report
from .mis import DEFAULT_MAX_VERTICES
from .schedulers import SCHEDULER_IDS, run_scheduler
from .session import ErasureSpec, dumps_session, generate_feedback, read_session, write_session
from .topology import DEFAULT_EDGE_PROBABILITY, TopologySpec, generate, read_topology, write_topology

EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


class _Fail(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CapacityError as exc:
        raise _Fail(f"{exc}\nhint: try --scheduler netcam-wp, which runs in polynomial time", EXIT_CAPACITY)
    except FeasibilityError as exc:
        raise _Fail(str(exc), EXIT_CAPACITY)
    except InvalidSpecError as exc:
        raise _Fail(str(exc), EXIT_USAGE)
    except OSError as exc:
        raise _Fail(f"I/O error: {exc}", EXIT_IO)


def _load_pair(topology_path, session_path):
    c = _guard(read_topology, topology_path)
    state = _guard(read_session, session_path)
    if c.n_users != state.n_users:
        raise _Fail(f"topology has {c.n_users} users but session has {state.n_users}", EXIT_USAGE)
    return c, state


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Joint cellular/D2D IDNC recovery schedulers and simulator."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command("gen-topology")
@click.option("--users", "n_users", type=click.IntRange(min=1), required=True)
@click.option("--full", is_flag=True, help="Fully connected D2D network.")
@click.option("--edge-prob", type=click.FloatRange(0, 1), default=None, help="Independent link probability.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def gen_topology(n_users, full, edge_prob, seed, output):
    """Write a random or fully connected topology fixture."""
    if full and edge_prob is not None:
        raise click.UsageError("--full and --edge-prob are mutually exclusive")
    if full:
        spec = TopologySpec(n_users, "fully_connected", seed=seed)
    else:
        spec = TopologySpec(n_users, "random_uniform", DEFAULT_EDGE_PROBABILITY if edge_prob is None else edge_prob, seed)
    _guard(write_topology, generate(spec), output)


@main.command("gen-session")
@click.option("--users", "n_users", type=click.IntRange(min=1), required=True)
@click.option("--packets", "n_packets", type=click.IntRange(min=1), required=True)
@click.option("--erasure", type=click.FloatRange(0, 1), default=0.25, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def gen_session(n_users, n_packets, erasure, seed, output):
    """Write a reception-state fixture drawn from i.i.d. erasures."""
    state = generate_feedback(n_users, n_packets, ErasureSpec(erasure, seed))
    _guard(write_session, state, output)


@main.command()
@click.option("--topology", "topology_path", type=click.Path(dir_okay=False), required=True)
@click.option("--session", "session_path", type=click.Path(dir_okay=False), required=True)
@click.option("--scheduler", type=click.Choice(SCHEDULER_IDS), default="netcam-wp", show_default=True)
@click.option("--trace", is_flag=True, help="Print every slot's plan and recoveries.")
@click.option("--json", "as_json", is_flag=True, help="Emit the schedule as JSON instead of text.")
@click.option("--max-vertices", type=click.IntRange(min=1), default=DEFAULT_MAX_VERTICES, show_default=True)
def solve(topology_path, session_path, scheduler, trace, as_json, max_vertices):
    """Schedule recovery of every missing packet and report T."""
    c, state = _load_pair(topology_path, session_path)
    result = _guard(run_scheduler, scheduler, state, c, max_vertices)
    if as_json:
        click.echo(json.dumps(result.to_dict(), indent=2))
        return
    if trace:
        for t, rec in enumerate(result.slots, 1):
            click.echo(f"slot {t}: {rec.plan.describe()}" + (f"  [{rec.note}]" if rec.note else ""))
            for r in rec.outcome.recoveries:
                click.echo(f"  {r.describe()}")
        click.echo("final state:")
        for line in dumps_session(result.final_state).splitlines():
            click.echo(f"  {line}")
    click.echo(f"T = {result.completion_time}")


@main.command()
@click.option("--topology", "topology_path", type=click.Path(dir_okay=False), required=True)
@click.option("--session", "session_path", type=click.Path(dir_okay=False), required=True)
@click.option("--layer", type=click.Choice(["higher", "lower", "two"]), default="two", show_default=True)
@click.option("--emit-graph", "out", type=click.Path(dir_okay=False), required=True, help="DOT output path.")
def graph(topology_path, session_path, layer, out):
    """Export a conflict graph in DOT format."""
    c, state = _load_pair(topology_path, session_path)
    if layer == "higher":
        g = cg.build_higher_layer(state)
    elif layer == "lower":
        g = cg.build_lower_layer(state, c)
    else:
        g = cg.build_two_layer(state, c)
    _guard(_write_text, out, g.to_dot())
    click.echo(f"{len(g)} vertices, {g.n_edges} edges -> {out}")


def _write_text(path, text):
    with open(path, "w") as fh:
        fh.write(text)


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--out-csv", type=click.Path(dir_okay=False), required=True)
@click.option("--out-svg", type=click.Path(dir_okay=False), default=None)
@click.option("--out-json", type=click.Path(dir_okay=False), default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
def bench(config_path, out_csv, out_svg, out_json, jobs):
    """Run a Monte Carlo sweep and write the summary."""
    config = _guard(load_config, config_path)
    summary = _guard(run_trials, config, jobs)
    _guard(write_report, summary, "csv", out_csv)
    if out_svg:
        _guard(write_report, summary, "svg", out_svg)
    if out_json:
        _guard(write_report, summary, "json", out_json)
    if summary.bound_violations:
        click.echo(f"warning: {summary.bound_violations} NetCAM-WP trials outside the completion-time bounds", err=True)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
