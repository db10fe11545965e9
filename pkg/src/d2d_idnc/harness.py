"""Monte Carlo sweeps comparing schedulers on paired random instances.

Every trial draws one topology and one reception state, and every
scheduler in the config is run on that same instance. Trial seeds come
from ``SeedSequence(master_seed, spawn_key=(sweep_value, trial))`` so a
trial's randomness depends only on its own coordinates.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import netcam_wp
from .errors import CapacityError, InvalidSpecError
from .mis import DEFAULT_MAX_VERTICES
from .schedulers import SCHEDULER_IDS, run_scheduler
from .session import DEFAULT_ERASURE_PROBABILITY, ErasureSpec, generate_feedback
from .topology import DEFAULT_EDGE_PROBABILITY, TopologySpec, generate

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "sweep_value",
    "scheduler",
    "mean_T",
    "std_T",
    "min_T",
    "max_T",
    "trials",
    "excluded",
    "lower_bound_mean",
    "upper_bound_mean",
)


@dataclass(frozen=True)
class ExperimentConfig:
    sweep: str  # "n_users" or "n_packets"
    values: tuple[int, ...]
    fixed: int  # the count that is not swept
    topology: str = "random_uniform"
    edge_probability: float = DEFAULT_EDGE_PROBABILITY
    erasure_probability: float = DEFAULT_ERASURE_PROBABILITY
    trials: int = 500
    schedulers: tuple[str, ...] = SCHEDULER_IDS
    master_seed: int = 0
    max_vertices: int = DEFAULT_MAX_VERTICES

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "schedulers", tuple(self.schedulers))
        if self.sweep not in ("n_users", "n_packets"):
            raise InvalidSpecError(f"sweep must be n_users or n_packets, not {self.sweep!r}")
        if not self.values or min(self.values) <= 0 or self.fixed <= 0:
            raise InvalidSpecError("sweep values and the fixed count must be positive and nonempty")
        if len(set(self.values)) != len(self.values):
            raise InvalidSpecError("sweep values must be distinct")
        if self.trials < 1:
            raise InvalidSpecError("trials must be at least 1")
        if not self.schedulers:
            raise InvalidSpecError("at least one scheduler is required")
        unknown = set(self.schedulers) - set(SCHEDULER_IDS)
        if unknown:
            raise InvalidSpecError(f"unknown schedulers: {sorted(unknown)}")
        # validates the probabilities and kind
        TopologySpec(1, self.topology, self.edge_probability)
        ErasureSpec(self.erasure_probability)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise InvalidSpecError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def dims(self, value: int) -> tuple[int, int]:
        """``(n_users, n_packets)`` at one sweep point."""
        return (value, self.fixed) if self.sweep == "n_users" else (self.fixed, value)


def load_config(path) -> ExperimentConfig:
    """Read a YAML (or JSON) mapping whose keys are ExperimentConfig fields."""
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise InvalidSpecError(f"{path}: expected a mapping of config keys")
    return ExperimentConfig.from_mapping(data)


def trial_seeds(master_seed: int, sweep_value: int, trial: int) -> tuple[int, int]:
    """``(topology_seed, erasure_seed)`` for one trial."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(sweep_value, trial))
    topo, erasure = ss.generate_state(2, dtype=np.uint64)
    return int(topo), int(erasure)


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: int
    trial: int
    topology_seed: int
    erasure_seed: int
    completion: dict  # scheduler -> T, or None when excluded
    lower_bound: int
    upper_bound: int


def run_trial(config: ExperimentConfig, sweep_value: int, trial: int) -> TrialRecord:
    n_users, n_packets = config.dims(sweep_value)
    topo_seed, erasure_seed = trial_seeds(config.master_seed, sweep_value, trial)
    c = generate(TopologySpec(n_users, config.topology, config.edge_probability, topo_seed))
    state = generate_feedback(n_users, n_packets, ErasureSpec(config.erasure_probability, erasure_seed))
    completion = {}
    for name in config.schedulers:
        try:
            completion[name] = run_scheduler(name, state, c, config.max_vertices).completion_time
        except CapacityError as exc:
            log.info("trial %s/%s: %s excluded: %s", sweep_value, trial, name, exc)
            completion[name] = None
    lower, upper = netcam_wp.completion_bounds(state, c)
    return TrialRecord(sweep_value, trial, topo_seed, erasure_seed, completion, lower, upper)


def _run_unit(args) -> TrialRecord:
    return run_trial(*args)


@dataclass(frozen=True)
class SummaryRow:
    sweep_value: int
    scheduler: str
    mean_T: float | None
    std_T: float | None
    min_T: int | None
    max_T: int | None
    trials: int
    excluded: int
    lower_bound_mean: float
    upper_bound_mean: float
    bound_violations: int | None = None  # NetCAM-WP rows only
    mean_bound_gap: float | None = None  # upper bound minus T, NetCAM-WP rows only


@dataclass(frozen=True)
class ExperimentSummary:
    config: ExperimentConfig
    rows: tuple[SummaryRow, ...]
    trials: tuple[TrialRecord, ...] = field(default=(), repr=False)

    def row(self, sweep_value: int, scheduler: str) -> SummaryRow:
        for r in self.rows:
            if r.sweep_value == sweep_value and r.scheduler == scheduler:
                return r
        raise KeyError((sweep_value, scheduler))

    @property
    def bound_violations(self) -> int:
        return sum(r.bound_violations or 0 for r in self.rows)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["values"] = list(cfg["values"])
        cfg["schedulers"] = list(cfg["schedulers"])
        return {
            "config": cfg,
            "rows": [asdict(r) for r in self.rows],
            "trials": [asdict(t) for t in self.trials],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSummary":
        return cls(
            ExperimentConfig.from_mapping(data["config"]),
            tuple(SummaryRow(**r) for r in data["rows"]),
            tuple(TrialRecord(**t) for t in data["trials"]),
        )


def summarize(config: ExperimentConfig, records: list[TrialRecord]) -> ExperimentSummary:
    records = sorted(records, key=lambda r: (config.values.index(r.sweep_value), r.trial))
    rows = []
    for value in config.values:
        batch = [r for r in records if r.sweep_value == value]
        lower_mean = statistics.fmean(r.lower_bound for r in batch)
        upper_mean = statistics.fmean(r.upper_bound for r in batch)
        for name in config.schedulers:
            done = [(r.completion[name], r) for r in batch if r.completion[name] is not None]
            times = [t for t, _ in done]
            violations = gap = None
            if name == netcam_wp.SCHEDULER_ID:
                violations = sum(1 for t, r in done if not r.lower_bound <= t <= r.upper_bound)
                gap = statistics.fmean(r.upper_bound - t for t, r in done) if done else None
            rows.append(
                SummaryRow(
                    sweep_value=value,
                    scheduler=name,
                    mean_T=statistics.fmean(times) if times else None,
                    std_T=(statistics.stdev(times) if len(times) > 1 else 0.0) if times else None,
                    min_T=min(times) if times else None,
                    max_T=max(times) if times else None,
                    trials=len(batch),
                    excluded=len(batch) - len(times),
                    lower_bound_mean=lower_mean,
                    upper_bound_mean=upper_mean,
                    bound_violations=violations,
                    mean_bound_gap=gap,
                )
            )
    return ExperimentSummary(config, tuple(rows), tuple(records))


def run_trials(config: ExperimentConfig, jobs: int = 1) -> ExperimentSummary:
    """Run every (sweep value, trial) unit, then aggregate in a fixed order."""
    units = [(config, v, t) for v in config.values for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_unit, units, chunksize=max(1, len(units) // (4 * jobs))))
    else:
        records = [_run_unit(u) for u in units]
    summary = summarize(config, records)
    if summary.bound_violations:
        log.warning("%d NetCAM-WP trials fall outside the completion-time bounds", summary.bound_violations)
    return summary


# -- reports ---------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def summary_csv(summary: ExperimentSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in summary.rows:
        w.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def summary_svg(summary: ExperimentSummary, width: int = 640, height: int = 400) -> str:
    """Line chart of mean completion time against the sweep variable."""
    pad = 50
    xs = summary.config.values
    series = {
        name: [(r.sweep_value, r.mean_T) for r in summary.rows if r.scheduler == name and r.mean_T is not None]
        for name in summary.config.schedulers
    }
    ys = [y for pts in series.values() for _, y in pts] or [0.0]
    x_lo, x_hi = min(xs), max(xs)
    y_hi = max(ys) * 1.1 or 1.0
    x_span = (x_hi - x_lo) or 1

    def px(x, y):
        return (
            pad + (x - x_lo) / x_span * (width - 2 * pad),
            height - pad - y / y_hi * (height - 2 * pad),
        )

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{summary.config.sweep}</text>',
        f'<text x="14" y="{height / 2:.1f}" font-size="12" transform="rotate(-90 14 {height / 2:.1f})" '
        'text-anchor="middle">mean completion time</text>',
    ]
    for x in xs:
        gx, _ = px(x, 0)
        out.append(f'<text x="{gx:.1f}" y="{height - pad + 16}" text-anchor="middle" font-size="10">{x}</text>')
    for k in range(5):
        y = y_hi * k / 4
        _, gy = px(x_lo, y)
        out.append(f'<text x="{pad - 6}" y="{gy + 3:.1f}" text-anchor="end" font-size="10">{y:.1f}</text>')
    for idx, (name, pts) in enumerate(series.items()):
        colour = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join("{:.1f},{:.1f}".format(*px(x, y)) for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{coords}"><title>{name}</title></polyline>')
        out.append(f'<text x="{width - pad - 110}" y="{pad + 14 * idx}" font-size="11" fill="{colour}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_report(summary: ExperimentSummary, fmt: str, path) -> None:
    """Write ``summary`` as ``csv``, ``json`` or ``svg`` to ``path``."""
    if fmt == "csv":
        text = summary_csv(summary)
    elif fmt == "json":
        text = json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
    elif fmt == "svg":
        text = summary_svg(summary)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text)


def read_summary_json(path) -> ExperimentSummary:
    return ExperimentSummary.from_dict(json.loads(Path(path).read_text()))


def relative_gap(summary: ExperimentSummary, value: int, slow: str, fast: str) -> float:
    """``mean_T(slow) / mean_T(fast) - 1`` at one sweep point."""
    a, b = summary.row(value, slow).mean_T, summary.row(value, fast).mean_T
    if a is None or b is None:
        return math.nan
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return a / b - 1
