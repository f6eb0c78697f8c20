"""Config-driven Monte-Carlo sweeps over SNR and antenna counts.

Within a trial all solvers see the same channel draw (paired comparison);
the channel seed depends only on (master seed, sweep index, trial index),
so adding or removing solvers never shifts the channels.  Results go to a
tidy CSV with one row per (sweep value, solver, trial) plus a JSON manifest.
"""

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .channels import generate_channels
from .config import SystemConfig, nats_to_bits
from .exceptions import ConfigError
from .fdpbsum import solve_fd_pbsum, solve_upper_bound_no_si
from .global2x2 import global_search_2x2
from .metrics import Precoders, rate
from .rank1 import GradientAscentOptions, gradient_ascent, rzf, tzf
from .seeding import mix_seed

CSV_HEADER = [
    "sweep_var",
    "sweep_value",
    "solver",
    "trial",
    "seed",
    "rate_bits",
    "sinr",
    "iters",
    "resid_inf",
    "wall_ms",
]

SWEEP_VARS = ("snr_db", "n_tr", "n_sd", "n_all")
SOLVERS = ("gradient", "tzf", "rzf", "global2x2", "pbsum", "upper_bound", "hd_half")

# Stable per-solver stream ids for seed mixing; hd_half shares the
# upper_bound stream because its row is derived from the same solve.
_SOLVER_STREAM = {
    "gradient": 1,
    "tzf": 2,
    "rzf": 3,
    "global2x2": 4,
    "pbsum": 5,
    "upper_bound": 6,
    "hd_half": 6,
}


@dataclass(frozen=True)
class ExperimentSpec:
    sweep_var: str
    values: tuple
    trials: int
    solvers: tuple
    base_config: SystemConfig
    master_seed: int
    output: str
    workers: int = 1
    auto_streams: bool = False  # d = min antenna count at every sweep point

    def __post_init__(self):
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"unknown sweep variable {self.sweep_var!r}; use one of {SWEEP_VARS}")
        if not self.values:
            raise ConfigError("sweep value list is empty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solvers {unknown}; valid: {SOLVERS}")
        if not self.solvers:
            raise ConfigError("no solvers selected")
        for value, cfg in self.sweep_configs():
            if "global2x2" in self.solvers and (cfg.n_t != 2 or cfg.n_r != 2):
                raise ConfigError(
                    f"global2x2 requires n_t = n_r = 2 but sweep value {value} "
                    f"gives n_t={cfg.n_t}, n_r={cfg.n_r}"
                )

    def sweep_configs(self):
        """(value, SystemConfig) pairs for every sweep point."""
        out = []
        base = self.base_config
        if self.auto_streams:
            base = replace(base, d=1)
        for value in self.values:
            try:
                cfg = base
                if self.sweep_var == "snr_db":
                    cfg = cfg.with_snr_db(float(value))
                elif self.sweep_var == "n_tr":
                    cfg = replace(cfg, n_t=int(value), n_r=int(value))
                elif self.sweep_var == "n_sd":
                    cfg = replace(cfg, n_s=int(value), n_d=int(value))
                elif self.sweep_var == "n_all":
                    cfg = replace(
                        cfg, n_s=int(value), n_r=int(value), n_t=int(value), n_d=int(value)
                    )
                if self.auto_streams:
                    cfg = replace(cfg, d=cfg.max_streams())
            except ValueError as e:
                raise ConfigError(f"sweep value {value}: {e}") from e
            if cfg.d > cfg.max_streams():
                raise ConfigError(
                    f"d={cfg.d} exceeds min antenna count at sweep value {value}"
                )
            out.append((value, cfg))
        return out


@dataclass
class ResultRow:
    sweep_var: str
    sweep_value: float
    solver: str
    trial: int
    seed: int
    rate_bits: float
    sinr: float
    iters: int
    resid_inf: float
    wall_ms: float

    def as_csv(self) -> list:
        return [
            self.sweep_var,
            _fmt(self.sweep_value),
            self.solver,
            self.trial,
            self.seed,
            _fmt(self.rate_bits),
            _fmt(self.sinr),
            self.iters,
            _fmt(self.resid_inf),
            _fmt(self.wall_ms),
        ]


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _run_rank1(solver: str, ch, cfg, solver_seed: int):
    if solver == "gradient":
        sol, info = gradient_ascent(
            ch, cfg, GradientAscentOptions(), seed=solver_seed, full_output=True
        )
        return sol, info.total_iterations
    if solver == "tzf":
        return tzf(ch, cfg), 1
    if solver == "rzf":
        return rzf(ch, cfg), 1
    if solver == "global2x2":
        return global_search_2x2(ch, cfg), 1
    raise ValueError(solver)


def run_cell(spec: ExperimentSpec, sweep_index: int, trial: int) -> list:
    """All solver rows of one (sweep value, trial) cell."""
    value, cfg = spec.sweep_configs()[sweep_index]
    channel_seed = mix_seed(spec.master_seed, sweep_index, trial)
    ch = generate_channels(cfg, channel_seed)
    rows = []

    def emit(solver, rate_bits_val, sinr, iters, resid, wall_ms):
        rows.append(
            ResultRow(
                sweep_var=spec.sweep_var,
                sweep_value=float(value),
                solver=solver,
                trial=trial,
                seed=channel_seed,
                rate_bits=rate_bits_val,
                sinr=sinr,
                iters=iters,
                resid_inf=resid,
                wall_ms=wall_ms,
            )
        )

    need_ub = [s for s in ("upper_bound", "hd_half") if s in spec.solvers]
    for solver in spec.solvers:
        solver_seed = mix_seed(
            spec.master_seed, sweep_index, trial, _SOLVER_STREAM[solver]
        )
        t0 = time.perf_counter()
        if solver in ("gradient", "tzf", "rzf", "global2x2"):
            sol, iters = _run_rank1(solver, ch, cfg, solver_seed)
            wall = (time.perf_counter() - t0) * 1e3
            emit(solver, nats_to_bits(sol.achieved_rate), sol.achieved_sinr, iters, np.nan, wall)
        elif solver == "pbsum":
            res = solve_fd_pbsum(ch, cfg, seed=solver_seed)
            wall = (time.perf_counter() - t0) * 1e3
            emit(solver, res.rate_bits, np.nan, res.trace.total_inner, res.residual_inf, wall)
        elif solver in ("upper_bound", "hd_half"):
            if solver != need_ub[0]:
                continue  # both requested: derive the two rows from one solve below
            res = solve_upper_bound_no_si(ch, cfg, seed=solver_seed)
            wall = (time.perf_counter() - t0) * 1e3
            if "upper_bound" in spec.solvers:
                emit("upper_bound", res.rate_bits, np.nan, res.trace.total_inner,
                     res.residual_inf, wall)
            if "hd_half" in spec.solvers:
                emit("hd_half", res.rate_bits / 2.0, np.nan, res.trace.total_inner,
                     res.residual_inf, wall)
    return rows


def _run_cell_star(args):
    return run_cell(*args)


def run_experiment(spec: ExperimentSpec) -> tuple:
    """Execute the sweep; writes the CSV and a JSON manifest.

    Returns (csv_path, manifest_path).  Deterministic given the master seed
    except for the wall_ms column and the manifest timestamp.
    """
    cells = [
        (spec, si, t)
        for si in range(len(spec.values))
        for t in range(spec.trials)
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            per_cell = list(pool.map(_run_cell_star, cells, chunksize=4))
    else:
        per_cell = [run_cell(*c) for c in cells]

    rows = [row for cell in per_cell for row in cell]
    rows.sort(key=lambda r: (r.sweep_value, r.solver, r.trial))

    csv_path = spec.output
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())

    manifest_path = csv_path + ".manifest.json"
    manifest = {
        "version": __version__,
        "created_unix": time.time(),
        "master_seed": spec.master_seed,
        "sweep_var": spec.sweep_var,
        "values": list(spec.values),
        "trials": spec.trials,
        "solvers": list(spec.solvers),
        "system": asdict(spec.base_config),
        "output": csv_path,
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2)
    return csv_path, manifest_path


@dataclass
class SummaryCell:
    sweep_value: float
    solver: str
    n: int
    mean_rate: float
    stderr_rate: float


def summarize(csv_path: str) -> list:
    """Per (sweep value, solver) mean rate and standard error."""
    groups: dict = {}
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"CSV is missing columns: {missing}")
        for rec in reader:
            key = (float(rec["sweep_value"]), rec["solver"])
            groups.setdefault(key, []).append(float(rec["rate_bits"]))
    out = []
    for (value, solver), rates in sorted(groups.items()):
        arr = np.asarray(rates)
        stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out.append(
            SummaryCell(
                sweep_value=value,
                solver=solver,
                n=len(arr),
                mean_rate=float(arr.mean()),
                stderr_rate=stderr,
            )
        )
    return out


def format_summary(cells: list) -> str:
    lines = [f"{'sweep_value':>12} {'solver':>12} {'n':>6} {'mean_rate':>12} {'stderr':>10}"]
    for c in cells:
        lines.append(
            f"{c.sweep_value:>12.4g} {c.solver:>12} {c.n:>6d} "
            f"{c.mean_rate:>12.6f} {c.stderr_rate:>10.6f}"
        )
    return "\n".join(lines)
