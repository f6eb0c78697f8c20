"""Aggregate experiment CSVs and draw the paper-style figures.

No rate is ever recomputed here; the CSV is the single source of numbers.
Rendering is a pure function of the CSV and the spec: re-rendering with the
same inputs produces byte-identical files.
"""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotkit"  # deterministic SVG element ids
import matplotlib.pyplot as plt
import numpy as np

from .figspec import DEFAULT_STYLES, FigureSpec, FigureSpecError

REQUIRED_COLUMNS = (
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
)


@dataclass(frozen=True)
class Curve:
    solver: str
    x: np.ndarray           # sweep values, ascending
    mean: np.ndarray        # mean rate (bits/s/Hz)
    stderr: np.ndarray


def aggregate(csv_path: str, solvers: tuple = ()) -> list:
    """Mean rate +- standard error per (solver, sweep value)."""
    groups: dict = {}
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise FigureSpecError(f"CSV is missing columns: {missing}")
        for rec in reader:
            groups.setdefault(rec["solver"], {}).setdefault(
                float(rec["sweep_value"]), []
            ).append(float(rec["rate_bits"]))
    present = tuple(sorted(groups))
    chosen = solvers or present
    unknown = [s for s in chosen if s not in present]
    if unknown:
        raise FigureSpecError(f"solvers {unknown} not present in CSV (has {present})")
    if not chosen:
        raise FigureSpecError("no solvers selected and the CSV contains none")
    curves = []
    for solver in chosen:
        cells = sorted(groups[solver].items())
        x = np.array([v for v, _ in cells])
        mean = np.array([np.mean(r) for _, r in cells])
        stderr = np.array(
            [np.std(r, ddof=1) / np.sqrt(len(r)) if len(r) > 1 else 0.0 for _, r in cells]
        )
        curves.append(Curve(solver=solver, x=x, mean=mean, stderr=stderr))
    return curves


_X_LABELS = {
    "snr_sweep": "SNR (dB)",
    "antenna_sweep": "relay antennas",
    "logn_sweep": "antennas N (log2 scale)",
}


def render(spec: FigureSpec) -> list:
    """Draw the figure and return the aggregated curves that were plotted."""
    curves = aggregate(spec.csv_path, spec.solvers)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=150)
    for curve in curves:
        label, color, linestyle, marker = DEFAULT_STYLES.get(
            curve.solver, (curve.solver, None, "-", "o")
        )
        style = spec.styles.get(curve.solver, {})
        label = style.get("label", label)
        color = style.get("color", color)
        linestyle = style.get("linestyle", linestyle)
        marker = style.get("marker", marker)
        x = np.log2(curve.x) if spec.kind == "logn_sweep" else curve.x
        ax.plot(x, curve.mean, label=label, color=color, linestyle=linestyle, marker=marker)
        ax.fill_between(
            x,
            curve.mean - curve.stderr,
            curve.mean + curve.stderr,
            alpha=0.2,
            color=color,
            linewidth=0,
        )
    ax.set_xlabel(_X_LABELS[spec.kind])
    ax.set_ylabel("average rate (bits/s/Hz)")
    if spec.kind == "logn_sweep":
        xs = sorted({v for c in curves for v in c.x})
        ax.set_xticks([np.log2(v) for v in xs])
        ax.set_xticklabels([f"{int(v)}" for v in xs])
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    metadata = {"Date": None} if spec.output.lower().endswith(".svg") else {}
    fig.savefig(spec.output, metadata=metadata)
    plt.close(fig)
    return curves
