"""Figure rendering for experiment CSV outputs.

Pure view layer: reads the results/hedging CSV schemas written by the
harness, aggregates trial means, and renders one image per file. Nothing is
recomputed beyond averaging the stored values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

RESULTS_HEADER = ["experiment", "param", "trial", "ras_tommy", "ras_baseline", "aux1", "aux2", "seed"]
HEDGING_HEADER = ["policy", "client_id", "avg_rank"]

AXIS_LABELS = {
    "run": ("inter-event delay (ns)", "RAS"),
    "delay": ("inter-event delay (ns)", "RAS"),
    "threshold": ("edge threshold", "RAS"),
    "clients": ("number of clients", "RAS"),
    "events": ("number of events", "RAS"),
    "latency": ("latency model", "RAS"),
    "fit": ("distribution fit", "RAS"),
    "sync_interval": ("sync interval (ns)", "RAS"),
    "drift": ("drift sigma (ppm)", "RAS"),
    "stable": ("drift sigma (ppm)", "mean stability margin (ns)"),
    "speedup": ("number of clients", "speedup (slow / precomputed)"),
}


class SchemaError(ValueError):
    """Raised when a CSV does not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    experiment: str
    csv_path: Path
    out_path: Path


def _read_csv(path: Path, expected_header: list[str]) -> list[dict[str, str]]:
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        if [h.strip() for h in header] != expected_header:
            raise SchemaError(
                f"{path}: header {header} does not match {expected_header}"
            )
        rows = [dict(zip(expected_header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _param_value(text: str) -> float | str:
    try:
        return float(text)
    except ValueError:
        return text


def _aggregate(rows: list[dict[str, str]], column: str) -> tuple[list, list[float]]:
    by_param: dict = {}
    order: list = []
    for row in rows:
        value = row[column]
        if value == "":
            continue
        param = _param_value(row["param"])
        if param not in by_param:
            by_param[param] = []
            order.append(param)
        by_param[param].append(float(value))
    params = order
    means = [sum(by_param[p]) / len(by_param[p]) for p in params]
    return params, means


def render_results(csv_path: str | Path, out_path: str | Path) -> Path:
    """Render one experiment results CSV to an image."""
    csv_path = Path(csv_path)
    out_path = Path(out_path)
    rows = _read_csv(csv_path, RESULTS_HEADER)
    experiments = {row["experiment"] for row in rows}
    if len(experiments) != 1:
        raise SchemaError(f"{csv_path}: expected a single experiment, found {sorted(experiments)}")
    experiment = experiments.pop()
    if experiment not in AXIS_LABELS:
        raise SchemaError(f"{csv_path}: unknown experiment {experiment!r}")
    xlabel, ylabel = AXIS_LABELS[experiment]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    categorical = experiment in ("latency", "fit")

    if experiment == "speedup":
        params, speedups = _aggregate(rows, "aux1")
        ax.plot(params, speedups, marker="o", color="tab:blue")
        ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
    elif experiment == "stable":
        params, margins = _aggregate(rows, "aux1")
        ax.plot(params, margins, marker="o", color="tab:blue")
    else:
        params, tommy = _aggregate(rows, "ras_tommy")
        _, base = _aggregate(rows, "ras_baseline")
        xs = range(len(params)) if categorical else params
        ax.plot(xs, tommy, marker="o", label="probabilistic", color="tab:blue")
        ax.plot(xs, base, marker="s", label="interval baseline", color="tab:orange")
        if categorical:
            ax.set_xticks(list(xs))
            ax.set_xticklabels([str(p) for p in params], rotation=20)
        if experiment == "events":
            _, win_tommy = _aggregate(rows, "aux1")
            _, win_base = _aggregate(rows, "aux2")
            ax.plot(xs, win_tommy, marker="o", linestyle="--", color="tab:blue",
                    label="probabilistic (windowed)")
            ax.plot(xs, win_base, marker="s", linestyle="--", color="tab:orange",
                    label="baseline (windowed)")
        ax.legend()
    if experiment in ("delay", "sync_interval") and not categorical:
        ax.set_xscale("symlog")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"experiment: {experiment}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_hedging(csv_path: str | Path, out_path: str | Path) -> Path:
    """Two-panel bar chart of per-client average ranks for both policies."""
    csv_path = Path(csv_path)
    out_path = Path(out_path)
    rows = _read_csv(csv_path, HEDGING_HEADER)
    per_policy: dict[str, dict[int, float]] = {}
    variances: dict[str, float] = {}
    for row in rows:
        policy = row["policy"]
        if row["client_id"] == "variance":
            variances[policy] = float(row["avg_rank"])
            continue
        per_policy.setdefault(policy, {})[int(row["client_id"])] = float(row["avg_rank"])
    if not per_policy:
        raise SchemaError(f"{csv_path}: no per-client rank rows")

    policies = list(per_policy)
    fig, axes = plt.subplots(1, len(policies), figsize=(5.0 * len(policies), 4.0), sharey=True)
    if len(policies) == 1:
        axes = [axes]
    for ax, policy in zip(axes, policies):
        clients = sorted(per_policy[policy])
        ranks = [per_policy[policy][c] for c in clients]
        ax.bar([str(c) for c in clients], ranks, color="tab:blue")
        title = policy
        if policy in variances:
            title += f" (variance {variances[policy]:.3g})"
        ax.set_title(title)
        ax.set_xlabel("client")
    axes[0].set_ylabel("average rank")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render(csv_path: str | Path, out_path: str | Path) -> Path:
    """Render a CSV, auto-detecting the schema from its header."""
    csv_path = Path(csv_path)
    with open(csv_path, "r", newline="", encoding="ascii") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise SchemaError(f"{csv_path}: empty file")
    header = [h.strip() for h in header]
    if header == HEDGING_HEADER:
        return render_hedging(csv_path, out_path)
    if header == RESULTS_HEADER:
        return render_results(csv_path, out_path)
    raise SchemaError(f"{csv_path}: unrecognized header {header}")
