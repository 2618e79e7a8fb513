"""Figure rendering for benchmark CSV files.

Consumes the CSV emitted by the bench harness and writes PNG figures next
to it (or into a chosen directory): mean gap per configuration, mean wall
time per configuration, and best-value convergence traces.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _read(csv_path: str) -> list[dict]:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def _objectives(rows: list[dict]) -> list[str]:
    seen = []
    for row in rows:
        if row["objective"] not in seen:
            seen.append(row["objective"])
    return seen


def _fig_bars(rows: list[dict], column: str, title: str, ylabel: str, path: str) -> None:
    objectives = _objectives(rows)
    fig, axes = plt.subplots(1, len(objectives), figsize=(6 * len(objectives), 4),
                             squeeze=False)
    for ax, obj in zip(axes[0], objectives):
        acc: dict[str, list[float]] = defaultdict(list)
        for row in rows:
            if row["objective"] == obj and row[column]:
                acc[row["config"]].append(float(row[column]))
        labels = list(acc)
        means = [sum(v) / len(v) for v in acc.values()]
        ax.bar(range(len(labels)), means, color="#4878a8")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=30, ha="right")
        ax.set_title(f"{title} (min-{obj})")
        ax.set_ylabel(ylabel)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_traces(rows: list[dict], path: str, max_traces: int = 40) -> None:
    objectives = _objectives(rows)
    fig, axes = plt.subplots(1, len(objectives), figsize=(6 * len(objectives), 4),
                             squeeze=False)
    for ax, obj in zip(axes[0], objectives):
        configs = []
        for row in rows:
            if row["objective"] == obj and row["config"] not in configs:
                configs.append(row["config"])
        colors = plt.cm.tab10.colors
        seen_labels = set()
        count = 0
        for row in rows:
            if row["objective"] != obj or not row["trace"] or count >= max_traces:
                continue
            points = [p.split(":") for p in row["trace"].split(";")]
            xs = [int(a) for a, _ in points]
            ys = [float(b) for _, b in points]
            color = colors[configs.index(row["config"]) % len(colors)]
            label = row["config"] if row["config"] not in seen_labels else None
            seen_labels.add(row["config"])
            ax.step(xs, ys, where="post", alpha=0.5, color=color, label=label)
            count += 1
        ax.set_title(f"best value by iteration (min-{obj})")
        ax.set_xlabel("iteration")
        ax.set_ylabel("best value")
        ax.grid(alpha=0.3)
        if seen_labels:
            ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(csv_path: str, out_dir: str | None = None) -> list[str]:
    """Render the standard figures; returns the written paths."""

    rows = _read(csv_path)
    runs = [r for r in rows if r["row_type"] == "run"]
    if not runs:
        raise ValueError(f"{csv_path} contains no run rows")
    out_dir = out_dir or (os.path.dirname(os.path.abspath(csv_path)))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    paths = []

    p = os.path.join(out_dir, f"{stem}_gap.png")
    _fig_bars(runs, "gap", "mean gap vs best known", "gap (%)", p)
    paths.append(p)

    p = os.path.join(out_dir, f"{stem}_walltime.png")
    _fig_bars(runs, "wall_time", "mean wall time", "seconds", p)
    paths.append(p)

    p = os.path.join(out_dir, f"{stem}_traces.png")
    _fig_traces(runs, p)
    paths.append(p)
    return paths
