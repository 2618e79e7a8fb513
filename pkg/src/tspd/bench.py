"""Benchmark harness: run grids of solver configurations and emit CSV.

One row per (instance, config, seed) run plus one aggregate row per
(instance, config) with best, mean, sd, and mean wall time over the seeds.
Rows are written in a deterministic order so repeated invocations produce
identical files up to the wall-time columns.  Runs execute on a process
pool; failures become failed rows and the harness continues.
"""

from __future__ import annotations

import csv
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .evaluation import RelaxMode
from .genetic import HgaParams, run_hga
from .model import Instance, Objective

WORKERS_ENV = "TSPD_WORKERS"

CSV_COLUMNS = [
    "row_type", "instance", "objective", "config", "crossover", "relax",
    "no_inf", "no_div", "no_repair", "no_restore", "seed", "status",
    "value", "gap", "best", "mean", "sd", "wall_time", "iterations", "trace",
]


@dataclass(frozen=True)
class BenchConfig:
    """One column of a results table: a named solver configuration."""

    label: str
    objective: Objective
    params: HgaParams = field(default_factory=HgaParams)


@dataclass
class RunRecord:
    instance: str
    config: BenchConfig
    seed: int
    status: str  # ok | no_feasible | error
    value: float | None
    wall_time: float
    iterations: int
    trace: list[tuple[int, float]]
    gap: float | None = None


def ablation_grid(objectives: list[Objective],
                  base: HgaParams | None = None) -> list[BenchConfig]:
    """The seven standard-vs-ablated configurations per objective."""

    base = base if base is not None else HgaParams()
    out = []
    for obj in objectives:
        out.append(BenchConfig("standard", obj, base))
        out.append(BenchConfig("no_inf", obj, replace(base, no_inf=True)))
        out.append(BenchConfig("no_div", obj, replace(base, no_div=True)))
        out.append(BenchConfig("no_repair", obj, replace(base, no_repair=True)))
        out.append(BenchConfig("no_restore", obj, replace(base, no_restore=True)))
        out.append(BenchConfig("relax_truck", obj, replace(base, relax_mode=RelaxMode.TRUCK)))
        out.append(BenchConfig("relax_drone", obj, replace(base, relax_mode=RelaxMode.DRONE)))
    return out


def crossover_grid(objectives: list[Objective], kinds: list[str],
                   base: HgaParams | None = None) -> list[BenchConfig]:
    base = base if base is not None else HgaParams()
    return [BenchConfig(kind, obj, replace(base, crossover_kind=kind))
            for obj in objectives for kind in kinds]


def _compress_trace(trace: list[float]) -> list[tuple[int, float]]:
    # change points only; the full per-iteration curve is recoverable
    out: list[tuple[int, float]] = []
    for it, phi in enumerate(trace):
        if not out or phi != out[-1][1]:
            out.append((it, phi))
    return out


def run_one(inst: Instance, config: BenchConfig, seed: int) -> RunRecord:
    try:
        res = run_hga(inst, config.params, config.objective, seed)
    except Exception as exc:  # noqa: BLE001 - failed runs become failed rows
        return RunRecord(instance=inst.name, config=config, seed=seed,
                         status=f"error:{type(exc).__name__}", value=None,
                         wall_time=0.0, iterations=0, trace=[])
    status = "ok" if res.feasible else "no_feasible"
    return RunRecord(instance=inst.name, config=config, seed=seed, status=status,
                     value=res.value if res.feasible else None,
                     wall_time=res.stats.wall_time, iterations=res.stats.iterations,
                     trace=_compress_trace(res.stats.best_phi_trace))


def _worker(job: tuple[Instance, BenchConfig, int]) -> RunRecord:
    return run_one(*job)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def bench(instances: list[Instance], configs: list[BenchConfig], seeds: list[int],
          workers: int | None = None,
          best_known: dict[tuple[str, str], float] | None = None) -> list[RunRecord]:
    """Run the full (instance x config x seed) grid and fill in gap columns."""

    jobs = [(inst, config, seed)
            for inst in instances for config in configs for seed in seeds]
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1:
        records = [_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_worker, jobs, chunksize=1))

    # reference value per (instance, objective): supplied, else min over the grid
    refs: dict[tuple[str, str], float] = {}
    for rec in records:
        if rec.status == "ok" and rec.value is not None:
            key = (rec.instance, rec.config.objective.value)
            if key not in refs or rec.value < refs[key]:
                refs[key] = rec.value
    if best_known:
        refs.update(best_known)
    for rec in records:
        key = (rec.instance, rec.config.objective.value)
        if rec.status == "ok" and rec.value is not None and key in refs and refs[key] > 0:
            rec.gap = 100.0 * (rec.value - refs[key]) / refs[key]
    return records


def _fmt(x: float | None, digits: int = 12) -> str:
    return "" if x is None else f"{x:.{digits}g}"


def _run_row(rec: RunRecord) -> dict[str, str]:
    p = rec.config.params
    return {
        "row_type": "run",
        "instance": rec.instance,
        "objective": rec.config.objective.value,
        "config": rec.config.label,
        "crossover": p.crossover_kind,
        "relax": p.relax_mode.value,
        "no_inf": int(p.no_inf), "no_div": int(p.no_div),
        "no_repair": int(p.no_repair), "no_restore": int(p.no_restore),
        "seed": rec.seed,
        "status": rec.status,
        "value": _fmt(rec.value),
        "gap": _fmt(rec.gap, 6),
        "best": "", "mean": "", "sd": "",
        "wall_time": f"{rec.wall_time:.3f}",
        "iterations": rec.iterations,
        "trace": ";".join(f"{it}:{phi:.12g}" for it, phi in rec.trace),
    }


def _agg_row(instance: str, config: BenchConfig, group: list[RunRecord]) -> dict[str, str]:
    p = config.params
    vals = [r.value for r in group if r.status == "ok" and r.value is not None]
    gaps = [r.gap for r in group if r.gap is not None]
    walls = [r.wall_time for r in group if not r.status.startswith("error")]
    return {
        "row_type": "agg",
        "instance": instance,
        "objective": config.objective.value,
        "config": config.label,
        "crossover": p.crossover_kind,
        "relax": p.relax_mode.value,
        "no_inf": int(p.no_inf), "no_div": int(p.no_div),
        "no_repair": int(p.no_repair), "no_restore": int(p.no_restore),
        "seed": "",
        "status": f"{len(vals)}/{len(group)}",
        "value": "",
        "gap": _fmt(statistics.mean(gaps), 6) if gaps else "",
        "best": _fmt(min(vals)) if vals else "",
        "mean": _fmt(statistics.mean(vals)) if vals else "",
        "sd": _fmt(statistics.stdev(vals), 6) if len(vals) > 1 else ("0" if vals else ""),
        "wall_time": f"{statistics.mean(walls):.3f}" if walls else "",
        "iterations": "",
        "trace": "",
    }


def write_csv(path: str, records: list[RunRecord]) -> None:
    """Deterministic row order: grouped by instance and config, runs then aggregate."""

    groups: dict[tuple[str, str, str], list[RunRecord]] = {}
    order: list[tuple[str, str, str]] = []
    for rec in records:
        key = (rec.instance, rec.config.objective.value, rec.config.label)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for key in order:
            group = sorted(groups[key], key=lambda r: r.seed)
            for rec in group:
                writer.writerow(_run_row(rec))
            writer.writerow(_agg_row(group[0].instance, group[0].config, group))


def mean_gap(records: list[RunRecord], config_label: str, objective: Objective) -> float:
    gaps = [r.gap for r in records
            if r.config.label == config_label and r.config.objective is objective
            and r.gap is not None]
    if not gaps:
        return float("nan")
    return statistics.mean(gaps)
