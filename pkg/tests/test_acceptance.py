"""Acceptance gate: nine end-to-end checks, one printed line each.

A1  desk-scale exactness: best-of-seeds equals the brute-force optimum
A2  split decoder equals full labeling enumeration, under a wall budget
A3  incremental move deltas equal full re-evaluation
A4  walk-based and event-based timeline simulators agree exactly
A5  published-benchmark reproduction when the files are supplied, else a
    desk-scale substitute at the largest exact size
A6  crossover quality ordering on n=50 instances (dx <= pmx <= obx)
A7  component ablation directions on the same instances
A8  structural fuzz over one million randomized operations
A9  byte-identical CLI solution records across reruns

A6 and A7 are search-quality checks over 600 solver runs each; expect
roughly an hour apiece.  Run with `-s` to see the summary lines as they
complete: python3 -m pytest tests/test_acceptance.py -v -s
"""

import itertools
import math
import os
import random
import statistics
import subprocess
import time
from dataclasses import replace
from functools import lru_cache

from conftest import random_move
from tspd.bench import BenchConfig, ablation_grid, bench, crossover_grid, mean_gap
from tspd.evaluation import PenaltyConfig, RelaxMode, penalized_cost, simulate_timeline
from tspd.genetic import (
    HgaParams,
    crossover_classical,
    crossover_dx,
    run_hga,
)
from tspd.instances import generate_instance, parse_instance
from tspd.local_search import MoveKind, apply_move, evaluate_move
from tspd.model import Objective, is_giant_tour, validate_solution
from tspd.oracle import (
    enumerate_splits,
    exact_solve,
    iter_labelings,
    random_solution,
    simulate_timeline_events,
)
from tspd.restore import restore
from tspd.split import split

BOTH = (Objective.MIN_COST, Objective.MIN_TIME)

# Termination budget for the desk-scale checks; the defaults converge long
# before this on n <= 8 and the 10 s per-run ceiling stays far away.
DESK_PARAMS = HgaParams(iter_ni=400)

# n=50 recipe for the search-quality checks: endurance tight enough to bind
# and a drone twice the truck's speed, so every ingredient under test has
# work to do.  Seeds are disjoint from every other suite in this repo.
N50_KW = dict(endurance=10.0, drone_speed=4.0 / 3.0)
N50_SEEDS = tuple(range(301, 311))
N50_ITER = 60
HGA_SEEDS = tuple(range(1, 11))
GRID_BUDGET_S = 7200.0


def _gate(tag: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    print(line, flush=True)
    assert ok, line


@lru_cache(maxsize=1)
def _n50_instances():
    return tuple(generate_instance(50, s, **N50_KW) for s in N50_SEEDS)


def _desk_exactness(tag: str, instances) -> None:
    """Best-of-10-seeds vs exact optimum, per objective, 10 s per run."""

    worst_miss = 0.0
    max_wall = 0.0
    detail = []
    ok = True
    for obj in BOTH:
        exact_hits = 0
        misses_within_1pct = 0
        for inst in instances:
            _, opt = exact_solve(inst, obj)
            best = math.inf
            for seed in HGA_SEEDS:
                res = run_hga(inst, DESK_PARAMS, obj, seed)
                max_wall = max(max_wall, res.stats.wall_time)
                if res.feasible:
                    best = min(best, res.value)
            if abs(best - opt) <= 1e-9:
                exact_hits += 1
            else:
                gap = 100.0 * (best - opt) / opt
                worst_miss = max(worst_miss, gap)
                misses_within_1pct += gap <= 1.0
        need = math.ceil(0.95 * len(instances))
        obj_ok = (exact_hits >= need
                  and exact_hits + misses_within_1pct == len(instances))
        ok = ok and obj_ok
        detail.append(f"{obj.value}: {exact_hits}/{len(instances)} exact")
    ok = ok and max_wall <= 10.0
    _gate(tag, ok, ", ".join(detail) + f", worst miss {worst_miss:.3f}%, "
          f"max run {max_wall:.2f}s (limit 10s)")


def test_a1_desk_scale_exactness():
    instances = [generate_instance(4 + (seed - 1) % 5, seed) for seed in range(1, 31)]
    _desk_exactness("A1 desk-scale exactness n=4..8", instances)


def test_a2_split_equals_labeling_enumeration():
    rng = random.Random(92)
    pairs = []
    for _ in range(200):
        inst = generate_instance(rng.randint(1, 7), rng.randrange(10**6))
        gt = list(inst.customers)
        rng.shuffle(gt)
        pairs.append((inst, gt))
    combos = [(obj, omega, relax) for obj in BOTH for omega in (0.1, 1.0, 10.0)
              for relax in RelaxMode]

    # one decode outside the clock pays the compilation cost
    split(pairs[0][1], pairs[0][0], PenaltyConfig(), Objective.MIN_COST)

    mismatches = 0
    t0 = time.perf_counter()
    for inst, gt in pairs:
        scored = [(sol, simulate_timeline(sol, inst)) for sol in iter_labelings(gt, inst)]
        for obj, omega, relax in combos:
            cfg = PenaltyConfig(omega=omega, relax=relax)
            ref = min(penalized_cost(sol, inst, cfg, obj, tl) for sol, tl in scored)
            got = penalized_cost(split(gt, inst, cfg, obj), inst, cfg, obj)
            mismatches += got != ref
    elapsed = time.perf_counter() - t0

    # spot-check the timeline-sharing shortcut against the plain enumerator
    for inst, gt in pairs[:20]:
        obj, omega, relax = random.Random(id(gt) & 0xFFFF).choice(combos)
        cfg = PenaltyConfig(omega=omega, relax=relax)
        scored = [(sol, simulate_timeline(sol, inst)) for sol in iter_labelings(gt, inst)]
        ref = min(penalized_cost(sol, inst, cfg, obj, tl) for sol, tl in scored)
        assert ref == min(phi for _, phi in enumerate_splits(gt, inst, cfg, obj))

    _gate("A2 split equals enumeration", mismatches == 0 and elapsed < 5.0,
          f"{len(pairs)} tours x {len(combos)} configs, {mismatches} mismatches, "
          f"{elapsed:.2f}s (budget 5s)")


def test_a3_incremental_move_deltas():
    rng = random.Random(83)
    instances = [generate_instance(8, 81), generate_instance(20, 82)]
    cfg = PenaltyConfig()
    kinds = list(MoveKind)
    checks = {obj: 0 for obj in BOTH}
    per_kind = {(obj, kind): 0 for obj in BOTH for kind in kinds}
    worst = 0.0
    sols = [random_solution(inst, rng) for inst in instances]
    while min(checks.values()) < 10_000:
        i = rng.randrange(2)
        inst, sol = instances[i], sols[i]
        kind = rng.choice(kinds)
        args = random_move(kind, sol, inst, rng)
        if args is None:
            continue
        before = {obj: penalized_cost(sol, inst, cfg, obj) for obj in BOTH}
        after = None
        for obj in BOTH:
            delta = evaluate_move(kind, args, sol, inst, cfg, obj)
            if delta is None:
                continue
            if after is None:
                after = apply_move(kind, args, sol, inst)
            full = penalized_cost(after, inst, cfg, obj) - before[obj]
            worst = max(worst, abs(delta - full))
            checks[obj] += 1
            per_kind[obj, kind] += 1
        if after is not None and rng.random() < 0.5:
            sols[i] = after
        elif rng.random() < 0.1:
            sols[i] = random_solution(inst, rng)
    thin = min(per_kind.values())
    total = sum(checks.values())
    _gate("A3 incremental move deltas",
          worst <= 1e-9 and thin >= 20,
          f"{total} checks over n=8/n=20, all 16 neighborhoods (thinnest {thin}), "
          f"worst |delta - full| = {worst:.2e} (tol 1e-9)")


def test_a4_timeline_simulator_agreement():
    rng = random.Random(44)
    disagreements = 0
    exhaustive = 0
    for _ in range(50):
        inst = generate_instance(rng.randint(1, 6), rng.randrange(10**6))
        for perm in itertools.permutations(inst.customers):
            for sol in iter_labelings(list(perm), inst):
                exhaustive += 1
                if simulate_timeline(sol, inst) != simulate_timeline_events(sol, inst):
                    disagreements += 1
    inst = generate_instance(20, 4040)
    sampled = 10_000
    for _ in range(sampled):
        sol = random_solution(inst, rng)
        if simulate_timeline(sol, inst) != simulate_timeline_events(sol, inst):
            disagreements += 1
    _gate("A4 timeline simulators agree", disagreements == 0,
          f"{exhaustive} exhaustive solutions (50 instances, n<=6) + "
          f"{sampled} random at n=20, {disagreements} disagreements")


def test_a5_benchmark_reproduction_or_substitute():
    root = os.environ.get("TSPD_MURRAY_DIR")
    if not root:
        # The published benchmark files are not bundled and this environment
        # cannot fetch them; the documented substitute runs the desk-scale
        # exactness check at the largest exact size instead.  Point
        # TSPD_MURRAY_DIR at a directory of instance folders to run the
        # reproduction (see README).
        instances = [generate_instance(8, seed) for seed in range(1, 31)]
        _desk_exactness("A5 substitute: desk-scale exactness at n=8", instances)
        return

    pinned = {"437v1": 56.468, "437v9": 42.416}
    rows = []
    table = os.path.join(root, "table1.csv")
    if os.path.exists(table):
        with open(table) as fh:
            for line in fh:
                name, endurance, expected = line.strip().split(",")
                rows.append((name, float(endurance), float(expected)))
    else:
        rows = [(name, 20.0, value) for name, value in pinned.items()]

    subdirs = {d: os.path.join(root, d) for d in os.listdir(root)
               if os.path.isdir(os.path.join(root, d))}
    hits = 0
    slowest = 0.0
    missing = []
    for name, endurance, expected in rows:
        match = next((p for d, p in subdirs.items() if d.endswith(name)), None)
        if match is None:
            missing.append(name)
            continue
        inst = parse_instance(match, fmt="murray", endurance=endurance)
        t0 = time.perf_counter()
        best = min(run_hga(inst, HgaParams(), Objective.MIN_TIME, s).value
                   for s in HGA_SEEDS)
        slowest = max(slowest, time.perf_counter() - t0)
        hits += abs(best - expected) <= 1e-3
    ok = not missing and hits >= math.ceil(0.9 * len(rows)) and slowest <= 60.0
    _gate("A5 benchmark reproduction", ok,
          f"{hits}/{len(rows)} rows within 1e-3, slowest instance {slowest:.1f}s"
          + (f", missing {missing}" if missing else ""))


def test_a6_crossover_quality_ordering():
    t0 = time.perf_counter()
    configs = crossover_grid(list(BOTH), ["dx", "pmx", "obx"], HgaParams(iter_ni=N50_ITER))
    records = bench(list(_n50_instances()), configs, list(HGA_SEEDS), workers=1)
    elapsed = time.perf_counter() - t0

    bad_runs = sum(1 for r in records if r.status != "ok")
    pooled = {}
    for kind in ("dx", "pmx", "obx"):
        gaps = [r.gap for r in records if r.config.label == kind and r.gap is not None]
        pooled[kind] = statistics.mean(gaps)
    by_obj = {(kind, obj.value): mean_gap(records, kind, obj)
              for kind in pooled for obj in BOTH}
    ordered = pooled["dx"] <= pooled["pmx"] <= pooled["obx"]
    ratio = pooled["obx"] / pooled["dx"] if pooled["dx"] > 0 else math.inf
    _gate("A6 crossover ordering", ordered and ratio >= 2.0 and bad_runs == 0
          and elapsed <= GRID_BUDGET_S,
          f"mean gaps dx {pooled['dx']:.3f}% <= pmx {pooled['pmx']:.3f}% <= "
          f"obx {pooled['obx']:.3f}%, obx/dx {ratio:.1f}x (need >= 2), "
          f"{len(records)} runs ({bad_runs} bad) in {elapsed / 60:.0f} min; "
          + "; ".join(f"{k}/{o} {g:.3f}%" for (k, o), g in sorted(by_obj.items())))


def test_a7_component_ablation_directions():
    t0 = time.perf_counter()
    base = HgaParams(iter_ni=N50_ITER)
    # no_repair rides in the grid builder but carries no assertion here
    configs = [c for c in ablation_grid([Objective.MIN_COST], base)
               if c.label != "no_repair"]
    records = bench(list(_n50_instances()), configs, list(HGA_SEEDS), workers=1)
    elapsed = time.perf_counter() - t0

    bad_runs = sum(1 for r in records if r.status != "ok")
    g = {c.label: mean_gap(records, c.label, Objective.MIN_COST) for c in configs}
    checks = {
        "no_restore > standard": g["no_restore"] > g["standard"],
        "no_inf >= 1.25x standard": g["no_inf"] >= 1.25 * g["standard"],
        "no_div >= 1.25x standard": g["no_div"] >= 1.25 * g["standard"],
        "relax_drone <= relax_truck": g["relax_drone"] <= g["relax_truck"],
    }
    failed = [name for name, ok in checks.items() if not ok]
    _gate("A7 ablation directions",
          not failed and bad_runs == 0 and elapsed <= GRID_BUDGET_S,
          ", ".join(f"{label} {gap:.3f}%" for label, gap in g.items())
          + f"; {len(records)} runs ({bad_runs} bad) in {elapsed / 60:.0f} min"
          + (f"; FAILED: {failed}" if failed else ""))


def test_a8_structural_fuzz():
    rng = random.Random(880)
    inst_small = generate_instance(6, 61)
    inst_big = generate_instance(14, 62)
    cfg = PenaltyConfig()
    bad_perms = 0
    bad_solutions = 0
    ops = 0

    def perm_of(inst):
        gt = list(inst.customers)
        rng.shuffle(gt)
        return gt

    # parent pool for the solution-aware crossover
    pool = []
    for inst in (inst_small, inst_big):
        for _ in range(25):
            gt = perm_of(inst)
            pool.append((inst, gt, split(gt, inst, cfg, Objective.MIN_COST)))

    for _ in range(580_000):
        inst = inst_small if rng.random() < 0.5 else inst_big
        kind = rng.choice(("ox", "pmx", "obx", "pbx"))
        child = crossover_classical(kind, perm_of(inst), perm_of(inst), rng)
        bad_perms += not is_giant_tour(child, inst.n)
        ops += 1
    for _ in range(20_000):
        inst, gt, sol = pool[rng.randrange(len(pool))]
        child = crossover_dx(gt, perm_of(inst), sol, rng)
        bad_perms += not is_giant_tour(child, inst.n)
        ops += 1
    for _ in range(50_000):
        inst = inst_small if rng.random() < 0.7 else inst_big
        sol = split(perm_of(inst), inst, cfg,
                    Objective.MIN_COST if rng.random() < 0.5 else Objective.MIN_TIME)
        bad_solutions += len(validate_solution(sol, inst)) > 0
        ops += 1
    for _ in range(50_000):
        inst = inst_small if rng.random() < 0.5 else inst_big
        gt = restore(random_solution(inst, rng), inst, rng)
        bad_perms += not is_giant_tour(gt, inst.n)
        ops += 1

    applied = 0
    sol = random_solution(inst_big, rng)
    while applied < 300_000:
        if applied % 40 == 0:
            sol = random_solution(inst_big, rng)
        kind = rng.choice(list(MoveKind))
        args = random_move(kind, sol, inst_big, rng)
        if args is None:
            continue
        if evaluate_move(kind, args, sol, inst_big, cfg, Objective.MIN_COST) is None:
            continue
        sol = apply_move(kind, args, sol, inst_big)
        bad_solutions += len(validate_solution(sol, inst_big)) > 0
        applied += 1
        ops += 1

    _gate("A8 structural fuzz", ops >= 1_000_000 and not bad_perms and not bad_solutions,
          f"{ops} operations, {bad_perms} broken chromosomes, "
          f"{bad_solutions} invalid solutions")


def test_a9_cli_record_determinism(tmp_path):
    inst_path = str(tmp_path / "det.txt")
    subprocess.run(["tspd", "generate", "--n", "10", "--seed", "5", "--out", inst_path],
                   check=True, capture_output=True)

    def record(extra):
        argv = ["tspd", "solve", "--instance", inst_path, "--seed", "7",
                "--params", "mu=8,lam=12,nb_elite=3,iter_ni=40"] + extra
        out = subprocess.run(argv, capture_output=True, check=True).stdout
        [rec] = [l for l in out.splitlines() if l.startswith(b"TSPD-SOLUTION")]
        return rec

    flag_sets = ([], ["--objective", "time", "--crossover", "pmx"])
    same = all(record(extra) == record(extra) for extra in flag_sets)
    _gate("A9 CLI record determinism", same,
          f"{len(flag_sets)} flag sets x 2 runs each, byte-identical records")
