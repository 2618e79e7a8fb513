"""Self-check suites driving the solver against its exact references.

Each check prints one pass/fail line.  The quick profile runs in well under
a minute; --full raises the sample counts.
"""

from __future__ import annotations

import random
import time

from .evaluation import PenaltyConfig, RelaxMode, penalized_cost, simulate_timeline
from .genetic import HgaParams, run_hga
from .instances import generate_instance
from .local_search import MoveKind, apply_move, build_granular_neighbors, evaluate_move
from .model import Objective, validate_solution
from .oracle import (
    enumerate_splits,
    exact_solve,
    random_solution,
    simulate_timeline_events,
)
from .split import split


def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def _check_split(rng: random.Random, pairs: int) -> bool:
    bad = 0
    for _ in range(pairs):
        n = rng.randint(1, 6)
        inst = generate_instance(n, rng.randrange(10**6))
        gt = list(inst.customers)
        rng.shuffle(gt)
        cfg = PenaltyConfig(omega=rng.choice([0.1, 1.0, 10.0]),
                            relax=rng.choice(list(RelaxMode)))
        obj = rng.choice([Objective.MIN_COST, Objective.MIN_TIME])
        sol = split(gt, inst, cfg, obj)
        phi = penalized_cost(sol, inst, cfg, obj)
        ref = min(phi_l for _, phi_l in enumerate_splits(gt, inst, cfg, obj))
        if phi != ref:
            bad += 1
    return _report("split equals labeling enumeration", bad == 0,
                   f"{pairs} giant tours, {bad} mismatches")


def _check_moves(rng: random.Random, count: int) -> bool:
    inst = generate_instance(12, 424)
    nb = build_granular_neighbors(inst)
    cfg = PenaltyConfig()
    bad = 0
    done = 0
    while done < count:
        sol = random_solution(inst, rng)
        obj = rng.choice([Objective.MIN_COST, Objective.MIN_TIME])
        kind = rng.choice(list(MoveKind))
        nodes = list(range(inst.n + 2))
        nd = len(sol.deliveries)
        if kind in (MoveKind.SWAP_LAUNCH_DRONE, MoveKind.SWAP_RENDEZVOUS_DRONE,
                    MoveKind.SWAP_LAUNCH_RENDEZVOUS):
            if nd == 0:
                continue
            args = (rng.randrange(nd),)
        elif kind in (MoveKind.INSERT_DELIVERY, MoveKind.RELOCATE_DELIVERY):
            if kind is MoveKind.RELOCATE_DELIVERY and nd == 0:
                continue
            first = rng.randrange(nd) if kind is MoveKind.RELOCATE_DELIVERY \
                else rng.choice(nodes)
            args = (first, rng.choice(nodes), rng.choice(nodes))
        elif kind in (MoveKind.REMOVE_DELIVERY, MoveKind.DRONE_TRUCK_SWAP,
                      MoveKind.SWAP_DRONE_NODES):
            if nd == 0:
                continue
            second = rng.randrange(nd) if kind is MoveKind.SWAP_DRONE_NODES \
                else rng.choice(nodes)
            args = (rng.randrange(nd), second)
        else:
            args = (rng.choice(nodes), rng.choice(nodes))
        delta = evaluate_move(kind, args, sol, inst, cfg, obj)
        done += 1
        if delta is None:
            continue
        after = apply_move(kind, args, sol, inst)
        full = penalized_cost(after, inst, cfg, obj) - penalized_cost(sol, inst, cfg, obj)
        if abs(delta - full) > 1e-9:
            bad += 1
    return _report("incremental move deltas", bad == 0,
                   f"{count} random moves, {bad} beyond 1e-9")


def _check_timelines(rng: random.Random, count: int) -> bool:
    bad = 0
    for _ in range(count):
        inst = generate_instance(rng.randint(3, 10), rng.randrange(10**6))
        sol = random_solution(inst, rng)
        a = simulate_timeline(sol, inst)
        b = simulate_timeline_events(sol, inst)
        if a != b:
            bad += 1
    return _report("timeline simulators agree", bad == 0,
                   f"{count} random solutions, {bad} disagreements")


def _check_hga(rng: random.Random, instances: int) -> bool:
    bad = 0
    for i in range(instances):
        n = 4 + i % 4
        inst = generate_instance(n, 1000 + i)
        obj = Objective.MIN_COST if i % 2 == 0 else Objective.MIN_TIME
        _, opt = exact_solve(inst, obj)
        res = run_hga(inst, HgaParams(iter_ni=200), obj, seed=7)
        if not res.feasible or res.value > opt + 1e-6:
            bad += 1
    return _report("search matches exact optimum at desk scale", bad == 0,
                   f"{instances} instances, {bad} misses")


def _check_structure(rng: random.Random, count: int) -> bool:
    bad = 0
    for _ in range(count):
        inst = generate_instance(rng.randint(1, 9), rng.randrange(10**6))
        sol = random_solution(inst, rng)
        bad += len(validate_solution(sol, inst)) > 0
    return _report("random solutions validate", bad == 0,
                   f"{count} solutions, {bad} invalid")


def run_verification(quick: bool = True) -> bool:
    t0 = time.perf_counter()
    rng = random.Random(20240901)
    scale = 1 if quick else 5
    ok = True
    ok &= _check_split(rng, 40 * scale)
    ok &= _check_moves(rng, 400 * scale)
    ok &= _check_timelines(rng, 200 * scale)
    ok &= _check_structure(rng, 200 * scale)
    ok &= _check_hga(rng, 4 * scale)
    print(f"{'all checks passed' if ok else 'CHECKS FAILED'} "
          f"({time.perf_counter() - t0:.1f}s)")
    return ok
