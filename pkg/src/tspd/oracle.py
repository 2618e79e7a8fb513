"""Reference implementations used to verify the solver.

Includes:
  - simulate_timeline_events: a discrete-event re-implementation of the
    timeline, written independently of the walk in `evaluation` and required
    to agree with it exactly.
  - iter_labelings / enumerate_splits: exhaustive enumeration of every
    order-preserving drone labeling of a giant tour (the oracle for `split`).
  - exact_solve: exhaustive optimum over all permutations and labelings for
    tiny instances, plus a pure-Python reference scorer used to cross-check
    the fast enumeration kernel.
  - random_solution: structurally valid random solutions for fuzz tests.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from typing import Iterator

import numpy as np

from ._jit import njit
from .evaluation import (
    PenaltyConfig,
    Timeline,
    WaitFeeConvention,
    is_feasible,
    operational_cost,
    penalized_cost,
    simulate_timeline,
)
from .model import DroneDelivery, Instance, Objective, TspDSolution

__all__ = [
    "simulate_timeline_events",
    "iter_labelings",
    "enumerate_splits",
    "exact_solve",
    "exact_solve_reference",
    "random_solution",
    "EXACT_MAX_N",
    "ENUMERATE_MAX_N",
]

EXACT_MAX_N = 8
ENUMERATE_MAX_N = 7


# ---------------------------------------------------------------------------
# discrete-event timeline simulator


def simulate_timeline_events(sol: TspDSolution, inst: Instance) -> Timeline:
    """Event-queue re-implementation of simulate_timeline.

    Both vehicles post arrival events into one time-ordered heap; a rendezvous
    completes when the second vehicle shows up.  Leg arithmetic mirrors the
    walk (one addition per leg) so results agree bit for bit.
    """
    td = sol.truck_tour
    tau = inst.truck_time
    dtau = inst.drone_time
    s_l, s_r, eps = inst.launch_time, inst.retrieve_time, inst.endurance

    pos = {v: p for p, v in enumerate(td)}
    launch_at = {d.launch: i for i, d in enumerate(sol.deliveries)}
    rendezvous_at = {d.rendezvous: i for i, d in enumerate(sol.deliveries)}

    nd = len(sol.deliveries)
    wt_t = [0.0] * nd
    wt_d = [0.0] * nd
    tex = [0.0] * nd
    dex = [0.0] * nd
    truck_eff: dict[int, float] = {}
    drone_eff: dict[int, float] = {}

    truck_here: dict[int, float] = {}
    drone_here: dict[int, float] = {}

    heap: list[tuple[float, int, str, int]] = []
    seq = 0

    def push(t: float, kind: str, data: int):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, data))
        seq += 1

    state = {"span": 0.0, "flying": -1}

    def schedule_truck_leg(node: int, depart: float):
        p = pos[node]
        if p + 1 < len(td):
            push(depart + tau[node][td[p + 1]], "truck_arrive", p + 1)

    def leave_node(node: int, t: float):
        if node in launch_at:
            idx = launch_at[node]
            d = sol.deliveries[idx]
            depart = t + s_l
            state["span"] = 0.0
            state["flying"] = idx
            push(depart + dtau[d.launch][d.drone_node], "drone_at_j", idx)
            schedule_truck_leg(node, depart)
        else:
            schedule_truck_leg(node, t)

    def complete_rendezvous(node: int, idx: int):
        t_truck = truck_here.pop(node)
        t_drone = drone_here.pop(node)
        wt_t[idx] = max(0.0, t_drone - t_truck)
        wt_d[idx] = max(0.0, t_truck - t_drone)
        joint = max(t_truck, t_drone) + s_r
        d = sol.deliveries[idx]
        seg_time = state["span"]
        recover = s_r + s_l if node in launch_at else s_r
        if d.launch != inst.depot:
            tex[idx] = max(0.0, seg_time + recover - eps)
        dex[idx] = max(0.0, dtau[d.launch][d.drone_node] + dtau[d.drone_node][d.rendezvous] + s_r - eps)
        truck_eff[node] = joint
        drone_eff[node] = joint
        state["flying"] = -1
        leave_node(node, joint)

    truck_eff[td[0]] = 0.0
    drone_eff[td[0]] = 0.0
    leave_node(td[0], 0.0)

    while heap:
        t, _, kind, data = heapq.heappop(heap)
        if kind == "truck_arrive":
            p = data
            node = td[p]
            state["span"] += tau[td[p - 1]][node]
            if node in rendezvous_at:
                truck_here[node] = t
                if node in drone_here:
                    complete_rendezvous(node, rendezvous_at[node])
            else:
                truck_eff[node] = t
                if state["flying"] < 0:
                    drone_eff[node] = t
                leave_node(node, t)
        elif kind == "drone_at_j":
            d = sol.deliveries[data]
            drone_eff[d.drone_node] = t
            push(t + dtau[d.drone_node][d.rendezvous], "drone_arrive", data)
        else:  # drone_arrive at rendezvous
            d = sol.deliveries[data]
            node = d.rendezvous
            drone_here[node] = t
            if node in truck_here:
                complete_rendezvous(node, data)

    return Timeline(truck_eff, drone_eff, wt_t, wt_d, tex, dex)


# ---------------------------------------------------------------------------
# exhaustive labeling enumeration


def iter_labelings(gt: list[int], inst: Instance) -> Iterator[TspDSolution]:
    """Yield every structurally valid drone labeling of a giant tour.

    Positions not picked as drone customers stay on the truck tour in giant
    tour order; a drone segment launched at chain position a, serving the
    customer at position m and rejoining at position b removes position m
    from the truck tour.  No endurance filtering happens here.
    """
    n = inst.n
    nodes = [inst.depot] + list(gt) + [inst.depot_end]
    eligible = inst.drone_eligible
    segs: list[tuple[int, int, int]] = []

    def build() -> TspDSolution:
        interior = {m for _, m, _ in segs}
        td = [nodes[p] for p in range(n + 2) if p not in interior]
        dels = [DroneDelivery(nodes[a], nodes[m], nodes[b]) for a, m, b in segs]
        return TspDSolution(td, dels)

    def rec(b: int) -> Iterator[TspDSolution]:
        if b == n + 1:
            sol = build()
            if len(sol.truck_tour) > 2:  # the truck must serve someone
                yield sol
            return
        yield from rec(b + 1)
        for r in range(b + 2, n + 2):
            for m in range(b + 1, r):
                if nodes[m] in eligible:
                    segs.append((b, m, r))
                    yield from rec(r)
                    segs.pop()

    return rec(0)


def enumerate_splits(
    gt: list[int],
    inst: Instance,
    cfg: PenaltyConfig,
    obj: Objective,
) -> list[tuple[TspDSolution, float]]:
    """All admissible labelings of gt with their penalized cost.

    This is the ground truth the split decoder is tested against; it scores
    through the shared evaluation functions and only drops labelings that the
    relax mode hard-rejects.
    """
    if inst.n > ENUMERATE_MAX_N:
        raise ValueError(f"enumerate_splits supports n <= {ENUMERATE_MAX_N}, got n={inst.n}")
    out = []
    for sol in iter_labelings(gt, inst):
        phi = penalized_cost(sol, inst, cfg, obj)
        if math.isfinite(phi):
            out.append((sol, phi))
    return out


# ---------------------------------------------------------------------------
# exact optimum by exhaustive enumeration


@njit
def _segment_stats(nodes, tau, d, a, m, b):
    # truck path a -> b skipping interior position m; returns (time, dist)
    t = 0.0
    dist = 0.0
    prev = nodes[a]
    for p in range(a + 1, b + 1):
        if p == m:
            continue
        nxt = nodes[p]
        t += tau[prev][nxt]
        dist += d[prev][nxt]
        prev = nxt
    return t, dist


@njit
def _scan_labelings(
    nodes, n, tau, dtau, d, dd, elig,
    eps, s_l, s_r, c1, c2, alpha, beta,
    obj_cost, conv_written,
    best_val, best_td, best_meta, best_da, best_dm, best_db,
):
    # Depth-first enumeration of feasible labelings of one customer order.
    # Stack frames: position b, next option pointer (r, m), accumulator,
    # trailing drone segment info for the relaunch feasibility re-check.
    cap = n + 3
    b_st = np.empty(cap, np.int64)
    r_st = np.empty(cap, np.int64)
    m_st = np.empty(cap, np.int64)
    val_st = np.empty(cap, np.float64)
    pseg_st = np.empty(cap, np.float64)
    pdep_st = np.empty(cap, np.int64)
    nd_st = np.empty(cap, np.int64)
    da = np.empty(n + 1, np.int64)
    dm = np.empty(n + 1, np.int64)
    db = np.empty(n + 1, np.int64)
    skip = np.zeros(n + 2, np.uint8)
    cand_td = np.empty(n + 2, np.int64)

    sp = 0
    b_st[0] = 0
    r_st[0] = 0
    m_st[0] = 0
    val_st[0] = 0.0
    pseg_st[0] = -1.0
    pdep_st[0] = 0
    nd_st[0] = 0

    while sp >= 0:
        b = b_st[sp]
        if b == n + 1:
            val = val_st[sp]
            nd = nd_st[sp]
            better = False
            if val < best_val[0]:
                better = True
            elif val == best_val[0]:
                for q in range(nd):
                    skip[dm[q]] = 1
                ln = 0
                for p in range(n + 2):
                    if skip[p] == 0:
                        cand_td[ln] = nodes[p]
                        ln += 1
                for q in range(nd):
                    skip[dm[q]] = 0
                old_len = best_meta[0]
                cmp = 0
                for p in range(min(ln, old_len)):
                    if cand_td[p] < best_td[p]:
                        cmp = -1
                        break
                    if cand_td[p] > best_td[p]:
                        cmp = 1
                        break
                if cmp == 0 and ln < old_len:
                    cmp = -1
                better = cmp < 0
            if better:
                best_val[0] = val
                for q in range(nd):
                    skip[dm[q]] = 1
                ln = 0
                for p in range(n + 2):
                    if skip[p] == 0:
                        best_td[ln] = nodes[p]
                        ln += 1
                for q in range(nd):
                    skip[dm[q]] = 0
                best_meta[0] = ln
                best_meta[1] = nd
                for q in range(nd):
                    best_da[q] = nodes[da[q]]
                    best_dm[q] = nodes[dm[q]]
                    best_db[q] = nodes[db[q]]
            sp -= 1
            continue

        r = r_st[sp]
        if r == 0:
            # arc option; then move the pointer to the first drone option
            r_st[sp] = b + 2
            m_st[sp] = b + 1
            val = val_st[sp]
            if obj_cost:
                child_val = val + c1 * d[nodes[b]][nodes[b + 1]]
            else:
                child_val = val + tau[nodes[b]][nodes[b + 1]]
            sp += 1
            b_st[sp] = b + 1
            r_st[sp] = 0
            val_st[sp] = child_val
            pseg_st[sp] = -1.0
            pdep_st[sp] = 0
            nd_st[sp] = nd_st[sp - 1]
            continue
        if r > n + 1:
            sp -= 1
            continue

        m = m_st[sp]
        # advance the option pointer before evaluating (b, m, r)
        nm = m + 1
        nr = r
        if nm >= r:
            nr = r + 1
            nm = b + 1
        r_st[sp] = nr
        m_st[sp] = nm

        if elig[nodes[m]] == 0:
            continue
        if b == 0 and r == n + 1 and r - b == 2:
            continue  # would leave the truck tour without customers
        flight = dtau[nodes[b]][nodes[m]] + dtau[nodes[m]][nodes[r]]
        if flight + s_r > eps:
            continue
        # choosing a drone launch here upgrades the trailing segment's
        # recover time to s_R + s_L
        if pseg_st[sp] >= 0.0 and pdep_st[sp] == 0:
            if pseg_st[sp] + s_r + s_l > eps:
                continue
        seg_time, seg_dist = _segment_stats(nodes, tau, d, b, m, r)
        if b != 0 and seg_time + s_r > eps:
            continue

        val = val_st[sp]
        if obj_cost:
            wait_truck = flight - seg_time
            if wait_truck < 0.0:
                wait_truck = 0.0
            wait_drone = seg_time - flight
            if wait_drone < 0.0:
                wait_drone = 0.0
            if conv_written:
                fee = alpha * wait_drone + beta * wait_truck
            else:
                fee = alpha * wait_truck + beta * wait_drone
            child_val = val + c1 * seg_dist + c2 * (dd[nodes[b]][nodes[m]] + dd[nodes[m]][nodes[r]]) + fee
        else:
            longer = seg_time if seg_time > flight else flight
            child_val = val + s_l + longer + s_r

        nd = nd_st[sp]
        da[nd] = b
        dm[nd] = m
        db[nd] = r
        sp += 1
        b_st[sp] = r
        r_st[sp] = 0
        val_st[sp] = child_val
        pseg_st[sp] = seg_time
        pdep_st[sp] = 1 if b == 0 else 0
        nd_st[sp] = nd + 1


@njit
def _exact_kernel(
    n, tau, dtau, d, dd, elig,
    eps, s_l, s_r, c1, c2, alpha, beta,
    obj_cost, conv_written,
):
    nodes = np.empty(n + 2, np.int64)
    nodes[0] = 0
    nodes[n + 1] = n + 1
    perm = np.empty(n, np.int64)
    for i in range(n):
        perm[i] = i + 1

    best_val = np.full(1, np.inf)
    best_td = np.empty(n + 2, np.int64)
    best_meta = np.zeros(2, np.int64)
    best_da = np.empty(n + 1, np.int64)
    best_dm = np.empty(n + 1, np.int64)
    best_db = np.empty(n + 1, np.int64)

    c = np.zeros(n, np.int64)
    for i in range(n):
        nodes[i + 1] = perm[i]
    _scan_labelings(nodes, n, tau, dtau, d, dd, elig, eps, s_l, s_r, c1, c2,
                    alpha, beta, obj_cost, conv_written,
                    best_val, best_td, best_meta, best_da, best_dm, best_db)
    i = 0
    while i < n:
        if c[i] < i:
            if i % 2 == 0:
                tmp = perm[0]
                perm[0] = perm[i]
                perm[i] = tmp
            else:
                tmp = perm[c[i]]
                perm[c[i]] = perm[i]
                perm[i] = tmp
            for q in range(n):
                nodes[q + 1] = perm[q]
            _scan_labelings(nodes, n, tau, dtau, d, dd, elig, eps, s_l, s_r, c1, c2,
                            alpha, beta, obj_cost, conv_written,
                            best_val, best_td, best_meta, best_da, best_dm, best_db)
            c[i] += 1
            i = 0
        else:
            c[i] = 0
            i += 1
    return best_val, best_td, best_meta, best_da, best_dm, best_db


def exact_solve(
    inst: Instance,
    obj: Objective,
    convention: WaitFeeConvention = WaitFeeConvention.AS_WRITTEN,
) -> tuple[TspDSolution, float]:
    """Exhaustive optimum over every customer order and feasible labeling.

    Guarded to n <= 8; ties resolved toward the lexicographically smallest
    truck tour.  The returned value is re-scored through `evaluation` on the
    winning solution.
    """
    if inst.n > EXACT_MAX_N:
        raise ValueError(f"exact_solve supports n <= {EXACT_MAX_N}, got n={inst.n}")
    elig = np.zeros(inst.n + 2, dtype=np.uint8)
    for cst in inst.drone_eligible:
        elig[cst] = 1
    best_val, best_td, best_meta, best_da, best_dm, best_db = _exact_kernel(
        inst.n, inst.truck_time, inst.drone_time, inst.truck_dist, inst.drone_dist,
        elig, inst.endurance, inst.launch_time, inst.retrieve_time,
        inst.truck_cost_rate, inst.drone_cost_rate,
        inst.truck_wait_fee, inst.drone_wait_fee,
        obj is Objective.MIN_COST,
        convention is WaitFeeConvention.AS_WRITTEN,
    )
    td = [int(x) for x in best_td[: best_meta[0]]]
    dels = [
        DroneDelivery(int(best_da[q]), int(best_dm[q]), int(best_db[q]))
        for q in range(best_meta[1])
    ]
    sol = TspDSolution(td, dels)
    tl = simulate_timeline(sol, inst)
    if obj is Objective.MIN_COST:
        value = operational_cost(sol, inst, convention, tl)
    else:
        value = tl.completion(inst)
    return sol, value


def exact_solve_reference(
    inst: Instance,
    obj: Objective,
    convention: WaitFeeConvention = WaitFeeConvention.AS_WRITTEN,
) -> tuple[TspDSolution, float]:
    """Slow exact optimum scored through the evaluation module only.

    Used to validate the enumeration kernel on small instances; same
    tie-break (lexicographically smallest truck tour).
    """
    if inst.n > 6:
        raise ValueError("reference enumeration is limited to n <= 6")
    best: tuple[float, list[int]] | None = None
    best_sol: TspDSolution | None = None
    for perm in itertools.permutations(range(1, inst.n + 1)):
        for sol in iter_labelings(list(perm), inst):
            tl = simulate_timeline(sol, inst)
            if not is_feasible(sol, inst, tl):
                continue
            if obj is Objective.MIN_COST:
                val = operational_cost(sol, inst, convention, tl)
            else:
                val = tl.completion(inst)
            key = (val, sol.truck_tour)
            if best is None or val < best[0] or (val == best[0] and sol.truck_tour < best[1]):
                best = key
                best_sol = sol
    assert best is not None and best_sol is not None  # all-truck is always feasible
    return best_sol, best[0]


# ---------------------------------------------------------------------------
# random structural solutions


def random_solution(inst: Instance, rng: random.Random, p_drone: float = 0.5) -> TspDSolution:
    """Uniform-ish random structurally valid solution (no endurance filter)."""
    n = inst.n
    gt = list(range(1, n + 1))
    rng.shuffle(gt)
    nodes = [inst.depot] + gt + [inst.depot_end]
    td = [inst.depot]
    dels: list[DroneDelivery] = []
    b = 0
    while b < n + 1:
        placed = False
        if rng.random() < p_drone:
            r = rng.randint(b + 2, n + 1) if b + 2 <= n + 1 else -1
            if r > 0 and b == 0 and r == n + 1 and r - b == 2:
                r = -1  # would leave the truck tour without customers
            if r > 0:
                interiors = [m for m in range(b + 1, r) if nodes[m] in inst.drone_eligible]
                if interiors:
                    m = rng.choice(interiors)
                    for p in range(b + 1, r + 1):
                        if p != m:
                            td.append(nodes[p])
                    dels.append(DroneDelivery(nodes[b], nodes[m], nodes[r]))
                    b = r
                    placed = True
        if not placed:
            td.append(nodes[b + 1])
            b += 1
    return TspDSolution(td, dels)
