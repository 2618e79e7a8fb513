"""Decode a giant-tour chromosome into the best order-preserving TSP-D solution.

Dynamic program over the extended tour positions 0..n+1 (position 0 the
depot, n+1 its duplicate).  A state is (position b, g) where g records
whether the segment departing b is a drone launch: a sortie ending at a node
that immediately launches the next one needs s_R + s_L of recover time
inside its own endurance window, so the choice at b retroactively prices the
segment arriving there.  Arcs are the truck leg b -> b+1 (from g=0) and
every sortie (a, m, b) with drone-eligible interior m (from g=1); emitting
arcs from each settled position and walking each launch prefix incrementally
keeps the whole thing O(n^3).

Pricing replicates the timeline walk operation for operation - clocks
accumulate leg by leg, waits come from clock differences, penalties add in
delivery order - so a decoded labeling's value is the exact float the
evaluator reports and ties between symmetric labelings cannot be decided
against it by rounding.  Hard-rejected labelings under the relax mode are
skipped; the all-truck chain survives every mode, so a solution always
exists.  Value ties prefer fewer sorties, then the lower launch position.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .evaluation import PenaltyConfig, WaitFeeConvention
from .model import DroneDelivery, Instance, Objective, TspDSolution, is_giant_tour

__all__ = ["split"]


@njit
def _split_kernel(
    nodes, n, tau, dtau, d, dd, elig,
    eps, s_l, s_r, c1, c2, alpha, beta, ts, ds,
    omega, relax_t, relax_d, obj_cost, conv_written,
):
    size = n + 2
    end = size - 1
    inf = np.inf
    # Per-state accumulators mirror the timeline walk: effective clock,
    # truck distance, cost terms in delivery order, penalty terms in
    # delivery order.  Span times restart at each launch, as in the walk,
    # so they never depend on how the state was reached.
    val = np.full((size, 2), inf)
    st_t = np.zeros((size, 2), np.float64)
    st_tl = np.zeros((size, 2), np.float64)
    st_acc = np.zeros((size, 2), np.float64)
    st_pen = np.zeros((size, 2), np.float64)
    cnt = np.zeros((size, 2), np.int64)
    par_a = np.full((size, 2), -1, np.int64)
    par_m = np.full((size, 2), -1, np.int64)
    val[0, 0] = 0.0
    val[0, 1] = 0.0

    for a in range(end):
        va = nodes[a]

        if val[a, 0] < inf:
            # plain truck leg a -> a+1, same candidate for either g at a+1
            vb = nodes[a + 1]
            t_new = st_t[a, 0] + tau[va][vb]
            tl_new = st_tl[a, 0] + d[va][vb]
            acc_new = st_acc[a, 0]
            pen_new = st_pen[a, 0]
            if obj_cost:
                cand = c1 * tl_new + acc_new + omega * pen_new
            else:
                cand = t_new + omega * pen_new
            c_new = cnt[a, 0]
            for g in range(2):
                better = cand < val[a + 1, g]
                if not better and cand == val[a + 1, g]:
                    better = c_new < cnt[a + 1, g] or (c_new == cnt[a + 1, g] and a < par_a[a + 1, g])
                if better:
                    val[a + 1, g] = cand
                    st_t[a + 1, g] = t_new
                    st_tl[a + 1, g] = tl_new
                    st_acc[a + 1, g] = acc_new
                    st_pen[a + 1, g] = pen_new
                    cnt[a + 1, g] = c_new
                    par_a[a + 1, g] = a
                    par_m[a + 1, g] = -1

        if val[a, 1] == inf:
            continue
        base_acc = st_acc[a, 1]
        base_pen = st_pen[a, 1]
        base_cnt = cnt[a, 1]
        depart = st_t[a, 1] + s_l
        # walk along the unspliced chain up to the node before m
        pre_t = depart
        pre_sp = 0.0
        pre_tl = st_tl[a, 1]
        for m in range(a + 1, end):
            vm = nodes[m]
            vprev = nodes[m - 1]
            if elig[vm] != 0:
                vnext = nodes[m + 1]
                bridge = tau[vprev][vnext]
                cur_t = pre_t + bridge
                cur_sp = pre_sp + bridge
                cur_tl = pre_tl + d[vprev][vnext]
                dr1 = dtau[va][vm]
                for b in range(m + 1, size):
                    vb = nodes[b]
                    if b > m + 1:
                        vpb = nodes[b - 1]
                        legb = tau[vpb][vb]
                        cur_t = cur_t + legb
                        cur_sp = cur_sp + legb
                        cur_tl = cur_tl + d[vpb][vb]
                    if a == 0 and b == n + 1 and b - a == 2:
                        continue  # truck tour would be empty
                    dr2 = dtau[vm][vb]
                    dexv = dr1 + dr2 + s_r - eps
                    if dexv <= 0.0:
                        dexv = 0.0
                    elif not relax_d:
                        continue
                    drone_arr = depart + dr1 + dr2
                    truck_arr = cur_t
                    seg_time = cur_sp
                    c_new = base_cnt + 1
                    for g in range(2):
                        recover = s_r + s_l if g == 1 else s_r
                        texv = 0.0
                        if a != 0:
                            texv = seg_time + recover - eps
                            if texv <= 0.0:
                                texv = 0.0
                            elif not relax_t:
                                continue
                        t_new = (truck_arr if truck_arr > drone_arr else drone_arr) + s_r
                        if obj_cost:
                            wait_d = truck_arr - drone_arr
                            if wait_d < 0.0:
                                wait_d = 0.0
                            wait_t = drone_arr - truck_arr
                            if wait_t < 0.0:
                                wait_t = 0.0
                            if conv_written:
                                fee = alpha * wait_d + beta * wait_t
                            else:
                                fee = alpha * wait_t + beta * wait_d
                            acc_new = base_acc + c2 * (dd[va][vm] + dd[vm][vb])
                            acc_new = acc_new + fee
                            pen_new = base_pen + texv * ts * c1
                            pen_new = pen_new + dexv * ds * c2
                            cand = c1 * cur_tl + acc_new + omega * pen_new
                        else:
                            acc_new = base_acc
                            pen_new = base_pen + (texv if texv > dexv else dexv)
                            cand = t_new + omega * pen_new
                        better = cand < val[b, g]
                        if not better and cand == val[b, g]:
                            better = c_new < cnt[b, g] or (c_new == cnt[b, g] and a < par_a[b, g])
                        if better:
                            val[b, g] = cand
                            st_t[b, g] = t_new
                            st_tl[b, g] = cur_tl
                            st_acc[b, g] = acc_new
                            st_pen[b, g] = pen_new
                            cnt[b, g] = c_new
                            par_a[b, g] = a
                            par_m[b, g] = m
            legm = tau[vprev][vm]
            pre_t = pre_t + legm
            pre_sp = pre_sp + legm
            pre_tl = pre_tl + d[vprev][vm]
    return val[end, 0], par_a, par_m


def split(gt: list[int], inst: Instance, cfg: PenaltyConfig, obj: Objective) -> TspDSolution:
    """Minimum-penalized-cost order-preserving decoding of a giant tour."""
    n = inst.n
    if not is_giant_tour(gt, n):
        raise ValueError("gt must be a permutation of the customers 1..n")
    nodes = np.empty(n + 2, dtype=np.int64)
    nodes[0] = inst.depot
    nodes[1 : n + 1] = gt
    nodes[n + 1] = inst.depot_end
    _, par_a, par_m = _split_kernel(
        nodes, n, inst.truck_time, inst.drone_time, inst.truck_dist, inst.drone_dist,
        inst.eligible_mask.view(np.uint8),
        inst.endurance, inst.launch_time, inst.retrieve_time,
        inst.truck_cost_rate, inst.drone_cost_rate,
        inst.truck_wait_fee, inst.drone_wait_fee,
        inst.truck_speed, inst.drone_speed,
        cfg.omega, cfg.relax.truck_relaxed, cfg.relax.drone_relaxed,
        obj is Objective.MIN_COST,
        cfg.wait_convention is WaitFeeConvention.AS_WRITTEN,
    )
    deliveries: list[DroneDelivery] = []
    interior: set[int] = set()
    b, g = n + 1, 0
    while b > 0:
        a = int(par_a[b, g])
        m = int(par_m[b, g])
        if m < 0:
            b, g = a, 0
        else:
            deliveries.append(DroneDelivery(int(nodes[a]), int(nodes[m]), int(nodes[b])))
            interior.add(m)
            b, g = a, 1
    deliveries.reverse()
    td = [int(nodes[p]) for p in range(n + 2) if p not in interior]
    return TspDSolution(td, deliveries)
