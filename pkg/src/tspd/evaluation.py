"""Timelines, costs, endurance excesses and the penalized fitness.

All functions are pure in (solution, instance, config) and shared by the
heuristic, the split decoder and the exact oracle, so every component prices
a solution identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .model import Instance, Objective, TspDSolution

__all__ = [
    "RelaxMode",
    "WaitFeeConvention",
    "PenaltyConfig",
    "Timeline",
    "simulate_timeline",
    "operational_cost",
    "completion_time",
    "penalized_cost",
    "is_feasible",
    "is_admissible",
]


class RelaxMode(Enum):
    """Which endurance violations the search may keep (and pay a penalty for).

    A violation of a non-relaxed side makes a solution inadmissible: it must
    be discarded by the caller, never penalized.
    """

    ALL = "all"
    TRUCK = "truck"
    DRONE = "drone"
    NONE = "none"

    @property
    def truck_relaxed(self) -> bool:
        return self in (RelaxMode.ALL, RelaxMode.TRUCK)

    @property
    def drone_relaxed(self) -> bool:
        return self in (RelaxMode.ALL, RelaxMode.DRONE)


class WaitFeeConvention(Enum):
    """How the two wait fees are applied to the two possible waits.

    The source cost formula bills fee alpha on max(0, truck_leg - drone_leg),
    which is the time the drone spends waiting; `AS_WRITTEN` reproduces that
    formula exactly.  `AS_NAMED` bills alpha on the truck's own waiting time
    and beta on the drone's, matching the fee names instead of the formula.
    The two coincide whenever alpha == beta.
    """

    AS_WRITTEN = "as_written"
    AS_NAMED = "as_named"


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty coefficient and relaxation policy for infeasible solutions."""

    omega: float = 1.0
    relax: RelaxMode = RelaxMode.ALL
    wait_convention: WaitFeeConvention = WaitFeeConvention.AS_WRITTEN

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be > 0")

    def with_omega(self, omega: float) -> "PenaltyConfig":
        return PenaltyConfig(omega, self.relax, self.wait_convention)


@dataclass
class Timeline:
    """Effective arrival times plus per-delivery waits and endurance excesses.

    `truck` maps every truck-tour node to its effective arrival time; at a
    rendezvous that is the joint time max(truck, drone arrival) + s_R.  The
    launch preparation s_L delays departures and is not folded into the
    recorded arrival at the launch node itself.  `drone` covers the nodes the
    drone actually visits (riding nodes, its own customers, rendezvous).
    Per-delivery lists are aligned with the order of sol.deliveries.
    """

    truck: dict[int, float]
    drone: dict[int, float]
    truck_wait: list[float]
    drone_wait: list[float]
    truck_excess: list[float]
    drone_excess: list[float]

    def completion(self, inst: Instance) -> float:
        end = inst.depot_end
        return max(self.truck[end], self.drone[end])


def simulate_timeline(sol: TspDSolution, inst: Instance) -> Timeline:
    """Walk the truck tour and compute both vehicles' effective times.

    At a launch node both vehicles depart arrival + s_L later; the drone then
    flies launch -> customer -> rendezvous on its own clock while the truck
    follows the tour.  Whoever reaches the rendezvous first waits; both leave
    at max(arrivals) + s_R.
    """
    td = sol.truck_tour
    tau = inst.truck_time
    dtau = inst.drone_time
    s_l = inst.launch_time
    s_r = inst.retrieve_time
    eps = inst.endurance

    pos = {node: p for p, node in enumerate(td)}
    launch_at: dict[int, int] = {}
    rendezvous_at: dict[int, int] = {}
    for idx, d in enumerate(sol.deliveries):
        launch_at[d.launch] = idx
        rendezvous_at[d.rendezvous] = idx

    n_del = len(sol.deliveries)
    wt_t = [0.0] * n_del
    wt_d = [0.0] * n_del
    tex = [0.0] * n_del
    dex = [0.0] * n_del
    truck: dict[int, float] = {td[0]: 0.0}
    drone: dict[int, float] = {td[0]: 0.0}

    t = 0.0     # effective clock at the current node
    span = 0.0  # truck travel time since the last launch, one leg at a time
    active = -1  # delivery currently in flight
    drone_arrival = 0.0

    node = td[0]
    if node in launch_at:
        active = launch_at[node]
        d = sol.deliveries[active]
        depart = t + s_l
        drone[d.drone_node] = depart + dtau[d.launch][d.drone_node]
        drone_arrival = depart + dtau[d.launch][d.drone_node] + dtau[d.drone_node][d.rendezvous]
        span = 0.0
        t = depart

    for p in range(1, len(td)):
        prev, node = td[p - 1], td[p]
        step = tau[prev][node]
        t += step
        span += step
        if node in rendezvous_at:
            idx = rendezvous_at[node]
            truck_arrival = t
            wt_t[idx] = max(0.0, drone_arrival - truck_arrival)
            wt_d[idx] = max(0.0, truck_arrival - drone_arrival)
            t = max(truck_arrival, drone_arrival) + s_r
            d = sol.deliveries[idx]
            seg_time = span
            recover = s_r + s_l if node in launch_at else s_r
            if d.launch != inst.depot:
                tex[idx] = max(0.0, seg_time + recover - eps)
            dex[idx] = max(0.0, dtau[d.launch][d.drone_node] + dtau[d.drone_node][d.rendezvous] + s_r - eps)
            drone[node] = t
            active = -1
        truck[node] = t
        if active < 0 and node not in rendezvous_at:
            drone[node] = t
        if node in launch_at:
            idx = launch_at[node]
            d = sol.deliveries[idx]
            depart = t + s_l
            drone[d.drone_node] = depart + dtau[d.launch][d.drone_node]
            drone_arrival = depart + dtau[d.launch][d.drone_node] + dtau[d.drone_node][d.rendezvous]
            span = 0.0
            active = idx
            t = depart

    return Timeline(truck, drone, wt_t, wt_d, tex, dex)


def operational_cost(
    sol: TspDSolution,
    inst: Instance,
    convention: WaitFeeConvention = WaitFeeConvention.AS_WRITTEN,
    timeline: Timeline | None = None,
) -> float:
    """Distance costs of both vehicles plus the waiting fees."""
    if timeline is None:
        timeline = simulate_timeline(sol, inst)
    d = inst.truck_dist
    dd = inst.drone_dist
    td = sol.truck_tour

    truck_len = 0.0
    for p in range(1, len(td)):
        truck_len += d[td[p - 1]][td[p]]
    total = inst.truck_cost_rate * truck_len

    alpha = inst.truck_wait_fee
    beta = inst.drone_wait_fee
    for idx, dl in enumerate(sol.deliveries):
        total += inst.drone_cost_rate * (dd[dl.launch][dl.drone_node] + dd[dl.drone_node][dl.rendezvous])
        if convention is WaitFeeConvention.AS_WRITTEN:
            total += alpha * timeline.drone_wait[idx] + beta * timeline.truck_wait[idx]
        else:
            total += alpha * timeline.truck_wait[idx] + beta * timeline.drone_wait[idx]
    return total


def completion_time(sol: TspDSolution, inst: Instance, timeline: Timeline | None = None) -> float:
    """Moment both vehicles are back at the depot, retrieval included."""
    if timeline is None:
        timeline = simulate_timeline(sol, inst)
    return timeline.completion(inst)


def is_feasible(sol: TspDSolution, inst: Instance, timeline: Timeline | None = None) -> bool:
    """True iff no delivery overruns the endurance on either side."""
    if timeline is None:
        timeline = simulate_timeline(sol, inst)
    return all(x == 0.0 for x in timeline.truck_excess) and all(x == 0.0 for x in timeline.drone_excess)


def is_admissible(
    sol: TspDSolution,
    inst: Instance,
    cfg: PenaltyConfig,
    timeline: Timeline | None = None,
) -> bool:
    """True iff every endurance violation present is on a relaxed side."""
    if timeline is None:
        timeline = simulate_timeline(sol, inst)
    if not cfg.relax.truck_relaxed and any(x > 0.0 for x in timeline.truck_excess):
        return False
    if not cfg.relax.drone_relaxed and any(x > 0.0 for x in timeline.drone_excess):
        return False
    return True


def penalized_cost(
    sol: TspDSolution,
    inst: Instance,
    cfg: PenaltyConfig,
    obj: Objective,
    timeline: Timeline | None = None,
) -> float:
    """Raw objective plus omega-weighted endurance excesses.

    Returns math.inf for an inadmissible solution (a violation on a side the
    relax mode does not cover); callers treat that as "discard", never as a
    price.
    """
    if timeline is None:
        timeline = simulate_timeline(sol, inst)
    if not is_admissible(sol, inst, cfg, timeline):
        return math.inf

    if obj is Objective.MIN_COST:
        raw = operational_cost(sol, inst, cfg.wait_convention, timeline)
        pen = 0.0
        for idx in range(len(sol.deliveries)):
            pen += timeline.truck_excess[idx] * inst.truck_speed * inst.truck_cost_rate
            pen += timeline.drone_excess[idx] * inst.drone_speed * inst.drone_cost_rate
        return raw + cfg.omega * pen

    raw = timeline.completion(inst)
    pen = 0.0
    for idx in range(len(sol.deliveries)):
        pen += max(timeline.truck_excess[idx], timeline.drone_excess[idx])
    return raw + cfg.omega * pen
