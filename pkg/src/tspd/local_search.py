"""Neighborhood search over complete solutions.

Sixteen move families organized in three groups: truck-tour moves (single
and pair relocations, swaps, and the two 2-opt reconnections), mixed moves
exchanging a flying customer with a driven one or changing a sortie's roles,
and sortie moves that create, dissolve, re-anchor, or cross over drone
deliveries.  Moves that pair two nodes draw the partner from a granular
candidate list: the closest customers by truck distance, list length
min(ceil(h*n), n-1).

`educate` runs a first-improvement descent: each round visits the sixteen
neighborhoods and their candidates in a uniformly shuffled order, applies
the first move that lowers the penalized objective by more than 1e-9, and
restarts.  A round with no accepted move proves local optimality with
respect to the granular candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _engine as eng
from .evaluation import PenaltyConfig, penalized_cost
from .model import DroneDelivery, Instance, Objective, TspDSolution


class MoveKind(IntEnum):
    """The sixteen move families, in the order the round visits them."""

    RELOCATE_1 = eng.K_N1
    RELOCATE_2 = eng.K_N2
    RELOCATE_2_REV = eng.K_N3
    SWAP_1_1 = eng.K_N4
    SWAP_2_1 = eng.K_N5
    SWAP_2_2 = eng.K_N6
    TWO_OPT = eng.K_N7
    TWO_OPT_BEFORE = eng.K_N8
    DRONE_TRUCK_SWAP = eng.K_N9
    SWAP_LAUNCH_DRONE = eng.K_N10
    SWAP_RENDEZVOUS_DRONE = eng.K_N11
    SWAP_LAUNCH_RENDEZVOUS = eng.K_N12
    INSERT_DELIVERY = eng.K_N13
    REMOVE_DELIVERY = eng.K_N14
    SWAP_DRONE_NODES = eng.K_N15
    RELOCATE_DELIVERY = eng.K_N16


@dataclass(frozen=True)
class GranularNeighbors:
    """Per-node candidate customers, row v sorted by truck distance from v."""

    lists: np.ndarray  # (n+2, width) int64
    h: float

    @property
    def width(self) -> int:
        return self.lists.shape[1]


def build_granular_neighbors(inst: Instance, h: float = 0.1) -> GranularNeighbors:
    """Closest-customer lists used to restrict node-pair moves."""

    n = inst.n
    width = min(int(np.ceil(h * n)), n - 1)
    if width < 0:
        width = 0
    lists = np.empty((n + 2, width), dtype=np.int64)
    if width > 0:
        customers = np.arange(1, n + 1)
        for v in range(n + 2):
            cand = customers[customers != v]
            dist = inst.truck_dist[v, cand]
            take = np.argsort(dist, kind="stable")[:width]
            lists[v, :] = cand[take]
    return GranularNeighbors(lists=lists, h=h)


class _State:
    """Flat-array mirror of one solution plus the scratch set."""

    def __init__(self, sol: TspDSolution, inst: Instance, cfg: PenaltyConfig, obj: Objective):
        size = inst.n + 2
        self.inst = inst
        self.tour = np.zeros(size, dtype=np.int64)
        self.pos = np.empty(size, dtype=np.int64)
        self.dla = np.zeros(size, dtype=np.int64)
        self.dno = np.zeros(size, dtype=np.int64)
        self.dre = np.zeros(size, dtype=np.int64)
        self.la = np.empty(size, dtype=np.int64)
        self.ra = np.empty(size, dtype=np.int64)
        self.fly = np.empty(size, dtype=np.int64)
        self.SI = np.empty(2, dtype=np.int64)
        self.contrib = np.zeros(size, dtype=np.float64)
        self.penu = np.zeros(size, dtype=np.float64)
        self.effp = np.zeros(size, dtype=np.float64)
        self.CF = np.zeros(3, dtype=np.float64)
        self.stour = np.empty(size, dtype=np.int64)
        self.spos = np.empty(size, dtype=np.int64)
        self.sla = np.empty(size, dtype=np.int64)
        self.sra = np.empty(size, dtype=np.int64)
        self.sdla = np.empty(size, dtype=np.int64)
        self.sdno = np.empty(size, dtype=np.int64)
        self.sdre = np.empty(size, dtype=np.int64)
        self.ssrc = np.empty(size, dtype=np.int64)
        self.SS = np.empty(2, dtype=np.int64)
        self.order = np.empty(size, dtype=np.int64)
        self.marks = np.empty(size, dtype=np.int64)
        self.elig = np.ascontiguousarray(inst.eligible_mask.view(np.uint8))
        self.P = _pack_params(inst, cfg, obj)

        td = sol.truck_tour
        self.SI[0] = len(td)
        for p, node in enumerate(td):
            self.tour[p] = node
        self.SI[1] = len(sol.deliveries)
        for q, d in enumerate(sol.deliveries):
            self.dla[q] = d.launch
            self.dno[q] = d.drone_node
            self.dre[q] = d.rendezvous
        eng._rebuild(self.tour, self.pos, self.dla, self.dno, self.dre,
                     self.la, self.ra, self.fly, self.SI,
                     self.contrib, self.penu, self.effp, self.CF,
                     inst.truck_time, inst.drone_time, inst.truck_dist, inst.drone_dist,
                     self.P)

    def extract(self) -> TspDSolution:
        L = int(self.SI[0])
        nd = int(self.SI[1])
        tour = [int(self.tour[p]) for p in range(L)]
        deliveries = [DroneDelivery(int(self.dla[q]), int(self.dno[q]), int(self.dre[q]))
                      for q in range(nd)]
        return TspDSolution(truck_tour=tour, deliveries=deliveries)


def _pack_params(inst: Instance, cfg: PenaltyConfig, obj: Objective) -> np.ndarray:
    from .evaluation import WaitFeeConvention

    P = np.empty(eng.P_LEN, dtype=np.float64)
    P[eng.P_EPS] = inst.endurance
    P[eng.P_SL] = inst.launch_time
    P[eng.P_SR] = inst.retrieve_time
    P[eng.P_C1] = inst.truck_cost_rate
    P[eng.P_C2] = inst.drone_cost_rate
    P[eng.P_ALPHA] = inst.truck_wait_fee
    P[eng.P_BETA] = inst.drone_wait_fee
    P[eng.P_TS] = inst.truck_speed
    P[eng.P_DS] = inst.drone_speed
    P[eng.P_OMEGA] = cfg.omega
    P[eng.P_RELAXT] = 1.0 if cfg.relax.truck_relaxed else 0.0
    P[eng.P_RELAXD] = 1.0 if cfg.relax.drone_relaxed else 0.0
    P[eng.P_OBJCOST] = 1.0 if obj is Objective.MIN_COST else 0.0
    P[eng.P_CONVW] = 1.0 if cfg.wait_convention is WaitFeeConvention.AS_WRITTEN else 0.0
    return P


def _move_ints(kind: MoveKind, args: tuple) -> tuple[int, int, int]:
    want = {MoveKind.SWAP_LAUNCH_DRONE: 1, MoveKind.SWAP_RENDEZVOUS_DRONE: 1,
            MoveKind.SWAP_LAUNCH_RENDEZVOUS: 1,
            MoveKind.INSERT_DELIVERY: 3, MoveKind.RELOCATE_DELIVERY: 3}.get(kind, 2)
    if len(args) != want:
        raise ValueError(f"{kind.name} expects {want} argument(s), got {len(args)}")
    a = [int(v) for v in args] + [0, 0]
    return a[0], a[1], a[2]


def evaluate_move(
    kind: MoveKind,
    args: tuple,
    sol: TspDSolution,
    inst: Instance,
    cfg: PenaltyConfig,
    obj: Objective,
) -> float | None:
    """Objective change the move would cause, or None when it is not applicable.

    The delta is priced incrementally: cost mode composes the changed tour
    arcs with the re-priced affected deliveries, time mode resumes the
    timeline from the earliest position the move can influence.  Moves whose
    result would violate a non-relaxed endurance side are reported as not
    applicable, matching the discard-don't-penalize rule.
    """

    st = _State(sol, inst, cfg, obj)
    a1, a2, a3 = _move_ints(kind, args)
    ok, delta = eng._evaluate(int(kind), a1, a2, a3,
                              st.tour, st.pos, st.dla, st.dno, st.dre,
                              st.la, st.ra, st.fly, st.SI,
                              st.contrib, st.penu, st.effp, st.CF,
                              st.stour, st.spos, st.sla, st.sra,
                              st.sdla, st.sdno, st.sdre, st.ssrc, st.SS,
                              st.order, st.marks,
                              inst.truck_time, inst.drone_time,
                              inst.truck_dist, inst.drone_dist, st.elig, st.P)
    return float(delta) if ok else None


def apply_move(
    kind: MoveKind,
    args: tuple,
    sol: TspDSolution,
    inst: Instance,
) -> TspDSolution | None:
    """The solution after the move, or None when it is not applicable.

    Only structural legality is enforced here; whether the move pays off, or
    is even admissible under a penalty configuration, is evaluate_move's job.
    """

    cfg = PenaltyConfig()
    st = _State(sol, inst, cfg, Objective.MIN_COST)
    a1, a2, a3 = _move_ints(kind, args)
    ok = eng._build(int(kind), a1, a2, a3,
                    st.tour, st.pos, st.dla, st.dno, st.dre,
                    st.la, st.ra, st.fly, st.SI,
                    st.stour, st.SS, st.sdla, st.sdno, st.sdre, st.ssrc, st.elig)
    if not ok:
        return None
    eng._scratch_index(st.stour, st.SS, st.spos, st.sla, st.sra, st.sdla, st.sdno, st.sdre)
    if not eng._spans_ok(st.SS, st.spos, st.sdla, st.sdno, st.sdre, st.order):
        return None
    eng._apply_scratch(st.tour, st.pos, st.dla, st.dno, st.dre, st.la, st.ra, st.fly, st.SI,
                       st.contrib, st.penu, st.effp, st.CF,
                       st.stour, st.SS, st.sdla, st.sdno, st.sdre,
                       inst.truck_time, inst.drone_time, inst.truck_dist, inst.drone_dist, st.P)
    return st.extract()


def educate(
    sol: TspDSolution,
    inst: Instance,
    cfg: PenaltyConfig,
    obj: Objective,
    neighbors: GranularNeighbors,
    rng_seed: int,
) -> TspDSolution:
    """First-improvement descent from `sol`; deterministic in `rng_seed`.

    The input must be admissible under `cfg`; the result never scores worse
    than the input.
    """

    st = _State(sol, inst, cfg, obj)
    if not np.isfinite(st.CF[0]) or st.CF[2] == 0.0:
        raise ValueError("educate requires an admissible starting solution")
    eng._educate_kernel(st.tour, st.pos, st.dla, st.dno, st.dre,
                        st.la, st.ra, st.fly, st.SI,
                        st.contrib, st.penu, st.effp, st.CF,
                        inst.truck_time, inst.drone_time,
                        inst.truck_dist, inst.drone_dist, st.elig, st.P,
                        neighbors.lists, neighbors.width, inst.n,
                        int(rng_seed) & 0x7FFFFFFF)
    return st.extract()


def local_search_phi(sol: TspDSolution, inst: Instance, cfg: PenaltyConfig, obj: Objective) -> float:
    """Engine-side penalized objective; agrees with penalized_cost to 1e-9."""

    st = _State(sol, inst, cfg, obj)
    if st.CF[2] == 0.0:
        return float("inf")
    return float(st.CF[0])


__all__ = [
    "GranularNeighbors",
    "MoveKind",
    "apply_move",
    "build_granular_neighbors",
    "educate",
    "evaluate_move",
    "local_search_phi",
    "penalized_cost",
]
