"""Core domain types for the truck-and-drone routing problem.

Nodes are indexed 0..n+1: node 0 is the depot, nodes 1..n are customers and
node n+1 is a duplicate of the depot used as the tour terminal.  A solution
pairs a truck tour with a list of drone deliveries; each delivery is a
3-tuple (launch node, drone customer, rendezvous node).  The truck carries
the drone everywhere except between a launch and its rendezvous.

Matrices are stored fully materialized so asymmetric truck networks are
representable; speeds are explicit fields because matrices need not be
Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Instance",
    "DroneDelivery",
    "TspDSolution",
    "Objective",
    "GiantTour",
    "validate_solution",
    "is_giant_tour",
]

# A giant tour is a bare permutation of the customers 1..n (no depots).
GiantTour = list


class Objective(Enum):
    """Which objective the solver optimizes."""

    MIN_COST = "cost"
    MIN_TIME = "time"


class DroneDelivery(NamedTuple):
    """One drone sortie: launch at `launch`, serve `drone_node`, rejoin at `rendezvous`."""

    launch: int
    drone_node: int
    rendezvous: int


@dataclass(frozen=True)
class Instance:
    """Immutable problem data.

    Attributes:
        n: number of customers.
        truck_dist / truck_time: (n+2, n+2) matrices d and tau.
        drone_dist / drone_time: (n+2, n+2) matrices d' and tau'.
        drone_eligible: customer ids servable by drone.
        endurance: drone battery limit per sortie, minutes.
        launch_time: service time to prepare a launch, minutes.
        retrieve_time: service time to recover the drone, minutes.
        truck_cost_rate / drone_cost_rate: cost per distance unit.
        truck_wait_fee / drone_wait_fee: cost per waiting minute.
        truck_speed / drone_speed: distance units per minute.
    """

    n: int
    truck_dist: np.ndarray
    truck_time: np.ndarray
    drone_dist: np.ndarray
    drone_time: np.ndarray
    drone_eligible: frozenset[int]
    endurance: float
    launch_time: float = 1.0
    retrieve_time: float = 1.0
    truck_cost_rate: float = 1.0
    drone_cost_rate: float = 1.0
    truck_wait_fee: float = 0.0
    drone_wait_fee: float = 0.0
    truck_speed: float = 2.0 / 3.0
    drone_speed: float = 2.0 / 3.0
    name: str = ""

    def __post_init__(self):
        size = self.n + 2
        for label in ("truck_dist", "truck_time", "drone_dist", "drone_time"):
            m = np.ascontiguousarray(np.asarray(getattr(self, label), dtype=np.float64))
            if m.shape != (size, size):
                raise ValueError(f"{label}: expected shape {(size, size)}, got {m.shape}")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValueError(f"{label}: entries must be finite and >= 0")
            if np.any(np.diagonal(m) != 0.0):
                raise ValueError(f"{label}: diagonal must be 0")
            object.__setattr__(self, label, m)
        elig = frozenset(int(c) for c in self.drone_eligible)
        if not elig <= set(range(1, self.n + 1)):
            raise ValueError("drone_eligible must be a subset of {1..n}")
        object.__setattr__(self, "drone_eligible", elig)
        if not self.endurance > 0:
            raise ValueError("endurance must be > 0")
        if self.launch_time < 0 or self.retrieve_time < 0:
            raise ValueError("service times must be >= 0")
        for label in ("truck_cost_rate", "drone_cost_rate", "truck_wait_fee", "drone_wait_fee"):
            if getattr(self, label) < 0:
                raise ValueError(f"{label} must be >= 0")
        if not (self.truck_speed > 0 and self.drone_speed > 0):
            raise ValueError("speeds must be > 0")

    @property
    def depot(self) -> int:
        return 0

    @property
    def depot_end(self) -> int:
        return self.n + 1

    @property
    def customers(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def eligible_mask(self) -> np.ndarray:
        mask = np.zeros(self.n + 2, dtype=np.bool_)
        for c in self.drone_eligible:
            mask[c] = True
        return mask


@dataclass
class TspDSolution:
    """A complete solution: truck tour [0, ..., n+1] plus drone deliveries."""

    truck_tour: list[int]
    deliveries: list[DroneDelivery] = field(default_factory=list)

    def copy(self) -> "TspDSolution":
        return TspDSolution(list(self.truck_tour), list(self.deliveries))

    def drone_nodes(self) -> list[int]:
        return [d.drone_node for d in self.deliveries]


def is_giant_tour(seq: Sequence[int], n: int) -> bool:
    """True iff seq is a permutation of {1..n}."""
    return len(seq) == n and sorted(seq) == list(range(1, n + 1))


def _span_text(d: DroneDelivery) -> str:
    return f"<{d.launch},{d.drone_node},{d.rendezvous}>"


def validate_solution(sol: TspDSolution, inst: Instance) -> list[str]:
    """Check the structural rules of a solution; return one message per violation.

    Endurance is deliberately not checked here: the search may hold solutions
    that overrun the drone's range, and `evaluation` prices or rejects those
    depending on the relax mode.
    """
    violations: list[str] = []
    n = inst.n
    td = sol.truck_tour
    end = n + 1

    if not td or td[0] != 0 or td[-1] != end:
        violations.append(f"tour-endpoints: truck tour must run from 0 to {end}, got {td[:1]}..{td[-1:]}")
        return violations

    seen: set[int] = set()
    for node in td:
        if not (0 <= node <= end):
            violations.append(f"node-range: truck tour node {node} outside 0..{end}")
        elif node in seen:
            violations.append(f"node-range: node {node} repeated in truck tour")
        seen.add(node)
    if 0 in td[1:] or end in td[:-1]:
        violations.append("node-range: depot indices may only appear at the tour ends")
    if len(td) == 2:
        # the tandem degenerates to a drone-only operation otherwise
        violations.append("empty-truck-tour: the truck tour must visit at least one customer")
    if violations:
        return violations

    pos = {node: p for p, node in enumerate(td)}

    for d in sol.deliveries:
        i, j, k = d
        if len({i, j, k}) != 3:
            violations.append(f"delivery-nodes: {_span_text(d)} nodes must be distinct")
            continue
        if not (1 <= j <= n):
            violations.append(f"delivery-nodes: drone node {j} of {_span_text(d)} is not a customer")
            continue
        if j not in inst.drone_eligible:
            violations.append(f"delivery-nodes: drone node {j} of {_span_text(d)} is not drone-eligible")
        if j in pos:
            violations.append(f"delivery-nodes: drone node {j} of {_span_text(d)} also appears in the truck tour")
        if i not in pos or k not in pos:
            violations.append(f"delivery-nodes: launch/rendezvous of {_span_text(d)} must lie on the truck tour")
            continue
        if pos[i] >= pos[k]:
            violations.append(f"delivery-order: launch {i} must precede rendezvous {k} in {_span_text(d)}")

    counts: dict[int, int] = {}
    for node in td[1:-1]:
        counts[node] = counts.get(node, 0) + 1
    for d in sol.deliveries:
        if 1 <= d.drone_node <= n:
            counts[d.drone_node] = counts.get(d.drone_node, 0) + 1
    for c in range(1, n + 1):
        got = counts.get(c, 0)
        if got != 1:
            violations.append(f"coverage: customer {c} served {got} times (expected exactly once)")

    # Interference: spans may touch only where one delivery's rendezvous node
    # is the next delivery's launch node.
    placed = [d for d in sol.deliveries if d.launch in pos and d.rendezvous in pos and pos[d.launch] < pos[d.rendezvous]]
    for a_idx in range(len(placed)):
        for b_idx in range(a_idx + 1, len(placed)):
            da, db = placed[a_idx], placed[b_idx]
            a0, a1 = pos[da.launch], pos[da.rendezvous]
            b0, b1 = pos[db.launch], pos[db.rendezvous]
            if a0 > b0 or (a0 == b0 and a1 > b1):
                da, db = db, da
                a0, a1, b0, b1 = b0, b1, a0, a1
            ok = b0 >= a1  # next delivery may start at or after this rendezvous
            if not ok:
                violations.append(
                    f"interleaved-deliveries: {_span_text(db)} overlaps the span of {_span_text(da)}"
                )
    return violations
