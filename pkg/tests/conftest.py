"""Shared fixtures: tiny hand-checkable line instances and generated ones."""

import numpy as np
import pytest

from tspd.instances import generate_instance
from tspd.local_search import MoveKind
from tspd.model import Instance


def random_move(kind, sol, inst, rng):
    """Argument tuple for `kind` drawn blind; None when the solution is too small."""
    nodes = list(range(inst.n + 2))
    nd = len(sol.deliveries)
    if kind in (MoveKind.SWAP_LAUNCH_DRONE, MoveKind.SWAP_RENDEZVOUS_DRONE,
                MoveKind.SWAP_LAUNCH_RENDEZVOUS):
        return (rng.randrange(nd),) if nd else None
    if kind == MoveKind.INSERT_DELIVERY:
        return (rng.choice(nodes), rng.choice(nodes), rng.choice(nodes))
    if kind == MoveKind.RELOCATE_DELIVERY:
        return (rng.randrange(nd), rng.choice(nodes), rng.choice(nodes)) if nd else None
    if kind == MoveKind.REMOVE_DELIVERY:
        return (rng.randrange(nd), rng.choice(nodes)) if nd else None
    if kind == MoveKind.SWAP_DRONE_NODES:
        if nd < 2:
            return None
        a, b = rng.randrange(nd), rng.randrange(nd)
        return (a, b) if a != b else None
    if kind == MoveKind.DRONE_TRUCK_SWAP:
        return (rng.randrange(nd), rng.choice(nodes)) if nd else None
    return (rng.choice(nodes), rng.choice(nodes))


def line_instance(xs, eligible, *, endurance=10.0, drone_factor=0.5, **kw) -> Instance:
    """Instance with nodes at 1-D positions `xs` (depot first, duplicate appended).

    Truck time equals distance; drone time is distance * drone_factor.  The
    default fees keep hand arithmetic short: C1=1, C2=0.5, alpha=0.5, beta=0.25.
    """
    pts = np.asarray(list(xs) + [xs[0]], dtype=float)
    dist = np.abs(pts[:, None] - pts[None, :])
    defaults = dict(
        truck_cost_rate=1.0,
        drone_cost_rate=0.5,
        truck_wait_fee=0.5,
        drone_wait_fee=0.25,
        truck_speed=1.0,
        drone_speed=2.0,
    )
    defaults.update(kw)
    return Instance(
        n=len(xs) - 1,
        truck_dist=dist,
        truck_time=dist,
        drone_dist=dist,
        drone_time=dist * drone_factor,
        drone_eligible=frozenset(eligible),
        endurance=endurance,
        launch_time=1.0,
        retrieve_time=1.0,
        **defaults,
    )


@pytest.fixture
def line2() -> Instance:
    # depot at 0, customers at 1 and 2; only customer 2 flies
    return line_instance([0.0, 1.0, 2.0], {2})


@pytest.fixture
def line4() -> Instance:
    # depot at 0, customers at 1..4; customers 3 and 4 fly
    return line_instance([0.0, 1.0, 2.0, 3.0, 4.0], {3, 4})


@pytest.fixture
def small_instances() -> list[Instance]:
    return [generate_instance(n, seed=100 + n) for n in (4, 5, 6, 7)]
