"""Folding solved drone customers back into a giant tour."""

import random

from tspd.evaluation import PenaltyConfig
from tspd.instances import generate_instance
from tspd.model import DroneDelivery, TspDSolution, Objective, is_giant_tour
from tspd.oracle import random_solution
from tspd.restore import restore
from tspd.split import split


def test_restore_is_a_permutation_preserving_truck_order():
    rng = random.Random(5)
    for trial in range(100):
        inst = generate_instance(rng.choice([4, 6, 9]), seed=6000 + trial)
        sol = random_solution(inst, rng, p_drone=0.6)
        gt = restore(sol, inst, rng)
        assert is_giant_tour(gt, inst.n)
        truck = [c for c in sol.truck_tour[1:-1]]
        assert [c for c in gt if c in set(truck)] == truck


def test_restore_places_drone_nodes_inside_their_span():
    rng = random.Random(6)
    for trial in range(100):
        inst = generate_instance(7, seed=7000 + trial, drone_eligible_frac=1.0)
        sol = random_solution(inst, rng, p_drone=0.8)
        gt = restore(sol, inst, rng)
        at = {c: i for i, c in enumerate(gt)}
        for d in sol.deliveries:
            lo = -1 if d.launch == 0 else at[d.launch]
            hi = len(gt) if d.rendezvous == inst.depot_end else at[d.rendezvous]
            assert lo < at[d.drone_node] < hi + 1


def test_restore_deterministic_in_rng_state():
    inst = generate_instance(8, seed=42)
    sol = random_solution(inst, random.Random(3), p_drone=0.7)
    assert restore(sol, inst, random.Random(11)) == restore(sol, inst, random.Random(11))
    # a depot-to-depot sortie over a 5-customer tour leaves 6 slots to pick from
    wide = generate_instance(6, seed=4, drone_eligible_frac=1.0)
    sol2 = TspDSolution([0, 1, 2, 3, 4, 5, 7], [DroneDelivery(0, 6, 7)])
    seen = {tuple(restore(sol2, wide, random.Random(s))) for s in range(200)}
    assert len(seen) == 6


def test_restore_slot_range_boundaries():
    # two customers, one flying: <0, 2, 1> forces slot 0 (before customer 1)
    inst = generate_instance(2, seed=9, drone_eligible_frac=1.0)
    sol = TspDSolution([0, 1, 3], [DroneDelivery(0, 2, 1)])
    seen = {tuple(restore(sol, inst, random.Random(s))) for s in range(40)}
    assert seen == {(2, 1)}
    # <1, 2, 3>: the flyer can only sit after its launch customer
    sol2 = TspDSolution([0, 1, 3], [DroneDelivery(1, 2, 3)])
    seen2 = {tuple(restore(sol2, inst, random.Random(s))) for s in range(40)}
    assert seen2 == {(1, 2)}


def test_restore_round_trips_through_split():
    # decoding the restored chromosome can only keep or beat the solution
    rng = random.Random(8)
    cfg = PenaltyConfig()
    from tspd.evaluation import penalized_cost

    for trial in range(50):
        inst = generate_instance(6, seed=8000 + trial)
        sol = random_solution(inst, rng, p_drone=0.5)
        obj = rng.choice([Objective.MIN_COST, Objective.MIN_TIME])
        phi = penalized_cost(sol, inst, cfg, obj)
        gt = restore(sol, inst, rng)
        back = split(gt, inst, cfg, obj)
        assert penalized_cost(back, inst, cfg, obj) <= phi + 1e-9
