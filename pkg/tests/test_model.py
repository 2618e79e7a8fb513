"""Structural rules: instance validation, giant tours, solution legality."""

import dataclasses

import numpy as np
import pytest

from tspd.model import (
    DroneDelivery,
    Instance,
    TspDSolution,
    is_giant_tour,
    validate_solution,
)


def test_instance_basic_properties(line4):
    assert line4.n == 4
    assert line4.depot == 0
    assert line4.depot_end == 5
    assert list(line4.customers) == [1, 2, 3, 4]
    mask = line4.eligible_mask
    assert mask.dtype == np.bool_
    assert [int(i) for i in np.flatnonzero(mask)] == [3, 4]


def test_instance_rejects_bad_matrices():
    eye = np.zeros((4, 4))
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=np.zeros((3, 3)), truck_time=eye,
                 drone_dist=eye, drone_time=eye, drone_eligible=frozenset(), endurance=1.0)
    neg = eye.copy()
    neg[0, 1] = -1.0
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=neg, truck_time=eye,
                 drone_dist=eye, drone_time=eye, drone_eligible=frozenset(), endurance=1.0)
    diag = eye.copy()
    diag[1, 1] = 2.0
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=eye, truck_time=diag,
                 drone_dist=eye, drone_time=eye, drone_eligible=frozenset(), endurance=1.0)


def test_instance_rejects_bad_scalars():
    eye = np.zeros((4, 4))
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=eye, truck_time=eye, drone_dist=eye,
                 drone_time=eye, drone_eligible=frozenset({3}), endurance=1.0)
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=eye, truck_time=eye, drone_dist=eye,
                 drone_time=eye, drone_eligible=frozenset(), endurance=0.0)
    with pytest.raises(ValueError):
        Instance(n=2, truck_dist=eye, truck_time=eye, drone_dist=eye,
                 drone_time=eye, drone_eligible=frozenset(), endurance=1.0,
                 launch_time=-0.1)


def test_giant_tour_predicate():
    assert is_giant_tour([2, 1, 3], 3)
    assert not is_giant_tour([1, 2], 3)          # missing customer
    assert not is_giant_tour([1, 2, 2], 3)       # duplicate
    assert not is_giant_tour([0, 1, 2, 3], 3)    # depot does not belong
    assert not is_giant_tour([1, 2, 4], 3)       # out of range


def test_delivery_field_order():
    d = DroneDelivery(1, 3, 2)
    assert (d.launch, d.drone_node, d.rendezvous) == (1, 3, 2)


def test_solution_copy_is_independent(line4):
    sol = TspDSolution([0, 1, 2, 5], [DroneDelivery(1, 3, 2), DroneDelivery(2, 4, 5)])
    dup = sol.copy()
    dup.truck_tour[1] = 99
    dup.deliveries.pop()
    assert sol.truck_tour == [0, 1, 2, 5]
    assert sol.drone_nodes() == [3, 4]


def test_validate_accepts_legal_solutions(line4):
    ok = [
        TspDSolution([0, 1, 2, 3, 4, 5]),
        TspDSolution([0, 1, 2, 4, 5], [DroneDelivery(1, 3, 2)]),
        TspDSolution([0, 1, 2, 5], [DroneDelivery(1, 3, 2), DroneDelivery(2, 4, 5)]),
        TspDSolution([0, 2, 1, 5], [DroneDelivery(0, 3, 2), DroneDelivery(2, 4, 5)]),
    ]
    for sol in ok:
        assert validate_solution(sol, line4) == []


def test_validate_flags_structural_breaks(line4):
    bad = [
        TspDSolution([1, 2, 3, 4, 5]),                                  # missing depot
        TspDSolution([0, 1, 2, 3, 4]),                                  # missing end depot
        TspDSolution([0, 1, 1, 3, 4, 5]),                               # duplicate, 2 missing
        TspDSolution([0, 1, 2, 3, 5], [DroneDelivery(1, 3, 2)]),        # 3 served twice, 4 never
        TspDSolution([0, 1, 3, 4, 5], [DroneDelivery(1, 2, 3)]),        # 2 not drone-eligible
        TspDSolution([0, 1, 2, 4, 5], [DroneDelivery(2, 3, 1)]),        # rendezvous before launch
        TspDSolution([0, 1, 2, 5], [DroneDelivery(0, 3, 2), DroneDelivery(1, 4, 5)]),  # interleaved
        TspDSolution([0, 5], [DroneDelivery(0, 3, 5)]),                 # 1, 2 unserved, empty truck
    ]
    for sol in bad:
        assert validate_solution(sol, line4) != []


def test_validate_allows_shared_boundary(line4):
    # rendezvous of one sortie may be the launch of the next
    sol = TspDSolution([0, 1, 2, 5], [DroneDelivery(0, 3, 2), DroneDelivery(2, 4, 5)])
    assert validate_solution(sol, line4) == []


def test_validate_requires_a_truck_customer():
    inst = Instance(
        n=1,
        truck_dist=np.abs(np.subtract.outer([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])),
        truck_time=np.abs(np.subtract.outer([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])),
        drone_dist=np.abs(np.subtract.outer([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])),
        drone_time=np.abs(np.subtract.outer([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])),
        drone_eligible=frozenset({1}),
        endurance=10.0,
    )
    assert validate_solution(TspDSolution([0, 1, 2]), inst) == []
    assert validate_solution(TspDSolution([0, 2], [DroneDelivery(0, 1, 2)]), inst) != []


def test_instance_is_frozen(line2):
    with pytest.raises(dataclasses.FrozenInstanceError):
        line2.endurance = 5.0
