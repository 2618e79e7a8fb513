"""Truck-and-drone tandem delivery solver (TSP-D).

A hybrid genetic algorithm minimizing either operational cost or completion
time for one truck working with one drone, plus exact enumeration oracles for
desk-scale verification, an instance toolkit, and a benchmark harness.
"""

from .evaluation import (
    PenaltyConfig,
    RelaxMode,
    Timeline,
    WaitFeeConvention,
    completion_time,
    is_admissible,
    is_feasible,
    operational_cost,
    penalized_cost,
    simulate_timeline,
)
from .model import (
    DroneDelivery,
    GiantTour,
    Instance,
    Objective,
    TspDSolution,
    is_giant_tour,
    validate_solution,
)

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "DroneDelivery",
    "TspDSolution",
    "Objective",
    "GiantTour",
    "validate_solution",
    "is_giant_tour",
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
    "__version__",
]
