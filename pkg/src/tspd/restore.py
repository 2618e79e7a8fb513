"""Chromosome re-derivation from a complete solution.

The genetic layer keeps each individual as a giant tour of all customers.
After a solution has been decoded and improved, its flying customers must be
folded back into the tour so the chromosome reflects what the search
actually found.  Each drone customer is re-inserted at a uniformly random
slot strictly between its launch and rendezvous nodes; randomizing the slot
spreads the information a sortie carries over several chromosome shapes,
which keeps the population from collapsing onto one encoding.
"""

from __future__ import annotations

import random

from .model import Instance, TspDSolution


def restore(sol: TspDSolution, inst: Instance, rng: random.Random) -> list[int]:
    """Giant tour carrying `sol`: deterministic in `rng`'s state.

    Drone customers are inserted in ascending launch-position order, each at
    a uniform slot between its launch and rendezvous in the partially built
    tour.  A depot launch opens the range at the very front; a depot-return
    rendezvous closes it at the current end.
    """

    end = inst.n + 1
    tour = [node for node in sol.truck_tour if node not in (0, end)]
    pos_in_tour = {node: p for p, node in enumerate(tour)}
    by_launch = sorted(sol.deliveries,
                       key=lambda d: sol.truck_tour.index(d.launch))
    for d in by_launch:
        lo = 0 if d.launch == 0 else pos_in_tour[d.launch] + 1
        hi = len(tour) if d.rendezvous == end else pos_in_tour[d.rendezvous]
        tour.insert(rng.randint(lo, hi), d.drone_node)
        pos_in_tour = {node: p for p, node in enumerate(tour)}
    return tour
