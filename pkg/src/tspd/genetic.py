"""Hybrid genetic search over giant-tour chromosomes.

Each individual is a permutation of the customers plus the decoded solution
it stands for.  One iteration breeds a single offspring: two tournament
parents, a crossover, the split decoder, a local-search education, an
optional repair at amplified penalties, and a chromosome restore.  Feasible
and infeasible individuals live in separate subpopulations ranked by a
biased fitness that trades objective quality against contribution to
population diversity.  The penalty coefficient adapts to the fraction of
naturally feasible offspring, and a stagnating search is diversified by
regenerating most of both subpopulations.
"""

from __future__ import annotations

import math
import random
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .evaluation import (
    PenaltyConfig,
    RelaxMode,
    WaitFeeConvention,
    completion_time,
    is_feasible,
    operational_cost,
    penalized_cost,
    simulate_timeline,
)
from .local_search import GranularNeighbors, build_granular_neighbors, educate
from .model import Instance, Objective, TspDSolution
from .restore import restore
from .split import split

IMPROVE_EPS = 1e-9
PENALTY_WINDOW = 100
PENALTY_PERIOD = 100
OMEGA_MIN = 1e-3
OMEGA_MAX = 1e6

CROSSOVER_KINDS = ("dx", "ox", "pmx", "obx", "pbx")


@dataclass
class HgaParams:
    """Search parameters; defaults follow the tuned configuration."""

    mu: int = 15
    lam: int = 25
    nb_elite: int = 6
    xi_ref: float = 0.3
    n_close_frac: float = 0.2
    omega0: float = 1.0
    iter_ni: int = 2500
    iter_div_frac: float = 0.3
    p_rep: float = 0.5
    h: float = 0.1
    insertion_k: int = 3
    crossover_kind: str = "dx"
    relax_mode: RelaxMode = RelaxMode.ALL
    wait_convention: WaitFeeConvention = WaitFeeConvention.AS_WRITTEN
    no_inf: bool = False
    no_div: bool = False
    no_repair: bool = False
    no_restore: bool = False

    def __post_init__(self):
        if self.mu <= 0 or self.lam <= 0:
            raise ValueError("mu and lam must be positive")
        if not 0 <= self.nb_elite <= self.mu:
            raise ValueError("nb_elite must lie in [0, mu]")
        if not 0.0 < self.xi_ref < 1.0:
            raise ValueError("xi_ref must lie strictly between 0 and 1")
        if self.insertion_k < 1:
            raise ValueError("insertion_k must be >= 1")
        if self.crossover_kind not in CROSSOVER_KINDS:
            raise ValueError(f"unknown crossover kind {self.crossover_kind!r}")
        if self.no_inf:
            # without an infeasible subpopulation nothing may carry excess
            self.relax_mode = RelaxMode.NONE

    @property
    def iter_div(self) -> int:
        return math.ceil(self.iter_div_frac * self.iter_ni)


@dataclass(eq=False)
class Individual:
    chromosome: list[int]
    solution: TspDSolution
    timeline: object
    feasible: bool
    phi: float
    phi_omega: float
    delta: float = 0.0
    fit_rank: int = 0
    div_rank: int = 0
    bf: float = 0.0


@dataclass
class Population:
    feasible_subpop: list[Individual] = field(default_factory=list)
    infeasible_subpop: list[Individual] = field(default_factory=list)
    omega: float = 1.0
    window: deque = field(default_factory=lambda: deque(maxlen=PENALTY_WINDOW))
    best_feasible: Individual | None = None

    def merged(self) -> list[Individual]:
        return self.feasible_subpop + self.infeasible_subpop


@dataclass
class RunStats:
    iterations: int = 0
    best_phi_trace: list[float] = field(default_factory=list)
    omega_trace: list[tuple[int, float]] = field(default_factory=list)
    feasible_fraction_trace: list[tuple[int, float]] = field(default_factory=list)
    diversifications: int = 0
    wall_time: float = 0.0


@dataclass
class HgaResult:
    solution: TspDSolution
    value: float
    feasible: bool
    violations: list[str]
    stats: RunStats


# ---------------------------------------------------------------------------
# crossovers


def _cut_pair(rng: random.Random, m: int) -> tuple[int, int]:
    a = rng.randrange(m)
    b = rng.randrange(m)
    return (a, b) if a <= b else (b, a)


def dx_child(p1: list[int], p2: list[int], keep: set[int]) -> list[int]:
    """Copy `keep` at their P1 positions, fill the rest in P2 order."""

    n = len(p1)
    child: list[int | None] = [None] * n
    for idx, node in enumerate(p1):
        if node in keep:
            child[idx] = node
    rest = iter(node for node in p2 if node not in keep)
    for idx in range(n):
        if child[idx] is None:
            child[idx] = next(rest)
    return child  # type: ignore[return-value]


def crossover_dx(p1: list[int], p2: list[int], sol1: TspDSolution, rng: random.Random) -> list[int]:
    """Cut either the truck tour or the sortie sequence of P1's solution.

    A coin picks the source; the cut keeps a contiguous run of P1's truck
    tour (depot positions may fall inside the cut and contribute nothing) or
    a run of at least two drone customers in launch order.  Kept customers
    stay at their P1 chromosome positions.  Too few drone customers to cut
    sends the drone branch to the truck branch.
    """

    use_truck = rng.random() < 0.5
    drone_seq = [d.drone_node for d in sorted(sol1.deliveries,
                                              key=lambda d: sol1.truck_tour.index(d.launch))]
    if not use_truck and len(drone_seq) < 2:
        use_truck = True
    if use_truck:
        td = sol1.truck_tour
        a, b = sorted(rng.sample(range(len(td)), 2))
        end = len(p1) + 1
        keep = {node for node in td[a:b + 1] if node not in (0, end)}
    else:
        a, b = sorted(rng.sample(range(len(drone_seq)), 2))
        keep = set(drone_seq[a:b + 1])
    return dx_child(p1, p2, keep)


def ox_child(p1: list[int], p2: list[int], a: int, b: int) -> list[int]:
    n = len(p1)
    child: list[int | None] = [None] * n
    kept = set(p1[a:b + 1])
    child[a:b + 1] = p1[a:b + 1]
    fill = [node for node in p2[b + 1:] + p2[:b + 1] if node not in kept]
    idx = (b + 1) % n
    for node in fill:
        while child[idx] is not None:
            idx = (idx + 1) % n
        child[idx] = node
    return child  # type: ignore[return-value]


def pmx_child(p1: list[int], p2: list[int], a: int, b: int) -> list[int]:
    # P1 is the base; P2 donates the segment, conflicts follow the mapping
    n = len(p1)
    child: list[int | None] = [None] * n
    child[a:b + 1] = p2[a:b + 1]
    seg = set(p2[a:b + 1])
    map_back = {p2[i]: p1[i] for i in range(a, b + 1)}
    for idx in list(range(0, a)) + list(range(b + 1, n)):
        node = p1[idx]
        while node in seg:
            node = map_back[node]
        child[idx] = node
    return child  # type: ignore[return-value]


def obx_child(p1: list[int], p2: list[int], selected: set[int]) -> list[int]:
    # values at the selected positions are re-sequenced into P2's order
    chosen = [p1[idx] for idx in sorted(selected)]
    rank = {node: r for r, node in enumerate(p2)}
    chosen.sort(key=lambda node: rank[node])
    child = list(p1)
    for idx, node in zip(sorted(selected), chosen):
        child[idx] = node
    return child


def pbx_child(p1: list[int], p2: list[int], selected: set[int]) -> list[int]:
    # selected positions keep P1's values; the rest fill in P2 order
    n = len(p1)
    child: list[int | None] = [None] * n
    kept = set()
    for idx in selected:
        child[idx] = p1[idx]
        kept.add(p1[idx])
    rest = iter(node for node in p2 if node not in kept)
    for idx in range(n):
        if child[idx] is None:
            child[idx] = next(rest)
    return child  # type: ignore[return-value]


def crossover_classical(kind: str, p1: list[int], p2: list[int], rng: random.Random) -> list[int]:
    n = len(p1)
    if kind == "ox":
        a, b = _cut_pair(rng, n)
        return ox_child(p1, p2, a, b)
    if kind == "pmx":
        a, b = _cut_pair(rng, n)
        return pmx_child(p1, p2, a, b)
    if kind == "obx":
        selected = {idx for idx in range(n) if rng.random() < 0.5}
        return obx_child(p1, p2, selected)
    if kind == "pbx":
        selected = {idx for idx in range(n) if rng.random() < 0.5}
        return pbx_child(p1, p2, selected)
    raise ValueError(f"unknown classical crossover {kind!r}")


# ---------------------------------------------------------------------------
# diversity and ranking


def diversity_contribution(member: Individual, subpop: list[Individual], n_close: int) -> float:
    """Mean chromosome distance to the n_close closest members."""

    others = [ind for ind in subpop if ind is not member]
    if not others:
        return 1.0
    n = len(member.chromosome)
    mine = member.chromosome
    dists = sorted(sum(a != b for a, b in zip(mine, ind.chromosome)) / n for ind in others)
    take = min(n_close, len(dists))
    return sum(dists[:take]) / take


def _refresh_diversity(subpop: list[Individual], n_close_frac: float) -> None:
    m = len(subpop)
    if m == 0:
        return
    if m == 1:
        subpop[0].delta = 1.0
        return
    n_close = max(1, math.ceil(n_close_frac * (m - 1)))
    chroms = np.array([ind.chromosome for ind in subpop], dtype=np.int32)
    diff = (chroms[:, None, :] != chroms[None, :, :]).mean(axis=2)
    np.fill_diagonal(diff, np.inf)
    part = np.sort(diff, axis=1)[:, :n_close]
    deltas = part.mean(axis=1)
    for ind, d in zip(subpop, deltas):
        ind.delta = float(d)


def biased_fitness(subpop: list[Individual], nb_elite: int, no_div: bool = False) -> None:
    """Rank by quality and by diversity; combine into bf (lower is better)."""

    m = len(subpop)
    if m == 0:
        return
    phis = np.array([ind.phi for ind in subpop])
    order = np.argsort(phis, kind="stable")
    for r, idx in enumerate(order):
        subpop[idx].fit_rank = r
    deltas = np.array([ind.delta for ind in subpop])
    order = np.argsort(-deltas, kind="stable")
    for r, idx in enumerate(order):
        subpop[idx].div_rank = r
    coef = max(0.0, 1.0 - nb_elite / m)
    for ind in subpop:
        ind.bf = ind.fit_rank if no_div else ind.fit_rank + coef * ind.div_rank


def select_parents(population: Population, rng: random.Random) -> tuple[Individual, Individual]:
    """Two independent binary tournaments over the merged population."""

    merged = population.merged()
    if not merged:
        raise ValueError("cannot select parents from an empty population")

    def one() -> Individual:
        a = merged[rng.randrange(len(merged))]
        b = merged[rng.randrange(len(merged))]
        return b if b.bf < a.bf else a

    return one(), one()


def select_survivors(subpop: list[Individual], mu: int, lam: int,
                     nb_elite: int, n_close_frac: float, no_div: bool) -> list[Individual]:
    """Trim an overflowing subpopulation back to mu members, clones first."""

    del lam  # the overflow trigger fixes the removal count at len - mu
    pool = list(subpop)
    for _ in range(max(0, len(pool) - mu)):
        _refresh_diversity(pool, n_close_frac)
        biased_fitness(pool, nb_elite, no_div)
        counts: dict[tuple[int, ...], int] = {}
        for ind in pool:
            key = tuple(ind.chromosome)
            counts[key] = counts.get(key, 0) + 1

        def has_clone(ind: Individual) -> bool:
            key = tuple(ind.chromosome)
            rkey = tuple(reversed(ind.chromosome))
            if counts.get(key, 0) > 1:
                return True
            return rkey != key and counts.get(rkey, 0) > 0

        candidates = [ind for ind in pool if has_clone(ind)] or pool
        victim = max(candidates, key=lambda ind: ind.bf)
        for idx, ind in enumerate(pool):
            if ind is victim:
                del pool[idx]
                break
    return pool


def adjust_penalty(population: Population, params: HgaParams) -> float:
    """Scale omega by the naturally-feasible share of recent offspring."""

    if population.window:
        f = sum(population.window) / len(population.window)
        if f < params.xi_ref - 0.05:
            population.omega *= 1.2
        elif f > params.xi_ref + 0.05:
            population.omega *= 0.85
        population.omega = min(OMEGA_MAX, max(OMEGA_MIN, population.omega))
    return population.omega


# ---------------------------------------------------------------------------
# offspring pipeline


class _Breeder:
    """Shared context for producing individuals within one run."""

    def __init__(self, inst: Instance, params: HgaParams, obj: Objective,
                 neighbors: GranularNeighbors, rng: random.Random):
        self.inst = inst
        self.params = params
        self.obj = obj
        self.neighbors = neighbors
        self.rng = rng

    def cfg(self, omega: float) -> PenaltyConfig:
        return PenaltyConfig(omega=omega, relax=self.params.relax_mode,
                             wait_convention=self.params.wait_convention)

    def raw_value(self, sol: TspDSolution, timeline) -> float:
        if self.obj is Objective.MIN_COST:
            return operational_cost(sol, self.inst, self.params.wait_convention, timeline)
        return completion_time(sol, self.inst, timeline)

    def make_individual(self, chromosome: list[int], sol: TspDSolution, omega: float) -> Individual:
        timeline = simulate_timeline(sol, self.inst)
        feas = is_feasible(sol, self.inst, timeline)
        phi = penalized_cost(sol, self.inst, self.cfg(omega), self.obj, timeline)
        return Individual(chromosome=chromosome, solution=sol, timeline=timeline,
                          feasible=feas, phi=phi, phi_omega=omega)

    def decode(self, chromosome: list[int], omega: float) -> tuple[TspDSolution, bool]:
        """split + educate; returns the educated solution and its natural feasibility."""

        cfg = self.cfg(omega)
        sol = split(chromosome, self.inst, cfg, self.obj)
        sol = educate(sol, self.inst, cfg, self.obj, self.neighbors,
                      self.rng.randrange(1 << 31))
        return sol, is_feasible(sol, self.inst)

    def repair(self, sol: TspDSolution, omega: float) -> TspDSolution:
        """Re-educate under amplified penalties; may still fail."""

        for factor in (10.0, 100.0):
            cfg = self.cfg(min(OMEGA_MAX, omega * factor))
            sol = educate(sol, self.inst, cfg, self.obj, self.neighbors,
                          self.rng.randrange(1 << 31))
            if is_feasible(sol, self.inst):
                break
        return sol

    def _finish(self, chromosome: list[int], sol: TspDSolution, omega: float) -> Individual:
        if self.params.no_restore:
            chrom = list(chromosome)
        else:
            chrom = restore(sol, self.inst, self.rng)
        return self.make_individual(chrom, sol, omega)

    def offspring(self, chromosome: list[int], omega: float) -> tuple[list[Individual], bool]:
        """Full pipeline; one feasible child, or an infeasible child kept in the
        infeasible subpopulation plus, with probability p_rep, a repaired copy
        that joins the feasible side iff repair reached feasibility."""

        sol, nat_feas = self.decode(chromosome, omega)
        if nat_feas:
            return [self._finish(chromosome, sol, omega)], True
        out = []
        if not self.params.no_inf:
            out.append(self._finish(chromosome, sol, omega))
        if not self.params.no_repair and self.rng.random() < self.params.p_rep:
            repaired = self.repair(sol, omega)
            if is_feasible(repaired, self.inst):
                out.append(self._finish(chromosome, repaired, omega))
        return out, nat_feas

    def initial_chromosome(self) -> list[int]:
        """Randomized cheapest insertion over the truck metric."""

        inst = self.inst
        rng = self.rng
        k = self.params.insertion_k
        d = inst.truck_dist
        tour = [0, inst.n + 1]
        pending = list(inst.customers)
        while pending:
            c = pending.pop(rng.randrange(len(pending)))
            costs = []
            for p in range(len(tour) - 1):
                u, v = tour[p], tour[p + 1]
                costs.append((d[u][c] + d[c][v] - d[u][v], p))
            costs.sort(key=lambda t: (t[0], t[1]))
            _, p = costs[rng.randrange(min(k, len(costs)))]
            tour.insert(p + 1, c)
        return tour[1:-1]


def _insert(population: Population, ind: Individual, params: HgaParams) -> None:
    subpop = population.feasible_subpop if ind.feasible else population.infeasible_subpop
    subpop.append(ind)
    if len(subpop) >= params.mu + params.lam:
        trimmed = select_survivors(subpop, params.mu, params.lam, params.nb_elite,
                                   params.n_close_frac, params.no_div)
        subpop.clear()
        subpop.extend(trimmed)


def _generate_batch(population: Population, breeder: _Breeder, count: int) -> None:
    for _ in range(count):
        chrom = breeder.initial_chromosome()
        children, nat_feas = breeder.offspring(chrom, population.omega)
        population.window.append(nat_feas)
        for ind in children:
            _insert(population, ind, breeder.params)


def initialize_population(inst: Instance, params: HgaParams, obj: Objective,
                          rng: random.Random) -> Population:
    """4*mu pipeline-built individuals routed into the two subpopulations."""

    neighbors = build_granular_neighbors(inst, params.h)
    breeder = _Breeder(inst, params, obj, neighbors, rng)
    population = Population(omega=params.omega0)
    _generate_batch(population, breeder, 4 * params.mu)
    return population


def diversify(population: Population, breeder: _Breeder) -> None:
    """Keep an elite core of each subpopulation, regenerate the rest."""

    params = breeder.params
    keep = math.ceil(params.mu / 3)
    for subpop in (population.feasible_subpop, population.infeasible_subpop):
        if len(subpop) <= keep:
            continue
        _refresh_subpop(population, subpop, params, breeder)
        kept = sorted(subpop, key=lambda ind: ind.bf)[:keep]
        best = min(subpop, key=lambda ind: ind.phi)
        if best not in kept:
            kept.append(best)
        subpop.clear()
        subpop.extend(kept)
    _generate_batch(population, breeder, 4 * params.mu)


def _refresh_subpop(population: Population, subpop: list[Individual], params: HgaParams,
                    breeder: _Breeder) -> None:
    # re-price members whose cached phi was computed under a previous omega
    for ind in subpop:
        if not ind.feasible and ind.phi_omega != population.omega:
            ind.phi = penalized_cost(ind.solution, breeder.inst, breeder.cfg(population.omega),
                                     breeder.obj, ind.timeline)
            ind.phi_omega = population.omega
    _refresh_diversity(subpop, params.n_close_frac)
    biased_fitness(subpop, params.nb_elite, params.no_div)


def _violation_summary(sol: TspDSolution, inst: Instance) -> list[str]:
    timeline = simulate_timeline(sol, inst)
    out = []
    for d, tex in zip(sol.deliveries, timeline.truck_excess):
        if tex > 0:
            out.append(f"truck span {d.launch}->{d.rendezvous} exceeds endurance by {tex:.6g} min")
    for d, dex in zip(sol.deliveries, timeline.drone_excess):
        if dex > 0:
            out.append(f"drone sortie via {d.drone_node} exceeds endurance by {dex:.6g} min")
    return out


def run_hga(inst: Instance, params: HgaParams, obj: Objective, seed: int) -> HgaResult:
    """Full search; a pure function of (instance, params, objective, seed)."""

    t_start = time.perf_counter()
    rng = random.Random(seed)
    neighbors = build_granular_neighbors(inst, params.h)
    breeder = _Breeder(inst, params, obj, neighbors, rng)
    population = Population(omega=params.omega0)
    stats = RunStats()
    _generate_batch(population, breeder, 4 * params.mu)

    best: Individual | None = None
    best_inf: Individual | None = None
    for ind in population.merged():
        if ind.feasible and (best is None or ind.phi < best.phi):
            best = ind
        if not ind.feasible and (best_inf is None or ind.phi < best_inf.phi):
            best_inf = ind

    non_improving = 0
    div_counter = 0
    iteration = 0
    while non_improving < params.iter_ni:
        iteration += 1
        for subpop in (population.feasible_subpop, population.infeasible_subpop):
            _refresh_subpop(population, subpop, params, breeder)
        p1, p2 = select_parents(population, rng)
        if params.crossover_kind == "dx":
            chrom = crossover_dx(p1.chromosome, p2.chromosome, p1.solution, rng)
        else:
            chrom = crossover_classical(params.crossover_kind, p1.chromosome, p2.chromosome, rng)
        children, nat_feas = breeder.offspring(chrom, population.omega)
        population.window.append(nat_feas)
        for ind in children:
            _insert(population, ind, params)

        improved = False
        for ind in children:
            if ind.feasible:
                if best is None or ind.phi < best.phi - IMPROVE_EPS:
                    best = ind
                    improved = True
            elif best is None:
                if best_inf is None or ind.phi < best_inf.phi - IMPROVE_EPS:
                    best_inf = ind
                    improved = True
        if improved:
            non_improving = 0
            div_counter = 0
        else:
            non_improving += 1
            div_counter += 1

        if iteration % PENALTY_PERIOD == 0:
            before = population.omega
            adjust_penalty(population, params)
            if population.window:
                stats.feasible_fraction_trace.append(
                    (iteration, sum(population.window) / len(population.window)))
            if population.omega != before:
                stats.omega_trace.append((iteration, population.omega))
        if div_counter >= params.iter_div:
            diversify(population, breeder)
            stats.diversifications += 1
            div_counter = 0
            for ind2 in population.merged():
                if ind2.feasible and (best is None or ind2.phi < best.phi - IMPROVE_EPS):
                    best = ind2
                    non_improving = 0
                elif (best is None and not ind2.feasible
                        and (best_inf is None or ind2.phi < best_inf.phi - IMPROVE_EPS)):
                    best_inf = ind2
                    non_improving = 0
        stats.best_phi_trace.append(best.phi if best is not None
                                    else (best_inf.phi if best_inf is not None else math.inf))

    stats.iterations = iteration
    stats.wall_time = time.perf_counter() - t_start
    if best is not None:
        value = breeder.raw_value(best.solution, best.timeline)
        return HgaResult(solution=best.solution, value=value, feasible=True,
                         violations=[], stats=stats)
    assert best_inf is not None, "initialization produced no individuals"
    value = breeder.raw_value(best_inf.solution, best_inf.timeline)
    return HgaResult(solution=best_inf.solution, value=value, feasible=False,
                     violations=_violation_summary(best_inf.solution, inst), stats=stats)
