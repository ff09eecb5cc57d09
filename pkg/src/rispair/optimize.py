"""Phase-shift optimization: a genetic algorithm on the closed-form sum
rate, plus exhaustive-search and random baselines and grid quantization.

Fitness is the reciprocal of the approximate sum rate, so lower is
better.  Genomes live either in the continuous domain (genes are angles
in [0, 2*pi)) or on a 2**bits-point discrete grid (genes are integer
levels); crossover and mutation operate on the gene representation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.random import Generator

from .channel import TWO_PI, SystemParams
from .rate import PhaseConfig, approx_rates, rate_model

__all__ = [
    "DegenerateObjectiveError",
    "InfeasibleSearchError",
    "ContinuousPhases",
    "DiscretePhases",
    "PhaseDomain",
    "domain_of",
    "GaConfig",
    "Individual",
    "OptResult",
    "fitness",
    "init_population",
    "evaluate_and_sort",
    "select",
    "crossover",
    "mutate",
    "ga_optimize",
    "exhaustive_search",
    "random_search",
    "quantize",
]

DEFAULT_SEARCH_CAP = 1 << 24

SELECTION_MODES = ("rank_linear", "uniform")


class DegenerateObjectiveError(ValueError):
    """The approximate sum rate is zero, so reciprocal fitness is undefined."""


class InfeasibleSearchError(ValueError):
    """The exhaustive phase grid exceeds the candidate cap."""


@dataclass(frozen=True)
class ContinuousPhases:
    """Phase domain with free angles; genes are floats in [0, 2*pi)."""

    def sample_genes(self, n: int, L: int, rng: Generator) -> np.ndarray:
        return rng.uniform(0.0, TWO_PI, size=(n, L))

    def genes_to_theta(self, genes: np.ndarray) -> np.ndarray:
        return np.asarray(genes, dtype=np.float64)

    def to_config(self, genes: np.ndarray) -> PhaseConfig:
        return PhaseConfig.continuous(genes)

    def genes_of(self, config: PhaseConfig) -> np.ndarray:
        if config.is_discrete:
            raise ValueError("discrete genome in a continuous domain")
        return config.theta


@dataclass(frozen=True)
class DiscretePhases:
    """Phase domain on the uniform 2**bits-point grid; genes are levels."""

    bits: int

    def __post_init__(self):
        if not 1 <= int(self.bits) <= 16:
            raise ValueError(f"bits must be in [1, 16], got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))

    @property
    def n_levels(self) -> int:
        return 1 << self.bits

    def sample_genes(self, n: int, L: int, rng: Generator) -> np.ndarray:
        return rng.integers(0, self.n_levels, size=(n, L))

    def genes_to_theta(self, genes: np.ndarray) -> np.ndarray:
        return np.asarray(genes) * (TWO_PI / self.n_levels)

    def to_config(self, genes: np.ndarray) -> PhaseConfig:
        return PhaseConfig.from_levels(genes, self.bits)

    def genes_of(self, config: PhaseConfig) -> np.ndarray:
        if config.bits != self.bits:
            raise ValueError(f"genome encoded with {config.bits} bits, domain has {self.bits}")
        return config.levels


PhaseDomain = ContinuousPhases | DiscretePhases


def domain_of(config: PhaseConfig) -> PhaseDomain:
    """The phase domain a configuration belongs to."""
    return DiscretePhases(config.bits) if config.is_discrete else ContinuousPhases()


@dataclass(frozen=True)
class GaConfig:
    """Genetic-algorithm hyperparameters.

    Each generation keeps the best `n_survivors` individuals, breeds
    `n_children` by selection + single-point crossover, shields
    `n_elites` from mutation, and stops after `max_generations` or once
    the best fitness drops to `fitness_tol`.  The optional stall detector
    (off when `stall_generations` is None) additionally stops after that
    many generations without an improvement of at least
    `stall_improvement`.
    """

    n_total: int = 100
    n_survivors: int = 50
    n_children: int = 50
    n_elites: int = 1
    max_generations: int = 10000
    mutation_rate: float = 0.1
    fitness_tol: float = 1e-6
    selection_mode: str = "rank_linear"
    stall_generations: int | None = None
    stall_improvement: float = 1e-9

    def __post_init__(self):
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total}")
        if self.n_survivors < 0 or self.n_children < 0:
            raise ValueError("n_survivors and n_children must be >= 0")
        if self.n_survivors + self.n_children != self.n_total:
            raise ValueError(
                "n_survivors + n_children must equal n_total "
                f"({self.n_survivors} + {self.n_children} != {self.n_total})"
            )
        if not 1 <= self.n_elites <= self.n_survivors:
            raise ValueError(
                f"n_elites must be in [1, n_survivors={self.n_survivors}], got {self.n_elites}"
            )
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be >= 1, got {self.max_generations}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not self.fitness_tol > 0:
            raise ValueError(f"fitness_tol must be > 0, got {self.fitness_tol}")
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(
                f"selection_mode must be one of {SELECTION_MODES}, got {self.selection_mode!r}"
            )
        if self.stall_generations is not None and self.stall_generations < 1:
            raise ValueError("stall_generations must be >= 1 or None")


@dataclass
class Individual:
    """One candidate phase vector with an optional cached fitness."""

    genome: PhaseConfig
    fitness: float | None = None


@dataclass(frozen=True, eq=False)
class OptResult:
    """Outcome of a phase optimization run.

    `best_fitness_history` records the per-generation minimum fitness;
    with elitism it is non-increasing and its last entry is the
    reciprocal of `best_sum_rate`.  Baseline searches report a
    single-entry history and zero generations.
    """

    best_theta: PhaseConfig
    best_sum_rate: float
    best_fitness_history: np.ndarray
    generations_used: int
    evaluations: int
    mean_sum_rate: float | None = None


def fitness(theta: PhaseConfig, params: SystemParams) -> float:
    """Reciprocal approximate sum rate; lower is better."""
    total = approx_rates(params, theta).sum
    if total <= 0.0:
        raise DegenerateObjectiveError("sum rate is zero (all transmit powers zero?)")
    return 1.0 / total


def _evaluate_missing(pop: list[Individual], params: SystemParams) -> int:
    """Fill missing fitness values via one batched evaluation; returns the count."""
    missing = [ind for ind in pop if ind.fitness is None]
    if not missing:
        return 0
    thetas = np.stack([ind.genome.theta for ind in missing])
    sums = rate_model(params).sum_rates(thetas)
    if np.any(sums <= 0.0):
        raise DegenerateObjectiveError("sum rate is zero (all transmit powers zero?)")
    for ind, total in zip(missing, sums):
        ind.fitness = 1.0 / float(total)
    return len(missing)


def init_population(
    ga: GaConfig, domain: PhaseDomain, L: int, rng: Generator
) -> list[Individual]:
    """n_total individuals with i.i.d. uniform genes over the domain."""
    genes = domain.sample_genes(ga.n_total, L, rng)
    return [Individual(domain.to_config(g)) for g in genes]


def evaluate_and_sort(pop: list[Individual], params: SystemParams) -> list[Individual]:
    """Compute missing fitness values and sort best (lowest fitness) first.

    The sort is stable, so equal-fitness individuals keep their prior
    relative order.
    """
    _evaluate_missing(pop, params)
    return sorted(pop, key=lambda ind: ind.fitness)


@lru_cache(maxsize=32)
def _selection_cdf(n: int, mode: str) -> np.ndarray:
    if mode == "rank_linear":
        weights = np.arange(n, 0, -1, dtype=np.float64)
        cdf = np.cumsum(weights) / weights.sum()
    elif mode == "uniform":
        cdf = np.arange(1, n + 1, dtype=np.float64) / n
    else:
        raise ValueError(f"selection_mode must be one of {SELECTION_MODES}, got {mode!r}")
    cdf[-1] = 1.0
    cdf.setflags(write=False)
    return cdf


def select(
    sorted_pop: list[Individual], rng: Generator, mode: str = "rank_linear"
) -> Individual:
    """Pick one parent from a best-first-sorted population.

    rank_linear weights sorted rank r (1 = best) proportionally to
    n - r + 1; uniform uses the flat cumulative vector [1/n, ..., 1].
    In both cases the returned rank is the first whose cumulative weight
    reaches a uniform draw c in [0, 1).
    """
    if not sorted_pop:
        raise ValueError("cannot select from an empty population")
    cdf = _selection_cdf(len(sorted_pop), mode)
    return sorted_pop[int(np.searchsorted(cdf, rng.random(), side="left"))]


def crossover(
    parent_a: Individual, parent_b: Individual, rng: Generator
) -> tuple[Individual, Individual]:
    """Single-point crossover with the cut drawn uniformly from {1, ..., L-1}.

    Child 1 takes genes [0, cut) from parent a and the rest from parent
    b; child 2 is the mirror.  For L == 1 crossover is degenerate and the
    children are copies of the parents.  Children carry no cached fitness.
    """
    cfg_a, cfg_b = parent_a.genome, parent_b.genome
    if cfg_a.bits != cfg_b.bits or cfg_a.L != cfg_b.L:
        raise ValueError("parents must share genome length and phase domain")
    if cfg_a.L == 1:
        return Individual(cfg_a), Individual(cfg_b)
    domain = domain_of(cfg_a)
    g_a, g_b = domain.genes_of(cfg_a), domain.genes_of(cfg_b)
    cut = int(rng.integers(1, cfg_a.L))
    child_1 = np.concatenate([g_a[:cut], g_b[cut:]])
    child_2 = np.concatenate([g_b[:cut], g_a[cut:]])
    return Individual(domain.to_config(child_1)), Individual(domain.to_config(child_2))


def mutate(
    pop: list[Individual],
    mutation_rate: float,
    domain: PhaseDomain,
    n_elites: int,
    rng: Generator,
) -> list[Individual]:
    """Gene-wise uniform resampling with probability `mutation_rate`.

    The first `n_elites` individuals pass through untouched.  Individuals
    whose genome actually changed lose their cached fitness; untouched
    ones keep it.  The mutation mask is drawn before the replacement
    genes, in population order, so runs are reproducible.
    """
    out = list(pop[:n_elites])
    rest = pop[n_elites:]
    if not rest:
        return out
    L = rest[0].genome.L
    mask = rng.random((len(rest), L)) < mutation_rate
    replacement = domain.sample_genes(len(rest), L, rng)
    for ind, row_mask, row_repl in zip(rest, mask, replacement):
        if row_mask.any():
            genes = np.where(row_mask, row_repl, domain.genes_of(ind.genome))
            out.append(Individual(domain.to_config(genes)))
        else:
            out.append(ind)
    return out


def ga_optimize(
    params: SystemParams, ga: GaConfig, domain: PhaseDomain, rng: Generator
) -> OptResult:
    """Generational GA minimizing reciprocal sum rate over phase vectors.

    Loop per generation: evaluate and sort; record the generation's
    minimum fitness; stop on the fitness threshold, the generation cap,
    or the optional stall detector; otherwise breed n_children via
    selection + crossover, keep the best n_survivors, and mutate all
    non-elites.  Elitism guarantees the recorded history never increases
    and that the best individual found is in the final generation.
    """
    history: list[float] = []
    evaluations = 0
    pop = init_population(ga, domain, params.L, rng)
    best_seen = np.inf
    stalled = 0
    for generation in range(1, ga.max_generations + 1):
        evaluations += _evaluate_missing(pop, params)
        pop.sort(key=lambda ind: ind.fitness)
        f_min = pop[0].fitness
        history.append(f_min)
        if f_min <= best_seen - ga.stall_improvement:
            best_seen = f_min
            stalled = 0
        else:
            stalled += 1
        if f_min <= ga.fitness_tol:
            break
        if ga.stall_generations is not None and stalled >= ga.stall_generations:
            break
        if generation == ga.max_generations:
            break
        children: list[Individual] = []
        while len(children) < ga.n_children:
            parent_a = select(pop, rng, ga.selection_mode)
            parent_b = select(pop, rng, ga.selection_mode)
            child_1, child_2 = crossover(parent_a, parent_b, rng)
            children.append(child_1)
            if len(children) < ga.n_children:
                children.append(child_2)
        pop = pop[: ga.n_survivors] + children
        pop = mutate(pop, ga.mutation_rate, domain, ga.n_elites, rng)
    hist = np.array(history)
    hist.setflags(write=False)
    return OptResult(
        best_theta=pop[0].genome,
        best_sum_rate=1.0 / hist[-1],
        best_fitness_history=hist,
        generations_used=len(history),
        evaluations=evaluations,
    )


def exhaustive_search(
    params: SystemParams,
    B: int,
    cap: int = DEFAULT_SEARCH_CAP,
    chunk: int = 16384,
) -> OptResult:
    """Evaluate the closed-form sum rate on the full (2**B)**L phase grid.

    Candidates are enumerated with gene 0 as the most significant digit
    and ties resolved toward the lowest candidate index.
    """
    if not 1 <= B <= 16:
        raise ValueError(f"B must be in [1, 16], got {B}")
    L = params.L
    n = 1 << (B * L)
    if n > cap:
        raise InfeasibleSearchError(
            f"grid has 2^{B * L} = {n} candidates; requires cap >= {n} (cap is {cap})"
        )
    if B * L > 40:
        raise InfeasibleSearchError(f"grid of 2^{B * L} candidates is unenumerable")
    model = rate_model(params)
    q = 1 << B
    step = TWO_PI / q
    place = q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    best_sum = -np.inf
    best_levels = None
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n), dtype=np.int64)
        levels = (idx[:, None] // place[None, :]) % q
        sums = model.sum_rates(levels * step)
        k = int(np.argmax(sums))
        if sums[k] > best_sum:
            best_sum = float(sums[k])
            best_levels = levels[k]
    theta = PhaseConfig.from_levels(best_levels, B)
    return OptResult(
        best_theta=theta,
        best_sum_rate=best_sum,
        best_fitness_history=np.array([1.0 / best_sum]),
        generations_used=0,
        evaluations=n,
    )


def random_search(
    params: SystemParams, domain: PhaseDomain, draws: int, rng: Generator
) -> OptResult:
    """Best and mean closed-form sum rate over uniform random phase draws."""
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    genes = domain.sample_genes(draws, params.L, rng)
    sums = rate_model(params).sum_rates(domain.genes_to_theta(genes))
    k = int(np.argmax(sums))
    best = float(sums[k])
    return OptResult(
        best_theta=domain.to_config(genes[k]),
        best_sum_rate=best,
        best_fitness_history=np.array([1.0 / best]),
        generations_used=0,
        evaluations=draws,
        mean_sum_rate=float(sums.mean()),
    )


def quantize(theta: PhaseConfig, B: int) -> PhaseConfig:
    """Round each angle to the nearest 2**B-grid point.

    Wrap-around is respected (angles near 2*pi round to level 0) and
    exact midpoints round to the lower level.
    """
    if not 1 <= B <= 16:
        raise ValueError(f"B must be in [1, 16], got {B}")
    q = 1 << B
    x = theta.theta * (q / TWO_PI)
    levels = np.ceil(x - 0.5).astype(np.int64) % q
    return PhaseConfig.from_levels(levels, B)
