"""Optimizer: GA operators, full GA runs, baselines, quantization."""
import itertools
import math

import numpy as np
import pytest

from rispair import (
    ContinuousPhases,
    DegenerateObjectiveError,
    DiscretePhases,
    GaConfig,
    Individual,
    InfeasibleSearchError,
    OptResult,
    PhaseConfig,
    approx_rates,
    crossover,
    default_system,
    evaluate_and_sort,
    exhaustive_search,
    fitness,
    ga_optimize,
    init_population,
    mutate,
    quantize,
    random_search,
    select,
    substream,
)
from util import make_system

TWO_PI = 2.0 * np.pi


class FixedRng:
    """Stub generator returning preset values for select/crossover tests."""

    def __init__(self, random_value=0.5, integer_value=1):
        self.random_value = random_value
        self.integer_value = integer_value

    def random(self):
        return self.random_value

    def integers(self, low, high):
        assert low <= self.integer_value < high
        return self.integer_value


class TestFitness:
    def test_reciprocal_of_sum_rate(self):
        params = make_system(K=2, L=4)
        theta = PhaseConfig.continuous(np.zeros(4))
        assert fitness(theta, params) == pytest.approx(1.0 / approx_rates(params, theta).sum)

    def test_monotone_in_sum_rate(self):
        params = default_system(K=2, L=8, snr_db=20)
        rng = substream(1)
        thetas = [PhaseConfig.continuous(rng.uniform(0, TWO_PI, 8)) for _ in range(10)]
        pairs = [(approx_rates(params, t).sum, fitness(t, params)) for t in thetas]
        for (r1, f1), (r2, f2) in itertools.combinations(pairs, 2):
            if r1 > r2:
                assert f1 < f2

    def test_global_shift_invariance(self):
        params = make_system(K=2, L=8)
        theta = substream(2).uniform(0, TWO_PI, 8)
        f0 = fitness(PhaseConfig.continuous(theta), params)
        f1 = fitness(PhaseConfig.continuous(theta + 1.234), params)
        assert abs(f1 - f0) / f0 < 1e-12

    def test_degenerate_objective(self):
        params = make_system(K=2, L=4, power=0.0)
        with pytest.raises(DegenerateObjectiveError):
            fitness(PhaseConfig.continuous(np.zeros(4)), params)


class TestInitPopulation:
    def test_population_shape_and_domain(self):
        ga = GaConfig()
        pop = init_population(ga, ContinuousPhases(), 32, substream(3))
        assert len(pop) == 100
        for ind in pop:
            assert ind.fitness is None
            assert ind.genome.L == 32
            assert np.all((ind.genome.theta >= 0) & (ind.genome.theta < TWO_PI))

    def test_one_bit_grid(self):
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10)
        pop = init_population(ga, DiscretePhases(1), 8, substream(4))
        for ind in pop:
            assert set(np.unique(ind.genome.levels)) <= {0, 1}
            assert set(np.round(np.unique(ind.genome.theta), 12)) <= {0.0, round(np.pi, 12)}

    def test_deterministic(self):
        ga = GaConfig(n_total=10, n_survivors=5, n_children=5)
        a = init_population(ga, ContinuousPhases(), 6, substream(5))
        b = init_population(ga, ContinuousPhases(), 6, substream(5))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.genome.theta, y.genome.theta)


class TestEvaluateAndSort:
    def test_orders_by_cached_fitness(self):
        params = make_system(K=1, L=2)
        genome = PhaseConfig.continuous(np.zeros(2))
        pop = [
            Individual(genome, fitness=0.5),
            Individual(genome, fitness=0.2),
            Individual(genome, fitness=0.9),
        ]
        out = evaluate_and_sort(pop, params)
        assert [ind.fitness for ind in out] == [0.2, 0.5, 0.9]

    def test_stable_for_ties(self):
        params = make_system(K=1, L=2)
        genome = PhaseConfig.continuous(np.zeros(2))
        pop = [Individual(genome) for _ in range(4)]
        out = evaluate_and_sort(pop, params)
        assert out == pop  # identical genomes, order preserved

    def test_best_has_max_sum_rate(self):
        params = default_system(K=2, L=8)
        pop = init_population(GaConfig(n_total=20, n_survivors=10, n_children=10),
                              ContinuousPhases(), 8, substream(6))
        out = evaluate_and_sort(pop, params)
        sums = [approx_rates(params, ind.genome).sum for ind in out]
        assert sums[0] == max(sums)

    def test_propagates_degenerate(self):
        params = make_system(K=1, L=2, power=0.0)
        pop = [Individual(PhaseConfig.continuous(np.zeros(2)))]
        with pytest.raises(DegenerateObjectiveError):
            evaluate_and_sort(pop, params)


class TestSelect:
    def _pop(self, n):
        genome = PhaseConfig.continuous(np.zeros(2))
        return [Individual(genome, fitness=0.1 * (i + 1)) for i in range(n)]

    def test_rank_linear_midpoint(self):
        pop = self._pop(4)
        # cumulative weights [0.4, 0.7, 0.9, 1.0]: c=0.5 lands on rank 2
        assert select(pop, FixedRng(random_value=0.5)) is pop[1]

    def test_rank_linear_smallest_draw(self):
        pop = self._pop(4)
        assert select(pop, FixedRng(random_value=1e-12)) is pop[0]

    def test_uniform_mode(self):
        pop = self._pop(100)
        chosen = select(pop, FixedRng(random_value=0.505), mode="uniform")
        assert chosen is pop[50]  # rank 51

    def test_empty_population(self):
        with pytest.raises(ValueError):
            select([], substream(0))

    def test_rank_linear_distribution(self):
        pop = self._pop(4)
        rng = substream(7)
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            counts[pop.index(select(pop, rng))] += 1
        freqs = counts / n
        expected = np.array([0.4, 0.3, 0.2, 0.1])
        se = np.sqrt(expected * (1 - expected) / n)
        assert np.all(np.abs(freqs - expected) < 3 * se)


class TestCrossover:
    def test_forced_cut_point(self):
        a = Individual(PhaseConfig.continuous([0.1, 0.2, 0.3, 0.4]))
        b = Individual(PhaseConfig.continuous([1.1, 1.2, 1.3, 1.4]))
        c1, c2 = crossover(a, b, FixedRng(integer_value=2))
        np.testing.assert_allclose(c1.genome.theta, [0.1, 0.2, 1.3, 1.4])
        np.testing.assert_allclose(c2.genome.theta, [1.1, 1.2, 0.3, 0.4])
        assert c1.fitness is None and c2.fitness is None

    def test_identical_parents(self):
        genome = PhaseConfig.from_levels([0, 1, 2, 3], 2)
        c1, c2 = crossover(Individual(genome), Individual(genome), substream(8))
        np.testing.assert_array_equal(c1.genome.levels, genome.levels)
        np.testing.assert_array_equal(c2.genome.levels, genome.levels)

    def test_gene_conservation(self):
        rng = substream(9)
        a = Individual(PhaseConfig.continuous(rng.uniform(0, TWO_PI, 16)))
        b = Individual(PhaseConfig.continuous(rng.uniform(0, TWO_PI, 16)))
        for _ in range(20):
            c1, c2 = crossover(a, b, rng)
            for l in range(16):
                parents = {a.genome.theta[l], b.genome.theta[l]}
                children = {c1.genome.theta[l], c2.genome.theta[l]}
                assert children == parents

    def test_degenerate_length_one(self):
        a = Individual(PhaseConfig.continuous([0.5]))
        b = Individual(PhaseConfig.continuous([1.5]))
        c1, c2 = crossover(a, b, substream(10))
        assert c1.genome.theta[0] == a.genome.theta[0]
        assert c2.genome.theta[0] == b.genome.theta[0]

    def test_domain_mismatch(self):
        a = Individual(PhaseConfig.from_levels([0, 1], 1))
        b = Individual(PhaseConfig.from_levels([0, 1], 2))
        with pytest.raises(ValueError):
            crossover(a, b, substream(11))


class TestMutate:
    def _pop(self, rng, n=6, L=8):
        domain = ContinuousPhases()
        pop = [Individual(domain.to_config(g), fitness=float(i))
               for i, g in enumerate(domain.sample_genes(n, L, rng))]
        return pop, domain

    def test_zero_rate_no_change(self):
        pop, domain = self._pop(substream(12))
        out = mutate(pop, 0.0, domain, 1, substream(13))
        for before, after in zip(pop, out):
            assert after is before  # untouched objects keep cached fitness

    def test_full_rate_resamples_everything(self):
        pop, domain = self._pop(substream(14))
        out = mutate(pop, 1.0, domain, 0, substream(15))
        for before, after in zip(pop, out):
            assert after.fitness is None
            assert np.all(after.genome.theta != before.genome.theta)

    def test_elite_untouched(self):
        pop, domain = self._pop(substream(16))
        out = mutate(pop, 1.0, domain, 1, substream(17))
        assert out[0] is pop[0]
        np.testing.assert_array_equal(out[0].genome.theta, pop[0].genome.theta)

    def test_discrete_stays_on_grid(self):
        domain = DiscretePhases(2)
        rng = substream(18)
        pop = [Individual(domain.to_config(g)) for g in domain.sample_genes(6, 8, rng)]
        out = mutate(pop, 0.5, domain, 1, rng)
        for ind in out:
            assert np.all((ind.genome.levels >= 0) & (ind.genome.levels < 4))


class TestGaOptimize:
    def test_constant_objective_single_element(self):
        params = make_system(K=1, L=1)
        ga = GaConfig(n_total=10, n_survivors=5, n_children=5, max_generations=5)
        result = ga_optimize(params, ga, ContinuousPhases(), substream(19))
        reference = approx_rates(params, PhaseConfig.continuous([0.0])).sum
        assert result.best_sum_rate == pytest.approx(reference, rel=1e-12)

    def test_rayleigh_flat_history(self):
        params = make_system(K=2, L=8, kappa_tx=0.0, kappa_rx=0.0)
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10, max_generations=30)
        result = ga_optimize(params, ga, ContinuousPhases(), substream(20))
        assert result.best_fitness_history[0] == result.best_fitness_history[-1]

    def test_history_monotone_and_result_invariants(self):
        params = default_system(K=2, L=8, snr_db=20)
        ga = GaConfig(n_total=30, n_survivors=15, n_children=15, max_generations=80)
        result = ga_optimize(params, ga, DiscretePhases(2), substream(21))
        hist = result.best_fitness_history
        assert np.all(np.diff(hist) <= 0.0)
        assert result.best_sum_rate == pytest.approx(1.0 / hist[-1], rel=1e-12)
        assert result.generations_used == len(hist) == 80
        assert result.evaluations <= result.generations_used * ga.n_total

    def test_never_worse_than_initial_population(self):
        params = default_system(K=2, L=8, snr_db=20)
        ga = GaConfig(n_total=30, n_survivors=15, n_children=15, max_generations=40)
        result = ga_optimize(params, ga, ContinuousPhases(), substream(22))
        init = init_population(ga, ContinuousPhases(), 8, substream(22))
        best_init = max(approx_rates(params, ind.genome).sum for ind in init)
        assert result.best_sum_rate >= best_init

    def test_deterministic(self):
        params = default_system(K=2, L=8)
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10, max_generations=30)
        a = ga_optimize(params, ga, DiscretePhases(2), substream(23))
        b = ga_optimize(params, ga, DiscretePhases(2), substream(23))
        np.testing.assert_array_equal(a.best_fitness_history, b.best_fitness_history)
        np.testing.assert_array_equal(a.best_theta.levels, b.best_theta.levels)

    def test_near_exhaustive_small_instance(self):
        params = default_system(K=2, L=4, snr_db=20)
        optimum = exhaustive_search(params, 2).best_sum_rate
        ga = GaConfig(stall_generations=100)
        for seed in range(3):
            result = ga_optimize(params, ga, DiscretePhases(2), substream(24, seed))
            assert result.best_sum_rate >= 0.99 * optimum

    def test_uniform_selection_mode(self):
        params = default_system(K=2, L=8)
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10, max_generations=30,
                      selection_mode="uniform")
        result = ga_optimize(params, ga, DiscretePhases(2), substream(25))
        assert np.all(np.diff(result.best_fitness_history) <= 0.0)

    def test_stall_detector_stops_early(self):
        params = make_system(K=2, L=8, kappa_tx=0.0, kappa_rx=0.0)  # flat objective
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10,
                      max_generations=1000, stall_generations=50)
        result = ga_optimize(params, ga, ContinuousPhases(), substream(26))
        # generation 1 improves from +inf, then 50 stalled generations
        assert result.generations_used == 51

    def test_fitness_tol_termination(self):
        params = default_system(K=2, L=8, snr_db=20)
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10,
                      max_generations=100, fitness_tol=10.0)
        result = ga_optimize(params, ga, DiscretePhases(2), substream(27))
        assert result.generations_used == 1

    def test_discrete_result_on_grid(self):
        params = default_system(K=2, L=8)
        ga = GaConfig(n_total=20, n_survivors=10, n_children=10, max_generations=20)
        result = ga_optimize(params, ga, DiscretePhases(3), substream(28))
        assert result.best_theta.bits == 3
        assert np.all((result.best_theta.levels >= 0) & (result.best_theta.levels < 8))

    def test_population_size_conserved(self, monkeypatch):
        import rispair.optimize as opt

        sizes = []
        original = opt.mutate

        def recording_mutate(pop, rate, domain, n_elites, rng):
            sizes.append(len(pop))
            return original(pop, rate, domain, n_elites, rng)

        monkeypatch.setattr(opt, "mutate", recording_mutate)
        params = default_system(K=2, L=8)
        ga = GaConfig(n_total=25, n_survivors=13, n_children=12, max_generations=15)
        ga_optimize(params, ga, DiscretePhases(2), substream(33))
        assert sizes and all(s == 25 for s in sizes)


class TestGaConfigValidation:
    def test_population_split_must_add_up(self):
        with pytest.raises(ValueError, match="n_survivors"):
            GaConfig(n_total=100, n_survivors=60, n_children=50)

    def test_elite_bounds(self):
        with pytest.raises(ValueError):
            GaConfig(n_elites=0)
        with pytest.raises(ValueError):
            GaConfig(n_elites=51)

    def test_mutation_rate_bounds(self):
        with pytest.raises(ValueError):
            GaConfig(mutation_rate=1.5)

    def test_selection_mode_checked(self):
        with pytest.raises(ValueError):
            GaConfig(selection_mode="tournament")


class TestExhaustiveSearch:
    def test_enumeration_count(self):
        params = default_system(K=2, L=2, snr_db=20)
        result = exhaustive_search(params, 1)
        assert result.evaluations == 4

    def test_single_element_tie_break(self):
        params = default_system(K=1, L=1, snr_db=20)
        result = exhaustive_search(params, 3)
        assert result.best_theta.levels[0] == 0

    def test_matches_nested_loop_brute_force(self):
        params = default_system(K=2, L=4, snr_db=20)
        result = exhaustive_search(params, 2)
        best_rate, best_levels = -np.inf, None
        for levels in itertools.product(range(4), repeat=4):
            rate = approx_rates(params, PhaseConfig.from_levels(list(levels), 2)).sum
            if rate > best_rate:
                best_rate, best_levels = rate, levels
        assert tuple(result.best_theta.levels) == best_levels
        assert result.best_sum_rate == pytest.approx(best_rate, rel=1e-12)

    def test_infeasible_grid(self):
        params = default_system(K=2, L=16, snr_db=20)
        with pytest.raises(InfeasibleSearchError, match="cap"):
            exhaustive_search(params, 2)  # 2^32 candidates

    def test_cap_parameter(self):
        params = default_system(K=2, L=2, snr_db=20)
        with pytest.raises(InfeasibleSearchError):
            exhaustive_search(params, 2, cap=8)

    def test_result_invariants(self):
        params = default_system(K=2, L=3, snr_db=20)
        result = exhaustive_search(params, 2)
        assert result.generations_used == 0
        assert result.best_sum_rate == pytest.approx(
            1.0 / result.best_fitness_history[-1], rel=1e-12
        )


class TestRandomSearch:
    def test_single_draw(self):
        params = default_system(K=2, L=8)
        domain = ContinuousPhases()
        result = random_search(params, domain, 1, substream(29))
        genes = domain.sample_genes(1, 8, substream(29))
        expected = approx_rates(params, PhaseConfig.continuous(genes[0])).sum
        assert result.best_sum_rate == pytest.approx(expected, rel=1e-12)
        assert result.mean_sum_rate == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("domain", [ContinuousPhases(), DiscretePhases(2)])
    def test_prefix_extension_monotone(self, domain):
        params = default_system(K=2, L=8)
        values = [
            random_search(params, domain, draws, substream(30)).best_sum_rate
            for draws in (10, 25, 50)
        ]
        assert values[0] <= values[1] <= values[2]

    def test_rayleigh_mean_equals_best(self):
        params = make_system(K=2, L=8, kappa_tx=0.0, kappa_rx=0.0)
        result = random_search(params, ContinuousPhases(), 20, substream(31))
        assert result.mean_sum_rate == pytest.approx(result.best_sum_rate, rel=1e-12)

    def test_draw_count_validated(self):
        params = default_system(K=1, L=4)
        with pytest.raises(ValueError):
            random_search(params, ContinuousPhases(), 0, substream(0))


class TestQuantize:
    def test_zero_angle(self):
        for bits in (1, 4, 8):
            cfg = quantize(PhaseConfig.continuous(np.zeros(3)), bits)
            assert np.all(cfg.levels == 0)

    def test_pi_is_exact_grid_point(self):
        cfg = quantize(PhaseConfig.continuous([np.pi]), 2)
        assert cfg.levels[0] == 2
        assert cfg.theta[0] == pytest.approx(np.pi)

    def test_wraparound_to_level_zero(self):
        cfg = quantize(PhaseConfig.continuous([TWO_PI - 1e-6]), 1)
        assert cfg.levels[0] == 0

    def test_grid_round_trip(self):
        levels = np.arange(8, dtype=np.int64)
        cfg = PhaseConfig.from_levels(levels, 3)
        np.testing.assert_array_equal(quantize(cfg_to_continuous(cfg), 3).levels, levels)

    def test_nearest_grid_point(self):
        rng = substream(32)
        for bits in (1, 2, 4):
            q = 1 << bits
            theta = rng.uniform(0, TWO_PI, 64)
            cfg = quantize(PhaseConfig.continuous(theta), bits)
            grid = np.arange(q) * (TWO_PI / q)
            for ang, level in zip(theta, cfg.levels):
                dists = np.abs(np.angle(np.exp(1j * (grid - ang))))
                assert dists[level] <= dists.min() + 1e-12


def cfg_to_continuous(cfg: PhaseConfig) -> PhaseConfig:
    return PhaseConfig.continuous(cfg.theta)
