"""Registry of the analytic example checks.

Every worked example from the package's contracts lives here as one named
check: exact assertions for the closed-form cases, oracle-backed
assertions for the derived ones. Statistical run-and-record examples
verify against committed fixtures (see ``experiments.py``): the claims are
re-checked over the recorded per-seed data and a couple of seeds are
replayed bit-exactly. ``tools/make_fixtures.py`` regenerates everything.

``test_analytic.py`` parametrizes over the registry; the acceptance suite
runs it end to end under a timer.
"""

import json
import math
import tempfile
import threading
import time
from pathlib import Path

import numpy as np

import isleopt as io
from isleopt import cli as icli
from isleopt.algorithms import (de_mutant, harmony_bandwidth, harmony_pitch_rate,
                                metropolis_accept, nelder_mead_minimize, tournament_winner)
from isleopt.migration import (CONDITIONAL_WORST, UNCONDITIONAL_WORST, Mailbox,
                               MigrationParams, apply_immigrants, select_emigrants)
from isleopt.strategy import multistart_campaign, prune_bounds, pruning_cycles

import experiments as ex
import oracles

CHECKS = []


def check(name):
    def deco(fn):
        CHECKS.append((name, fn))
        return fn
    return deco


def quadratic_problem(dim=1, lo=-1.0, hi=1.0):
    return io.Problem("quadratic", io.Bounds(np.full(dim, lo), np.full(dim, hi)),
                      lambda x: float(np.sum(np.asarray(x) ** 2)))


def fitness_population(fitnesses, lo=0.0, hi=100.0):
    """Population over f(x)=x[0] with prescribed fitness values."""
    prob = io.Problem("linear", io.Bounds(np.array([lo]), np.array([hi])),
                      lambda x: float(x[0]))
    inds = [io.Individual(np.array([float(v)]), float(v)) for v in fitnesses]
    return io.Population(prob, inds)


def sleepy_problem(delay=0.002, dim=2):
    def f(x):
        time.sleep(delay)
        return float(np.sum(np.asarray(x) ** 2))
    return io.Problem("sleepy", io.Bounds(np.full(dim, -1.0), np.full(dim, 1.0)), f)


def expect_error(fn, kind=Exception):
    try:
        fn()
    except kind:
        return
    raise AssertionError(f"expected {kind.__name__}")


ANCHORS = None


def anchor(key):
    global ANCHORS
    if ANCHORS is None:
        ANCHORS = json.loads((ex.FIXTURE_DIR / "anchors.json").read_text())
    return ANCHORS[key]


# ===========================================================================
# core
# ===========================================================================

@check("core/evaluate/rosenbrock_at_ones")
def _():
    assert io.rosenbrock(2).evaluate([1.0, 1.0]) == 0.0


@check("core/evaluate/rastrigin_at_origin")
def _():
    assert io.rastrigin(2).evaluate([0.0, 0.0]) == 0.0


@check("core/evaluate/himmelblau_at_origin")
def _():
    assert io.himmelblau().evaluate([0.0, 0.0]) == 170.0


@check("core/random_individual/degenerate_box")
def _():
    prob = io.Problem("fixed", io.Bounds(np.array([0.0, 5.0]), np.array([0.0, 5.0])),
                      lambda x: float(x[0] + x[1]))
    for s in range(5):
        ind = io.random_individual(prob, io.make_rng(s))
        assert np.array_equal(ind.x, [0.0, 5.0])


@check("core/random_individual/seed_determinism")
def _():
    prob = io.Problem("unit", io.Bounds(np.zeros(2), np.ones(2)), lambda x: float(x[0]))
    a = io.random_individual(prob, io.make_rng(123))
    b = io.random_individual(prob, io.make_rng(123))
    assert np.array_equal(a.x, b.x) and a.f == b.f


@check("core/random_individual/uniform_mean")
def _():
    prob = io.Problem("unit1", io.Bounds(np.zeros(1), np.ones(1)), lambda x: float(x[0]))
    rng = io.make_rng(2024)
    draws = np.array([io.random_individual(prob, rng).x[0] for _ in range(10_000)])
    assert abs(draws.mean() - 0.5) < 0.02  # 3 sigma ~ 0.0087


@check("core/init_population/size_zero")
def _():
    pop = io.init_population(io.rastrigin(3), 0, seed=1)
    assert len(pop) == 0
    expect_error(lambda: pop.champion, ValueError)


@check("core/init_population/determinism")
def _():
    a = io.init_population(io.rastrigin(4), 20, seed=42)
    b = io.init_population(io.rastrigin(4), 20, seed=42)
    assert all(x == y for x, y in zip(a, b))


@check("core/init_population/in_bounds")
def _():
    prob = io.rastrigin(10)
    pop = io.init_population(prob, 20, seed=7)
    for ind in pop:
        assert prob.bounds.contains(ind.x)


@check("core/champion/minimum")
def _():
    assert fitness_population([3.0, 1.0, 2.0]).champion_index == 1


@check("core/champion/tie_lowest_index")
def _():
    assert fitness_population([1.0, 1.0]).champion_index == 0


@check("core/champion/singleton")
def _():
    pop = fitness_population([4.5])
    assert pop.champion is pop.individuals[0]


# ===========================================================================
# problems
# ===========================================================================

@check("problems/rastrigin/origin")
def _():
    assert io.rastrigin(2).evaluate([0.0, 0.0]) == 0.0


@check("problems/rastrigin/unit_point")
def _():
    assert abs(io.rastrigin(2).evaluate([1.0, 1.0]) - 2.0) < 1e-12


@check("problems/rastrigin/half_point")
def _():
    assert abs(io.rastrigin(1).evaluate([0.5]) - 20.25) < 1e-12


@check("problems/rosenbrock/ones")
def _():
    assert io.rosenbrock(5).evaluate([1.0] * 5) == 0.0


@check("problems/rosenbrock/origin_2d")
def _():
    assert io.rosenbrock(2).evaluate([0.0, 0.0]) == 1.0


@check("problems/rosenbrock/arithmetic_3d")
def _():
    assert abs(io.rosenbrock(3).evaluate([1.0, 2.0, 4.0]) - 101.0) < 1e-12


@check("problems/schwefel/origin")
def _():
    assert io.schwefel(2).evaluate([0.0, 0.0]) == 837.9657745448678


@check("problems/schwefel/grid_scan_minimizer")
def _():
    prob = io.schwefel(1)
    assert prob.evaluate([420.9687]) <= 1e-4
    x_star, f_star = oracles.schwefel_1d_minimum()
    assert abs(x_star - 420.9687) < 1e-3
    assert prob.evaluate([x_star]) <= prob.evaluate([420.9687]) + 1e-12


@check("problems/schwefel/mirrored_point")
def _():
    prob = io.schwefel(1)
    f_neg = prob.evaluate([-420.9687])
    # identity: f(-x) + f(x) = 2 * offset
    assert abs(f_neg - (2 * 418.9828872724339 - prob.evaluate([420.9687]))) < 1e-9
    assert abs(f_neg - 837.9659) < 1e-3


@check("problems/griewank/origin")
def _():
    assert io.griewank(6).evaluate([0.0] * 6) == 0.0


@check("problems/griewank/pi_1d")
def _():
    expected = np.pi**2 / 4000.0 + 2.0
    assert abs(io.griewank(1).evaluate([np.pi]) - expected) < 1e-12
    assert abs(expected - 2.002467) < 1e-6


@check("problems/griewank/edge_point_2d")
def _():
    got = io.griewank(2).evaluate([0.0, 600.0])
    expected = 90.0 - np.cos(600.0 / np.sqrt(2.0)) + 1.0
    assert abs(got - expected) < 1e-12


@check("problems/branin/first_minimizer")
def _():
    assert abs(io.branin().evaluate([np.pi, 2.275]) - 0.397887) <= 1e-6


@check("problems/branin/second_minimizer")
def _():
    assert abs(io.branin().evaluate([-np.pi, 12.275]) - 0.397887) <= 1e-6


@check("problems/branin/origin")
def _():
    got = io.branin().evaluate([0.0, 0.0])
    assert abs(got - 55.602113) <= 1e-6
    assert abs(got - oracles.branin_value(0.0, 0.0)) < 1e-12


@check("problems/himmelblau/known_zero")
def _():
    assert io.himmelblau().evaluate([3.0, 2.0]) == 0.0


@check("problems/himmelblau/origin")
def _():
    assert io.himmelblau().evaluate([0.0, 0.0]) == 170.0


@check("problems/himmelblau/refined_minimizer")
def _():
    from scipy.optimize import minimize
    start = np.array([-2.805118, 3.131312])
    assert io.himmelblau().evaluate(start) <= 1e-8
    res = minimize(lambda x: oracles.himmelblau_batch(x[None, :])[0], start,
                   method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    assert res.fun < 1e-12 and np.linalg.norm(res.x - start) < 1e-4


@check("problems/knapsack/all_fit")
def _():
    inst = io.KnapsackInstance([1.0, 1.0], [1.0, 1.0], 2.0)
    assert io.knapsack(inst).evaluate([1.0, 1.0]) == -2.0


@check("problems/knapsack/penalty")
def _():
    inst = io.KnapsackInstance([1.0, 1.0], [2.0, 2.0], 3.0)
    assert io.knapsack(inst).evaluate([1.0, 1.0]) == 1.0


@check("problems/knapsack/enumeration_matches_oracle")
def _():
    inst = ex.knapsack_instance(404)
    prob = io.knapsack(inst)
    m = inst.size
    bits = ((np.arange(2**m)[:, None] >> np.arange(m)) & 1).astype(float)
    best = min(prob.evaluate(row) for row in bits)
    oracle, _ = oracles.knapsack_bruteforce(inst.values, inst.weights, inst.capacity)
    assert abs(best - oracle) < 1e-9


# ===========================================================================
# algorithms
# ===========================================================================

@check("de/mutant_arithmetic")
def _():
    got = de_mutant(np.array([1.0, 1.0]), np.array([2.0, 0.0]), np.array([0.0, 0.0]), 0.8)
    assert np.allclose(got, [2.6, 1.0], rtol=0, atol=1e-12)


@check("de/cr1_trial_is_donor")
def _():
    # with cr=1 every trial must equal x_r1 + F (x_r2 - x_r3) for some
    # distinct partner triple; wide box so projection cannot mask it
    prob = io.Problem("wide", io.Bounds(np.full(2, -100.0), np.full(2, 100.0)),
                      lambda x: float(np.sum(np.asarray(x) ** 2)))
    pop = io.init_population(prob, 5, seed=3)
    seen = []
    probe = io.Problem("probe", prob.bounds,
                       lambda x: (seen.append(np.array(x)), float(np.sum(x**2)))[1])
    pop = io.Population(probe, list(pop.individuals))
    io.DifferentialEvolution(1, f=0.5, cr=1.0).evolve(pop, io.make_rng(9))
    xs = pop.vectors
    lo, hi = prob.bounds.lower, prob.bounds.upper
    f = 0.5
    for trial in seen:
        ok = any(
            np.array_equal(trial, np.clip(xs[r1] + f * (xs[r2] - xs[r3]), lo, hi))
            for r1 in range(5) for r2 in range(5) for r3 in range(5)
            if len({r1, r2, r3}) == 3)
        assert ok, f"trial {trial} is not a projected rand/1 donor"


@check("de/rosenbrock_run_fixture")
def _():
    fx = ex.load_fixture("de_rosenbrock10")
    for seed in (7, 0):
        i = fx["seeds"].index(seed)
        before, after = ex.run_de_rosenbrock(seed)
        assert before == fx["before"][i] and after == fx["after"][i]
    before = np.array(fx["before"])
    after = np.array(fx["after"])
    assert np.all(after <= before)
    assert np.sum(after < before) >= 99


@check("sa/greedy_in_cold_limit")
def _():
    rng = io.make_rng(1)
    assert not any(metropolis_accept(0.5, 1e-12, rng) for _ in range(1000))


@check("sa/zero_delta_always_accepted")
def _():
    rng = io.make_rng(2)
    assert all(metropolis_accept(0.0, 0.7, rng) for _ in range(1000))


@check("sa/acceptance_statistics")
def _():
    rng = io.make_rng(3)
    delta, temp, n = 0.3, 0.7, 100_000
    rate = sum(metropolis_accept(delta, temp, rng) for _ in range(n)) / n
    p = math.exp(-delta / temp)
    assert abs(rate - p) < 3.0 * math.sqrt(p * (1 - p) / n)


@check("sa/rastrigin_run_fixture")
def _():
    fx = ex.load_fixture("sa_rastrigin4")
    for seed in (0, 17):
        i = fx["seeds"].index(seed)
        sa, rs = ex.run_sa_rastrigin(seed)
        assert sa == fx["sa"][i] and rs == fx["random_search"][i]
    assert np.median(fx["sa"]) < np.median(fx["random_search"])


@check("pso/zero_coefficients_static")
def _():
    pop = io.init_population(io.griewank(3), 6, seed=11)
    out = io.ParticleSwarm(3, inertia=0.0, cognitive=0.0, social=0.0).evolve(
        pop, io.make_rng(1))
    assert all(a == b for a, b in zip(pop, out))


@check("pso/pure_inertia_from_rest")
def _():
    # x = pbest = gbest: update degenerates to v <- w v, which is zero from rest
    prob = quadratic_problem(2, -5, 5)
    ind = io.Individual(np.array([1.0, -2.0]), prob.evaluate([1.0, -2.0]))
    pop = io.Population(prob, [ind, ind])
    out = io.ParticleSwarm(4, inertia=0.6).evolve(pop, io.make_rng(5))
    assert all(np.array_equal(i.x, ind.x) for i in out)


@check("pso/griewank_run_fixture")
def _():
    fx = ex.load_fixture("pso_griewank10")
    i = fx["seeds"].index(3)
    initial, final = ex.run_pso_griewank(3)
    assert initial == fx["initial"][i] and final == fx["final"][i]
    assert np.median(fx["final"]) < 0.1 * np.median(fx["initial"])


@check("sga/identity_configuration")
def _():
    pop = io.init_population(io.rastrigin(3), 8, seed=21)
    out = io.SimpleGA(5, crossover_prob=0.0, mutation_prob=0.0,
                      elitism_count=8).evolve(pop, io.make_rng(1))
    assert all(a == b for a, b in zip(pop, out))


@check("sga/tournament_picks_best")
def _():
    f = np.array([1.0, 5.0])
    assert tournament_winner(f, np.array([0, 1])) == 0
    assert tournament_winner(f, np.array([1, 0])) == 0
    assert tournament_winner(np.array([2.0, 2.0]), np.array([1, 0])) == 1  # first listed


@check("sga/knapsack_run_fixture")
def _():
    fx = ex.load_fixture("sga_knapsack12")
    for seed in (0, 5):
        i = fx["seeds"].index(seed)
        optimum, got = ex.run_sga_knapsack(seed)
        assert optimum == fx["optimum"][i] and got == fx["sga"][i]
    optimum = np.array(fx["optimum"])
    got = np.array(fx["sga"])
    assert np.all(got >= optimum - 1e-9)  # never better than the oracle
    assert np.sum(np.abs(got - optimum) < 1e-9) >= 45


@check("ihs/memory_only_recombination")
def _():
    pop = io.init_population(io.rastrigin(3), 5, seed=31)
    algo = io.HarmonySearch(40, hmcr=1 - 1e-12, par_min=1e-9, par_max=2e-9)
    out = algo.evolve(pop, io.make_rng(8))
    columns = pop.vectors
    for ind in out:
        for j, v in enumerate(ind.x):
            assert v in columns[:, j], "harmony coordinate not drawn from memory"


@check("ihs/bandwidth_schedule_endpoints")
def _():
    assert harmony_bandwidth(0, 100, 1e-5, 1.0) == 1.0
    assert abs(harmony_bandwidth(100, 100, 1e-5, 1.0) - 1e-5) < 1e-17
    assert harmony_pitch_rate(0, 100, 0.35, 0.99) == 0.35
    assert harmony_pitch_rate(100, 100, 0.35, 0.99) == 0.99


@check("ihs/rastrigin_run_fixture")
def _():
    fx = ex.load_fixture("ihs_rastrigin5")
    i = fx["seeds"].index(1)
    got, rs = ex.run_ihs_rastrigin(1)
    assert got == fx["ihs"][i] and rs == fx["random_search"][i]
    med = np.median(fx["ihs"])
    assert med < 1.0
    assert np.median(fx["random_search"]) >= 10.0 * med


@check("compass/stationary_at_minimum")
def _():
    prob = quadratic_problem(3)
    start = io.Individual(np.zeros(3), prob.evaluate(np.zeros(3)))
    pop = io.Population(prob, [start])
    out = io.CompassSearch(5000, 0.3, 1e-4, 0.5).evolve(pop, None)
    assert np.array_equal(out.champion.x, np.zeros(3)) and out.champion.f == 0.0


@check("compass/first_improving_poll")
def _():
    prob = quadratic_problem(1)
    pop = io.Population(prob, [io.Individual(np.array([0.5]), prob.evaluate([0.5]))])
    view = prob.localized()
    pop = io.Population(view, list(pop.individuals))
    out = io.CompassSearch(2, start_step=0.3, stop_step=1e-4, reduction=0.5).evolve(pop, None)
    # poll +: 0.5 + 0.6 -> projected to 1.0, rejected; poll -: -0.1 accepted
    assert view.local_evaluations == 2
    assert abs(out.champion.x[0] - (-0.1)) < 1e-12
    assert abs(out.champion.f - 0.01) < 1e-12


@check("compass/rosenbrock_regression_anchor")
def _():
    prob = io.rosenbrock(2)
    start = np.array([-1.2, 1.0])
    pop = io.Population(prob, [io.Individual(start, prob.evaluate(start))])
    out = io.CompassSearch(100_000).evolve(pop, None)
    assert out.champion.f < 1e-2
    assert out.champion.f == anchor("compass_rosenbrock2_f")


@check("nm/quadratic_1d_convergence")
def _():
    prob = io.Problem("q", io.Bounds(np.array([0.0]), np.array([5.0])),
                      lambda x: (float(x[0]) - 2.0) ** 2)
    x, f = nelder_mead_minimize(prob, np.array([0.0]), 200, 1e-9)
    assert abs(x[0] - 2.0) < 1e-4
    assert f == anchor("nm_quadratic1d_f")


@check("nm/reflection_step")
def _():
    prob = quadratic_problem(2, -6.0, 6.0)
    simplex = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    x, f = nelder_mead_minimize(prob, None, 1, tol=1e-15, initial_simplex=simplex)
    assert f == 0.0 and np.array_equal(x, [0.0, 0.0])


@check("nm/start_at_minimizer")
def _():
    prob = quadratic_problem(2)
    pop = io.Population(prob, [io.Individual(np.zeros(2), 0.0)])
    out = io.NelderMead(50, 1e-10).evolve(pop, None)
    assert out.champion.f <= 0.0


@check("mbh/single_trial_when_stop_after_1")
def _():
    # starting at the global minimum no trial can improve, so the
    # non-improvement counter fires after exactly one perturbation
    prob = io.rastrigin(2).localized()
    pop = io.Population(prob, [io.Individual(np.zeros(2), 0.0)])
    base = prob.local_evaluations
    out = io.BasinHopping(io.Identity(), stop_after=1, perturbation=0.05).evolve(
        pop, io.make_rng(6))
    assert prob.local_evaluations - base == 1  # exactly one perturbed point
    assert out.champion.f <= pop.champion.f


@check("mbh/zero_perturbation_terminates")
def _():
    prob = io.rastrigin(2).localized()
    pop = io.init_population(prob, 1, seed=6)
    base = prob.local_evaluations
    out = io.BasinHopping(io.Identity(), stop_after=3, perturbation=0.0).evolve(
        pop, io.make_rng(7))
    assert prob.local_evaluations - base == 3  # stop_after identical trials
    assert out.champion == pop.champion


@check("mbh/rastrigin_run_fixture")
def _():
    fx = ex.load_fixture("mbh_rastrigin2")
    for seed in (0, 9):
        i = fx["seeds"].index(seed)
        assert ex.run_mbh_rastrigin(seed) == fx["final"][i]
    assert np.sum(np.array(fx["final"]) < 1e-6) >= 27


@check("mc/zero_budget_is_noop")
def _():
    pop = io.init_population(io.rastrigin(3), 5, seed=8)
    out = io.MonteCarlo(0).evolve(pop, io.make_rng(9))
    assert all(a == b for a, b in zip(pop, out))


@check("mc/knapsack4_finds_optimum")
def _():
    inst = ex.knapsack_instance(77, m=4)
    optimum, _ = oracles.knapsack_bruteforce(inst.values, inst.weights, inst.capacity)
    prob = io.knapsack(inst)
    pop = io.init_population(prob, 3, seed=1)
    out = io.MonteCarlo(1000).evolve(pop, io.make_rng(2))
    assert abs(out.champion.f - optimum) < 1e-12  # miss probability (15/16)^1000


@check("mc/champion_monotone_across_calls")
def _():
    pop = io.init_population(io.rastrigin(4), 4, seed=10)
    rng = io.make_rng(11)
    algo = io.MonteCarlo(50)
    f_prev = pop.champion.f
    for _ in range(5):
        pop = algo.evolve(pop, rng)
        assert pop.champion.f <= f_prev
        f_prev = pop.champion.f


@check("multistart/starts1_equals_single_inner_run")
def _():
    prob = io.rosenbrock(3)
    rng_pop = io.make_rng(55)
    pop = io.Population(prob, [io.random_individual(prob, rng_pop) for _ in range(8)])
    ms_out = io.Multistart(io.DifferentialEvolution(10), starts=1).evolve(
        pop, io.make_rng(55))
    rng_ref = io.make_rng(55)
    ref_pop = io.Population(prob, [io.random_individual(prob, rng_ref) for _ in range(8)])
    ref_out = io.DifferentialEvolution(10).evolve(ref_pop, rng_ref)
    assert ms_out.champion == ref_out.champion
    expected = ref_out.copy()
    expected.individuals[expected.worst_index] = ref_out.champion
    assert all(a == b for a, b in zip(ms_out, expected))


@check("multistart/identity_inner_is_random_search")
def _():
    prob = io.griewank(4)
    bad = io.Individual(prob.bounds.upper, prob.evaluate(prob.bounds.upper))
    pop = io.Population(prob, [bad] * 6)
    out = io.Multistart(io.Identity(), starts=3).evolve(pop, io.make_rng(77))
    rng = io.make_rng(77)
    draws = [io.random_individual(prob, rng) for _ in range(18)]
    assert out.champion.f == min(d.f for d in draws)


@check("multistart/himmelblau_run_fixture")
def _():
    fx = ex.load_fixture("multistart_himmelblau")
    i = fx["seeds"].index(2)
    assert ex.run_multistart_himmelblau(2) == fx["found"][i]
    assert sum(len(found) >= 3 for found in fx["found"]) >= 18


# ===========================================================================
# topology
# ===========================================================================

@check("topology/ring/n4")
def _():
    t = io.ring(4)
    assert t.edge_count == 8
    assert all(len(t.neighbors_out(i)) == 2 for i in range(4))


@check("topology/ring/n1_and_n2")
def _():
    assert io.ring(1).edge_count == 0
    assert io.ring(2).edges == {(0, 1), (1, 0)}


@check("topology/fully_connected/counts")
def _():
    assert io.fully_connected(3).edge_count == 6
    assert io.fully_connected(1).edge_count == 0
    t = io.fully_connected(5)
    assert all(len(t.neighbors_out(i)) == 4 and len(t.neighbors_in(i)) == 4
               for i in range(5))


@check("topology/hypercube/cube8")
def _():
    t = io.hypercube(8)
    assert t.edge_count == 24
    assert all(len(t.neighbors_out(i)) == 3 for i in range(8))


@check("topology/hypercube/pair_and_truncation")
def _():
    assert io.hypercube(2).edges == {(0, 1), (1, 0)}
    t = io.hypercube(5)
    assert t.neighbors_out(4) == [0]


@check("topology/rim/n7")
def _():
    t = io.rim(7)
    assert t.edge_count == 24


@check("topology/rim/small")
def _():
    t3 = io.rim(3)
    assert t3.edge_count == 6 and t3.is_symmetric()
    assert io.rim(1).edge_count == 0


@check("topology/barabasi_albert/core_only")
def _():
    t = io.barabasi_albert(4, 3, seed=1)
    assert t.edge_count == 12  # complete graph on m+1 nodes


@check("topology/barabasi_albert/edge_count")
def _():
    t = io.barabasi_albert(10, 2, seed=5)
    assert t.edge_count == 34


@check("topology/barabasi_albert/heavy_tail")
def _():
    ratios = []
    for seed in range(100):
        t = io.barabasi_albert(200, 3, seed)
        deg = np.zeros(200)
        for a, _ in t.edges:
            deg[a] += 1
        ratios.append(deg.max() / np.median(deg))
    assert np.mean(ratios) >= 3.0


@check("topology/watts_strogatz/lattice")
def _():
    t = io.watts_strogatz(10, 4, 0.0, seed=1)
    assert all(len(t.neighbors_out(i)) == 4 for i in range(10))
    assert io.watts_strogatz(6, 2, 0.0, seed=2).edges == io.ring(6).edges


@check("topology/watts_strogatz/rewiring_preserves_count")
def _():
    t = io.watts_strogatz(100, 4, 1.0, seed=3)
    undirected = {tuple(sorted(e)) for e in t.edges}
    assert len(undirected) == 200
    assert t.is_symmetric()


@check("topology/erdos_renyi/extremes")
def _():
    assert io.erdos_renyi(6, 1.0, seed=1).edge_count == 30
    assert io.erdos_renyi(6, 0.0, seed=1).edge_count == 0


@check("topology/erdos_renyi/mean_edge_count")
def _():
    counts = [len({tuple(sorted(e)) for e in io.erdos_renyi(100, 0.1, s).edges})
              for s in range(100)]
    sigma = math.sqrt(4950 * 0.1 * 0.9)
    assert abs(np.mean(counts) - 495.0) < 3.0 * sigma / math.sqrt(100)


@check("topology/custom/build")
def _():
    t = io.custom()
    for _ in range(3):
        t.add_node()
    t.add_edge(0, 1)
    assert t.n == 3 and t.edge_count == 1


@check("topology/custom/self_loop_rejected")
def _():
    t = io.custom(2)
    expect_error(lambda: t.add_edge(0, 0), ValueError)


@check("topology/custom/duplicate_edge_idempotent")
def _():
    t = io.custom(2)
    t.add_edge(0, 1)
    t.add_edge(0, 1)
    assert t.edge_count == 1


@check("topology/neighbors_out/examples")
def _():
    assert io.ring(4).neighbors_out(0) == [1, 3]
    assert io.fully_connected(3).neighbors_out(1) == [0, 2]
    assert io.custom(3).neighbors_out(2) == []


# ===========================================================================
# migration
# ===========================================================================

@check("migration/select/best_one")
def _():
    out = select_emigrants(fitness_population([3.0, 1.0, 2.0]), rate=1)
    assert len(out) == 1 and out[0].f == 1.0


@check("migration/select/clamped_and_sorted")
def _():
    out = select_emigrants(fitness_population([3.0, 1.0, 2.0]), rate=5)
    assert [i.f for i in out] == [1.0, 2.0, 3.0]
    assert select_emigrants(fitness_population([1.0]), rate=0) == []


@check("migration/apply/conditional_improves")
def _():
    pop = fitness_population([1.0, 5.0, 9.0])
    incoming = [io.Individual(np.array([7.0]), 7.0)]
    out = apply_immigrants(pop, incoming, CONDITIONAL_WORST, 1.0, io.make_rng(1))
    assert sorted(i.f for i in out) == [1.0, 5.0, 7.0]


@check("migration/apply/conditional_rejects")
def _():
    pop = fitness_population([1.0, 5.0, 9.0])
    incoming = [io.Individual(np.array([12.0]), 12.0)]
    out = apply_immigrants(pop, incoming, CONDITIONAL_WORST, 1.0, io.make_rng(1))
    assert [i.f for i in out] == [1.0, 5.0, 9.0]


@check("migration/apply/unconditional_replaces")
def _():
    pop = fitness_population([1.0, 5.0, 9.0])
    incoming = [io.Individual(np.array([12.0]), 12.0)]
    out = apply_immigrants(pop, incoming, UNCONDITIONAL_WORST, 1.0, io.make_rng(1))
    assert sorted(i.f for i in out) == [1.0, 5.0, 12.0]


@check("migration/mailbox/latest_batch_wins")
def _():
    box = Mailbox()
    x1 = io.Individual(np.array([1.0]), 1.0)
    x2 = io.Individual(np.array([2.0]), 2.0)
    box.post(0, [x1])
    box.post(0, [x2])
    drained = box.drain()
    assert len(drained) == 1 and drained[0][1] == [x2]


@check("migration/mailbox/two_sources")
def _():
    box = Mailbox()
    box.post(1, [io.Individual(np.array([1.0]), 1.0)])
    box.post(0, [io.Individual(np.array([2.0]), 2.0)])
    drained = box.drain()
    assert [src for src, _ in drained] == [0, 1]


@check("migration/mailbox/empty_batch_entry")
def _():
    box = Mailbox()
    box.post(3, [])
    assert box.drain() == [(3, [])]


@check("migration/drain/empty_and_twice")
def _():
    box = Mailbox()
    assert box.drain() == []
    box.post(0, [])
    box.drain()
    assert box.drain() == []


@check("migration/mailbox/concurrent_post_drain")
def _():
    box = Mailbox()
    seen = []
    stop = threading.Event()

    def drainer():
        while not stop.is_set():
            seen.extend(box.drain())
        seen.extend(box.drain())

    def poster(src):
        for k in range(500):
            box.post(src, [io.Individual(np.array([float(k)]), float(k))])

    d = threading.Thread(target=drainer)
    posters = [threading.Thread(target=poster, args=(s,)) for s in range(4)]
    d.start()
    for p in posters:
        p.start()
    for p in posters:
        p.join()
    stop.set()
    d.join()
    # never lost (last batch per source observed), never duplicated (sequence
    # numbers strictly increase per source)
    per_src = {}
    for src, batch in seen:
        k = batch[0].f
        assert k > per_src.get(src, -1.0), "duplicate or reordered batch"
        per_src[src] = k
    assert per_src == {0: 499.0, 1: 499.0, 2: 499.0, 3: 499.0}


# ===========================================================================
# archipelago
# ===========================================================================

@check("archipelago/push_back/assigns_indices")
def _():
    prob = io.rastrigin(3)
    a = io.Archipelago(seed=1)
    a.push_back(io.Island(prob, io.MonteCarlo(5), 3))
    assert len(a) == 1 and a.islands[0].index == 0
    a.push_back(io.Island(prob, io.MonteCarlo(5), 3))
    assert a.islands[1].index == 1


@check("archipelago/push_back/rejected_while_evolving")
def _():
    prob = sleepy_problem(0.01)
    a = io.Archipelago(seed=1)
    a.push_back(io.Island(prob, io.MonteCarlo(20), 2))
    a.evolve(1)
    try:
        expect_error(lambda: a.push_back(io.Island(prob, io.MonteCarlo(5), 2)),
                     RuntimeError)
        expect_error(lambda: a.best(), RuntimeError)
        expect_error(lambda: a.evolve(1), RuntimeError)
    finally:
        a.join()


@check("archipelago/push_back/problem_mismatch")
def _():
    a = io.Archipelago(seed=1)
    a.push_back(io.Island(io.rastrigin(3), io.MonteCarlo(5), 2))
    expect_error(lambda: a.push_back(io.Island(io.rastrigin(4), io.MonteCarlo(5), 2)),
                 ValueError)


@check("archipelago/evolve/zero_iterations_applies_inbox")
def _():
    prob = io.rastrigin(2)
    # lockstep so the cycle-1 posts are guaranteed still in flight at join
    a = io.Archipelago(topology=io.fully_connected, seed=3, lockstep=True)
    a.push_back(io.Island(prob, io.Identity(), 4))
    a.push_back(io.Island(prob, io.Identity(), 4))
    a.evolve(1)
    a.join()  # emigrants posted at end of cycle 1 are still in flight
    before = [list(isl.population.individuals) for isl in a.islands]
    a.evolve(0)
    a.join()
    for isl, prev in zip(a.islands, before):
        best_incoming = min(i.f for i in before[1 - isl.index])
        worst_prev = max(i.f for i in prev)
        got = sorted(i.f for i in isl.population.individuals)
        expected = sorted(i.f for i in prev)
        if best_incoming < worst_prev:
            expected.remove(worst_prev)
            expected.append(best_incoming)
            expected.sort()
        assert got == expected
        assert isl.iterations_done == 1  # the zero-iteration pass ran no algorithm


@check("archipelago/evolve/single_island_matches_sequential")
def _():
    prob = io.rosenbrock(4)
    algo = io.DifferentialEvolution(5, 0.8, 0.9)
    a = io.Archipelago(topology=io.edgeless, seed=9)
    a.push_back(io.Island(prob, algo, 10, seed=1234))
    a.evolve(4)
    a.join()
    ref = io.init_population(io.rosenbrock(4), 10, seed=io.derive_seed(1234, 0))
    rng = io.make_rng(io.derive_seed(1234, 1))
    for _ in range(4):
        ref = algo.evolve(ref, rng)
    assert all(x == y for x, y in zip(a.islands[0].population, ref))


@check("archipelago/join/idempotent_and_counts")
def _():
    prob = io.rastrigin(2)
    a = io.Archipelago(seed=2)
    a.join()  # joining an idle archipelago returns immediately
    a.push_back(io.Island(prob, io.MonteCarlo(10), 3))
    a.evolve(3)
    a.join()
    assert a.status == "idle"
    assert all(isl.iterations_done == 3 for isl in a.islands)


@check("archipelago/join/two_rounds_equal_continuous_run")
def _():
    def build():
        a = io.Archipelago(topology=io.edgeless, seed=4)
        a.push_back(io.Island(io.rastrigin(3), io.DifferentialEvolution(4), 8, seed=77))
        return a

    a = build()
    a.evolve(3)
    a.join()
    a.evolve(3)
    a.join()
    b = build()
    b.evolve(6)
    b.join()
    assert all(x == y for x, y in zip(a.islands[0].population, b.islands[0].population))


@check("archipelago/best/across_islands")
def _():
    prob = io.Problem("lin", io.Bounds(np.array([0.0]), np.array([10.0])),
                      lambda x: float(x[0]))
    a = io.Archipelago(seed=5)
    for f in (2.0, 1.0, 3.0):
        ind = io.Individual(np.array([f]), f)
        a.push_back(io.Island(prob, io.Identity(),
                              population=io.Population(prob, [ind])))
    assert a.best().f == 1.0
    b = io.Archipelago(seed=6)
    b.push_back(io.Island(prob, io.Identity(),
                          population=io.Population(prob, [io.Individual(np.array([4.0]), 4.0)])))
    assert b.best().f == 4.0


@check("archipelago/reset/deterministic_and_clears")
def _():
    prob = io.rastrigin(3)
    a = io.Archipelago(topology=io.fully_connected, seed=7)
    for size in (1, 20, 1):
        a.push_back(io.Island(prob, io.MonteCarlo(5), size))
    a.evolve(2)
    a.join()
    a.reset(99)
    pops1 = [[(ind.x.tolist(), ind.f) for ind in isl.population] for isl in a.islands]
    assert [len(isl.population) for isl in a.islands] == [1, 20, 1]
    assert all(len(box) == 0 for box in a._mailboxes)
    a.reset(99)
    pops2 = [[(ind.x.tolist(), ind.f) for ind in isl.population] for isl in a.islands]
    assert pops1 == pops2


@check("archipelago/snapshot/idle_and_empty")
def _():
    assert io.Archipelago(seed=1).snapshot() == []
    prob = io.rastrigin(2)
    a = io.Archipelago(seed=2)
    a.push_back(io.Island(prob, io.MonteCarlo(5), 3))
    snap = a.snapshot()[0]
    assert snap.champion_f == a.islands[0].population.champion.f
    assert snap.iterations == 0


@check("archipelago/snapshot/monotone_during_evolution")
def _():
    prob = sleepy_problem(0.001, dim=2)
    a = io.Archipelago(topology=io.ring, seed=8)
    for _ in range(2):
        a.push_back(io.Island(prob, io.MonteCarlo(30), 4))
    a.evolve(4)
    seen = []
    while a.status == "evolving" and all(t.is_alive() for t in a._threads):
        seen.append(a.snapshot())
        time.sleep(0.01)
        if len(seen) > 300:
            break
    a.join()
    final = a.snapshot()
    for snap in seen:
        for s, fin in zip(snap, final):
            if s.champion_f is not None:
                assert s.champion_f >= fin.champion_f


# ===========================================================================
# strategy
# ===========================================================================

def _tiny_archipelago(problem, seed=0):
    a = io.Archipelago(topology=io.ring, seed=seed)
    for _ in range(3):
        a.push_back(io.Island(problem, io.DifferentialEvolution(5, 0.8, 0.9), 10))
    return a


@check("strategy/campaign/single_and_empty")
def _():
    a = _tiny_archipelago(io.rastrigin(3))
    archive = multistart_campaign(a, runs=1, iterations_per_run=1, seed=3)
    assert len(archive) == 1
    assert archive.entries[0].f == a.best().f
    archive0 = multistart_campaign(a, runs=0, iterations_per_run=1, seed=3)
    assert len(archive0) == 0


@check("strategy/campaign/order_statistics")
def _():
    a = _tiny_archipelago(io.rastrigin(5))
    archive = multistart_campaign(a, runs=20, iterations_per_run=1, seed=11)
    fs = [e.f for e in archive.entries]
    assert min(fs) <= np.median(fs)


@check("strategy/prune/degenerate_single_entry")
def _():
    archive = io.ChampionArchive(io.rastrigin(3))
    x = np.array([0.5, -1.0, 2.0])
    archive.add(io.Individual(x, io.rastrigin(3).evaluate(x)), 0)
    b = prune_bounds(archive, keep_fraction=1.0, padding=0.0)
    assert np.array_equal(b.lower, x) and np.array_equal(b.upper, x)


@check("strategy/prune/clamped_to_original")
def _():
    prob = io.rastrigin(3)
    archive = io.ChampionArchive(prob)
    rng = io.make_rng(1)
    for k in range(10):
        ind = io.random_individual(prob, rng)
        archive.add(ind, k)
    b = prune_bounds(archive, keep_fraction=1.0, padding=100.0)
    assert np.array_equal(b.lower, prob.bounds.lower)
    assert np.array_equal(b.upper, prob.bounds.upper)


@check("strategy/prune/top_decile_box")
def _():
    prob = io.Problem("unit", io.Bounds(np.zeros(3), np.ones(3)),
                      lambda x: float(np.sum(x)))
    archive = io.ChampionArchive(prob)
    rng = io.make_rng(5)
    # best 10 entries clustered in [0.4, 0.6]^3 with fitness below the rest
    cluster = 0.4 + 0.2 * rng.random((10, 3))
    for k, x in enumerate(cluster):
        archive.add(io.Individual(x, -100.0 + k), k)
    for k in range(90):
        x = rng.random(3)
        archive.add(io.Individual(x, float(k)), 10 + k)
    b = prune_bounds(archive, keep_fraction=0.1, padding=0.0)
    assert np.array_equal(b.lower, cluster.min(axis=0))
    assert np.array_equal(b.upper, cluster.max(axis=0))


@check("strategy/pruned_problem/identity_and_argmin")
def _():
    prob = io.rastrigin(4)
    same = io.pruned_problem(prob, prob.bounds)
    assert np.array_equal(same.bounds.lower, prob.bounds.lower)
    narrowed = io.pruned_problem(prob, io.Bounds(np.full(4, -0.5), np.full(4, 0.5)))
    assert narrowed.evaluate(np.zeros(4)) == 0.0  # global minimum retained
    expect_error(lambda: io.pruned_problem(prob, io.Bounds(np.full(4, -6.0), np.full(4, 0.0))),
                 ValueError)


@check("strategy/pruned_problem/narrow_box_beats_full_box_fixture")
def _():
    fx = ex.load_fixture("pruned_rastrigin5")
    i = fx["seeds"].index(4)
    pruned, full = ex.run_pruned_rastrigin_pair(4)
    assert pruned == fx["pruned"][i] and full == fx["full"][i]
    wins = sum(p < f for p, f in zip(fx["pruned"], fx["full"]))
    assert wins >= 15  # one-sided sign test, p < 0.05 for 20 pairs


@check("strategy/pruning_cycles/one_cycle_matches_campaign")
def _():
    prob = io.griewank(4)
    best, history, archives = pruning_cycles(
        prob, lambda p: _tiny_archipelago(p, seed=21), cycles=1, runs_per_cycle=3,
        iterations_per_run=1, keep_fraction=0.5, padding=0.03, seed=13)
    arch2 = _tiny_archipelago(io.griewank(4), seed=21)
    archive2 = multistart_campaign(arch2, 3, 1, io.derive_seed(13, 0))
    assert best.f == archive2.best().f
    b2 = prune_bounds(archive2, 0.5, 0.03)
    assert np.array_equal(history[0].lower, b2.lower)
    assert np.array_equal(history[0].upper, b2.upper)


@check("strategy/pruning_cycles/nested_bounds")
def _():
    prob = io.griewank(3)
    _, history, _ = pruning_cycles(
        prob, lambda p: _tiny_archipelago(p, seed=31), cycles=3, runs_per_cycle=3,
        iterations_per_run=1, keep_fraction=0.5, padding=0.05, seed=17)
    boxes = [prob.bounds] + history
    for outer, inner in zip(boxes, boxes[1:]):
        assert inner.issubset(outer)


@check("strategy/pruning_cycles/griewank_fixture")
def _():
    fx = ex.load_fixture("griewank_pruning")
    i = fx["seeds"].index(2)
    assert ex.run_griewank_flat(2) == fx["flat"][i]
    assert all(fx["nested"])
    wins = sum(p < f for p, f in zip(fx["pruned"], fx["flat"]))
    assert wins >= 15
    assert np.median(fx["pruned"]) <= np.median(fx["flat"])
    # equal budget up to the initial-population overhead of the extra archipelagos
    for pe, fe in zip(fx["pruned_evals"], fx["flat_evals"]):
        assert abs(pe - fe) / fe < 0.01


# ===========================================================================
# cli
# ===========================================================================

def _write_config(tmp, payload):
    path = Path(tmp) / "config.json"
    path.write_text(json.dumps(payload))
    return path


def _quick_config(seed=5):
    return {
        "problem": {"name": "rastrigin", "dim": 4},
        "islands": [
            {"algorithm": {"name": "de", "generations": 5}, "size": 8},
            {"algorithm": {"name": "monte_carlo", "evaluations": 40}, "size": 4},
        ],
        "topology": {"name": "ring"},
        "run": {"mode": "single", "iterations": 3, "seed": seed},
    }


@check("cli/list/registries")
def _():
    import io as pyio
    import contextlib
    buf = pyio.StringIO()
    with contextlib.redirect_stdout(buf):
        assert icli.main(["list", "problems"]) == 0
    out = buf.getvalue()
    assert "rastrigin" in out and "rosenbrock" in out and "knapsack" in out
    buf = pyio.StringIO()
    with contextlib.redirect_stdout(buf):
        assert icli.main(["list", "topologies"]) == 0
    assert "rim" in buf.getvalue()
    assert icli.main(["list", "bogus"]) == 1


@check("cli/run/unknown_algorithm_exit1")
def _():
    import io as pyio
    import contextlib
    with tempfile.TemporaryDirectory() as tmp:
        cfg = _quick_config()
        cfg["islands"][0]["algorithm"]["name"] = "warp_drive"
        path = _write_config(tmp, cfg)
        err = pyio.StringIO()
        with contextlib.redirect_stderr(err):
            assert icli.main(["run", str(path)]) == 1
        assert "warp_drive" in err.getvalue()


@check("cli/run/lockstep_bit_identical_results")
def _():
    with tempfile.TemporaryDirectory() as tmp:
        path = _write_config(tmp, _quick_config())
        out1, out2 = Path(tmp) / "r1", Path(tmp) / "r2"
        assert icli.main(["run", str(path), "--lockstep", "--seed", "31",
                          "--out", str(out1)]) == 0
        assert icli.main(["run", str(path), "--lockstep", "--seed", "31",
                          "--out", str(out2)]) == 0
        assert (out1 / "results.json").read_bytes() == (out2 / "results.json").read_bytes()
        assert (out1 / "run_log.jsonl").read_bytes() == (out2 / "run_log.jsonl").read_bytes()


@check("cli/validate/round_trip")
def _():
    import io as pyio
    import contextlib
    with tempfile.TemporaryDirectory() as tmp:
        path = _write_config(tmp, _quick_config())
        buf = pyio.StringIO()
        with contextlib.redirect_stdout(buf):
            assert icli.main(["run", str(path), "--validate"]) == 0
        echoed = json.loads(buf.getvalue())
        assert icli.normalize_config(echoed) == echoed


@check("cli/export/tables")
def _():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = {
            "problem": {"name": "rastrigin", "dim": 2},
            "islands": [{"algorithm": {"name": "monte_carlo", "evaluations": 10},
                         "size": 2} for _ in range(7)],
            "topology": {"name": "rim"},
            "run": {"mode": "campaign", "runs": 30, "iterations": 1, "seed": 3},
        }
        path = _write_config(tmp, cfg)
        out = Path(tmp) / "res"
        assert icli.main(["run", str(path), "--out", str(out)]) == 0
        assert icli.main(["export", str(out), "archive"]) == 0
        lines = [l for l in (out / "archive.tsv").read_text().splitlines() if l.strip()]
        assert len(lines) == 30
        assert icli.main(["export", str(out), "convergence"]) == 0
        rows = [l.split("\t") for l in
                (out / "convergence.tsv").read_text().splitlines()[1:]]
        per_island = {}
        for tick, island, _ in rows:
            prev = per_island.get(island, -1)
            assert int(tick) >= prev
            per_island[island] = int(tick)
        assert icli.main(["export", str(out), "topology"]) == 0
        topo_lines = (out / "topology.txt").read_text().splitlines()
        assert topo_lines[0] == "7" and len(topo_lines) - 1 == 24
