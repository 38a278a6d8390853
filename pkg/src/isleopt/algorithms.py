"""Native optimization algorithms.

Every algorithm is an immutable configuration object with an
``evolve(population, rng) -> Population`` method. Shared contracts:

* the input population is never mutated; a new one is returned;
* population size is preserved;
* the champion never gets worse (elitism);
* every returned individual lies inside the problem bounds;
* integer components are rounded to the nearest integer before any
  evaluation (the genetic and Monte Carlo operators sample them natively);
* all randomness comes from the generator passed to ``evolve``, so a fixed
  seed reproduces the run bit for bit.

Out-of-bounds trial points are projected onto the violated bound, except
for genetic-algorithm mutation which resamples uniformly inside the box.

``evaluation_budget(pop)`` documents the maximum number of objective
evaluations one ``evolve`` call may spend (``None`` when the total is
data-dependent, as for basin hopping).
"""

from __future__ import annotations

import math

import numpy as np

from .core import Individual, Population, random_individual

__all__ = [
    "ALGORITHMS",
    "Algorithm",
    "BasinHopping",
    "CompassSearch",
    "CoranaAnnealing",
    "DifferentialEvolution",
    "HarmonySearch",
    "Identity",
    "MonteCarlo",
    "Multistart",
    "NelderMead",
    "ParticleSwarm",
    "SimpleGA",
    "de_mutant",
    "harmony_bandwidth",
    "harmony_pitch_rate",
    "metropolis_accept",
    "nelder_mead_minimize",
    "tournament_winner",
]


class Algorithm:
    """Base interface; subclasses set ``name`` and implement ``evolve``."""

    name = "algorithm"

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        raise NotImplementedError

    def evaluation_budget(self, pop: Population):
        """Documented worst-case evaluations per evolve call, or None."""
        return None

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in vars(self).items())
        return f"{type(self).__name__}({args})"


def _require_size(pop: Population, k: int, name: str) -> None:
    if len(pop) < k:
        raise ValueError(f"{name} needs a population of at least {k}, got {len(pop)}")


# ---------------------------------------------------------------------------
# differential evolution (rand/1/bin)
# ---------------------------------------------------------------------------

def de_mutant(x1: np.ndarray, x2: np.ndarray, x3: np.ndarray, f: float) -> np.ndarray:
    """rand/1 donor vector: x1 + f * (x2 - x3)."""
    return x1 + f * (x2 - x3)


def _distinct_partners(size: int, rng: np.random.Generator) -> np.ndarray:
    """(size, 3) index matrix; per row: three distinct indices != row."""
    idx = rng.integers(0, size, size=(size, 3))
    rows = np.arange(size)
    while True:
        bad = (idx[:, 0] == rows) | (idx[:, 1] == rows) | (idx[:, 2] == rows)
        bad |= (idx[:, 0] == idx[:, 1]) | (idx[:, 0] == idx[:, 2]) | (idx[:, 1] == idx[:, 2])
        if not bad.any():
            return idx
        idx[bad] = rng.integers(0, size, size=(int(bad.sum()), 3))


class DifferentialEvolution(Algorithm):
    """Storn-Price differential evolution, rand/1/bin variant.

    Parameters
    ----------
    generations : int
        Number of synchronous generations per evolve call.
    f : float
        Differential weight, in (0, 2].
    cr : float
        Crossover probability, in [0, 1]. One coordinate per trial always
        comes from the donor, so cr=1 makes the trial equal the donor.

    Spends exactly ``generations * len(pop)`` evaluations per call.
    """

    name = "de"

    def __init__(self, generations: int, f: float = 0.8, cr: float = 0.9):
        if generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 < f <= 2.0:
            raise ValueError("weight f must be in (0, 2]")
        if not 0.0 <= cr <= 1.0:
            raise ValueError("crossover probability cr must be in [0, 1]")
        self.generations = int(generations)
        self.f = float(f)
        self.cr = float(cr)

    def evaluation_budget(self, pop):
        return self.generations * len(pop)

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 5, "de")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        size, n = len(pop), prob.dim
        x = pop.vectors
        fit = pop.fitnesses
        for _ in range(self.generations):
            r = _distinct_partners(size, rng)
            donors = de_mutant(x[r[:, 0]], x[r[:, 1]], x[r[:, 2]], self.f)
            cross = rng.random((size, n)) < self.cr
            cross[np.arange(size), rng.integers(0, n, size=size)] = True
            trials = np.where(cross, donors, x)
            np.clip(trials, lo, hi, out=trials)
            if prob.integer_dim:
                trials[:, n - prob.integer_dim:] = np.rint(trials[:, n - prob.integer_dim:])
            trial_fit = np.array([prob.raw_eval(trials[i]) for i in range(size)])
            better = trial_fit <= fit
            x[better] = trials[better]
            fit[better] = trial_fit[better]
        individuals = [Individual(x[i], fit[i]) for i in range(size)]
        return Population(prob, individuals, pop.seed)


# ---------------------------------------------------------------------------
# adaptive-neighbourhood simulated annealing
# ---------------------------------------------------------------------------

def metropolis_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Accept a move of fitness change ``delta`` at the given temperature.

    Non-worsening moves are always accepted; worsening moves with
    probability exp(-delta/T). Consumes exactly one uniform draw.
    """
    u = rng.random()
    if delta <= 0.0:
        return True
    if temperature <= 0.0:
        return False
    return u < math.exp(-delta / temperature)


class CoranaAnnealing(Algorithm):
    """Simulated annealing with a self-adapting per-coordinate neighbourhood.

    Proposals cycle through the coordinates, each drawn uniformly within a
    step vector that is rescaled every ``step_adjust_interval`` cycles to
    hold the per-coordinate acceptance rate near 50% (classical constants:
    factor 2, dead band 40-60%). After every ``temp_adjust_interval``
    rescalings the temperature is multiplied by a fixed ratio chosen so it
    decays geometrically from ``t_start`` to ``t_final`` across the
    evaluation budget, and the walk restarts from the best point seen.

    Operates on the champion; spends at most ``evaluations`` evaluations.
    """

    name = "sa_corana"

    def __init__(self, evaluations: int, t_start: float, t_final: float,
                 step_adjust_interval: int = 20, temp_adjust_interval: int = 10,
                 initial_range: float = 1.0):
        if evaluations < 1 or step_adjust_interval < 1 or temp_adjust_interval < 1:
            raise ValueError("counts must be >= 1")
        if not (t_start > 0 and 0 < t_final < t_start):
            raise ValueError("need 0 < t_final < t_start")
        if not 0.0 < initial_range <= 1.0:
            raise ValueError("initial_range must be in (0, 1]")
        self.evaluations = int(evaluations)
        self.t_start = float(t_start)
        self.t_final = float(t_final)
        self.step_adjust_interval = int(step_adjust_interval)
        self.temp_adjust_interval = int(temp_adjust_interval)
        self.initial_range = float(initial_range)

    def evaluation_budget(self, pop):
        return self.evaluations

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 1, "sa_corana")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        n = prob.dim
        cur = np.array(pop.champion.x)
        cur_f = pop.champion.f
        best, best_f = cur.copy(), cur_f
        step = self.initial_range * prob.bounds.range.astype(float)

        evals_per_temp = n * self.step_adjust_interval * self.temp_adjust_interval
        n_temps = max(1, self.evaluations // max(1, evals_per_temp))
        cooling = (self.t_final / self.t_start) ** (1.0 / n_temps)
        temp = self.t_start

        used = 0
        accepted = np.zeros(n)
        cycles = 0
        rescalings = 0
        int_start = n - prob.integer_dim
        while used < self.evaluations:
            for j in range(n):
                if used >= self.evaluations:
                    break
                cand = cur.copy()
                cand[j] = cur[j] + (2.0 * rng.random() - 1.0) * step[j]
                cand[j] = min(max(cand[j], lo[j]), hi[j])
                if j >= int_start:
                    cand[j] = np.rint(cand[j])
                cand_f = prob.raw_eval(cand)
                used += 1
                if metropolis_accept(cand_f - cur_f, temp, rng):
                    cur, cur_f = cand, cand_f
                    accepted[j] += 1.0
                    if cand_f < best_f:
                        best, best_f = cand.copy(), cand_f
            cycles += 1
            if cycles % self.step_adjust_interval == 0:
                rate = accepted / self.step_adjust_interval
                grow = rate > 0.6
                shrink = rate < 0.4
                step[grow] *= 1.0 + 2.0 * (rate[grow] - 0.6) / 0.4
                step[shrink] /= 1.0 + 2.0 * (0.4 - rate[shrink]) / 0.4
                np.minimum(step, prob.bounds.range, out=step)
                accepted[:] = 0.0
                rescalings += 1
                if rescalings % self.temp_adjust_interval == 0:
                    temp = max(temp * cooling, self.t_final)
                    cur, cur_f = best.copy(), best_f
        return pop.replaced(pop.champion_index, Individual(best, best_f))


# ---------------------------------------------------------------------------
# particle swarm optimisation
# ---------------------------------------------------------------------------

class ParticleSwarm(Algorithm):
    """Canonical global-best PSO with velocity clamping.

    Velocity update per particle:
    ``v <- w v + c1 u1 (pbest - x) + c2 u2 (gbest - x)``, with u1, u2 fresh
    uniform vectors, velocities clamped per coordinate to
    ``max_velocity_fraction`` of the box range, positions projected onto the
    box with the velocity zeroed on any clipped coordinate. The returned
    population holds each particle's personal best, so the champion is the
    swarm best. Spends ``generations * len(pop)`` evaluations.
    """

    name = "pso"

    def __init__(self, generations: int, inertia: float = 0.7298,
                 cognitive: float = 2.05 * 0.7298, social: float = 2.05 * 0.7298,
                 max_velocity_fraction: float = 0.5):
        if generations < 1:
            raise ValueError("generations must be >= 1")
        if inertia < 0 or cognitive < 0 or social < 0:
            raise ValueError("inertia and acceleration weights must be non-negative")
        if not 0.0 < max_velocity_fraction <= 1.0:
            raise ValueError("max_velocity_fraction must be in (0, 1]")
        self.generations = int(generations)
        self.inertia = float(inertia)
        self.cognitive = float(cognitive)
        self.social = float(social)
        self.max_velocity_fraction = float(max_velocity_fraction)

    def evaluation_budget(self, pop):
        return self.generations * len(pop)

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 2, "pso")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        size, n = len(pop), prob.dim
        x = pop.vectors
        fit = pop.fitnesses
        vel = np.zeros_like(x)
        vmax = self.max_velocity_fraction * prob.bounds.range
        pbest, pbest_f = x.copy(), fit.copy()
        g = int(np.argmin(pbest_f))
        gbest, gbest_f = pbest[g].copy(), pbest_f[g]
        for _ in range(self.generations):
            u1 = rng.random((size, n))
            u2 = rng.random((size, n))
            vel = (self.inertia * vel
                   + self.cognitive * u1 * (pbest - x)
                   + self.social * u2 * (gbest - x))
            np.clip(vel, -vmax, vmax, out=vel)
            x = x + vel
            clipped = (x < lo) | (x > hi)
            np.clip(x, lo, hi, out=x)
            vel[clipped] = 0.0
            if prob.integer_dim:
                x[:, n - prob.integer_dim:] = np.rint(x[:, n - prob.integer_dim:])
            fit = np.array([prob.raw_eval(x[i]) for i in range(size)])
            improved = fit < pbest_f
            pbest[improved] = x[improved]
            pbest_f[improved] = fit[improved]
            g = int(np.argmin(pbest_f))
            if pbest_f[g] < gbest_f:
                gbest, gbest_f = pbest[g].copy(), pbest_f[g]
        individuals = [Individual(pbest[i], pbest_f[i]) for i in range(size)]
        return Population(prob, individuals, pop.seed)


# ---------------------------------------------------------------------------
# simple genetic algorithm
# ---------------------------------------------------------------------------

def tournament_winner(fitnesses: np.ndarray, candidates: np.ndarray) -> int:
    """Index of the best candidate (lowest fitness, first on ties)."""
    return int(candidates[np.argmin(fitnesses[candidates])])

class SimpleGA(Algorithm):
    """Generational GA: tournament selection, blend/uniform crossover,
    uniform resampling mutation, and elitism.

    Continuous coordinates cross over as an arithmetic blend
    ``alpha x1 + (1 - alpha) x2`` with one alpha per child; integer
    coordinates are picked uniformly from either parent. Mutation redraws a
    coordinate uniformly inside the box. The ``elitism_count`` best
    individuals survive unchanged, so the budget is
    ``generations * (len(pop) - elitism_count)`` evaluations.
    """

    name = "sga"

    def __init__(self, generations: int, crossover_prob: float = 0.95,
                 mutation_prob: float = 0.02, tournament_size: int = 2,
                 elitism_count: int = 1):
        if generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= crossover_prob <= 1.0 or not 0.0 <= mutation_prob <= 1.0:
            raise ValueError("probabilities must be in [0, 1]")
        if tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if elitism_count < 1:
            raise ValueError("elitism_count must be >= 1")
        self.generations = int(generations)
        self.crossover_prob = float(crossover_prob)
        self.mutation_prob = float(mutation_prob)
        self.tournament_size = int(tournament_size)
        self.elitism_count = int(elitism_count)

    def evaluation_budget(self, pop):
        return self.generations * max(0, len(pop) - self.elitism_count)

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, max(2, self.tournament_size), "sga")
        if self.elitism_count > len(pop):
            raise ValueError("elitism_count exceeds population size")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        size, n = len(pop), prob.dim
        int_start = n - prob.integer_dim
        ilo = np.ceil(lo[int_start:]).astype(np.int64)
        ihi = np.floor(hi[int_start:]).astype(np.int64)
        x = pop.vectors
        fit = pop.fitnesses
        n_children = size - self.elitism_count
        for _ in range(self.generations):
            # keep elites in their original relative order
            elite_idx = np.sort(np.argsort(fit, kind="stable")[: self.elitism_count])
            children = np.empty((n_children, n))
            child_fit = np.empty(n_children)
            for c in range(n_children):
                p1 = tournament_winner(fit, rng.integers(0, size, self.tournament_size))
                p2 = tournament_winner(fit, rng.integers(0, size, self.tournament_size))
                if rng.random() < self.crossover_prob:
                    alpha = rng.random()
                    child = alpha * x[p1] + (1.0 - alpha) * x[p2]
                    if prob.integer_dim:
                        take_p1 = rng.random(prob.integer_dim) < 0.5
                        child[int_start:] = np.where(take_p1, x[p1][int_start:],
                                                     x[p2][int_start:])
                else:
                    child = x[p1].copy()
                mutate = rng.random(n) < self.mutation_prob
                if mutate[:int_start].any():
                    cont = np.where(mutate[:int_start])[0]
                    child[cont] = rng.uniform(lo[cont], hi[cont])
                if prob.integer_dim and mutate[int_start:].any():
                    ints = np.where(mutate[int_start:])[0]
                    child[int_start + ints] = rng.integers(
                        ilo[ints], ihi[ints], endpoint=True).astype(float)
                children[c] = child
                child_fit[c] = prob.raw_eval(child)
            x = np.concatenate([x[elite_idx], children])
            fit = np.concatenate([fit[elite_idx], child_fit])
        individuals = [Individual(x[i], fit[i]) for i in range(size)]
        return Population(prob, individuals, pop.seed)


# ---------------------------------------------------------------------------
# improved harmony search
# ---------------------------------------------------------------------------

def harmony_pitch_rate(t: int, total: int, par_min: float, par_max: float) -> float:
    """Linear ramp from par_min at t=0 to par_max at t=total."""
    return par_min + (par_max - par_min) * (t / total)


def harmony_bandwidth(t: int, total: int, bw_min: float, bw_max: float) -> float:
    """Exponential decay from bw_max at t=0 to bw_min at t=total."""
    return bw_max * math.exp(math.log(bw_min / bw_max) * (t / total))


class HarmonySearch(Algorithm):
    """Improved harmony search over the population as harmony memory.

    Each iteration composes one new harmony coordinate-wise: with
    probability ``hmcr`` copy the coordinate from a random memory member and
    pitch-adjust it with the ramping probability/bandwidth schedules;
    otherwise draw it uniformly inside the box. The new harmony replaces the
    worst member when better. Spends ``iterations`` evaluations.
    """

    name = "ihs"

    def __init__(self, iterations: int, hmcr: float = 0.85,
                 par_min: float = 0.35, par_max: float = 0.99,
                 bw_min: float = 1e-5, bw_max: float = 1.0):
        if iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < hmcr < 1.0:
            raise ValueError("hmcr must be in (0, 1)")
        if not 0.0 < par_min <= par_max < 1.0:
            raise ValueError("need 0 < par_min <= par_max < 1")
        if not 0.0 < bw_min <= bw_max:
            raise ValueError("need 0 < bw_min <= bw_max")
        self.iterations = int(iterations)
        self.hmcr = float(hmcr)
        self.par_min = float(par_min)
        self.par_max = float(par_max)
        self.bw_min = float(bw_min)
        self.bw_max = float(bw_max)

    def evaluation_budget(self, pop):
        return self.iterations

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 2, "ihs")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        span = prob.bounds.range
        size, n = len(pop), prob.dim
        int_start = n - prob.integer_dim
        x = pop.vectors
        fit = pop.fitnesses
        worst = int(np.argmax(fit))
        cols = np.arange(n)
        for t in range(1, self.iterations + 1):
            par = harmony_pitch_rate(t, self.iterations, self.par_min, self.par_max)
            bw = harmony_bandwidth(t, self.iterations, self.bw_min, self.bw_max)
            picks = x[rng.integers(0, size, n), cols]
            adjust = rng.random(n) < par
            signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            amount = rng.random(n) * bw * span
            adjusted = np.where(adjust, picks + signs * amount, picks)
            from_memory = rng.random(n) < self.hmcr
            fresh = rng.uniform(lo, hi)
            harmony = np.where(from_memory, adjusted, fresh)
            np.clip(harmony, lo, hi, out=harmony)
            if prob.integer_dim:
                harmony[int_start:] = np.rint(harmony[int_start:])
            f_new = prob.raw_eval(harmony)
            if f_new < fit[worst]:
                x[worst] = harmony
                fit[worst] = f_new
                worst = int(np.argmax(fit))
        individuals = [Individual(x[i], fit[i]) for i in range(size)]
        return Population(prob, individuals, pop.seed)


# ---------------------------------------------------------------------------
# compass search
# ---------------------------------------------------------------------------

class CompassSearch(Algorithm):
    """Deterministic coordinate pattern search on the champion.

    Polls ``x +/- step * range_i`` along each coordinate in order (plus
    direction first) and moves to the first strictly improving neighbour;
    when a full poll cycle fails, the step contracts by ``reduction``.
    Stops when the step falls below ``stop_step`` or the evaluation budget
    ``max_evaluations`` is exhausted. Steps are fractions of the box range.
    """

    name = "compass"

    def __init__(self, max_evaluations: int, start_step: float = 0.3,
                 stop_step: float = 1e-4, reduction: float = 0.5):
        if max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if not 0.0 < start_step <= 1.0:
            raise ValueError("start_step must be in (0, 1]")
        if not 0.0 < stop_step < start_step:
            raise ValueError("need 0 < stop_step < start_step")
        if not 0.0 < reduction < 1.0:
            raise ValueError("reduction must be in (0, 1)")
        self.max_evaluations = int(max_evaluations)
        self.start_step = float(start_step)
        self.stop_step = float(stop_step)
        self.reduction = float(reduction)

    def evaluation_budget(self, pop):
        return self.max_evaluations

    def evolve(self, pop: Population, rng: np.random.Generator = None) -> Population:
        _require_size(pop, 1, "compass")
        prob = pop.problem
        lo, hi = prob.bounds.lower, prob.bounds.upper
        span = prob.bounds.range
        n = prob.dim
        int_start = n - prob.integer_dim
        x = np.array(pop.champion.x)
        fx = pop.champion.f
        step = self.start_step
        used = 0
        while step >= self.stop_step and used < self.max_evaluations:
            moved = False
            for i in range(n):
                for sign in (1.0, -1.0):
                    cand = x.copy()
                    cand[i] = min(max(x[i] + sign * step * span[i], lo[i]), hi[i])
                    if i >= int_start:
                        cand[i] = np.rint(cand[i])
                    f_cand = prob.raw_eval(cand)
                    used += 1
                    if f_cand < fx:
                        x, fx = cand, f_cand
                        moved = True
                        break
                    if used >= self.max_evaluations:
                        break
                if moved or used >= self.max_evaluations:
                    break
            if not moved:
                step *= self.reduction
        return pop.replaced(pop.champion_index, Individual(x, fx))


# ---------------------------------------------------------------------------
# Nelder-Mead simplex
# ---------------------------------------------------------------------------

def nelder_mead_minimize(problem, x0: np.ndarray, iterations: int, tol: float,
                         f0: float = None, initial_simplex: np.ndarray = None):
    """Simplex descent with reflection 1, expansion 2, contraction 0.5, shrink 0.5.

    The default simplex offsets the start by 5% of the range along each
    coordinate (flipped inward at a bound). Out-of-box vertices are
    projected. Terminates after ``iterations`` steps or when the simplex
    diameter (max infinity-norm distance to the best vertex) drops below
    ``tol``. Returns ``(x, f)`` of the best vertex.
    """
    lo, hi = problem.bounds.lower, problem.bounds.upper
    n = problem.dim

    def fix(p):
        p = np.clip(p, lo, hi)
        return problem.round_integers(p)

    if initial_simplex is None:
        x0 = fix(np.asarray(x0, dtype=float))
        verts = [x0]
        for i in range(n):
            off = 0.05 * (hi[i] - lo[i])
            v = x0.copy()
            v[i] = x0[i] + off if x0[i] + off <= hi[i] else x0[i] - off
            verts.append(fix(v))
        fvals = [problem.raw_eval(x0) if f0 is None else float(f0)]
        fvals += [problem.raw_eval(v) for v in verts[1:]]
    else:
        verts = [fix(np.asarray(v, dtype=float)) for v in initial_simplex]
        if len(verts) != n + 1:
            raise ValueError(f"initial simplex needs {n + 1} vertices")
        fvals = [problem.raw_eval(v) for v in verts]
    simplex = np.array(verts)
    fvals = np.array(fvals)

    for _ in range(iterations):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if np.max(np.abs(simplex[1:] - simplex[0])) < tol:
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = fix(centroid + (centroid - worst))
        f_r = problem.raw_eval(reflected)
        if f_r < fvals[0]:
            expanded = fix(centroid + 2.0 * (centroid - worst))
            f_e = problem.raw_eval(expanded)
            simplex[-1], fvals[-1] = (expanded, f_e) if f_e < f_r else (reflected, f_r)
        elif f_r < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_r
        else:
            if f_r < fvals[-1]:
                contracted = fix(centroid + 0.5 * (centroid - worst))
                f_c = problem.raw_eval(contracted)
                if f_c <= f_r:
                    simplex[-1], fvals[-1] = contracted, f_c
                    continue
            else:
                contracted = fix(centroid - 0.5 * (centroid - worst))
                f_c = problem.raw_eval(contracted)
                if f_c < fvals[-1]:
                    simplex[-1], fvals[-1] = contracted, f_c
                    continue
            for j in range(1, n + 1):
                simplex[j] = fix(simplex[0] + 0.5 * (simplex[j] - simplex[0]))
                fvals[j] = problem.raw_eval(simplex[j])
    best = int(np.argmin(fvals))
    return simplex[best], float(fvals[best])


class NelderMead(Algorithm):
    """Local simplex refinement of the champion (derivative-free).

    ``iterations`` caps the simplex steps; ``tol`` stops early once the
    simplex diameter shrinks below it. Deterministic: ignores the rng.
    Evaluations per call are at most ``n + iterations * (n + 2)``.
    """

    name = "nelder_mead"

    def __init__(self, iterations: int = 500, tol: float = 1e-4):
        if iterations < 1:
            raise ValueError("iterations must be >= 1")
        if tol <= 0:
            raise ValueError("tol must be positive")
        self.iterations = int(iterations)
        self.tol = float(tol)

    def evaluation_budget(self, pop):
        return pop.problem.dim + self.iterations * (pop.problem.dim + 2)

    def evolve(self, pop: Population, rng: np.random.Generator = None) -> Population:
        _require_size(pop, 1, "nelder_mead")
        champ = pop.champion
        x, f = nelder_mead_minimize(pop.problem, champ.x, self.iterations, self.tol,
                                    f0=champ.f)
        if f <= champ.f:
            return pop.replaced(pop.champion_index, Individual(x, f))
        return pop.copy()


# ---------------------------------------------------------------------------
# monotonic basin hopping
# ---------------------------------------------------------------------------

class BasinHopping(Algorithm):
    """Perturb-then-refine loop accepting only improvements.

    Each trial jitters the incumbent best by up to ``perturbation`` of the
    range per coordinate, runs the inner algorithm on the perturbed point,
    and adopts the result only if strictly better. Stops after
    ``stop_after`` consecutive non-improving trials. The total evaluation
    count is data-dependent (one perturbed point plus one inner run per
    trial).
    """

    name = "mbh"

    def __init__(self, inner: Algorithm, stop_after: int = 5, perturbation: float = 0.05):
        if stop_after < 1:
            raise ValueError("stop_after must be >= 1")
        if not 0.0 <= perturbation <= 1.0:
            raise ValueError("perturbation must be in [0, 1]")
        self.inner = inner
        self.stop_after = int(stop_after)
        self.perturbation = float(perturbation)

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 1, "mbh")
        prob = pop.problem
        best = pop.champion
        fails = 0
        while fails < self.stop_after:
            x = best.x + rng.uniform(-1.0, 1.0, prob.dim) * self.perturbation * prob.bounds.range
            x = prob.round_integers(prob.bounds.clip(x))
            trial = Population(prob, [Individual(x, prob.raw_eval(x))], pop.seed)
            trial = self.inner.evolve(trial, rng)
            cand = trial.champion
            if cand.f < best.f:
                best, fails = cand, 0
            else:
                fails += 1
        return pop.replaced(pop.champion_index, best)


# ---------------------------------------------------------------------------
# Monte Carlo search
# ---------------------------------------------------------------------------

class MonteCarlo(Algorithm):
    """Uniform random search; a draw that beats the worst member replaces it."""

    name = "monte_carlo"

    def __init__(self, evaluations: int):
        if evaluations < 0:
            raise ValueError("evaluations must be >= 0")
        self.evaluations = int(evaluations)

    def evaluation_budget(self, pop):
        return self.evaluations

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 1, "monte_carlo")
        out = pop.copy()
        worst = out.worst_index
        for _ in range(self.evaluations):
            cand = random_individual(out.problem, rng)
            if cand.f < out.individuals[worst].f:
                out.individuals[worst] = cand
                worst = out.worst_index
        return out


# ---------------------------------------------------------------------------
# generalised multistart
# ---------------------------------------------------------------------------

class Multistart(Algorithm):
    """Repeated inner runs from fresh random populations, keeping the best.

    The incumbent champion counts as the initial best, so the result never
    regresses. The best-ever individual is written over the worst slot of
    the final working population. Budget per call:
    ``starts * (len(pop) + inner budget)`` evaluations.
    """

    name = "multistart"

    def __init__(self, inner: Algorithm, starts: int):
        if starts < 0:
            raise ValueError("starts must be >= 0")
        self.inner = inner
        self.starts = int(starts)

    def evaluation_budget(self, pop):
        inner = self.inner.evaluation_budget(pop)
        if inner is None:
            return None
        return self.starts * (len(pop) + inner)

    def evolve(self, pop: Population, rng: np.random.Generator) -> Population:
        _require_size(pop, 1, "multistart")
        prob = pop.problem
        best = pop.champion
        work = pop
        for _ in range(self.starts):
            work = Population(prob, [random_individual(prob, rng) for _ in range(len(pop))],
                              pop.seed)
            work = self.inner.evolve(work, rng)
            if work.champion.f < best.f:
                best = work.champion
        out = work.copy()
        if self.starts:
            out.individuals[out.worst_index] = best
        return out


class Identity(Algorithm):
    """No-op algorithm; returns the population unchanged (useful as an
    inner stage and in relay islands that only pass migrants along)."""

    name = "identity"

    def evaluation_budget(self, pop):
        return 0

    def evolve(self, pop: Population, rng: np.random.Generator = None) -> Population:
        return pop.copy()


ALGORITHMS = {
    cls.name: cls
    for cls in (DifferentialEvolution, CoranaAnnealing, ParticleSwarm, SimpleGA,
                HarmonySearch, CompassSearch, NelderMead, BasinHopping, MonteCarlo,
                Multistart, Identity)
}
