"""Foundational types: box-bounded problems, individuals, populations, seeded RNG.

Conventions used throughout the package:

* minimization -- lower fitness is always better;
* decision vectors are 1-d float arrays whose trailing ``integer_dim``
  components are integer-valued (mixed-integer encoding);
* individuals are immutable; every transformation builds new ones;
* all randomness flows through explicitly seeded ``numpy.random.Generator``
  instances, never through global state.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Bounds",
    "EvalCounter",
    "Individual",
    "Population",
    "Problem",
    "champion",
    "derive_seed",
    "evaluate",
    "init_population",
    "make_rng",
    "random_individual",
]


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic 64-bit-seeded generator (PCG64)."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def derive_seed(master: int, k: int) -> int:
    """Mix a master seed with an index into an independent 64-bit seed.

    splitmix64 finalizer over ``master + k * golden-gamma``; documented so
    that external drivers can reproduce per-island seeds from one master.
    """
    mask = 0xFFFFFFFFFFFFFFFF
    z = (int(master) + int(k) * 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return (z ^ (z >> 31)) & mask


class EvalCounter:
    """Thread-safe monotone evaluation counter."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._n = 0

    def increment(self, k: int = 1) -> None:
        with self._lock:
            self._n += k

    @property
    def value(self) -> int:
        with self._lock:
            return self._n


@dataclass(frozen=True)
class Bounds:
    """Box constraints: per-dimension closed intervals [lower_i, upper_i].

    Equal lower/upper entries are allowed and pin that variable.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", _freeze(lo))
        object.__setattr__(self, "upper", _freeze(hi))
        if lo.ndim != 1 or hi.ndim != 1 or lo.size != hi.size or lo.size < 1:
            raise ValueError("bounds must be two equal-length vectors of dimension >= 1")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds must be finite")
        if np.any(lo > hi):
            i = int(np.argmax(lo > hi))
            raise ValueError(f"lower[{i}]={lo[i]} exceeds upper[{i}]={hi[i]}")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def range(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def clip(self, x: np.ndarray) -> np.ndarray:
        """Project onto the box, coordinate-wise."""
        return np.clip(x, self.lower, self.upper)

    def issubset(self, other: "Bounds") -> bool:
        return bool(np.all(self.lower >= other.lower) and np.all(self.upper <= other.upper))


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


class Problem:
    """A named scalar objective over a box, with a trailing integer block.

    Parameters
    ----------
    name : str
        Identifier used in listings and result files.
    bounds : Bounds
        Search box; its dimension defines the problem dimension ``n``.
    objective : callable
        Deterministic map from a length-``n`` float vector to a finite float.
    integer_dim : int, default 0
        Number of trailing components constrained to integer values.

    Evaluation counting is shared between a problem and every view created
    with :meth:`localized` or :meth:`narrowed`, so totals aggregate across
    concurrent islands and pruning cycles.
    """

    def __init__(self, name: str, bounds: Bounds, objective: Callable[[np.ndarray], float],
                 integer_dim: int = 0):
        if not 0 <= integer_dim <= bounds.dim:
            raise ValueError(f"integer_dim={integer_dim} outside [0, {bounds.dim}]")
        self.name = name
        self.bounds = bounds
        self.integer_dim = int(integer_dim)
        self._objective = objective
        self._shared = EvalCounter()
        self._local = self._shared
        if integer_dim:
            ilo = np.ceil(bounds.lower[bounds.dim - integer_dim:])
            ihi = np.floor(bounds.upper[bounds.dim - integer_dim:])
            if np.any(ilo > ihi):
                raise ValueError("an integer dimension contains no integer point")

    @property
    def dim(self) -> int:
        return self.bounds.dim

    @property
    def evaluations(self) -> int:
        """Total evaluations across this problem and all of its views."""
        return self._shared.value

    @property
    def local_evaluations(self) -> int:
        """Evaluations made through this view only."""
        return self._local.value

    def localized(self) -> "Problem":
        """A view with its own evaluation sub-counter (one per island)."""
        view = Problem.__new__(Problem)
        view.name = self.name
        view.bounds = self.bounds
        view.integer_dim = self.integer_dim
        view._objective = self._objective
        view._shared = self._shared
        view._local = EvalCounter()
        return view

    def narrowed(self, bounds: Bounds) -> "Problem":
        """Same objective restricted to a sub-box (shares the counter)."""
        if bounds.dim != self.dim:
            raise ValueError(f"dimension mismatch: {bounds.dim} != {self.dim}")
        if not bounds.issubset(self.bounds):
            raise ValueError("narrowed bounds escape the original box")
        view = Problem("%s[pruned]" % self.name.replace("[pruned]", ""), bounds,
                       self._objective, self.integer_dim)
        view._shared = self._shared
        view._local = self._shared
        return view

    def same_definition(self, other: "Problem") -> bool:
        return self._objective is other._objective and self.integer_dim == other.integer_dim

    def raw_eval(self, x: np.ndarray) -> float:
        """Objective dispatch without precondition checks (hot path).

        Callers must guarantee ``x`` is in bounds with integral trailing
        components; all algorithms in this package do.
        """
        f = float(self._objective(x))
        if not math.isfinite(f):
            raise ValueError(f"objective returned non-finite value {f} at x={np.asarray(x).tolist()}")
        if self._local is self._shared:
            self._shared.increment()
        else:
            self._shared.increment()
            self._local.increment()
        return f

    def evaluate(self, x) -> float:
        """Validated objective evaluation; increments the counter once."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {x.size}")
        lo, hi = self.bounds.lower, self.bounds.upper
        if np.any(x < lo) or np.any(x > hi):
            bad = np.where((x < lo) | (x > hi))[0][0]
            raise ValueError(
                f"component {bad} out of bounds: {x[bad]} not in [{lo[bad]}, {hi[bad]}]")
        if self.integer_dim:
            tail = x[self.dim - self.integer_dim:]
            if np.any(tail != np.rint(tail)):
                bad = self.dim - self.integer_dim + int(np.argmax(tail != np.rint(tail)))
                raise ValueError(f"integer component {bad} has non-integral value {x[bad]}")
        return self.raw_eval(x)

    def round_integers(self, x: np.ndarray) -> np.ndarray:
        """Round the trailing integer block to the nearest integers."""
        if not self.integer_dim:
            return x
        out = np.array(x, dtype=float)
        k = self.dim - self.integer_dim
        out[k:] = np.rint(out[k:])
        return out

    def __repr__(self) -> str:
        return f"Problem({self.name!r}, dim={self.dim}, integer_dim={self.integer_dim})"


def evaluate(problem: Problem, x) -> float:
    return problem.evaluate(x)


@dataclass(frozen=True, eq=False)
class Individual:
    """An evaluated decision vector; immutable, fitness cached at creation."""

    x: np.ndarray
    f: float

    def __post_init__(self):
        object.__setattr__(self, "x", _freeze(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "f", float(self.f))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Individual):
            return NotImplemented
        return self.f == other.f and np.array_equal(self.x, other.x)

    def __repr__(self) -> str:
        return f"Individual(f={self.f:.6g}, x={self.x.tolist()})"


class Population:
    """Ordered collection of individuals evaluated on one problem.

    The champion is the minimum-fitness individual, ties resolved in favor
    of the lowest index.
    """

    def __init__(self, problem: Problem, individuals: Sequence[Individual] = (),
                 seed: int | None = None):
        self.problem = problem
        self.individuals = list(individuals)
        self.seed = seed

    def __len__(self) -> int:
        return len(self.individuals)

    def __iter__(self):
        return iter(self.individuals)

    def __getitem__(self, i: int) -> Individual:
        return self.individuals[i]

    @property
    def fitnesses(self) -> np.ndarray:
        return np.array([ind.f for ind in self.individuals], dtype=float)

    @property
    def vectors(self) -> np.ndarray:
        """(size, dim) matrix of decision vectors (a copy)."""
        return np.array([ind.x for ind in self.individuals], dtype=float)

    @property
    def champion_index(self) -> int:
        if not self.individuals:
            raise ValueError("champion of an empty population is undefined")
        return int(np.argmin(self.fitnesses))

    @property
    def champion(self) -> Individual:
        return self.individuals[self.champion_index]

    @property
    def worst_index(self) -> int:
        if not self.individuals:
            raise ValueError("worst of an empty population is undefined")
        return int(np.argmax(self.fitnesses))

    def copy(self) -> "Population":
        return Population(self.problem, list(self.individuals), self.seed)

    def replaced(self, index: int, individual: Individual) -> "Population":
        out = self.copy()
        out.individuals[index] = individual
        return out

    def __repr__(self) -> str:
        best = f"{self.champion.f:.6g}" if self.individuals else "n/a"
        return f"Population(size={len(self)}, problem={self.problem.name!r}, champion_f={best})"


def random_individual(problem: Problem, rng: np.random.Generator) -> Individual:
    """Uniform in-bounds draw; integer components uniform over the integers."""
    lo, hi = problem.bounds.lower, problem.bounds.upper
    x = rng.uniform(lo, hi)
    if problem.integer_dim:
        k = problem.dim - problem.integer_dim
        ilo = np.ceil(lo[k:]).astype(np.int64)
        ihi = np.floor(hi[k:]).astype(np.int64)
        x[k:] = rng.integers(ilo, ihi, endpoint=True).astype(float)
    return Individual(x, problem.raw_eval(x))


def init_population(problem: Problem, size: int, seed: int) -> Population:
    """Population of ``size`` random individuals, reproducible from ``seed``."""
    if size < 0:
        raise ValueError("size must be non-negative")
    rng = make_rng(seed)
    return Population(problem, [random_individual(problem, rng) for _ in range(size)], seed=seed)


def champion(pop: Population) -> Individual:
    return pop.champion
