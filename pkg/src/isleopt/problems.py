"""Built-in benchmark problems.

Continuous test functions use the standard literature definitions with the
conventional boxes, frozen here verbatim so results are reproducible:

============  =======================================================  ================
function      definition                                               box
============  =======================================================  ================
rastrigin     10 n + sum(x_i^2 - 10 cos(2 pi x_i))                     [-5.12, 5.12]^n
rosenbrock    sum(100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2)               [-5, 10]^n
schwefel      418.9828872724339 n - sum(x_i sin(sqrt(|x_i|)))          [-500, 500]^n
griewank      sum(x_i^2)/4000 - prod(cos(x_i / sqrt(i))) + 1           [-600, 600]^n
branin        a (x2 - b x1^2 + c x1 - r)^2 + s (1 - t) cos(x1) + s     [-5,10] x [0,15]
himmelblau    (x^2 + y - 11)^2 + (x + y^2 - 7)^2                       [-6, 6]^2
============  =======================================================  ================

The 0-1 knapsack is encoded as an all-integer minimization with a penalty
that strictly separates infeasible from feasible points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Bounds, Problem

__all__ = [
    "KnapsackInstance",
    "branin",
    "griewank",
    "himmelblau",
    "knapsack",
    "load_knapsack",
    "rastrigin",
    "rosenbrock",
    "save_knapsack",
    "schwefel",
]

SCHWEFEL_OFFSET = 418.9828872724339


def _box(dim: int, lo: float, hi: float) -> Bounds:
    return Bounds(np.full(dim, lo), np.full(dim, hi))


def rastrigin(dim: int) -> Problem:
    """Highly multimodal lattice of local minima; global minimum f(0)=0."""
    if dim < 1:
        raise ValueError("rastrigin needs dim >= 1")

    def f(x):
        return 10.0 * dim + float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))

    return Problem(f"rastrigin{dim}", _box(dim, -5.12, 5.12), f)


def rosenbrock(dim: int) -> Problem:
    """Curved valley; global minimum f(1,...,1)=0."""
    if dim < 2:
        raise ValueError("rosenbrock needs dim >= 2")

    def f(x):
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

    return Problem(f"rosenbrock{dim}", _box(dim, -5.0, 10.0), f)


def schwefel(dim: int) -> Problem:
    """Deceptive: best minima near the box corners, f(420.9687...)~0."""
    if dim < 1:
        raise ValueError("schwefel needs dim >= 1")

    def f(x):
        return SCHWEFEL_OFFSET * dim - float(np.sum(x * np.sin(np.sqrt(np.abs(x)))))

    return Problem(f"schwefel{dim}", _box(dim, -500.0, 500.0), f)


def griewank(dim: int) -> Problem:
    """Quadratic bowl modulated by an oscillatory product; f(0)=0."""
    if dim < 1:
        raise ValueError("griewank needs dim >= 1")
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, dim + 1, dtype=float))

    def f(x):
        return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x * inv_sqrt)) + 1.0)

    return Problem(f"griewank{dim}", _box(dim, -600.0, 600.0), f)


def branin() -> Problem:
    """Two-dimensional test surface with three global minimizers, f*=0.397887."""
    a, b, c = 1.0, 5.1 / (4.0 * np.pi**2), 5.0 / np.pi
    r, s, t = 6.0, 10.0, 1.0 / (8.0 * np.pi)

    def f(x):
        x1, x2 = float(x[0]), float(x[1])
        return a * (x2 - b * x1 * x1 + c * x1 - r) ** 2 + s * (1.0 - t) * np.cos(x1) + s

    return Problem("branin", Bounds(np.array([-5.0, 0.0]), np.array([10.0, 15.0])), f)


def himmelblau() -> Problem:
    """Four global minimizers, all with f=0; f(3,2)=0 exactly."""

    def f(x):
        x1, x2 = float(x[0]), float(x[1])
        return (x1 * x1 + x2 - 11.0) ** 2 + (x1 + x2 * x2 - 7.0) ** 2

    return Problem("himmelblau", _box(2, -6.0, 6.0), f)


@dataclass(frozen=True)
class KnapsackInstance:
    """0-1 knapsack data: item values, item weights, and a capacity."""

    values: np.ndarray
    weights: np.ndarray
    capacity: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "capacity", float(self.capacity))
        if v.ndim != 1 or w.ndim != 1 or v.size != w.size or v.size < 1:
            raise ValueError("values and weights must be equal-length vectors, length >= 1")
        if np.any(v <= 0) or np.any(w <= 0):
            raise ValueError("values and weights must be positive")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")

    @property
    def size(self) -> int:
        return self.values.size


def knapsack(instance: KnapsackInstance) -> Problem:
    """All-integer problem over {0,1}^m.

    Feasible selections score the negated total value (so better packs are
    lower); overweight selections score their excess weight, which is
    always positive and therefore worse than any feasible point.
    """
    v, w, cap = instance.values, instance.weights, instance.capacity

    def f(x):
        load = float(np.dot(w, x))
        if load <= cap:
            return -float(np.dot(v, x))
        return load - cap

    return Problem(f"knapsack{instance.size}", _box(instance.size, 0.0, 1.0), f,
                   integer_dim=instance.size)


def load_knapsack(path) -> KnapsackInstance:
    """Read an instance from text: first line ``m capacity``, then m lines ``value weight``."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: expected 'm capacity' on the first line")
    m, cap = int(tokens[0]), float(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise ValueError(f"{path}: expected {m} 'value weight' lines, found {len(body) // 2}")
    pairs = np.array(body, dtype=float).reshape(m, 2)
    return KnapsackInstance(pairs[:, 0], pairs[:, 1], cap)


def save_knapsack(instance: KnapsackInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{instance.size} {instance.capacity}\n")
        for v, w in zip(instance.values, instance.weights):
            fh.write(f"{v} {w}\n")
