"""Migration policies and the per-island mailbox.

Emigrants are always copies: migration never removes individuals from the
source population. Mailboxes are the only state shared between islands;
``post`` and ``drain`` are safe under arbitrary concurrent calls, and a
newer batch from the same source overwrites the older one (bounded memory,
freshest solutions win).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .core import Individual, Population

__all__ = [
    "CONDITIONAL_WORST",
    "Mailbox",
    "MigrationParams",
    "ReplacementPolicy",
    "SelectionPolicy",
    "UNCONDITIONAL_WORST",
    "apply_immigrants",
    "merge_batch",
    "select_emigrants",
    "worst_r_policy",
]


@dataclass(frozen=True)
class MigrationParams:
    """Per-island migration knobs.

    rate: individuals selected per migration event; frequency: migrate every
    k-th internal iteration; acceptance_probability: chance (one draw per
    incoming batch) that an island admits a batch at all.
    """

    rate: int = 1
    frequency: int = 1
    acceptance_probability: float = 1.0

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be >= 0")
        if self.frequency < 1:
            raise ValueError("frequency must be >= 1")
        if not 0.0 <= self.acceptance_probability <= 1.0:
            raise ValueError("acceptance_probability must be in [0, 1]")


@dataclass(frozen=True)
class SelectionPolicy:
    """How emigrants are chosen; only best-k selection is supported."""

    kind: str = "best"

    def __post_init__(self):
        if self.kind != "best":
            raise ValueError(f"unknown selection policy {self.kind!r}")


@dataclass(frozen=True)
class ReplacementPolicy:
    """How immigrants merge into a population.

    ``conditional_worst`` (the default) admits an immigrant only when it
    beats the current worst member; ``unconditional_worst`` overwrites the
    current worst regardless, which is what a dedicated refinement island
    wants so that it works on every incoming candidate.
    """

    kind: str = "conditional_worst"

    def __post_init__(self):
        if self.kind not in ("conditional_worst", "unconditional_worst"):
            raise ValueError(f"unknown replacement policy {self.kind!r}")


CONDITIONAL_WORST = ReplacementPolicy("conditional_worst")
UNCONDITIONAL_WORST = ReplacementPolicy("unconditional_worst")


def worst_r_policy() -> ReplacementPolicy:
    """Replacement policy that unconditionally overwrites the worst member."""
    return UNCONDITIONAL_WORST


def select_emigrants(pop: Population, policy: SelectionPolicy = SelectionPolicy(),
                     rate: int = 1):
    """Copies of the min(rate, size) best individuals, best first."""
    if rate <= 0 or not len(pop):
        return []
    order = np.argsort(pop.fitnesses, kind="stable")
    return [pop.individuals[i] for i in order[: min(rate, len(pop))]]


def _check_fit(pop: Population, incoming) -> None:
    n = pop.problem.dim
    for ind in incoming:
        if ind.x.size != n or not pop.problem.bounds.contains(ind.x):
            raise ValueError(
                f"immigrant does not fit the population's problem: x={ind.x.tolist()}")


def merge_batch(pop: Population, incoming, policy: ReplacementPolicy) -> Population:
    """Merge an already-accepted batch: incoming individuals are applied
    best first, each replacing the then-current worst member (only when
    strictly better under ``conditional_worst``). Size is preserved."""
    _check_fit(pop, incoming)
    out = pop.copy()
    if not len(out):
        return out
    for ind in sorted(incoming, key=lambda i: i.f):
        worst = out.worst_index
        if policy.kind == "unconditional_worst" or ind.f < out.individuals[worst].f:
            out.individuals[worst] = ind
    return out


def apply_immigrants(pop: Population, incoming, policy: ReplacementPolicy,
                     accept_prob: float, rng: np.random.Generator) -> Population:
    """Merge one incoming batch, gated by a single acceptance draw."""
    _check_fit(pop, incoming)
    if not incoming or not len(pop):
        return pop.copy()
    if rng.random() >= accept_prob:
        return pop.copy()
    return merge_batch(pop, incoming, policy)


class Mailbox:
    """Per-island inbox of in-flight migrant batches, keyed by source island.

    ``post`` overwrites any batch already pending from the same source;
    ``drain`` atomically removes and returns everything. Both are safe under
    concurrent calls from any number of threads.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._batches: dict[int, list[Individual]] = {}

    def post(self, src: int, batch) -> None:
        with self._lock:
            self._batches[int(src)] = list(batch)

    def drain(self):
        """All pending (src, batch) pairs in ascending src order; empties the box."""
        with self._lock:
            pending = self._batches
            self._batches = {}
        return sorted(pending.items())

    def clear(self) -> None:
        with self._lock:
            self._batches = {}

    def __len__(self) -> int:
        with self._lock:
            return len(self._batches)
