"""Multistart search with archive recording and bounding-box pruning.

The search strategy: run the archipelago repeatedly from fresh random
populations, recording the best candidate of each run; then shrink the box
to the region spanned by the top candidates (with a little padding) and
repeat on the narrowed problem. Each pruned box nests inside its
predecessor, so every solution found remains valid in the original box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Bounds, Individual, Problem, derive_seed

__all__ = [
    "ArchiveEntry",
    "ChampionArchive",
    "multistart_campaign",
    "prune_bounds",
    "pruned_problem",
    "pruning_cycles",
]


@dataclass(frozen=True)
class ArchiveEntry:
    x: np.ndarray
    f: float
    run_index: int


@dataclass
class ChampionArchive:
    """Best-of-run decision vectors collected across a multistart campaign."""

    problem: Problem
    entries: list[ArchiveEntry] = field(default_factory=list)

    def add(self, individual: Individual, run_index: int) -> None:
        self.entries.append(ArchiveEntry(np.array(individual.x), individual.f, run_index))

    def __len__(self) -> int:
        return len(self.entries)

    def best(self) -> ArchiveEntry:
        return min(self.entries, key=lambda e: e.f)

    def to_text(self) -> str:
        """One line per entry: ``run_index fitness x_0 ... x_{n-1}``."""
        lines = []
        for e in self.entries:
            coords = " ".join(repr(float(v)) for v in e.x)
            lines.append(f"{e.run_index} {e.f!r} {coords}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, problem: Problem, text: str) -> "ChampionArchive":
        archive = cls(problem)
        for line in text.splitlines():
            if not line.strip():
                continue
            parts = line.split()
            archive.entries.append(ArchiveEntry(
                np.array([float(v) for v in parts[2:]]), float(parts[1]), int(parts[0])))
        return archive


def multistart_campaign(archipelago, runs: int, iterations_per_run: int, seed: int,
                        on_run=None) -> ChampionArchive:
    """Repeat reset -> evolve -> join ``runs`` times, archiving each best.

    Run k is reseeded with a seed derived from ``seed`` and k, so one master
    seed reproduces the whole campaign (exactly, under lockstep).
    ``on_run(k, best)`` is invoked after each run for progress/log capture.
    """
    if not archipelago.islands:
        raise RuntimeError("campaign needs a non-empty archipelago")
    archive = ChampionArchive(archipelago.islands[0].base_problem)
    for k in range(runs):
        archipelago.reset(derive_seed(seed, k))
        archipelago.evolve(iterations_per_run)
        archipelago.join()
        best = archipelago.best()
        archive.add(best, k)
        if on_run is not None:
            on_run(k, best)
    return archive


def prune_bounds(archive: ChampionArchive, keep_fraction: float = 0.1,
                 padding: float = 0.03) -> Bounds:
    """Bounding box of the best ``keep_fraction`` of the archive.

    The box is padded by ``padding`` times the original per-dimension range
    and clamped back into the problem's current bounds, so it always nests.
    """
    if not archive.entries:
        raise ValueError("cannot prune an empty archive")
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must be in (0, 1]")
    if padding < 0.0:
        raise ValueError("padding must be >= 0")
    keep = max(1, math.ceil(keep_fraction * len(archive.entries)))
    top = sorted(archive.entries, key=lambda e: e.f)[:keep]
    points = np.array([e.x for e in top])
    bounds = archive.problem.bounds
    pad = padding * bounds.range
    lower = np.maximum(points.min(axis=0) - pad, bounds.lower)
    upper = np.minimum(points.max(axis=0) + pad, bounds.upper)
    return Bounds(lower, upper)


def pruned_problem(problem: Problem, bounds: Bounds) -> Problem:
    """The same objective restricted to a nested box (counter is shared)."""
    return problem.narrowed(bounds)


def pruning_cycles(problem: Problem, archipelago_factory, cycles: int,
                   runs_per_cycle: int, iterations_per_run: int,
                   keep_fraction: float = 0.1, padding: float = 0.03,
                   seed: int = 0, on_run=None):
    """Alternate multistart campaigns with bound pruning.

    ``archipelago_factory(problem)`` builds a fresh archipelago on each
    cycle's (narrowed) problem. Returns the overall best individual (valid
    in the original box, fitness cache-coherent) and the list of pruned
    bounds after each cycle. Also returns the per-cycle archives for
    inspection: ``(best, bounds_history, archives)``.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    current = problem
    best: Individual | None = None
    history: list[Bounds] = []
    archives: list[ChampionArchive] = []
    for cycle in range(cycles):
        arch = archipelago_factory(current)
        archive = multistart_campaign(arch, runs_per_cycle, iterations_per_run,
                                      derive_seed(seed, cycle),
                                      on_run=on_run)
        archives.append(archive)
        top = archive.best()
        if best is None or top.f < best.f:
            best = Individual(top.x, top.f)
        new_bounds = prune_bounds(archive, keep_fraction, padding)
        history.append(new_bounds)
        current = pruned_problem(current, new_bounds)
    return best, history, archives
