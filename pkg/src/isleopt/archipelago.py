"""Islands and the archipelago: concurrent evolution with migration.

Each island couples one population with one algorithm and its migration
policies, and runs on its own thread. ``evolve(k)`` returns immediately
with the work forked in the background; ``join()`` blocks until every
island has finished its k cycles. One cycle is:

    drain own mailbox and merge immigrants
    -> run the algorithm once (with the island's own generator)
    -> post emigrant copies to every out-neighbour's mailbox

Migration timing across islands is inherently racy, matching the
asynchronous design; ``lockstep=True`` inserts a barrier at every cycle
boundary, which makes whole runs bit-reproducible for testing. Per-island
streams are seeded independently (derived from the archipelago seed), so
an island's behaviour is a deterministic function of its seed and the
immigrants it receives.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass

import numpy as np

from .core import Individual, Population, derive_seed, init_population, make_rng
from .migration import (CONDITIONAL_WORST, Mailbox, MigrationParams, ReplacementPolicy,
                        SelectionPolicy, merge_batch, select_emigrants)
from .topology import Topology, edgeless

__all__ = ["Archipelago", "Island", "IslandSnapshot"]


class Island:
    """One population + one algorithm + migration settings.

    Parameters
    ----------
    problem : Problem
        Shared problem definition; the island evaluates through its own
        counting view of it.
    algorithm : Algorithm
        Optimizer run once per cycle with the parameters it was built with.
    size : int
        Population size, randomly initialized when the island is inserted
        into an archipelago (or from ``population`` if given).
    migration : MigrationParams
    selection : SelectionPolicy
    replacement : ReplacementPolicy
    seed : int, optional
        Explicit island seed; otherwise derived from the archipelago seed
        and the island's insertion index.
    """

    def __init__(self, problem, algorithm, size: int = 1, *,
                 population: Population | None = None,
                 migration: MigrationParams = MigrationParams(),
                 selection: SelectionPolicy = SelectionPolicy(),
                 replacement: ReplacementPolicy = CONDITIONAL_WORST,
                 seed: int | None = None):
        if size < 0:
            raise ValueError("size must be >= 0")
        self.base_problem = problem
        self.problem = problem.localized()
        self.algorithm = algorithm
        self.size = len(population) if population is not None else int(size)
        self.migration = migration
        self.selection = selection
        self.replacement = replacement
        self.seed = seed
        self.index = None
        self.iterations_done = 0
        self.rng = None
        self._mig_rng = None
        self.population = None
        if population is not None:
            self.population = Population(self.problem, list(population.individuals),
                                         population.seed)

    def _seed_streams(self, seed: int, keep_population: bool = False) -> None:
        """(Re)derive population, algorithm stream and migration stream."""
        self.seed = seed
        self.rng = make_rng(derive_seed(seed, 1))
        self._mig_rng = make_rng(derive_seed(seed, 2))
        if not keep_population:
            self.population = init_population(self.problem, self.size, derive_seed(seed, 0))

    @property
    def champion(self) -> Individual:
        return self.population.champion

    def __repr__(self) -> str:
        return (f"Island(index={self.index}, algorithm={self.algorithm.name!r}, "
                f"size={self.size}, problem={self.problem.name!r})")


@dataclass(frozen=True)
class IslandSnapshot:
    island: int
    champion_f: float | None
    evaluations: int
    iterations: int


class Archipelago:
    """The set of islands, their topology, and the migration machinery.

    Parameters
    ----------
    topology : Topology or callable n -> Topology, default edgeless
        Materialized for the final island count when evolution starts, so
        generators like ``rim`` can be passed before any island exists.
    seed : int
        Master seed; island seeds derive from it by index unless islands
        carry explicit seeds.
    lockstep : bool
        Synchronize all islands at every cycle boundary (deterministic runs).
    max_workers : int, optional
        Cap on concurrently busy islands; defaults to the processor count
        and only engages when islands outnumber processors.
    """

    def __init__(self, topology=None, seed: int = 0, lockstep: bool = False,
                 max_workers: int | None = None):
        self.islands: list[Island] = []
        self._topology_spec = topology if topology is not None else edgeless
        self.topology: Topology | None = None
        self.seed = int(seed)
        self.lockstep = bool(lockstep)
        self.max_workers = max_workers
        self._mailboxes: list[Mailbox] = []
        self._threads: list[threading.Thread] = []
        self._status = "idle"
        self._lock = threading.Lock()
        self._best_ever: Individual | None = None
        self._errors: list[BaseException] = []
        self.run_records: list[dict] = []
        self.migration_records: list[dict] = []

    # -- construction -------------------------------------------------------

    @property
    def status(self) -> str:
        return self._status

    def _require_idle(self, what: str) -> None:
        if self._status != "idle":
            raise RuntimeError(f"cannot {what} while the archipelago is evolving")

    def push_back(self, island: Island) -> None:
        """Append an island; its index is its insertion position."""
        self._require_idle("push_back")
        if self.islands:
            first = self.islands[0]
            ok = (island.base_problem.same_definition(first.base_problem)
                  and np.array_equal(island.problem.bounds.lower, first.problem.bounds.lower)
                  and np.array_equal(island.problem.bounds.upper, first.problem.bounds.upper))
            if not ok:
                raise ValueError("island problem does not match the archipelago's problem")
        island.index = len(self.islands)
        if island.seed is None:
            island._seed_streams(derive_seed(self.seed, island.index),
                                 keep_population=island.population is not None)
        else:
            island._seed_streams(island.seed,
                                 keep_population=island.population is not None)
        self.islands.append(island)
        self._mailboxes.append(Mailbox())

    def __len__(self) -> int:
        return len(self.islands)

    # -- evolution ----------------------------------------------------------

    def evolve(self, iterations: int) -> None:
        """Fork ``iterations`` cycles per island in the background and return."""
        self._require_idle("evolve")
        if not self.islands:
            raise RuntimeError("cannot evolve an empty archipelago")
        if iterations < 0:
            raise ValueError("iterations must be >= 0")
        n = len(self.islands)
        spec = self._topology_spec
        topo = spec(n) if callable(spec) else spec
        if topo.n != n:
            raise ValueError(f"topology has {topo.n} nodes but archipelago has {n} islands")
        self.topology = topo
        with self._lock:
            for isl in self.islands:
                if len(isl.population):
                    c = isl.population.champion
                    if self._best_ever is None or c.f < self._best_ever.f:
                        self._best_ever = c
        barrier = threading.Barrier(n) if self.lockstep else None
        cap = self.max_workers or os.cpu_count() or 1
        sem = threading.Semaphore(cap) if n > cap else None
        self._errors = []
        self._status = "evolving"
        self._threads = [
            threading.Thread(target=self._island_loop, args=(isl, iterations, barrier, sem),
                             name=f"island-{isl.index}", daemon=True)
            for isl in self.islands
        ]
        for t in self._threads:
            t.start()

    def _island_loop(self, island: Island, iterations: int, barrier, sem) -> None:
        try:
            if iterations == 0:
                self._apply_inbox(island)
                return
            for _ in range(iterations):
                if sem:
                    sem.acquire()
                try:
                    self._apply_inbox(island)
                    island.population = island.algorithm.evolve(island.population, island.rng)
                    island.iterations_done += 1
                    tick = island.iterations_done
                    if tick % island.migration.frequency == 0:
                        self._emigrate(island, tick)
                    self._publish(island, tick)
                finally:
                    if sem:
                        sem.release()
                if barrier:
                    barrier.wait()
        except Exception as exc:  # surfaced at join()
            self._errors.append(exc)
            if barrier:
                barrier.abort()

    def _apply_inbox(self, island: Island) -> None:
        for src, batch in self._mailboxes[island.index].drain():
            accepted = False
            if batch:
                accepted = island._mig_rng.random() < island.migration.acceptance_probability
            if accepted:
                island.population = merge_batch(island.population, batch, island.replacement)
            self.migration_records.append({
                "kind": "apply", "tick": island.iterations_done + 1, "src": src,
                "dst": island.index, "fitnesses": [ind.f for ind in batch],
                "accepted": bool(accepted),
            })

    def _emigrate(self, island: Island, tick: int) -> None:
        batch = select_emigrants(island.population, island.selection, island.migration.rate)
        for dst in self.topology.neighbors_out(island.index):
            self._mailboxes[dst].post(island.index, batch)
            self.migration_records.append({
                "kind": "post", "tick": tick, "src": island.index, "dst": dst,
                "fitnesses": [ind.f for ind in batch],
            })

    def _publish(self, island: Island, tick: int) -> None:
        champ = island.population.champion if len(island.population) else None
        with self._lock:
            if champ is not None and (self._best_ever is None or champ.f < self._best_ever.f):
                self._best_ever = champ
        self.run_records.append({
            "island": island.index, "iteration": tick,
            "champion_f": champ.f if champ else None,
            "evaluations": island.problem.local_evaluations,
        })

    def join(self) -> None:
        """Block until the background evolution (if any) completes."""
        for t in self._threads:
            t.join()
        self._threads = []
        self._status = "idle"
        if self._errors:
            err = self._errors[0]
            self._errors = []
            raise RuntimeError("an island failed during evolution") from err

    # -- inspection ---------------------------------------------------------

    def best(self) -> Individual:
        """Lowest-fitness individual on record (current champions and the
        best ever observed during evolution since the last reset)."""
        self._require_idle("read best")
        champ = None
        for isl in self.islands:
            if len(isl.population):
                c = isl.population.champion
                if champ is None or c.f < champ.f:
                    champ = c
        if champ is None:
            raise ValueError("all populations are empty")
        if self._best_ever is not None and self._best_ever.f < champ.f:
            return self._best_ever
        return champ

    def snapshot(self) -> list[IslandSnapshot]:
        """Per-island progress view; safe to call during evolution."""
        out = []
        for isl in self.islands:
            pop = isl.population
            champ_f = pop.champion.f if pop is not None and len(pop) else None
            out.append(IslandSnapshot(isl.index, champ_f,
                                      isl.problem.local_evaluations, isl.iterations_done))
        return out

    def reset(self, seed: int) -> None:
        """Re-randomize every population (sizes preserved), clear mailboxes,
        in-flight migrants, logs and the best-ever record; reseed streams."""
        self._require_idle("reset")
        self.seed = int(seed)
        for isl in self.islands:
            isl._seed_streams(derive_seed(seed, isl.index))
            isl.iterations_done = 0
        for box in self._mailboxes:
            box.clear()
        self._best_ever = None
        self.run_records = []
        self.migration_records = []

    def total_evaluations(self) -> int:
        problems = {id(isl.base_problem): isl.base_problem for isl in self.islands}
        return sum(p.evaluations for p in problems.values())

    def __repr__(self) -> str:
        return (f"Archipelago(islands={len(self.islands)}, status={self._status!r}, "
                f"seed={self.seed})")
