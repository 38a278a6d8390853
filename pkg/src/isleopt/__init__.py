"""isleopt: asynchronous island-model global optimization.

Populations of candidate solutions evolve concurrently on islands linked
by a migration topology, exchanging their best individuals to improve
convergence. Ships native global/local optimizers, classic benchmark
problems, topology generators, migration policies, and a multistart +
bound-pruning search strategy, plus a CLI experiment runner.
"""

from .algorithms import (ALGORITHMS, Algorithm, BasinHopping, CompassSearch,
                         CoranaAnnealing, DifferentialEvolution, HarmonySearch, Identity,
                         MonteCarlo, Multistart, NelderMead, ParticleSwarm, SimpleGA)
from .archipelago import Archipelago, Island, IslandSnapshot
from .core import (Bounds, Individual, Population, Problem, champion, derive_seed,
                   evaluate, init_population, make_rng, random_individual)
from .migration import (CONDITIONAL_WORST, UNCONDITIONAL_WORST, Mailbox, MigrationParams,
                        ReplacementPolicy, SelectionPolicy, apply_immigrants, merge_batch,
                        select_emigrants, worst_r_policy)
from .problems import (KnapsackInstance, branin, griewank, himmelblau, knapsack,
                       load_knapsack, rastrigin, rosenbrock, save_knapsack, schwefel)
from .strategy import (ChampionArchive, multistart_campaign, prune_bounds,pruned_problem,
                       pruning_cycles)
from .topology import (TOPOLOGIES, Topology, barabasi_albert, custom, edgeless,
                       erdos_renyi, fully_connected, hypercube, rim, ring, watts_strogatz)

__version__ = "0.1.0"
