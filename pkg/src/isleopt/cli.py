"""Experiment runner: configure an archipelago run from a JSON file.

Subcommands::

    isleopt run <config.json> [--validate] [--lockstep] [--seed N] [--out DIR]
    isleopt list {problems|algorithms|topologies}
    isleopt export <results.json> {convergence|archive|topology} [--out DIR]

Exit codes: 0 success, 1 configuration error (the message names the
offending key), 2 runtime failure. ``ISLEOPT_OUT`` sets the default output
directory. One master seed (``run.seed`` or ``--seed``) reproduces a whole
experiment: island seeds derive from it by index via the documented
splitmix64 scheme (:func:`isleopt.core.derive_seed`).

Outputs written to the output directory:

* ``results.json``   -- machine-readable results (deterministic content)
* ``timing.json``    -- wall-clock metadata, kept out of results.json so
  that lockstep reruns produce byte-identical result files
* ``run_log.jsonl``  -- one record per island iteration
* ``migration_log.jsonl`` -- one record per migrant batch posted/applied
* ``archive.txt``    -- best-of-run archive (campaign and pruning modes)
"""

from __future__ import annotations

import argparse
import inspect
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from . import algorithms as alg_mod
from . import problems as prob_mod
from . import topology as topo_mod
from .archipelago import Archipelago, Island
from .core import derive_seed
from .migration import MigrationParams, ReplacementPolicy, SelectionPolicy
from .strategy import ChampionArchive, multistart_campaign, pruning_cycles

__all__ = ["ConfigError", "main", "normalize_config", "run_experiment", "shipped_configs"]


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key."""


PROBLEM_PARAMS = {
    "rastrigin": ("dim",),
    "rosenbrock": ("dim",),
    "schwefel": ("dim",),
    "griewank": ("dim",),
    "branin": (),
    "himmelblau": (),
    "knapsack": ("path",),
}

TOPOLOGY_PARAMS = {
    "ring": (),
    "fully_connected": (),
    "hypercube": (),
    "rim": (),
    "edgeless": (),
    "barabasi_albert": ("m", "seed"),
    "watts_strogatz": ("k", "beta", "seed"),
    "erdos_renyi": ("p", "seed"),
}

MODES = ("single", "campaign", "pruning_cycles")


def _need(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"missing required key '{path}.{key}'" if path else
                          f"missing required key '{key}'")
    return mapping[key]


def _check_known(mapping: dict, allowed, path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}'" if path else f"unknown key '{key}'")


def _normalize_algorithm(spec, path: str) -> dict:
    if not isinstance(spec, dict):
        raise ConfigError(f"'{path}' must be an object")
    name = _need(spec, "name", path)
    if name not in alg_mod.ALGORITHMS:
        raise ConfigError(f"unknown algorithm '{name}' at '{path}.name'")
    cls = alg_mod.ALGORITHMS[name]
    sig = inspect.signature(cls.__init__)
    params = [p for p in sig.parameters.values() if p.name not in ("self",)]
    out = {"name": name}
    _check_known(spec, {"name"} | {p.name for p in params}, path)
    for p in params:
        if p.name == "inner":
            inner = _need(spec, "inner", path)
            out["inner"] = _normalize_algorithm(inner, f"{path}.inner")
            continue
        if p.name in spec:
            out[p.name] = spec[p.name]
        elif p.default is not inspect.Parameter.empty:
            out[p.name] = p.default
        else:
            raise ConfigError(f"missing required key '{path}.{p.name}'")
    return out


def _build_algorithm(norm: dict):
    cls = alg_mod.ALGORITHMS[norm["name"]]
    kwargs = {k: v for k, v in norm.items() if k != "name"}
    if "inner" in kwargs:
        kwargs["inner"] = _build_algorithm(kwargs["inner"])
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid parameters for algorithm '{norm['name']}': {exc}") from exc


def normalize_config(raw: dict) -> dict:
    """Validate a raw config dict and fill in every default.

    The result is canonical: normalizing it again is the identity, which is
    what ``--validate`` round-trips rely on.
    """
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be an object")
    _check_known(raw, {"problem", "islands", "topology", "run", "output"}, "")

    prob = _need(raw, "problem", "")
    pname = _need(prob, "name", "problem")
    if pname not in PROBLEM_PARAMS:
        raise ConfigError(f"unknown problem '{pname}' at 'problem.name'")
    _check_known(prob, {"name", *PROBLEM_PARAMS[pname]}, "problem")
    norm_prob = {"name": pname}
    for key in PROBLEM_PARAMS[pname]:
        norm_prob[key] = _need(prob, key, "problem")

    islands_raw = _need(raw, "islands", "")
    if not isinstance(islands_raw, list) or not islands_raw:
        raise ConfigError("'islands' must be a non-empty list")
    islands = []
    for idx, isl in enumerate(islands_raw):
        path = f"islands[{idx}]"
        if not isinstance(isl, dict):
            raise ConfigError(f"'{path}' must be an object")
        _check_known(isl, {"algorithm", "size", "migration", "selection", "replacement"}, path)
        algo = _normalize_algorithm(_need(isl, "algorithm", path), f"{path}.algorithm")
        size = isl.get("size", 1)
        if not isinstance(size, int) or size < 1:
            raise ConfigError(f"'{path}.size' must be a positive integer")
        mig_raw = isl.get("migration", {})
        _check_known(mig_raw, {"rate", "frequency", "acceptance_probability"},
                     f"{path}.migration")
        migration = {
            "rate": mig_raw.get("rate", 1),
            "frequency": mig_raw.get("frequency", 1),
            "acceptance_probability": mig_raw.get("acceptance_probability", 1.0),
        }
        try:
            MigrationParams(**migration)
        except ValueError as exc:
            raise ConfigError(f"invalid '{path}.migration': {exc}") from exc
        selection = isl.get("selection", "best")
        replacement = isl.get("replacement", "conditional_worst")
        try:
            SelectionPolicy(selection)
            ReplacementPolicy(replacement)
        except ValueError as exc:
            raise ConfigError(f"invalid policy in '{path}': {exc}") from exc
        islands.append({"algorithm": algo, "size": size, "migration": migration,
                        "selection": selection, "replacement": replacement})

    topo_raw = raw.get("topology", {"name": "edgeless"})
    tname = _need(topo_raw, "name", "topology")
    if tname not in TOPOLOGY_PARAMS:
        raise ConfigError(f"unknown topology '{tname}' at 'topology.name'")
    _check_known(topo_raw, {"name", *TOPOLOGY_PARAMS[tname]}, "topology")
    norm_topo = {"name": tname}
    for key in TOPOLOGY_PARAMS[tname]:
        if key == "seed":
            norm_topo[key] = topo_raw.get(key)  # None -> derived from master seed
        else:
            norm_topo[key] = _need(topo_raw, key, "topology")

    run_raw = _need(raw, "run", "")
    _check_known(run_raw, {"mode", "iterations", "runs", "cycles", "keep_fraction",
                           "padding", "seed", "lockstep"}, "run")
    mode = run_raw.get("mode", "single")
    if mode not in MODES:
        raise ConfigError(f"unknown mode '{mode}' at 'run.mode'")
    norm_run = {
        "mode": mode,
        "iterations": run_raw.get("iterations", 1),
        "seed": run_raw.get("seed", 0),
        "lockstep": bool(run_raw.get("lockstep", False)),
    }
    if not isinstance(norm_run["iterations"], int) or norm_run["iterations"] < 0:
        raise ConfigError("'run.iterations' must be a non-negative integer")
    if mode in ("campaign", "pruning_cycles"):
        norm_run["runs"] = _need(run_raw, "runs", "run")
        if not isinstance(norm_run["runs"], int) or norm_run["runs"] < 1:
            raise ConfigError("'run.runs' must be a positive integer")
    if mode == "pruning_cycles":
        norm_run["cycles"] = _need(run_raw, "cycles", "run")
        if not isinstance(norm_run["cycles"], int) or norm_run["cycles"] < 1:
            raise ConfigError("'run.cycles' must be a positive integer")
        norm_run["keep_fraction"] = run_raw.get("keep_fraction", 0.1)
        norm_run["padding"] = run_raw.get("padding", 0.03)
        if not 0.0 < norm_run["keep_fraction"] <= 1.0:
            raise ConfigError("'run.keep_fraction' must be in (0, 1]")
        if norm_run["padding"] < 0.0:
            raise ConfigError("'run.padding' must be >= 0")

    output = raw.get("output", {})
    _check_known(output, {"dir"}, "output")
    norm_out = {"dir": output.get("dir")}

    return {"problem": norm_prob, "islands": islands, "topology": norm_topo,
            "run": norm_run, "output": norm_out}


def _build_problem(norm: dict, config_dir: Path):
    name = norm["name"]
    try:
        if name == "knapsack":
            path = Path(norm["path"])
            if not path.is_absolute():
                path = config_dir / path
            return prob_mod.knapsack(prob_mod.load_knapsack(path))
        if name in ("branin", "himmelblau"):
            return getattr(prob_mod, name)()
        return getattr(prob_mod, name)(int(norm["dim"]))
    except ConfigError:
        raise
    except (OSError, ValueError) as exc:
        raise ConfigError(f"invalid 'problem': {exc}") from exc


def _topology_factory(norm: dict, master_seed: int):
    name = norm["name"]
    gen = topo_mod.TOPOLOGIES[name]
    params = {k: v for k, v in norm.items() if k != "name"}
    if "seed" in params and params["seed"] is None:
        params["seed"] = derive_seed(master_seed, 0x7079)
    return lambda n: gen(n, **params)


def _build_archipelago(norm: dict, problem, master_seed: int, lockstep: bool) -> Archipelago:
    arch = Archipelago(topology=_topology_factory(norm["topology"], master_seed),
                       seed=master_seed, lockstep=lockstep)
    for spec in norm["islands"]:
        island = Island(problem, _build_algorithm(spec["algorithm"]), spec["size"],
                        migration=MigrationParams(**spec["migration"]),
                        selection=SelectionPolicy(spec["selection"]),
                        replacement=ReplacementPolicy(spec["replacement"]))
        arch.push_back(island)
    return arch


class _LogWriter:
    """Streams archipelago records to JSONL files, tagging campaign runs."""

    def __init__(self, out_dir: Path):
        self.run_path = out_dir / "run_log.jsonl"
        self.mig_path = out_dir / "migration_log.jsonl"
        self.run_path.write_text("")
        self.mig_path.write_text("")

    def flush(self, arch: Archipelago, extra: dict | None = None) -> None:
        extra = extra or {}
        # concurrent islands append in scheduling order; sort so lockstep
        # reruns produce identical files
        runs = sorted(arch.run_records, key=lambda r: (r["iteration"], r["island"]))
        migs = sorted(arch.migration_records,
                      key=lambda r: (r["tick"], r["src"], r["dst"], r["kind"]))
        with open(self.run_path, "a", encoding="utf-8") as fh:
            for rec in runs:
                fh.write(json.dumps({**extra, **rec}, sort_keys=True) + "\n")
        with open(self.mig_path, "a", encoding="utf-8") as fh:
            for rec in migs:
                fh.write(json.dumps({**extra, **rec}, sort_keys=True) + "\n")
        arch.run_records = []
        arch.migration_records = []


def _island_report(arch: Archipelago) -> list[dict]:
    out = []
    for isl in arch.islands:
        champ = isl.population.champion if len(isl.population) else None
        out.append({
            "index": isl.index,
            "algorithm": isl.algorithm.name,
            "size": len(isl.population),
            "champion_f": champ.f if champ else None,
            "champion_x": champ.x.tolist() if champ else None,
            "evaluations": isl.problem.local_evaluations,
            "iterations": isl.iterations_done,
            "population_f": [ind.f for ind in isl.population],
            "population_x": [ind.x.tolist() for ind in isl.population],
        })
    return out


def run_experiment(norm: dict, config_dir: Path, out_dir: Path) -> dict:
    """Execute a normalized config; returns the results document."""
    run = norm["run"]
    master_seed = run["seed"]
    problem = _build_problem(norm["problem"], config_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    logs = _LogWriter(out_dir)
    started = time.time()

    results = {
        "mode": run["mode"],
        "seed": master_seed,
        "lockstep": run["lockstep"],
        "config": norm,
        "problem": {
            "name": problem.name,
            "dim": problem.dim,
            "integer_dim": problem.integer_dim,
            "lower": problem.bounds.lower.tolist(),
            "upper": problem.bounds.upper.tolist(),
        },
    }

    if run["mode"] == "single":
        arch = _build_archipelago(norm, problem, master_seed, run["lockstep"])
        arch.evolve(run["iterations"])
        arch.join()
        logs.flush(arch)
        best = arch.best()
        results["best"] = {"f": best.f, "x": best.x.tolist()}
        results["islands"] = _island_report(arch)
        results["topology"] = {
            "name": arch.topology.generator_tag, "n": arch.topology.n,
            "edges": sorted(arch.topology.edges),
        }
    elif run["mode"] == "campaign":
        arch = _build_archipelago(norm, problem, master_seed, run["lockstep"])
        archive = multistart_campaign(
            arch, run["runs"], run["iterations"], master_seed,
            on_run=lambda k, best: logs.flush(arch, {"run": k}))
        (out_dir / "archive.txt").write_text(archive.to_text())
        top = archive.best()
        results["best"] = {"f": top.f, "x": top.x.tolist()}
        results["runs"] = run["runs"]
        results["archive_file"] = "archive.txt"
        results["islands"] = _island_report(arch)
        results["topology"] = {
            "name": arch.topology.generator_tag, "n": arch.topology.n,
            "edges": sorted(arch.topology.edges),
        }
    else:  # pruning_cycles
        cycle_state = {"cycle": 0, "arch": None}
        log_state = {}

        def factory(prob):
            arch = _build_archipelago(norm, prob, master_seed, run["lockstep"])
            log_state["arch"] = arch
            return arch

        def on_run(k, best):
            logs.flush(log_state["arch"], {"cycle": cycle_state["cycle"], "run": k})
            if k == run["runs"] - 1:
                cycle_state["cycle"] += 1

        best, history, archives = pruning_cycles(
            problem, factory, run["cycles"], run["runs"], run["iterations"],
            run["keep_fraction"], run["padding"], master_seed, on_run=on_run)
        merged = ChampionArchive(problem)
        for cycle, archive in enumerate(archives):
            for e in archive.entries:
                merged.entries.append(
                    type(e)(e.x, e.f, cycle * run["runs"] + e.run_index))
        (out_dir / "archive.txt").write_text(merged.to_text())
        results["best"] = {"f": best.f, "x": best.x.tolist()}
        results["cycles"] = run["cycles"]
        results["runs_per_cycle"] = run["runs"]
        results["archive_file"] = "archive.txt"
        results["bounds_history"] = [
            {"lower": b.lower.tolist(), "upper": b.upper.tolist()} for b in history
        ]

    results["total_evaluations"] = problem.evaluations
    (out_dir / "results.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n")
    (out_dir / "timing.json").write_text(
        json.dumps({"wall_time_s": time.time() - started}, indent=2) + "\n")
    return results


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    config_path = Path(args.config)
    try:
        raw = json.loads(config_path.read_text())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 1
    try:
        norm = normalize_config(raw)
        if args.seed is not None:
            norm["run"]["seed"] = args.seed
        if args.lockstep:
            norm["run"]["lockstep"] = True
        if args.validate:
            print(json.dumps(norm, indent=2, sort_keys=True))
            return 0
        out_dir = Path(args.out or norm["output"]["dir"]
                       or os.environ.get("ISLEOPT_OUT", "results"))
        results = run_experiment(norm, config_path.resolve().parent, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"best f = {results['best']['f']!r}")
    print(f"results written to {out_dir}")
    return 0


def _signature_of(fn) -> str:
    params = [p for p in inspect.signature(fn).parameters.values() if p.name != "self"]
    parts = []
    for p in params:
        if p.default is inspect.Parameter.empty:
            parts.append(p.name)
        else:
            parts.append(f"{p.name}={p.default!r}")
    return ", ".join(parts)


def _cmd_list(args) -> int:
    kind = args.kind
    if kind == "problems":
        for name, params in sorted(PROBLEM_PARAMS.items()):
            print(f"{name}({', '.join(params)})")
    elif kind == "algorithms":
        for name, cls in sorted(alg_mod.ALGORITHMS.items()):
            print(f"{name}({_signature_of(cls.__init__)})")
    elif kind == "topologies":
        for name in sorted(TOPOLOGY_PARAMS):
            extra = TOPOLOGY_PARAMS[name]
            sig = ", ".join(("n",) + extra)
            print(f"{name}({sig})")
    else:
        print(f"error: unknown kind '{kind}' (expected problems, algorithms or topologies)",
              file=sys.stderr)
        return 1
    return 0


def _cmd_export(args) -> int:
    results_path = Path(args.results)
    if results_path.is_dir():
        results_path = results_path / "results.json"
    if not results_path.exists():
        print(f"error: no results at {results_path}", file=sys.stderr)
        return 1
    out_dir = Path(args.out or results_path.parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = json.loads(results_path.read_text())
    what = args.what
    if what == "convergence":
        log_path = results_path.parent / "run_log.jsonl"
        if not log_path.exists():
            print(f"error: no run log at {log_path}", file=sys.stderr)
            return 1
        rows = [json.loads(line) for line in log_path.read_text().splitlines() if line]
        with open(out_dir / "convergence.tsv", "w", encoding="utf-8") as fh:
            fh.write("tick\tisland\tchampion_f\n")
            for rec in rows:
                fh.write(f"{rec['iteration']}\t{rec['island']}\t{rec['champion_f']!r}\n")
        print(out_dir / "convergence.tsv")
    elif what == "archive":
        src = results_path.parent / results.get("archive_file", "archive.txt")
        if not src.exists():
            print(f"error: no archive at {src}", file=sys.stderr)
            return 1
        (out_dir / "archive.tsv").write_text(
            "\n".join("\t".join(line.split()) for line in src.read_text().splitlines())
            + "\n")
        print(out_dir / "archive.tsv")
    elif what == "topology":
        topo = results.get("topology")
        if not topo:
            print("error: results contain no topology section", file=sys.stderr)
            return 1
        lines = [str(topo["n"])] + [f"{a} {b}" for a, b in topo["edges"]]
        (out_dir / "topology.txt").write_text("\n".join(lines) + "\n")
        print(out_dir / "topology.txt")
    else:
        print(f"error: unknown export kind '{what}'", file=sys.stderr)
        return 1
    return 0


def shipped_configs() -> dict[str, Path]:
    """Name -> path of the example configuration files installed with the package."""
    base = resources.files(__package__) / "configs"
    return {p.name: Path(str(p)) for p in base.iterdir() if p.name.endswith(".json")}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="isleopt",
                                     description="Island-model global optimization runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--validate", action="store_true",
                       help="parse, echo the normalized config and exit")
    p_run.add_argument("--lockstep", action="store_true",
                       help="barrier-synchronize island cycles (deterministic runs)")
    p_run.add_argument("--seed", type=int, default=None, help="override run.seed")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list", help="list registered components")
    p_list.add_argument("kind")
    p_list.set_defaults(func=_cmd_list)

    p_export = sub.add_parser("export", help="export plot-ready tables from results")
    p_export.add_argument("results")
    p_export.add_argument("what")
    p_export.add_argument("--out", default=None)
    p_export.set_defaults(func=_cmd_export)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
