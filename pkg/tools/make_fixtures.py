#!/usr/bin/env python3
"""Regenerate the statistical fixtures under tests/fixtures/.

Runs every run-and-record experiment at full scale and freezes the
per-seed results plus a few deterministic regression anchors. Re-run after
any change that affects random streams or algorithm arithmetic, and review
the diff; `pytest -m slow` verifies the committed fixtures from scratch.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import isleopt as io
from isleopt.algorithms import nelder_mead_minimize

import experiments


def regression_anchors():
    prob = io.rosenbrock(2)
    start = np.array([-1.2, 1.0])
    pop = io.Population(prob, [io.Individual(start, prob.evaluate(start))])
    out = io.CompassSearch(100_000).evolve(pop, None)

    quad = io.Problem("q", io.Bounds(np.array([0.0]), np.array([5.0])),
                      lambda x: (float(x[0]) - 2.0) ** 2)
    _, f_nm = nelder_mead_minimize(quad, np.array([0.0]), 200, 1e-9)
    return {"compass_rosenbrock2_f": out.champion.f, "nm_quadratic1d_f": f_nm}


def main():
    t0 = time.time()
    out_dir = experiments.FIXTURE_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    experiments.generate_all(out_dir)
    (out_dir / "anchors.json").write_text(json.dumps(regression_anchors(), indent=1) + "\n")
    print(f"wrote anchors.json\ndone in {time.time() - t0:.1f}s -> {out_dir}")


if __name__ == "__main__":
    main()
