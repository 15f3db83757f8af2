"""Compare the compiled stress kernel against the pure NumPy fallback.

Evaluator timings run both backends in-process on identical pair tables;
the hill-climb timing launches a subprocess per backend because the
selection is fixed at import time.

    python3 benchmarks/bench_kernels.py
"""
import os
import subprocess
import sys
import timeit

import numpy as np

from stresslab.graphs import generate_graph
from stresslab.kernels import pure

try:
    from stresslab.kernels import _ckern
except ImportError:
    _ckern = None

SIZES = (10, 25, 50)

CLIMB_SNIPPET = """
import time
import numpy as np
from stresslab.graphs import generate_graph
from stresslab.hillclimb import HillClimbConfig, hill_climb
from stresslab.kernels import BACKEND_NAME

graph = generate_graph(50, seed=np.random.SeedSequence([5, 50, 0]))
t0 = time.perf_counter()
for restart in range(5):
    hill_climb(graph, HillClimbConfig(
        target_ksm=0.80, seed=np.random.SeedSequence([5, 50, 0, restart])))
elapsed = time.perf_counter() - t0
print(f"{BACKEND_NAME}: 5 climbs to KSM 0.80 (n=50) in {elapsed:.2f}s")
"""


def evaluators_for(graph):
    table = graph.distance_sorted_pairs()
    out = {"pure": pure.StressEvaluator(table.i, table.j, table.block_starts)}
    if _ckern is not None:
        out["compiled"] = _ckern.StressEvaluator(table.i, table.j, table.block_starts)
    return out


def bench_evaluations():
    rng = np.random.default_rng(7)
    print(f"{'n':>4}  {'backend':>8}  {'us/eval':>9}  {'speedup':>8}")
    for n in SIZES:
        graph = generate_graph(n, seed=np.random.SeedSequence([5, n, 0]))
        pos = rng.random((n, 2))
        per_us = {}
        for name, ev in evaluators_for(graph).items():
            ev(pos)  # warm up
            number = 2000 if n <= 25 else 500
            best = min(timeit.repeat(lambda: ev(pos), number=number, repeat=5))
            per_us[name] = best / number * 1e6
        for name, us in per_us.items():
            speedup = per_us["pure"] / us
            print(f"{n:>4}  {name:>8}  {us:>9.1f}  {speedup:>7.1f}x")


def bench_climbs():
    print()
    for backend in ("pure", "compiled"):
        if backend == "compiled" and _ckern is None:
            print("compiled: extension not built, skipped")
            continue
        env = dict(os.environ, STRESSLAB_BACKEND=backend)
        result = subprocess.run(
            [sys.executable, "-c", CLIMB_SNIPPET],
            env=env,
            capture_output=True,
            text=True,
        )
        print(result.stdout.strip() or result.stderr.strip())


if __name__ == "__main__":
    bench_evaluations()
    bench_climbs()
