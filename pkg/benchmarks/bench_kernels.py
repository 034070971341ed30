"""Compare the compiled kernels with the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--end-to-end]

Each kernel is timed on a workload shaped like the learner's: support LPs
on a reduced feasible set, Hit-and-Run centroid estimation, the PE
eigenvalue test and Hildreth projections. ``--end-to-end`` additionally
times a full 150-step second-order run under each backend in a subprocess,
since the backend is fixed at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from coreset_smi import kernels


def workloads(rng):
    n, m = 6, 60
    H = rng.standard_normal((m, n))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    c = rng.uniform(0.5, 1.5, m)
    obj = rng.standard_normal(n)
    chains, steps = 8, 2000
    dirs = rng.standard_normal((chains, steps, n))
    us = rng.random((chains, steps))
    starts = np.zeros((chains, n))
    S = rng.standard_normal((6, 6))
    S = S @ S.T
    v = 3.0 * rng.standard_normal(n)
    return {
        "lp_simplex (m=60, n=6)": lambda k: k.lp_simplex(H, c, obj, 10_000),
        "hit_and_run (8 x 2000, n=6)": lambda k: k.hit_and_run(H, c, starts, dirs, us, 500),
        "jacobi_eigenvalues (6x6)": lambda k: k.jacobi_eigenvalues(S, 1e-15, 100),
        "hildreth_project (m=60, n=6)": lambda k: k.hildreth_project(H, c, v, 1e-10, 100_000),
    }


def bench(repeat):
    try:
        compiled = kernels.implementation("compiled")
    except ImportError:
        print("compiled extension not built; only the python backend is available")
        return
    python = kernels.implementation("python")
    print(f"{'kernel':32s} {'compiled [ms]':>14s} {'python [ms]':>12s} {'speedup':>8s}")
    for name, fn in workloads(np.random.default_rng(0)).items():
        times = {}
        for label, impl in (("compiled", compiled), ("python", python)):
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(impl), number=1), 1e-6)))
            times[label] = min(timeit.repeat(lambda: fn(impl), number=number, repeat=repeat)) / number
        print(f"{name:32s} {1e3 * times['compiled']:14.3f} {1e3 * times['python']:12.3f} "
              f"{times['python'] / times['compiled']:7.1f}x")


END_TO_END = """
import time
from coreset_smi import kernels, learner, sim
system = sim.SystemSpec.linear([[0.5366, 0.2038], [-0.0406, 0.6310]], [[-0.02], [0.4730]],
                               sim.BallUniform(0.5, 2), sim.GaussianInput([0.0], [[5.0]]), [0.0, 0.0])
cfg = learner.LearnerConfig(-0.3, [0.5, 0.5], update_policy="sampled", hitrun_steps=500, mc_samples=2000)
t0 = time.perf_counter()
learner.run(system, cfg, 150, 0, check=False)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def end_to_end():
    for pure in ("", "1"):
        env = dict(os.environ, CORESET_SMI_PURE=pure)
        if not pure:
            env.pop("CORESET_SMI_PURE")
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"second-order run, sampled policy, {backend:9s}: {float(secs):.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    bench(args.repeat)
    if args.end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
