"""Compiled vs numpy Jacobi kernels, alone and inside full experiments.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time
import timeit

import numpy as np

from symtd import linalg
from symtd.experiment import ExperimentConfig, run_experiment

MATRIX_SIZES = (2, 4, 6, 25)
EXPERIMENTS = {
    "ortho (6,6,4)": dict(family="orthogonal", m=6, n=6, p=4),
    "whiten (6,6,4)": dict(family="nonorthogonal", m=6, n=6, p=4, method="whiten"),
    "ortho (4,25,3)": dict(family="orthogonal", m=4, n=25, p=3),
}


def bench_matrices(repeat):
    rng = np.random.default_rng(0)
    print(f"{'n':>4} {'dtype':>11} " + " ".join(f"{b:>14}" for b in sorted(linalg.KERNELS)))
    for n in MATRIX_SIZES:
        m = rng.standard_normal((n, n))
        m = m + m.T
        for dtype in (np.float64, np.longdouble):
            a = m.astype(dtype)
            cells = []
            for name in sorted(linalg.KERNELS):
                number = 200 if n < 25 else 10
                best = min(timeit.repeat(lambda: linalg.sym_eig(a, backend=name), number=number, repeat=repeat))
                cells.append(f"{best / number * 1e6:11.1f} us")
            print(f"{n:>4} {np.dtype(dtype).name:>11} " + " ".join(f"{c:>14}" for c in cells))


def bench_experiments(instances, runs):
    print(f"\n{instances} instances x {runs} runs, wall time in seconds")
    print(f"{'experiment':<16} " + " ".join(f"{b:>10}" for b in sorted(linalg.KERNELS)))
    default = linalg.BACKEND
    try:
        for label, kw in EXPERIMENTS.items():
            cells = []
            for name in sorted(linalg.KERNELS):
                linalg.BACKEND = name
                start = time.perf_counter()
                run_experiment(ExperimentConfig(instances=instances, runs=runs, **kw))
                cells.append(f"{time.perf_counter() - start:10.2f}")
            print(f"{label:<16} " + " ".join(cells))
    finally:
        linalg.BACKEND = default


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--instances", type=int, default=10)
    parser.add_argument("--runs", type=int, default=10)
    args = parser.parse_args()
    print(f"default backend: {linalg.BACKEND}")
    bench_matrices(args.repeat)
    bench_experiments(args.instances, args.runs)


if __name__ == "__main__":
    main()
