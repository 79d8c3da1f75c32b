"""Benchmark the compiled pairwise kernels against the numpy fallback.

Times full-layer analysis (within- plus between-class statistics) on random
class-structured data across a grid of sample counts and widths, then prints
a table with per-backend timings and the speedup.

Run from the repository root:

    python3 benchmarks/bench_pairwise.py
    python3 benchmarks/bench_pairwise.py --sizes 200,1000 --dims 64 --repeats 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kqkit import _pairwise_py

try:
    from kqkit import _pairwise_cy
except ImportError:
    _pairwise_cy = None


def make_classes(n: int, dim: int, classes: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    per = n // classes
    out = []
    for _ in range(classes):
        center = rng.normal(size=dim) * 2.0
        out.append(np.ascontiguousarray(center + rng.normal(size=(per, dim))))
    return out


def run_backend(mod, groups: list[np.ndarray]) -> float:
    norms = [np.linalg.norm(g, axis=1) for g in groups]
    start = time.perf_counter()
    for g, nm in zip(groups, norms):
        mod.within_class(g, nm)
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            mod.between_class(groups[i], norms[i], groups[j], norms[j])
    return time.perf_counter() - start


def best_of(mod, groups: list[np.ndarray], repeats: int) -> float:
    return min(run_backend(mod, groups) for _ in range(repeats))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,500,1000,2000", help="comma-separated sample counts")
    parser.add_argument("--dims", default="16,64,256", help="comma-separated widths")
    parser.add_argument("--classes", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=3, help="take the best of this many runs")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    dims = [int(s) for s in args.dims.split(",")]

    if _pairwise_cy is None:
        print("compiled extension not built; showing numpy fallback only\n")
    header = f"{'N':>6} {'d':>5} {'numpy (ms)':>12}"
    if _pairwise_cy is not None:
        header += f" {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for dim in dims:
            groups = make_classes(n, dim, args.classes, args.seed)
            t_py = best_of(_pairwise_py, groups, args.repeats)
            line = f"{n:>6} {dim:>5} {t_py * 1e3:>12.3f}"
            if _pairwise_cy is not None:
                t_cy = best_of(_pairwise_cy, groups, args.repeats)
                line += f" {t_cy * 1e3:>14.3f} {t_py / t_cy:>8.2f}"
            print(line)


if __name__ == "__main__":
    main()
