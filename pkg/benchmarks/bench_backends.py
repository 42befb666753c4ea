"""Time every hot kernel under the numba and the numpy backend.

    python benchmarks/bench_backends.py [--repeat 5] [--rows 65536]

Each kernel is run once per backend before timing so numba compilation
(or cache loading) is excluded. Reports the best of ``--repeat`` runs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import sigcore
from sigcore import _kernels, bridge, k_out_of_n
from sigcore._backend import HAVE_NUMBA
from sigcore.quality import _weights_table


def cases(rows: int):
    rng = np.random.default_rng(0)
    phi = bridge()
    members, offsets = _kernels.paths_to_csr(sigcore.minimal_path_sets(phi).paths)
    X5 = rng.exponential(size=(rows, 5))
    X8 = rng.exponential(size=(rows, 8))
    lam12 = _weights_table(rng.uniform(0.1, 10, size=12))
    table8 = k_out_of_n(8, 3).table
    perms = np.array([rng.permutation(7) for _ in range(5040)])
    weights = rng.dirichlet(np.ones(5040))
    table7 = k_out_of_n(7, 4).table
    return {
        "weibull_alternating_sums n=12": lambda: _kernels.weibull_alternating_sums(lam12, 12),
        f"rank_counts_paths bridge x{rows}": lambda: _kernels.rank_counts_paths(X5, members, offsets),
        f"rank_counts_table bridge x{rows}": lambda: _kernels.rank_counts_table(X5, phi.table),
        f"top_set_counts n=8 x{rows}": lambda: _kernels.top_set_counts(X8),
        "permutation_uniform_counts n=8": lambda: _kernels.permutation_uniform_counts(8, table8),
        "permutation_weighted n=7": lambda: _kernels.permutation_weighted(perms, weights, table7),
    }


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--rows", type=int, default=1 << 16)
    args = parser.parse_args(argv)

    backends = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]
    print(f"{'kernel':<40}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases(args.rows).items():
        row = {}
        for b in backends:
            prev = sigcore.set_backend(b)
            try:
                row[b] = best_of(fn, args.repeat)
            finally:
                sigcore.set_backend(prev)
        line = f"{name:<40}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{row['numpy'] / row['numba']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
