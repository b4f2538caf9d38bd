"""Compare the numba and numpy versions of the numeric kernels.

    python3 benchmarks/bench_kernels.py [--repeat 20]

The numba functions are called once before timing so compilation is not
counted.
"""

import argparse
import timeit

import numpy as np

from macari import _kernels


def cases(rng):
    xy = rng.uniform(0, 200, size=(300, 2))
    n = 400
    parent = np.array([-1] + [int(rng.integers(0, i)) for i in range(1, n)])
    depth = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        depth[i] = depth[parent[i]] + 1
    k = 2000
    quad = np.full(k, 0.00032)
    lin = rng.uniform(0.01, 0.3, k)
    const = rng.uniform(0.0, 0.2, k)
    d_max = rng.uniform(0.1, 5.0, k)
    return {
        "rx_power_matrix (300 nodes)": (
            _kernels.rx_power_matrix_numpy, _kernels.rx_power_matrix_numba, (xy, 0.0, 2400.0, 30.0)),
        "tree_distance_matrix (400 nodes)": (
            _kernels.tree_distance_matrix_numpy, _kernels.tree_distance_matrix_numba, (parent, depth)),
        "largest_feasible_n (2000 inputs)": (
            _kernels.largest_feasible_n_numpy, _kernels.largest_feasible_n_numba,
            (quad, lin, const, d_max)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"numba active by default: {_kernels.USE_NUMBA}")
    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, (f_np, f_nb, fargs) in cases(rng).items():
        a, b = np.asarray(f_np(*fargs)), np.asarray(f_nb(*fargs))
        assert np.allclose(a, b), name
        t_np = min(timeit.repeat(lambda: f_np(*fargs), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: f_nb(*fargs), number=1, repeat=args.repeat))
        print(f"{name:36s} {t_np * 1e3:10.3f} {t_nb * 1e3:10.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
