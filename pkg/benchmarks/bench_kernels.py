"""numba vs numpy timings for the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once to warm up (JIT compile or cache load), then timed
best-of-``repeat`` under both settings of INTERSECTIVE_DISABLE_NUMBA.  The two
results are compared so a speedup never hides a disagreement.
"""

import argparse
import os
import time

import numpy as np

from intersective import _kernels as K
from intersective.dynamics import Observable


def cases():
    rng = np.random.default_rng(0)
    useeds = K.hash_rows(1, np.arange(400))
    obs = Observable.cosine([1.0, 2.0])
    return {
        # x^3 + (1+2w)x + 5 over Z[i] on the residue grid of (97, 22, 1)
        "roots_grid 97x1 deg3": (K.roots_grid, ([5, 1, 0, 1], [0, 2, 0, 0], 0, -1, 97, 22, 1)),
        "roots_grid 60x60 deg4": (K.roots_grid, ([3, 0, 1, 0, 1], [1, 2, 0, 0, 0], 0, -1, 3600, 0, 60)),
        "hash_rows 1e6x2": (K.hash_rows, (7, rng.integers(-10**6, 10**6, (10**6, 2)))),
        "kronecker_hits 400u x 4000s": (K.kronecker_hits, (useeds, rng.random((400, 2, 2)) * 50,
                                                          np.zeros(2), np.full(2, 0.5), 4000)),
        "cube_last_level 2000x70": (K.cube_last_level, (rng.random((2000, 2)), rng.random((2, 2)),
                                                        rng.random((70, 2)), obs.packed)),
    }


def best_of(fn, args, repeat):
    out = fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not importable; only the numpy path can run")
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}  agree")
    for name, (fn, fargs) in cases().items():
        os.environ["INTERSECTIVE_DISABLE_NUMBA"] = "0"
        t_nb, r_nb = best_of(fn, fargs, args.repeat)
        os.environ["INTERSECTIVE_DISABLE_NUMBA"] = "1"
        t_np, r_np = best_of(fn, fargs, args.repeat)
        if r_nb.dtype.kind == "f":
            agree = np.allclose(r_nb, r_np, atol=1e-12)
        elif fn is K.kronecker_hits:
            agree = np.abs(r_nb - r_np).max() <= 1      # box-edge rounding
        else:
            agree = np.array_equal(r_nb, r_np)
        print(f"{name:32s} {t_nb * 1e3:10.2f} {t_np * 1e3:10.2f} {t_np / t_nb:8.1f}x  {agree}")
    os.environ.pop("INTERSECTIVE_DISABLE_NUMBA", None)


if __name__ == "__main__":
    main()
