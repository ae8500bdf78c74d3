"""Throughput comparison of the two subset-screen kernels.

The screen is the only hot loop in the pipeline: it walks all 2^n index
subsets per generator and rejects those whose magnitude or argument sums
certify non-triviality. Both lanes implement the identical contract; this
script times them head to head on synthetic inputs sized like real fields
and prints the speedup of the compiled lane.

Usage: python benchmarks/bench_screen.py [--min-n 14] [--max-n 20] [--reps 3]
"""

import argparse
import random
import time
from array import array

from otcohom._screen_py import screen_range as pure_lane

try:
    from otcohom._screen_c import screen_range as compiled_lane
except ImportError:
    compiled_lane = None


def synthetic_arrays(n, r, seed):
    # row-major length r*n, like the real embedding tables
    rng = random.Random(seed)
    mags, args = [], []
    for _ in range(r):
        # a few near-cancelling magnitudes keep the argument branch busy
        row = [rng.uniform(-1.5, 1.5) for _ in range(n)]
        for i in rng.sample(range(n), max(2, n // 4)):
            row[i] *= 1e-12
        mags += row
        args += [rng.uniform(-3.14, 3.14) for _ in range(n)]
    rads = array("d", [1e-25] * (r * n))
    zero = array("d", [0.0] * r)
    arrays = (array("d", mags), rads, array("d", args), rads)
    return arrays, (zero, zero, zero, zero)


def run_lane(lane, n, r, arrays, shifts, tol):
    total = 1 << n
    start = time.perf_counter()
    survivors = len(lane(n, r, tol, *arrays, *shifts, 0, total))
    return time.perf_counter() - start, survivors


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-n", type=int, default=14)
    parser.add_argument("--max-n", type=int, default=20)
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    if compiled_lane is None:
        print("compiled lane not built; run: python setup.py build_ext --inplace")
        return

    tol = 2.0**-30
    print(f"{'n':>4} {'subsets':>10} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for n in range(args.min_n, args.max_n + 1, 2):
        arrays, shifts = synthetic_arrays(n, 2, seed=n)
        best = {"pure": float("inf"), "compiled": float("inf")}
        counts = set()
        for _ in range(args.reps):
            dt, hits = run_lane(pure_lane, n, 2, arrays, shifts, tol)
            best["pure"] = min(best["pure"], dt)
            counts.add(hits)
            dt, hits = run_lane(compiled_lane, n, 2, arrays, shifts, tol)
            best["compiled"] = min(best["compiled"], dt)
            counts.add(hits)
        assert len(counts) == 1, "lanes disagree on survivor count"
        print(
            f"{n:>4} {1 << n:>10} {best['pure']:>10.4f} "
            f"{best['compiled']:>13.4f} {best['pure'] / best['compiled']:>7.1f}x"
        )


if __name__ == "__main__":
    main()
