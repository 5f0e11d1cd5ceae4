"""Compare the numba and numpy implementations of the hot loops.

Run with ``python benchmarks/bench_backends.py [--repeat N]``.  Each kernel is
called once to trigger compilation before timing; the printed speedup is
numpy time over numba time (best of ``repeat``).
"""
import argparse
import math
import time

import numpy as np

from quasifree import _hot
from quasifree._accel import HAVE_NUMBA


def best_of(fn, repeat):
    fn()
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def hermite_inputs(m, kmax, seed=0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-40, 40, m)
    k = np.arange(kmax + 2, dtype=float)
    logf0 = -0.25 * math.log(math.pi) - 0.5 * t * t
    return _hot._prep(t, np.zeros(kmax + 1), np.sqrt(k / 2), logf0, 1.0)


def cases():
    rng = np.random.default_rng(1)
    masks = rng.integers(0, 1 << 20, 1 << 20, dtype=np.int64)
    sm = _hot.sign_masks(np.array([3, 11, 17]), np.array([0, 9, 19]))
    yield ("fermionic signs, 2^20 masks",
           lambda: _hot.signs_numpy(masks, *sm), lambda: _hot.signs_numba(masks, *sm))

    t, a, b, lf, sg = hermite_inputs(2000, 600)
    yield ("recurrence table, 2000 nodes x 600",
           lambda: _hot.recurrence_table_numpy(t, a, b, lf, sg, 600),
           lambda: _hot.recurrence_table_numba(t, a, b, lf, sg, 600))

    t, a, b, lf, sg = hermite_inputs(20000, 4096)
    w = np.full(t.size, 1e-3)
    yield ("recurrence sqsum, 20000 nodes x 4096",
           lambda: _hot.recurrence_sqsum_numpy(t, w, a, b, lf, sg, 4096),
           lambda: _hot.recurrence_sqsum_numba(t, w, a, b, lf, sg, 4096))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return
    print(f"{'kernel':40s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, f_np, f_nb in cases():
        diff = float(np.max(np.abs(np.asarray(f_np(), dtype=float) - np.asarray(f_nb(), dtype=float))))
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        print(f"{name:40s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
