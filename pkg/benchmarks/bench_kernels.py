"""Timing comparison of the numba and numpy kernel implementations.

Run with  python3 benchmarks/bench_kernels.py  [--samples N] [--batch N]
The numba path is warmed up once before timing so JIT compilation does
not pollute the numbers.
"""

import argparse
import time

import numpy as np

from qmeas.kernels import numpy_impl

try:
    from qmeas.kernels import numba_impl
except ImportError:
    numba_impl = None

from qmeas import family, random_kraus_batch


def haar_states(n, d, rng):
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def bench(label, fun, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fun()
        best = min(best, time.perf_counter() - t0)
    print(f"{label:28s} {best * 1e3:10.2f} ms")
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--batch", type=int, default=20_000)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    meas = family(4, 0.36)
    states = haar_states(args.samples, 3, rng)
    kraus = meas.kraus
    estimates = np.stack([np.conj(s.right[0]) for s in meas.svds])
    canon = meas.canonical_operators()

    blocks = random_kraus_batch(3, 3, args.batch, rng).reshape(-1, 3, 3)

    print(f"mc_info_samples: {args.samples} Haar states, {kraus.shape[0]} outcomes, d=3")
    t_np = bench("numpy", lambda: numpy_impl.mc_info_samples(states, kraus, estimates, canon))
    if numba_impl is not None:
        numba_impl.mc_info_samples(states[:100], kraus, estimates, canon)  # warm-up
        t_nb = bench("numba", lambda: numba_impl.mc_info_samples(states, kraus, estimates, canon))
        print(f"speedup: {t_np / t_nb:.2f}x")

        xg_a, xf_a = numpy_impl.mc_info_samples(states, kraus, estimates, canon)
        xg_b, xf_b = numba_impl.mc_info_samples(states, kraus, estimates, canon)
        print(f"max deviation: {max(np.abs(xg_a - xg_b).max(), np.abs(xf_a - xf_b).max()):.2e}")

    print(f"\nblock_singulars: {blocks.shape[0]} complex 3x3 blocks")
    t_np = bench("numpy", lambda: numpy_impl.block_singulars(blocks))
    if numba_impl is not None:
        numba_impl.block_singulars(blocks[:10])  # warm-up
        t_nb = bench("numba", lambda: numba_impl.block_singulars(blocks))
        print(f"speedup: {t_np / t_nb:.2f}x")
        dev = np.abs(numpy_impl.block_singulars(blocks) - numba_impl.block_singulars(blocks)).max()
        print(f"max deviation: {dev:.2e}")

    if numba_impl is None:
        print("\nnumba not installed; only the numpy path was timed")


if __name__ == "__main__":
    main()
