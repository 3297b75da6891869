"""Time the compiled threshold decoder against the numpy fallback.

    python3 benchmarks/bench_decode.py [--n 60] [--rate 0.1] [--batch 4096] [--repeat 5]
"""

import argparse
import time

import numpy as np

from erasure_exponents import kernels, simulator
from erasure_exponents.ensemble import bsc


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--rate", type=float, default=0.1)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--threshold", type=float, default=0.05)
    ap.add_argument("--batch", type=int, default=simulator.CHUNK)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    ens = bsc(args.p)
    cb = simulator.sample_codebook(ens, args.n, args.rate, seed=1)
    W = simulator.loglik_table(ens, cb)
    rng = simulator._rng(7, 0)
    msgs = rng.integers(0, cb.M, size=args.batch)
    ys = simulator.transmit(ens, cb.words[msgs], rng)
    nT = args.n * args.threshold

    print(f"n={args.n} M={cb.M} batch={args.batch} default backend={kernels.BACKEND}")
    t_py, d_py = _time(lambda: kernels.fallback_decode_batch(W, ys, nT), args.repeat)
    print(f"python   {t_py * 1e3:9.2f} ms  {args.batch / t_py:12.0f} decodes/s")
    if kernels.BACKEND != "compiled":
        print("compiled kernel unavailable; nothing to compare")
        return 0
    t_c, d_c = _time(lambda: kernels.decode_batch(W, ys, nT), args.repeat)
    print(f"compiled {t_c * 1e3:9.2f} ms  {args.batch / t_c:12.0f} decodes/s")
    print(f"speedup  {t_py / t_c:9.2f}x   decisions identical: {bool(np.array_equal(d_py, d_c))}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
