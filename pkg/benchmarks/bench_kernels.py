"""Compare the compiled and numpy kernels on the workloads the invariants use.

    python3 benchmarks/bench_kernels.py [--batch 2000] [--size 4]
"""
import argparse
import timeit

import numpy as np

from bottforge import _pykernels

try:
    from bottforge import _ckernels
except ImportError:
    _ckernels = None


def skew_stack(batch, size, rng):
    X = rng.normal(size=(batch, size, size)) + 1j * rng.normal(size=(batch, size, size))
    return X - np.transpose(X, (0, 2, 1))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=2000)
    ap.add_argument("--size", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    stack = skew_stack(args.batch, args.size, rng)
    links = np.exp(1j * rng.uniform(-1, 1, size=(args.batch, 4)))

    backends = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"batch={args.batch} size={args.size}")
    ref = _pykernels.batch_pfaffian(stack)
    for name, mod in backends:
        t_pf = min(timeit.repeat(lambda: mod.batch_pfaffian(stack), number=1, repeat=args.repeat))
        t_lp = min(timeit.repeat(lambda: mod.loop_phase(links), number=1, repeat=args.repeat))
        err = np.abs(mod.batch_pfaffian(stack) - ref).max()
        print(f"{name:7s} batch_pfaffian {t_pf * 1e3:8.2f} ms   loop_phase {t_lp * 1e3:7.3f} ms   max|diff| {err:.1e}")
    if _ckernels is None:
        print("compiled kernels not built; only the numpy path was timed")


if __name__ == "__main__":
    main()
