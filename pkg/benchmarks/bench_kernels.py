"""Timing comparison of the kernel backends.

Runs the hot kernels (matrix product, sequence fold, anchored trellis
sweeps) on random scaled-integer inputs under every available backend
and prints the best wall time per call.  The jitted backend is warmed
before timing so compilation is excluded.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 5,16,64 --length 500
"""

import argparse
import time

import numpy as np

from tropical_transient._kernels import available_backends


def random_inputs(rng, m, n, k, density=0.7):
    num = rng.integers(-1000, 1001, size=(m, n, n)).astype(np.int64)
    fin = rng.random(size=(m, n, n)) < density
    seq = rng.integers(0, m, size=k).astype(np.int64)
    return num, fin, seq


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="5,16,64", help="matrix sizes, comma separated")
    parser.add_argument("--length", type=int, default=200, help="sequence length")
    parser.add_argument("--members", type=int, default=3, help="family size")
    parser.add_argument("--repeats", type=int, default=7, help="timing repeats (best wins)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    backends = available_backends()
    rng = np.random.default_rng(args.seed)

    header = f"{'kernel':<18}{'n':>5}{'k':>6}" + "".join(
        f"{b.name + ' (ms)':>14}" for b in backends
    )
    if len(backends) == 2:
        header += f"{backends[0].name}/{backends[1].name}".rjust(14)
    print(header)
    print("-" * len(header))

    for n in sizes:
        num, fin, seq = random_inputs(rng, args.members, n, args.length)
        cases = [
            ("matmul", lambda b: b.matmul(num[0], fin[0], num[1 % args.members],
                                          fin[1 % args.members]), 1),
            ("fold", lambda b: b.fold(num, fin, seq), args.length),
            ("initial_to_anchor", lambda b: b.initial_to_anchor(num, fin, seq),
             args.length),
            ("through_anchor", lambda b: b.through_anchor(num, fin, seq, 0),
             args.length),
        ]
        for name, call, k in cases:
            times = []
            for backend in backends:
                call(backend)  # warm: trigger any compilation
                times.append(best_time(lambda: call(backend), args.repeats))
            row = f"{name:<18}{n:>5}{k:>6}" + "".join(f"{t * 1e3:>14.3f}" for t in times)
            if len(times) == 2 and times[1] > 0:
                row += f"{times[0] / times[1]:>13.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
