"""Time the one-sided Jacobi SVD with the compiled kernel and the pure-Python fallback.

Usage: python3 benchmarks/bench_svd.py [--sizes 16x12 40x36 80x72] [--precision 256] [--repeat 3]
"""

import argparse
import random
import time

from gmpy2 import mpc

from quartic_foliation.algebra.numbers import working_precision
from quartic_foliation.algebra.svd import available_backends, jacobi_svd


def random_matrix(m: int, n: int, seed: int) -> list[list]:
    rng = random.Random(seed)
    return [[mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)] for _ in range(m)]


def best_time(A, backend: str, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        jacobi_svd(A, backend=backend)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["16x12", "40x36", "80x72"])
    ap.add_argument("--precision", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the Python fallback is timed")
    print(f"{'size':>8} " + " ".join(f"{b:>10}" for b in backends) + ("    speedup" if len(backends) == 2 else ""))
    with working_precision(args.precision):
        for size in args.sizes:
            m, n = (int(v) for v in size.split("x"))
            A = random_matrix(m, n, args.seed)
            t = {b: best_time(A, b, args.repeat) for b in backends}
            line = f"{size:>8} " + " ".join(f"{t[b]:>9.3f}s" for b in backends)
            if len(backends) == 2:
                line += f"  {t['python'] / t['cython']:>8.2f}x"
            print(line)


if __name__ == "__main__":
    main()
