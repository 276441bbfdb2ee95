"""Compare the compiled merge kernel against the pure-Python fallback.

Runs the encoded ACL cross-product merge on synthetic workloads of growing
size and prints per-kernel timings plus the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--rounds N]
"""

from __future__ import annotations

import argparse
import random
import time

from mudscope import _kernel_py

try:
    from mudscope import _kernel as _kernel_compiled
except ImportError:
    _kernel_compiled = None


def _random_encoded(rng: random.Random) -> tuple:
    def mask() -> int:
        return rng.choice([-1, 1, 2, 3, 4, 6])

    def ports() -> tuple:
        if rng.random() < 0.4:
            return ()
        lo = rng.choice([1, 80, 443, 5000, 8080])
        return (lo, lo + rng.choice([0, 20, 1000]))

    return (mask(), mask(), ports(), ports())


def _workload(size: int, seed: int) -> tuple[list, list]:
    rng = random.Random(seed)
    return ([_random_encoded(rng) for _ in range(size)],
            [_random_encoded(rng) for _ in range(size)])


def _time(kernel, src: list, dst: list, rounds: int) -> float:
    start = time.perf_counter()
    for _ in range(rounds):
        kernel.merge_acls_encoded(src, dst, False)
    return (time.perf_counter() - start) / rounds


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=200,
                        help="repetitions per measurement (default 200)")
    args = parser.parse_args()

    print(f"{'acl size':>9} {'python':>12} {'cython':>12} {'speedup':>8}")
    for size in (4, 16, 64, 256):
        src, dst = _workload(size, seed=size)
        pure = _time(_kernel_py, src, dst, args.rounds)
        if _kernel_compiled is None:
            print(f"{size:>9} {pure * 1e6:>10.1f}us {'n/a':>12} {'n/a':>8}")
            continue
        fast = _time(_kernel_compiled, src, dst, args.rounds)
        assert (_kernel_compiled.merge_acls_encoded(src, dst, False)
                == _kernel_py.merge_acls_encoded(src, dst, False))
        print(f"{size:>9} {pure * 1e6:>10.1f}us {fast * 1e6:>10.1f}us "
              f"{pure / fast:>7.2f}x")

    if _kernel_compiled is None:
        print("\ncompiled kernel unavailable; rebuild with Cython to compare")


if __name__ == "__main__":
    main()
