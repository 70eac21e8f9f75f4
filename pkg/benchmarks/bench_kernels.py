"""Compare the compiled and pure-Python integer kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs under both backends; results are
checked for equality before timings are reported.
"""

import argparse
import random
import timeit

from crossover_uo import _fallback
from crossover_uo.catalog import williams
from crossover_uo.design import enumerate_column_multisets
from crossover_uo.infomat import effects_info
from crossover_uo.ratmat import _integer_scaled

try:
    from crossover_uo import _kernels
except ImportError:
    _kernels = None


def gram(rng, k, m):
    B = [[rng.randint(-6, 6) for _ in range(m)] for _ in range(k)]
    return [[sum(x * y for x, y in zip(B[i], B[j])) for j in range(k)] for i in range(k)]


def workloads():
    rng = random.Random(0)
    mats = [gram(rng, 14, 9) for _ in range(200)]
    sweep = list(enumerate_column_multisets(3, 3, 6))[:3000]
    grids = [d.assignment for d in sweep]
    # integer-scaled information matrices from the (3,3,6) sweep
    infos = []
    for d in sweep[:500]:
        ints, _ = _integer_scaled(effects_info(d, "adjusted").assembled)
        infos.append(ints)
    big = williams(13)
    return {
        "bareiss_rank 14x14 gram": (lambda k: [k.bareiss_rank(m) for m in mats]),
        "symmetric_ldl 14x14 gram": (lambda k: [k.symmetric_ldl(m) for m in mats]),
        "symmetric_ldl (3,3,6) C": (lambda k: [k.symmetric_ldl(m) for m in infos]),
        "frequency_counts (3,3,6)": (lambda k: [k.frequency_counts(g, 3) for g in grids]),
        "frequency_counts williams(13)": (lambda k: [k.frequency_counts(big.assignment, 13)
                                                    for _ in range(200)]),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':32s} {'python (ms)':>12s} {'cython (ms)':>12s} {'speedup':>8s}")
    for name, fn in workloads().items():
        py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:32s} {py:12.2f} {'-':>12s} {'-':>8s}")
            continue
        assert fn(_kernels) == fn(_fallback), name
        cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {py:12.2f} {cy:12.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
