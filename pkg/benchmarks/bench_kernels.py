"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from facloc import kernels
from facloc.analysis import truthfulness_check, worst_case_scan
from facloc.core import AVERAGE_COST, MAX_COST
from facloc.mechanisms import MechanismSpec

rng = random.Random(0)
POINTS = tuple(sorted(rng.random() for _ in range(8)))
LOCS = (0.1, 0.5, 0.9)

CASES = {
    "kmedian n=8 k=3": lambda: kernels.kmedian(POINTS, 3),
    "kcenter n=8 k=3": lambda: kernels.kcenter(POINTS, 3),
    "sum_nearest n=8 k=3": lambda: kernels.sum_nearest(POINTS, LOCS),
    "scan fifths n=5 g=0.1 avg": lambda: worst_case_scan(MechanismSpec.parse("fifths"), 5, AVERAGE_COST, 0.1),
    "scan epec:k=3 n=3 g=0.05 avg": lambda: worst_case_scan(MechanismSpec.parse("epec:k=3"), 3, AVERAGE_COST, 0.05),
    "scan blrc n=2 g=0.01 max": lambda: worst_case_scan(MechanismSpec.parse("blrc"), 2, MAX_COST, 0.01),
    "verify blrc n=3 g=0.05": lambda: truthfulness_check(MechanismSpec.parse("blrc"), 3, 0.05),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'case':32s}" + "".join(f"{b:>14s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in CASES.items():
        times = []
        for b in backends:
            kernels.use_backend(b)
            number = 2000 if "n=8" in name else 1
            times.append(min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number)
        line = f"{name:32s}" + "".join(f"{t * 1e3:12.4f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
