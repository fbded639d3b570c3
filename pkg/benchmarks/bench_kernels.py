"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Prints one CSV row per kernel: best wall time of each backend, the speed-up
and the largest absolute difference between their outputs.
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from nonvanishing import kernels
from nonvanishing.arith import Discriminant


def cases(scale: float):
    n = int(200_000 * scale)
    disc = Discriminant(9997)
    chi = kernels.kronecker_table(disc.fundamental, disc.conductor)
    lam = np.zeros(int(4000 * scale) + 1)
    lam[1::2] = np.random.default_rng(0).standard_normal(len(lam[1::2]))
    coeffs = np.array([1 / 12, -1 / 720, 1 / 30240], dtype=complex)
    return {
        "kronecker_table": lambda m: m.kronecker_table(-8 * 9997, 8 * 9997),
        "divisor_power_table": lambda m: m.divisor_power_table(n, 0.3 + 2j),
        "divisor_sum": lambda m: m.divisor_sum(lam, n),
        "hurwitz_character_sum": lambda m: m.hurwitz_character_sum(chi, 0.5 + 14j, 40, coeffs),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args(argv)

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled backend not built; only the numpy path is timed", file=sys.stderr)
    w = csv.writer(sys.stdout)
    w.writerow(["kernel", "python_s", "cython_s", "speedup", "max_abs_diff"])
    for name, run in cases(args.scale).items():
        times, outs = {}, {}
        for key, mod in impls.items():
            outs[key] = run(mod)
            times[key] = min(timeit.repeat(lambda: run(mod), number=1, repeat=args.repeat))
        py = times["python"]
        cy = times.get("cython")
        diff = (float(np.max(np.abs(np.asarray(outs["python"]) - np.asarray(outs["cython"]))))
                if cy is not None else float("nan"))
        w.writerow([name, f"{py:.6g}", "" if cy is None else f"{cy:.6g}",
                    "" if cy is None else f"{py / cy:.3g}", f"{diff:.3g}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
