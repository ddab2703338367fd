"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]

Prints CSV: kernel,backend,seconds,speedup.
"""

import argparse
import csv
import sys
import timeit

import numpy as np

from cfwb import _fallback, kernels
from cfwb.codec import choose_rice_param, zigzag


def cases(n, rng):
    x1, x2 = rng.integers(0, 4096, (2, n))
    q = 2 ** -0.5
    y1, y2 = _fallback.lift_forward(x1, x2, q)
    u = zigzag(np.round(rng.laplace(0, 40, n)).astype(np.int64))
    k = choose_rice_param(u)
    payload = _fallback.rice_encode(u, k)
    return {
        "lift_forward": lambda m: m.lift_forward(x1, x2, q),
        "lift_inverse": lambda m: m.lift_inverse(y1, y2, q),
        "rice_encode": lambda m: m.rice_encode(u, k),
        "rice_decode": lambda m: m.rice_decode(payload, n, k),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1 << 20, help="samples per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    compiled = kernels.compiled()
    backends = [("python", _fallback)] + ([("compiled", compiled)] if compiled else [])
    if compiled is None:
        print("compiled extension unavailable; timing the fallback only", file=sys.stderr)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["kernel", "backend", "seconds", "speedup"])
    for name, fn in cases(args.size, np.random.default_rng(0)).items():
        base = None
        for label, mod in backends:
            t = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            base = base or t
            out.writerow([name, label, f"{t:.5f}", f"{base / t:.2f}"])


if __name__ == "__main__":
    main()
