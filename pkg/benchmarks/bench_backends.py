"""Timing comparison of the numba and numpy kernel backends.

Runs the raw 3x3 convolution stack, a full filtered forward pass, and a
small serial extraction under both backends, printing a table of medians.
The numbers are wall-clock medians over --repeat runs after a warmup, so
numba's compile time is not counted.

    python3 benchmarks/bench_backends.py [--side 64] [--repeat 5]
"""

import argparse
import statistics
import time

import numpy as np

from cosample import CosoConfig, build_coso, extract, filter_forward, init_filter
from cosample import backend
from cosample.kernels import conv3x3


def _median_time(fn, repeat):
    fn()  # warmup; also triggers jit compilation on the numba path
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def make_cases(side):
    g = np.random.default_rng(0)
    img = g.normal(size=(side, side))
    stack = g.normal(size=(16, side, side))
    weights = g.normal(size=(16, 16, 3, 3)) / 12.0
    net = init_filter(16, 0)
    cfg = CosoConfig(height=side, width=side, gamma=0.1,
                     block=side // 2, variant="full_coso")
    op = build_coso(cfg)
    return {
        "conv3x3 16ch": lambda: conv3x3(stack, weights),
        "filter forward": lambda: filter_forward(net, img, (0.1, 0.2)),
        "operator apply": lambda: op.apply(img.ravel()),
        f"extract {side}x{side}": lambda: extract(op, side, side, parallel=False),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--side", type=int, default=64, help="image side length")
    ap.add_argument("--repeat", type=int, default=5, help="timed runs per case")
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if backend.have_numba() else [])
    if len(backends) == 1:
        print("numba not importable; timing the numpy backend only")

    results = {}
    for name in backends:
        prev = backend.set_backend(name)
        try:
            for case, fn in make_cases(args.side).items():
                results[case, name] = _median_time(fn, args.repeat)
        finally:
            backend.set_backend(prev)

    cases = list(dict.fromkeys(case for case, _ in results))
    width = max(len(c) for c in cases)
    header = f"{'case':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for case in cases:
        row = f"{case:<{width}}  "
        for b in backends:
            row += f"{results[case, b] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            row += f"{results[case, 'numpy'] / results[case, 'numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
