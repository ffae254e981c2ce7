"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Reports the median wall time per call for connected-component labeling on a
rendered 256x256 marker and for the split search used by tree growing.
"""

import argparse
import statistics
import time

import numpy as np

from artcode_mr import _kernels
from artcode_mr.artcode.render import GenSpec, render


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    img = render(GenSpec(code="1-1-2-3-5", seed=7, copies=3, background=True))
    mask = np.zeros((img.height + 2, img.width + 2), dtype=bool)
    mask[1:-1, 1:-1] = img.data < 128
    rng = np.random.default_rng(0)
    x = rng.normal(size=163)
    y = rng.integers(0, 2, 163)

    cases = {
        "label_mask 4-conn": lambda k: k.label_mask(mask, 4),
        "label_mask 8-conn": lambda k: k.label_mask(~mask, 8),
        "best_split n=163": lambda k: k.best_split(x, y, 2),
    }
    backends = [("python", _kernels.python)]
    if _kernels.compiled is not None:
        backends.append(("compiled", _kernels.compiled))
    else:
        print("compiled kernels are not built; timing the fallback only")

    print(f"{'kernel':<20}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speed-up':>12}")
    for label, call in cases.items():
        times = [_time(lambda: call(k), args.repeat) for _, k in backends]
        row = f"{label:<20}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
