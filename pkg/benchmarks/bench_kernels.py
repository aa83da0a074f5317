"""Time the compiled and numpy kernel backends on link-sized inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads mirror one hydrophone of one frame: a Doppler-resampled frame
through ``interp`` and the 718-slot lag search of ``slot_correlate``.
"""

import argparse
import timeit

import numpy as np

from cwidsim import kernels
from cwidsim.waveforms import build_alphabet


def workloads(rng):
    n = 43233
    x = rng.standard_normal(n)
    # 10 Hz at 11.5 kHz, plus a fractional bulk delay
    positions = np.arange(n) * (1 + 10.0 / 11500.0) - 17.3
    refs = build_alphabet("CWID-16").carriers
    L = refs.shape[1]
    r = rng.standard_normal(718 * L + 64)
    starts = 8 + L * np.arange(718, dtype=np.int64)
    return {
        "interp": lambda: kernels.interp(x, positions),
        "slot_correlate": lambda: kernels.slot_correlate(r, starts, refs, 1),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    jobs = workloads(np.random.default_rng(0))
    best = {}
    for backend in kernels.available_backends():
        kernels.use_backend(backend)
        for name, fn in jobs.items():
            fn()  # warm-up
            best[backend, name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))

    print(f"{'kernel':<16}{'backend':<10}{'best ms':>10}{'speedup':>10}")
    for name in jobs:
        base = best["python", name]
        for backend in kernels.available_backends():
            t = best[backend, name]
            print(f"{name:<16}{backend:<10}{t * 1e3:>10.2f}{base / t:>10.2f}")


if __name__ == "__main__":
    main()
