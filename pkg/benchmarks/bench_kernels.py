#!/usr/bin/env python3
"""Time the numba and numpy trial kernels on the same noise block.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]

Noise is drawn once up front so only the kernels are timed. The numba
kernel is warmed up (compiled) before timing.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from tapsim import kernels
from tapsim.documents import load_script

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'fixture':<14} {'trials':>8} {'draw (s)':>9} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8}")
    for path in sorted(DATA.glob("noisy-*.json")):
        packed = kernels.pack_script(load_script(path))
        t0 = time.perf_counter()
        noise = kernels.draw_noise(0, np.arange(args.trials), packed.steps, packed.taps_per_step)
        draw = time.perf_counter() - t0

        kernels.play_trials(packed, noise[:10], "numba")
        t_np = best_of(lambda: kernels.play_trials(packed, noise, "numpy"), args.repeat)
        t_nb = best_of(lambda: kernels.play_trials(packed, noise, "numba"), args.repeat)

        a = kernels.play_trials(packed, noise, "numpy")
        b = kernels.play_trials(packed, noise, "numba")
        assert all(np.array_equal(x, y) for x, y in zip(a, b)), "kernels disagree"
        print(f"{path.stem:<14} {args.trials:>8} {draw:>9.3f} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
