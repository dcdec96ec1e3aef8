"""Compare the compiled kernels against the pure-numpy fallback.

Times each hot kernel plus the whole default pipeline on a synthetic
loop, prints a table with the speedup, and verifies both backends agree
bitwise on every output before reporting.

Usage:
    python3 benchmarks/bench_backends.py [--frames 90] [--size 128]
                                         [--window 20] [--repeats 5]
"""

import argparse
import os
import time

import numpy as np

from mceus import kernels
from mceus.model import CineLoop, PipelineConfig
from mceus.morphology import disk
from mceus.pipeline import run_pipeline


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def outputs_agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--frames", type=int, default=90)
    parser.add_argument("--size", type=int, default=128)
    parser.add_argument("--window", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    try:
        kernels.active_kernels("numba")
    except RuntimeError as exc:
        print(f"numba backend unavailable ({exc}); nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    stack = rng.random((args.frames, args.size, args.size))
    frame = stack[0]
    offsets = disk(2).offsets
    w = args.window
    low = max(1, w // 5)
    loop = CineLoop(
        frames=stack,
        frame_rate_hz=10.0,
        pre_contrast=(0, max(1, args.frames // 5 - 1)),
        bolus_arrival_index=max(2, args.frames // 5),
    )

    def pipeline_with(backend: str):
        # run_pipeline reads the backend from the environment
        os.environ["MCEUS_BACKEND"] = backend
        try:
            return run_pipeline(loop, PipelineConfig(window_w=w))
        finally:
            os.environ.pop("MCEUS_BACKEND", None)

    cases = [
        ("window_stats", lambda b: kernels.window_stats(stack, w, backend=b)),
        ("window_min", lambda b: kernels.window_min(stack, w, backend=b)),
        ("window_low_mean", lambda b: kernels.window_low_mean(stack, w, low, backend=b)),
        ("grey_dilate", lambda b: kernels.grey_dilate(frame, offsets, backend=b)),
        ("grey_erode", lambda b: kernels.grey_erode(frame, offsets, backend=b)),
        ("full pipeline", pipeline_with),
    ]

    print(f"loop {args.size}x{args.size}x{args.frames}, window {w}, "
          f"best of {args.repeats} runs\n")
    print(f"{'kernel':<18} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, call in cases:
        call("numba")  # jit warmup outside the timers
        if not outputs_agree(call("numpy"), call("numba")):
            print(f"{name:<18} backends disagree; aborting")
            return 1
        t_np = time_call(lambda: call("numpy"), args.repeats)
        t_nb = time_call(lambda: call("numba"), args.repeats)
        print(f"{name:<18} {t_np * 1e3:>8.1f}ms {t_nb * 1e3:>8.1f}ms {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
