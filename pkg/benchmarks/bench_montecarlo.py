#!/usr/bin/env python3
"""Throughput benchmark: compiled Monte Carlo kernel vs pure-Python loop.

Both backends draw from identical per-trial streams, so besides timing
them this script re-checks that they return identical results on a small
shared slice.

Usage: python benchmarks/bench_montecarlo.py [--trials N] [--seed S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from paradec import SamplerConfig, StrategyConfig, StrategyFamily, TaskKind, make_task
from paradec._backend import kernel_available, run_trials

WORKLOADS = [
    ("shuffle n=6, random top-2, tau=1", TaskKind.SHUFFLE, 6,
     StrategyConfig(family=StrategyFamily.RANDOM_TOPK, k=2), 1.0),
    ("shuffle n=6, threshold 0.6, greedy", TaskKind.SHUFFLE, 6,
     StrategyConfig(family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=0.6), 0.0),
    ("replace-random n=8, confidence top-2, greedy", TaskKind.REPLACE_RANDOM, 8,
     StrategyConfig(family=StrategyFamily.CONFIDENCE_TOPK, k=2), 0.0),
    ("replace-random n=8, one-step, tau=1", TaskKind.REPLACE_RANDOM, 8,
     StrategyConfig(family=StrategyFamily.RANDOM_TOPK, k=8), 1.0),
]


def time_backend(task, x, cfg, sampler, trials, backend):
    start = time.perf_counter()
    valid, steps = run_trials(task, x, cfg, sampler, trials, backend=backend)
    elapsed = time.perf_counter() - start
    return trials / elapsed, valid, steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50_000,
                        help="kernel trial count (the pure loop runs 1/20th)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not kernel_available():
        print("compiled kernel not available; timing the pure-Python loop only")

    for label, kind, n, cfg, temperature in WORKLOADS:
        task, x = make_task(kind, n)
        sampler = SamplerConfig(temperature=temperature, seed=args.seed)

        ref_trials = max(200, args.trials // 20)
        ref_rate, ref_valid, ref_steps = time_backend(
            task, x, cfg, sampler, ref_trials, "reference"
        )
        line = f"{label:48s} reference: {ref_rate:>12,.0f} trials/s"

        if kernel_available():
            k_rate, _, _ = time_backend(task, x, cfg, sampler, args.trials, "kernel")
            k_valid, k_steps = run_trials(task, x, cfg, sampler, ref_trials, backend="kernel")
            assert np.array_equal(k_valid, ref_valid), f"{label}: backends disagree"
            assert np.array_equal(k_steps, ref_steps), f"{label}: backends disagree"
            line += f"   kernel: {k_rate:>14,.0f} trials/s   speedup: {k_rate / ref_rate:>7,.0f}x"
        print(line)


if __name__ == "__main__":
    main()
