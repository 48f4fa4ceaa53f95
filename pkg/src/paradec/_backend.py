"""Backend selection for the Monte Carlo trial loop.

At import time we pick up the compiled kernel if it was built; setting
PARADEC_PURE_PYTHON=1 forces the pure-Python path.  Both backends follow
the same draw discipline from the same per-trial streams, so results are
bit-identical; the kernel is purely an accelerator, never a semantic
fork.  ``benchmarks/bench_montecarlo.py`` measures the gap.
"""

from __future__ import annotations

import os

import numpy as np

from .decoding import SamplerConfig, StrategyConfig, StrategyFamily, decode
from .oracle import IdealModel
from .rng import substream_seed
from .tasks import Item, TaskKind, TaskSpec, is_valid_output

_kernel = None
if os.environ.get("PARADEC_PURE_PYTHON") != "1":
    try:
        from . import _mckernel as _kernel  # type: ignore[attr-defined]
    except ImportError:
        _kernel = None

_STRATEGY_CODES = {
    StrategyFamily.RANDOM_TOPK: 0,
    StrategyFamily.CONFIDENCE_TOPK: 1,
    StrategyFamily.MARGIN_TOPK: 2,
    StrategyFamily.ENTROPY_TOPK: 3,
    StrategyFamily.LEFT_TO_RIGHT_TOPK: 4,
    StrategyFamily.CONFIDENCE_THRESHOLD: 5,
    StrategyFamily.FACTOR_BASED: 6,
}

_KIND_CODES = {TaskKind.SHUFFLE: 0, TaskKind.REPLACE_RANDOM: 1}


def kernel_available() -> bool:
    return _kernel is not None


def kernel_supported(task: TaskSpec, config: StrategyConfig, sampler: SamplerConfig) -> bool:
    return (
        _kernel is not None
        and task.kind in _KIND_CODES
        and config.block_length is None
        and sampler.temperature in (0.0, 1.0)
        and task.n <= 64
    )


def run_trials(
    task: TaskSpec,
    input_seq: tuple[Item, ...],
    config: StrategyConfig,
    sampler: SamplerConfig,
    trials: int,
    backend: str = "auto",
) -> tuple[np.ndarray, np.ndarray]:
    """``trials`` independent decode runs; per-trial validity and step counts.

    Trial i runs on its own stream derived from (sampler.seed, i), so the
    result is independent of execution order.  ``backend`` is "auto"
    (kernel when eligible), "kernel" (error if not), or "reference" (the
    plain decode loop).
    """
    if backend not in ("auto", "kernel", "reference"):
        raise ValueError(f"unknown backend {backend!r}")
    use_kernel = kernel_supported(task, config, sampler)
    if backend == "kernel" and not use_kernel:
        raise RuntimeError("compiled kernel unavailable or unsupported for this configuration")
    if backend == "reference":
        use_kernel = False

    if use_kernel:
        f_first = None
        if task.kind is TaskKind.REPLACE_RANDOM:
            f_rank = task.vocab_index(task.new_item)
            f_first = [f_rank < task.vocab_index(item) for item in input_seq]
        return _kernel.run_trials(
            _KIND_CODES[task.kind],
            task.n,
            _STRATEGY_CODES[config.family],
            config.k or 0,
            config.gamma if config.gamma is not None else 0.0,
            config.f if config.f is not None else 0.0,
            sampler.temperature,
            trials,
            sampler.seed,
            f_first,
        )

    valid = np.empty(trials, dtype=np.uint8)
    steps = np.empty(trials, dtype=np.int32)
    model = IdealModel(task, input_seq)
    for i in range(trials):
        run_sampler = SamplerConfig(
            temperature=sampler.temperature, seed=substream_seed(sampler.seed, i)
        )
        trace = decode(model, config, run_sampler)
        valid[i] = is_valid_output(task, input_seq, trace.final_sequence)
        steps[i] = trace.total_steps
    return valid, steps
