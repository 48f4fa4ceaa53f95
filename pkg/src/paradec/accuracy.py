"""Closed-form accuracy predictions and their Monte Carlo validation.

The closed forms cover the analytically tractable strategy/task pairs:

* shuffle under any top-k order with k | n:
  Acc(k) = prod_i P(n-(i-1)k, k) / (n-(i-1)k)^k, the chance that every
  step picks distinct items (k=n gives n!/n^n, k=2 gives (n-1)!!/n!!,
  k=1 is certain).
* replace-random under greedy top-k: every non-final step keeps all its
  tokens, so only the final step matters: 1 for k=1, 0.5 for k=2
  (the two orderings of one keep and one replace), 0 for k>2.
* replace-random one-step at temperature 1: ((n-1)/n)^(n-1), tending to
  1/e.
* confidence threshold on both tasks (greedy): shuffle succeeds for any
  gamma > 0.5 because no row exceeds 1/2 until one mask remains, forcing
  one-by-one decoding; for smaller gamma the first step whose shared
  confidence 1/m exceeds gamma unmasks all m remaining at once, giving
  m!/m^m.  Replace-random succeeds iff gamma >= (n-1)/n: below that the
  whole sequence unmasks in one greedy step and nothing is replaced.

``monte_carlo_accuracy`` estimates the same quantities by running the
actual decoder against the exact-posterior model, which is how every
closed form here is cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._backend import run_trials
from .decoding import SamplerConfig, StrategyConfig
from .tasks import Item, TaskKind, TaskSpec


@dataclass(frozen=True)
class AccuracyEstimate:
    """mean in [0,1]; trials and a 95% normal-approx CI for Monte Carlo
    estimates, trials=0 and half_width_95=0 for closed forms."""

    mean: float
    trials: int = 0
    half_width_95: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.mean <= 1.0:
            raise ValueError(f"mean {self.mean} outside [0, 1]")
        if self.half_width_95 < 0.0 or self.trials < 0:
            raise ValueError("trials and half_width_95 must be nonnegative")


@dataclass(frozen=True)
class MonteCarloSummary:
    estimate: AccuracyEstimate
    tokens_per_step_mean: float
    total_successes: int


def _log_falling_factorial(a: int, b: int) -> float:
    # log2 P(a, b) = log2(a!) - log2((a-b)!)
    return (math.lgamma(a + 1) - math.lgamma(a - b + 1)) / math.log(2.0)


def shuffle_topk_accuracy(n: int, k: int) -> AccuracyEstimate:
    """Exact success probability of shuffle under k-per-step unmasking."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if n % k != 0:
        raise ValueError(f"k={k} must divide n={n}")
    if k == 1:
        return AccuracyEstimate(mean=1.0)
    if n <= 20:
        acc = 1.0
        for i in range(n // k):
            remaining = n - i * k
            acc *= math.perm(remaining, k) / remaining**k
        return AccuracyEstimate(mean=acc)
    # log-space to dodge factorial overflow on long sequences
    log_acc = 0.0
    for i in range(n // k):
        remaining = n - i * k
        log_acc += _log_falling_factorial(remaining, k) - k * math.log2(remaining)
    return AccuracyEstimate(mean=2.0**log_acc)


def replace_random_greedy_topk_accuracy(n: int, k: int) -> AccuracyEstimate:
    """Greedy top-k accuracy on replace-random: 1, 0.5, or 0."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    if n % k != 0:
        raise ValueError(f"k={k} must divide n={n}")
    if k == 1:
        return AccuracyEstimate(mean=1.0)
    return AccuracyEstimate(mean=0.5 if k == 2 else 0.0)


def replace_random_temperature_onestep_accuracy(n: int) -> AccuracyEstimate:
    """One-step generation at temperature 1: ((n-1)/n)^(n-1)."""
    if n < 2:
        raise ValueError("need n >= 2")
    return AccuracyEstimate(mean=((n - 1) / n) ** (n - 1))


def replace_random_onestep_limit() -> float:
    """n -> infinity limit of the one-step temperature accuracy."""
    return 1.0 / math.e


def threshold_accuracy(kind: TaskKind | str, n: int, gamma: float) -> AccuracyEstimate:
    """Greedy confidence-threshold accuracy for shuffle / replace-random."""
    kind = TaskKind(kind)
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must be in (0, 1]")
    if kind is TaskKind.SHUFFLE:
        # walk down m = n, n-1, ...; the first m with 1/m > gamma unmasks
        # all m remaining positions at once
        for m in range(n, 1, -1):
            if 1.0 / m > gamma:
                return AccuracyEstimate(mean=math.factorial(m) / m**m)
        return AccuracyEstimate(mean=1.0)
    if kind is TaskKind.REPLACE_RANDOM:
        if n == 1:
            return AccuracyEstimate(mean=1.0)
        return AccuracyEstimate(mean=1.0 if gamma >= (n - 1) / n else 0.0)
    raise ValueError(f"no threshold closed form for {kind}")


def monte_carlo_run(
    task: TaskSpec,
    input_seq: tuple[Item, ...],
    config: StrategyConfig,
    sampler: SamplerConfig,
    trials: int,
    backend: str = "auto",
) -> MonteCarloSummary:
    """Decode ``trials`` times and summarize validity and speed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    valid, steps = run_trials(task, input_seq, config, sampler, trials, backend=backend)
    successes = int(valid.sum())
    p_hat = successes / trials
    ci = 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
    tokens_per_step = float((task.output_length / steps).mean())
    return MonteCarloSummary(
        estimate=AccuracyEstimate(mean=p_hat, trials=trials, half_width_95=ci),
        tokens_per_step_mean=tokens_per_step,
        total_successes=successes,
    )


def monte_carlo_accuracy(
    task: TaskSpec,
    input_seq: tuple[Item, ...],
    config: StrategyConfig,
    sampler: SamplerConfig,
    trials: int,
    backend: str = "auto",
) -> AccuracyEstimate:
    return monte_carlo_run(task, input_seq, config, sampler, trials, backend=backend).estimate
