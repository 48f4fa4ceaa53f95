"""Parallel decoding loop and unmasking strategies.

One decode step: query the model for the posterior over every masked
position, pick a subset of positions with the configured strategy, then
sample each picked position *independently* from its marginal: the
conditional-independence factorization under study.  Tokens chosen in the
same step never see each other, which is exactly what makes parallel
decoding fast and fallible.

Strategies
----------
* random / confidence / margin / entropy / left-to-right top-k: unmask a
  fixed number of positions per step, ranked by nothing, max marginal
  probability, gap between the two best candidates, negated row entropy,
  or position.
* confidence threshold: unmask every position whose confidence strictly
  exceeds gamma, or the single best position when none does.
* factor: rank confidences descending and take the largest count m with
  (m + 1) * (1 - c_m) < f, never fewer than one.

An optional ``block_length`` turns any strategy semi-autoregressive:
selection is restricted to the lowest-indexed block that still has masks
(blocks are fixed-size spans from position 0), while the posterior query
still covers all masked positions.

Failure handling: sampling several positions at once can produce a state
with no valid completion (e.g. the same item twice in a shuffle).  The
loop detects this before the next query and finishes the run in a single
step by sampling every remaining position from the most recent posterior.
The run's output is necessarily invalid, which is the correct accounting,
and the model itself is never asked about an impossible state.

Determinism / draw discipline
-----------------------------
Each run owns one SplitMix64 stream seeded by SamplerConfig.seed.  Per
step the stream is consumed in a fixed order: one tie-break key per
in-scope masked position (ascending), then one draw per selected position
(ascending) to sample its token.  A failure-completion step consumes one
draw per remaining position (ascending) and no keys.  The compiled Monte
Carlo kernel replays this discipline exactly, so traces are bit-identical
across backends given the same seed.  Do not reorder draws.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Protocol, Sequence

from .oracle import MASKED, PosteriorTable, Row, SequenceState
from .rng import SplitMix64
from .tasks import Item, Seq


class StrategyFamily(str, Enum):
    RANDOM_TOPK = "random_topk"
    CONFIDENCE_TOPK = "confidence_topk"
    MARGIN_TOPK = "margin_topk"
    ENTROPY_TOPK = "entropy_topk"
    LEFT_TO_RIGHT_TOPK = "left_to_right_topk"
    CONFIDENCE_THRESHOLD = "confidence_threshold"
    FACTOR_BASED = "factor_based"


TOPK_FAMILIES = frozenset(
    {
        StrategyFamily.RANDOM_TOPK,
        StrategyFamily.CONFIDENCE_TOPK,
        StrategyFamily.MARGIN_TOPK,
        StrategyFamily.ENTROPY_TOPK,
        StrategyFamily.LEFT_TO_RIGHT_TOPK,
    }
)


@dataclass(frozen=True)
class StrategyConfig:
    """Which positions to unmask each step.

    Exactly the parameter its family needs must be set: k for the top-k
    families, gamma for the threshold family, f for the factor family.
    block_length is an optional semi-autoregressive wrapper for any family.
    """

    family: StrategyFamily
    k: int | None = None
    gamma: float | None = None
    f: float | None = None
    block_length: int | None = None

    def __post_init__(self):
        fam = StrategyFamily(self.family)
        object.__setattr__(self, "family", fam)
        needs_k = fam in TOPK_FAMILIES
        needs_gamma = fam is StrategyFamily.CONFIDENCE_THRESHOLD
        needs_f = fam is StrategyFamily.FACTOR_BASED
        if (self.k is not None) != needs_k:
            raise ValueError(f"{fam.value}: k {'required' if needs_k else 'not allowed'}")
        if (self.gamma is not None) != needs_gamma:
            raise ValueError(f"{fam.value}: gamma {'required' if needs_gamma else 'not allowed'}")
        if (self.f is not None) != needs_f:
            raise ValueError(f"{fam.value}: f {'required' if needs_f else 'not allowed'}")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.gamma is not None and not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.f is not None and self.f <= 0.0:
            raise ValueError("f must be positive")
        if self.block_length is not None and self.block_length < 1:
            raise ValueError("block_length must be a positive integer")

    def label(self) -> str:
        parts = [self.family.value]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.gamma is not None:
            parts.append(f"gamma={self.gamma:g}")
        if self.f is not None:
            parts.append(f"f={self.f:g}")
        if self.block_length is not None:
            parts.append(f"block={self.block_length}")
        return " ".join(parts)


@dataclass(frozen=True)
class SamplerConfig:
    """temperature 0 = greedy (uniform tie-breaks), 1 = ancestral sampling."""

    temperature: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class DecodeStep:
    positions: tuple[int, ...]
    items: tuple[Item, ...]
    confidences: tuple[float, ...]


@dataclass(frozen=True)
class DecodeTrace:
    steps: tuple[DecodeStep, ...]
    final_sequence: Seq

    @property
    def total_steps(self) -> int:
        return len(self.steps)

    @property
    def tokens_per_step(self) -> float:
        return len(self.final_sequence) / len(self.steps)

    def unmask_partition(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(step.positions) for step in self.steps)

    def to_json(self) -> str:
        return json.dumps(
            {
                "steps": [
                    {"positions": list(s.positions), "items": list(s.items),
                     "confidences": list(s.confidences)}
                    for s in self.steps
                ],
                "final_sequence": list(self.final_sequence),
                "total_steps": self.total_steps,
                "tokens_per_step": self.tokens_per_step,
            },
            ensure_ascii=False,
        )


class ModelInterface(Protocol):
    """What decode() needs from a model, local or remote."""

    output_length: int

    def posterior(self, state: SequenceState) -> PosteriorTable: ...

    def consistent(self, state: SequenceState) -> bool: ...


def _confidence(row: Row) -> float:
    return max(p for _, p in row)


def _margin(row: Row) -> float:
    best = second = 0.0
    for _, p in row:
        if p > best:
            best, second = p, best
        elif p > second:
            second = p
    return best - second


def _row_entropy(row: Row) -> float:
    # Plain left-to-right accumulation in row order: the compiled kernel
    # performs the identical float ops, keeping score ties bit-equal.
    total = 0.0
    for _, p in row:
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def select_unmask(
    config: StrategyConfig, posterior: PosteriorTable, rng: SplitMix64
) -> frozenset[int]:
    """Choose which masked positions to finalize this step.

    Consumes one tie-break key per row (ascending position) before any
    ranking, so every family leaves the stream in the same place.  Ties in
    a family's score are broken uniformly at random via those keys.
    """
    positions = sorted(posterior.rows)
    if not positions:
        raise ValueError("posterior has no rows")
    keys = {pos: rng.random() for pos in positions}
    fam = config.family

    if fam in TOPK_FAMILIES:
        k = min(config.k, len(positions))
        if fam is StrategyFamily.RANDOM_TOPK:
            ranked = sorted(positions, key=lambda j: (keys[j], j))
        elif fam is StrategyFamily.CONFIDENCE_TOPK:
            ranked = sorted(positions, key=lambda j: (-_confidence(posterior.rows[j]), keys[j], j))
        elif fam is StrategyFamily.MARGIN_TOPK:
            ranked = sorted(positions, key=lambda j: (-_margin(posterior.rows[j]), keys[j], j))
        elif fam is StrategyFamily.ENTROPY_TOPK:
            ranked = sorted(positions, key=lambda j: (_row_entropy(posterior.rows[j]), keys[j], j))
        else:  # LEFT_TO_RIGHT_TOPK
            ranked = positions
        return frozenset(ranked[:k])

    if fam is StrategyFamily.CONFIDENCE_THRESHOLD:
        above = [j for j in positions if _confidence(posterior.rows[j]) > config.gamma]
        if above:
            return frozenset(above)
        best = min(positions, key=lambda j: (-_confidence(posterior.rows[j]), keys[j], j))
        return frozenset({best})

    if fam is StrategyFamily.FACTOR_BASED:
        ranked = sorted(positions, key=lambda j: (-_confidence(posterior.rows[j]), keys[j], j))
        count = 1
        for m in range(1, len(ranked) + 1):
            c_m = _confidence(posterior.rows[ranked[m - 1]])
            if (m + 1) * (1.0 - c_m) < config.f:
                count = m
        return frozenset(ranked[:count])

    raise ValueError(f"unknown strategy family {fam}")


def sample_token(row: Row, sampler: SamplerConfig, rng: SplitMix64) -> Item:
    """Draw one item from a posterior row; consumes exactly one draw.

    Greedy picks the max-probability item, ties broken uniformly.  At
    temperature 1 the row is sampled as-is by cumulative inversion; other
    positive temperatures sample proportionally to p**(1/t).
    """
    if not row:
        raise ValueError("empty posterior row")
    u = rng.random()
    t = sampler.temperature
    if t == 0.0:
        pmax = max(p for _, p in row)
        tied = [item for item, p in row if p == pmax]
        idx = int(u * len(tied))
        return tied[idx if idx < len(tied) else len(tied) - 1]
    if t == 1.0:
        cum = 0.0
        for item, p in row:
            cum += p
            if u < cum:
                return item
        return row[-1][0]
    weights = [p ** (1.0 / t) for _, p in row]
    target = u * sum(weights)
    cum = 0.0
    for (item, _), w in zip(row, weights):
        cum += w
        if target < cum:
            return item
    return row[-1][0]


def _active_block(masked: Sequence[int], block_length: int) -> tuple[int, int]:
    lo = min(masked)
    b = lo // block_length
    return b * block_length, (b + 1) * block_length


def decode(model: ModelInterface, config: StrategyConfig, sampler: SamplerConfig) -> DecodeTrace:
    """Run the full unmasking loop against ``model`` and record the trace."""
    length = model.output_length
    state = SequenceState.all_masked(length)
    rng = SplitMix64(sampler.seed)
    steps: list[DecodeStep] = []
    last_rows: Mapping[int, Row] | None = None

    while state.num_masked() > 0:
        masked = state.masked_positions()
        if last_rows is not None and not model.consistent(state):
            # No valid completion remains; finish from the stale posterior.
            chosen = {j: sample_token(last_rows[j], sampler, rng) for j in masked}
            steps.append(
                DecodeStep(
                    positions=masked,
                    items=tuple(chosen[j] for j in masked),
                    confidences=tuple(_confidence(last_rows[j]) for j in masked),
                )
            )
            state = state.reveal(chosen)
            break

        table = model.posterior(state)
        last_rows = table.rows
        if config.block_length is not None:
            lo, hi = _active_block(masked, config.block_length)
            scope = {j: table.rows[j] for j in masked if lo <= j < hi}
        else:
            scope = dict(table.rows)
        selected = sorted(select_unmask(config, PosteriorTable(scope), rng))
        chosen = {j: sample_token(table.rows[j], sampler, rng) for j in selected}
        steps.append(
            DecodeStep(
                positions=tuple(selected),
                items=tuple(chosen[j] for j in selected),
                confidences=tuple(_confidence(table.rows[j]) for j in selected),
            )
        )
        state = state.reveal(chosen)

    assert all(s is not MASKED for s in state.slots)
    return DecodeTrace(steps=tuple(steps), final_sequence=tuple(state.slots))
