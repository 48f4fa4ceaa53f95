"""Exact information-theoretic quantities for parallel decoding limits.

Everything here is computed in bits (log base 2) by direct enumeration of
finite joint distributions, with closed forms where the task admits one.
The central quantity is the conditional total correlation

    C(Y|X) = sum_i H(y_i|X) - H(Y|X),

the irreducible KL gap of one-step factorized generation.  A T-step
decoding schedule (an ordered partition S_1..S_T of the output positions)
has lower bound

    L_T = sum_i E_{S_<i}[C(S_i | X, S_<i)],

which collapses to C(Y|X) for a single block and to zero for one-by-one
decoding.  ``optimal_lower_bound`` minimizes L_T over all ordered
partitions with a given number of blocks; since L_T depends on a block
only through the *set* of previously decoded positions, the minimization
is a shortest-path problem over the subset lattice and is solved exactly
by dynamic programming (equivalent to exhaustive search over ordered
partitions, just without re-walking shared prefixes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum, log2
from typing import Iterable, Mapping, Sequence

from .tasks import JointDistribution, TaskKind

# Values within this of zero from below are numerical noise and clamp to
# zero; anything more negative indicates a real bug and raises.
_NEG_TOL = 1e-9

# Exhaustive/DP partition search cap.  The cost table needs one pass over
# the support per (decoded-set, block) pair; beyond 8 positions this stops
# being "exact and quick" and we refuse rather than approximate.
MAX_POSITIONS = 8

LOG2_E = math.log2(math.e)


def as_bits(value: float, what: str = "value") -> float:
    """Clamp numerical noise below zero; reject genuinely negative bits."""
    if value < -_NEG_TOL:
        raise ValueError(f"{what} is negative ({value}); this indicates a bug")
    return 0.0 if value < 0.0 else value


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint position sets covering 0..length-1 (S_1 decoded first)."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not self.sets:
            raise ValueError("partition needs at least one set")
        seen: set[int] = set()
        for s in self.sets:
            if not s:
                raise ValueError("partition sets must be nonempty")
            if seen & s:
                raise ValueError("partition sets must be disjoint")
            seen |= s
        if seen != set(range(len(seen))):
            raise ValueError("partition must cover positions 0..len-1 contiguously")

    @property
    def num_positions(self) -> int:
        return sum(len(s) for s in self.sets)

    @staticmethod
    def one_by_one(length: int) -> "Partition":
        return Partition(tuple(frozenset({i}) for i in range(length)))

    @staticmethod
    def single_block(length: int) -> "Partition":
        return Partition((frozenset(range(length)),))


def entropy(probs: Iterable[float]) -> float:
    """Shannon entropy in bits; 0 * log 0 := 0."""
    terms = []
    total = 0.0
    for p in probs:
        if p < -_NEG_TOL:
            raise ValueError(f"negative probability {p}")
        total += p
        if p > 0.0:
            terms.append(-p * log2(p))
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total}, not 1")
    return as_bits(fsum(terms), "entropy")


def _entropy_unchecked(probs: Iterable[float]) -> float:
    return fsum(-p * log2(p) for p in probs if p > 0.0)


def _marginal_entropies(outcomes: Sequence[tuple[tuple, float]], positions: Sequence[int]) -> float:
    total = 0.0
    for j in positions:
        marg: dict = {}
        for y, p in outcomes:
            marg[y[j]] = marg.get(y[j], 0.0) + p
        total += _entropy_unchecked(marg.values())
    return total


def total_correlation(joint: JointDistribution) -> float:
    """C(Y|X) = sum_i H(y_i) - H(Y) for a joint already conditioned on X."""
    outcomes = joint.outcomes
    positions = range(joint.output_length)
    joint_h = _entropy_unchecked(p for _, p in outcomes)
    return as_bits(_marginal_entropies(outcomes, positions) - joint_h, "total correlation")


def closed_form_C(kind: TaskKind | str, n: int) -> float:
    """Closed-form C(Y|X): 0 for copy/replace-index, the two analytic
    expressions for replace-random and shuffle."""
    kind = TaskKind(kind)
    if n < 1:
        raise ValueError("n must be positive")
    if kind in (TaskKind.COPY, TaskKind.REPLACE_INDEX):
        return 0.0
    if kind is TaskKind.REPLACE_RANDOM:
        if n == 1:
            return 0.0
        return as_bits((n - 1) * (log2(n) - log2(n - 1)))
    if kind is TaskKind.SHUFFLE:
        return as_bits(n * log2(n) - sum(log2(m) for m in range(2, n + 1)))
    raise ValueError(f"no closed form for {kind}")


def closed_form_C_limit(kind: TaskKind | str) -> float:
    """n -> infinity limit of closed_form_C; shuffle diverges (inf)."""
    kind = TaskKind(kind)
    if kind in (TaskKind.COPY, TaskKind.REPLACE_INDEX):
        return 0.0
    if kind is TaskKind.REPLACE_RANDOM:
        return LOG2_E
    if kind is TaskKind.SHUFFLE:
        return math.inf
    raise ValueError(f"no closed form for {kind}")


def shuffle_stepwise_bound(n: int, step_sizes: Sequence[int]) -> float:
    """L_T for shuffle under a schedule given only by its step sizes.

    sum_t |S_t| * log2(k_t) - log2(n!), where k_t counts the items still
    unplaced when step t begins.  Which positions go in which step does
    not matter for shuffle, only the sizes.
    """
    if any(s < 1 for s in step_sizes):
        raise ValueError("step sizes must be positive")
    if sum(step_sizes) != n:
        raise ValueError(f"step sizes sum to {sum(step_sizes)}, not n={n}")
    remaining = n
    total = 0.0
    for size in step_sizes:
        total += size * log2(remaining)
        remaining -= size
    return as_bits(total - sum(log2(m) for m in range(2, n + 1)))


def _group_by_assignment(
    outcomes: Sequence[tuple[tuple, float]], positions: tuple[int, ...]
) -> dict[tuple, list[tuple[tuple, float]]]:
    groups: dict[tuple, list[tuple[tuple, float]]] = {}
    for y, p in outcomes:
        groups.setdefault(tuple(y[j] for j in positions), []).append((y, p))
    return groups


def _expected_conditional_tc(
    outcomes: Sequence[tuple[tuple, float]],
    decoded: tuple[int, ...],
    block: tuple[int, ...],
) -> float:
    """E over realizations of ``decoded`` of C(block | X, realization)."""
    if len(block) == 1:
        return 0.0
    total = 0.0
    for group in _group_by_assignment(outcomes, decoded).values():
        weight = fsum(p for _, p in group)
        cond = [(y, p / weight) for y, p in group]
        sub: dict[tuple, float] = {}
        for y, p in cond:
            key = tuple(y[j] for j in block)
            sub[key] = sub.get(key, 0.0) + p
        joint_h = _entropy_unchecked(sub.values())
        total += weight * (_marginal_entropies(cond, block) - joint_h)
    return total


def partition_lower_bound(joint: JointDistribution, partition: Partition) -> float:
    """L_T of a specific ordered partition, by exact enumeration."""
    if partition.num_positions != joint.output_length:
        raise ValueError("partition does not cover the joint's positions")
    outcomes = joint.outcomes
    decoded: tuple[int, ...] = ()
    total = 0.0
    for block in partition.sets:
        total += _expected_conditional_tc(outcomes, decoded, tuple(sorted(block)))
        decoded = tuple(sorted(set(decoded) | block))
    return as_bits(total, "partition lower bound")


def optimal_lower_bound(joint: JointDistribution, num_steps: int) -> tuple[float, Partition]:
    """Minimum L_T over all ordered partitions into ``num_steps`` blocks.

    Exact for output lengths up to MAX_POSITIONS; returns the value and
    one minimizing partition.
    """
    length = joint.output_length
    if not 1 <= num_steps <= length:
        raise ValueError(f"need 1 <= T <= {length}, got {num_steps}")
    if length > MAX_POSITIONS:
        raise ValueError(
            f"exact partition search supports at most {MAX_POSITIONS} positions, got {length}"
        )
    outcomes = joint.outcomes
    full = (1 << length) - 1

    cost_cache: dict[tuple[int, int], float] = {}

    def cost(decoded_mask: int, block_mask: int) -> float:
        key = (decoded_mask, block_mask)
        got = cost_cache.get(key)
        if got is None:
            decoded = tuple(j for j in range(length) if decoded_mask >> j & 1)
            block = tuple(j for j in range(length) if block_mask >> j & 1)
            got = cost_cache[key] = _expected_conditional_tc(outcomes, decoded, block)
        return got

    # best[mask][t]: cheapest way to decode exactly `mask` in t steps.
    best: list[dict[int, float]] = [dict() for _ in range(full + 1)]
    choice: list[dict[int, int]] = [dict() for _ in range(full + 1)]
    best[0][0] = 0.0
    for mask in range(1, full + 1):
        sub = mask
        while sub:  # sub runs over nonempty submasks of mask: candidate last blocks
            prev = mask ^ sub
            for t, val in best[prev].items():
                if t + 1 > num_steps:
                    continue
                cand = val + cost(prev, sub)
                cur = best[mask].get(t + 1)
                if cur is None or cand < cur - 1e-15:
                    best[mask][t + 1] = cand
                    choice[mask][t + 1] = sub
            sub = (sub - 1) & mask

    value = best[full][num_steps]
    blocks: list[frozenset[int]] = []
    mask, t = full, num_steps
    while t > 0:
        sub = choice[mask][t]
        blocks.append(frozenset(j for j in range(length) if sub >> j & 1))
        mask ^= sub
        t -= 1
    blocks.reverse()
    return as_bits(value, "optimal lower bound"), Partition(tuple(blocks))


def expected_conditional_total_correlation(
    joint: JointDistribution, decoded: Iterable[int], block: Iterable[int]
) -> float:
    """E_{decoded}[C(block | X, decoded)], exposed for property checks
    (subadditivity of conditional total correlation)."""
    return as_bits(
        _expected_conditional_tc(joint.outcomes, tuple(sorted(decoded)), tuple(sorted(block))),
        "conditional total correlation",
    )


def joint_from_probs(outcomes: Mapping[tuple, float] | Sequence[tuple[tuple, float]]) -> JointDistribution:
    """Build a JointDistribution from raw (outcome, probability) pairs.

    Handy for ad-hoc joints (tests, random property checks) that do not
    come from a task; the conditioning input is irrelevant there.
    """
    items = outcomes.items() if isinstance(outcomes, Mapping) else outcomes
    outs = tuple((tuple(y), float(p)) for y, p in items if p > 0.0)
    return JointDistribution(input=(), outcomes=outs)
