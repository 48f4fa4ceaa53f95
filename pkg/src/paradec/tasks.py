"""Synthetic list-operation tasks as exact conditional distributions.

Each task maps a fixed input sequence of distinct items to a finite
distribution over output sequences.  Deterministic tasks (copy, reverse,
sort, index-addressed edits) have a single outcome; the randomized variants
place uniform mass on every admissible edit; shuffle is uniform over all
permutations of the input, identity included (the benchmark prompt's
"must differ from the original" clause is enforced by the benchmark
checker, not by the distribution, so that the n*log2(n) - log2(n!)
closed form applies unchanged).

Items are opaque identifiers; the vocabulary's order is what "sorted"
means for the sort task.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .rng import SplitMix64

Item = str
Seq = tuple[Item, ...]

# Full enumeration of shuffle grows as n!; refuse beyond this rather than
# silently burn memory.  Everything exact in this package stays small.
MAX_SHUFFLE_ENUM = 8

_PROB_SUM_TOL = 1e-12


class TaskKind(str, Enum):
    COPY = "copy"
    REVERSE = "reverse"
    SORT = "sort"
    SHUFFLE = "shuffle"
    REPLACE_INDEX = "replace_index"
    REPLACE_RANDOM = "replace_random"
    INSERT_INDEX = "insert_index"
    INSERT_RANDOM = "insert_random"
    REMOVE_INDEX = "remove_index"
    REMOVE_RANDOM = "remove_random"


INDEX_KINDS = frozenset(
    {TaskKind.REPLACE_INDEX, TaskKind.INSERT_INDEX, TaskKind.REMOVE_INDEX}
)
NEW_ITEM_KINDS = frozenset(
    {
        TaskKind.REPLACE_INDEX,
        TaskKind.REPLACE_RANDOM,
        TaskKind.INSERT_INDEX,
        TaskKind.INSERT_RANDOM,
    }
)
DETERMINISTIC_KINDS = frozenset(
    {
        TaskKind.COPY,
        TaskKind.REVERSE,
        TaskKind.SORT,
        TaskKind.REPLACE_INDEX,
        TaskKind.INSERT_INDEX,
        TaskKind.REMOVE_INDEX,
    }
)


@dataclass(frozen=True)
class TaskSpec:
    """One list-operation task plus its parameters.

    ``index`` is required exactly for the *_index kinds; ``new_item``
    exactly for replace_*/insert_*.  ``vocabulary`` is the ordered item
    universe and must contain every item the task touches.
    """

    kind: TaskKind
    n: int
    vocabulary: tuple[Item, ...]
    index: int | None = None
    new_item: Item | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise ValueError("vocabulary items must be distinct")
        if len(self.vocabulary) < self.n:
            raise ValueError("vocabulary must have at least n items")
        if (self.index is not None) != (self.kind in INDEX_KINDS):
            raise ValueError(f"index must be present iff kind is an index task, got {self.kind}")
        if (self.new_item is not None) != (self.kind in NEW_ITEM_KINDS):
            raise ValueError(f"new_item must be present iff kind inserts/replaces, got {self.kind}")
        if self.index is not None:
            upper = self.n if self.kind is TaskKind.INSERT_INDEX else self.n - 1
            if not 0 <= self.index <= upper:
                raise ValueError(f"index {self.index} out of range for {self.kind} with n={self.n}")
        if self.new_item is not None and self.new_item not in self.vocabulary:
            raise ValueError("new_item must be a vocabulary item")

    @property
    def output_length(self) -> int:
        if self.kind in (TaskKind.INSERT_INDEX, TaskKind.INSERT_RANDOM):
            return self.n + 1
        if self.kind in (TaskKind.REMOVE_INDEX, TaskKind.REMOVE_RANDOM):
            return self.n - 1
        return self.n

    def vocab_index(self, item: Item) -> int:
        return self.vocabulary.index(item)


@dataclass(frozen=True)
class JointDistribution:
    """Explicit finite distribution over output sequences for a fixed input."""

    input: Seq
    outcomes: tuple[tuple[Seq, float], ...]
    # populated lazily; not part of equality
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.outcomes:
            raise ValueError("empty support")
        lengths = {len(y) for y, _ in self.outcomes}
        if len(lengths) != 1:
            raise ValueError("outcomes must share one output length")
        seen = set()
        total = 0.0
        for y, p in self.outcomes:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"probability {p} outside (0, 1]")
            if y in seen:
                raise ValueError(f"duplicate outcome {y}")
            seen.add(y)
            total += p
        if abs(total - 1.0) > len(self.outcomes) * _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self._index.update({y: p for y, p in self.outcomes})

    @property
    def output_length(self) -> int:
        return len(self.outcomes[0][0])

    def probability(self, output: Seq) -> float:
        return self._index.get(tuple(output), 0.0)

    def support(self) -> tuple[Seq, ...]:
        return tuple(y for y, _ in self.outcomes)


def _check_input(task: TaskSpec, input_seq: Sequence[Item]) -> Seq:
    x = tuple(input_seq)
    if len(x) != task.n:
        raise ValueError(f"input length {len(x)} != n={task.n}")
    if len(set(x)) != len(x):
        raise ValueError("input items must be distinct")
    vocab = set(task.vocabulary)
    for item in x:
        if item not in vocab:
            raise ValueError(f"input item {item!r} not in vocabulary")
    if task.new_item is not None and task.new_item in x:
        raise ValueError("new_item must not already be in the input")
    return x


def deterministic_target(task: TaskSpec, input_seq: Sequence[Item]) -> Seq:
    """The single valid output of a deterministic task."""
    x = _check_input(task, input_seq)
    k = task.kind
    if k is TaskKind.COPY:
        return x
    if k is TaskKind.REVERSE:
        return tuple(reversed(x))
    if k is TaskKind.SORT:
        order = {item: i for i, item in enumerate(task.vocabulary)}
        return tuple(sorted(x, key=order.__getitem__))
    if k is TaskKind.REPLACE_INDEX:
        return x[: task.index] + (task.new_item,) + x[task.index + 1 :]
    if k is TaskKind.INSERT_INDEX:
        return x[: task.index] + (task.new_item,) + x[task.index :]
    if k is TaskKind.REMOVE_INDEX:
        return x[: task.index] + x[task.index + 1 :]
    raise ValueError(f"{k} is not deterministic")


def enumerate_valid_outputs(task: TaskSpec, input_seq: Sequence[Item]) -> JointDistribution:
    """Full support of P(Y|X) with its exact probabilities."""
    x = _check_input(task, input_seq)
    k = task.kind
    if k in DETERMINISTIC_KINDS:
        return JointDistribution(input=x, outcomes=((deterministic_target(task, x), 1.0),))
    if k is TaskKind.REPLACE_RANDOM:
        p = 1.0 / task.n
        outs = tuple(
            (x[:j] + (task.new_item,) + x[j + 1 :], p) for j in range(task.n)
        )
        return JointDistribution(input=x, outcomes=outs)
    if k is TaskKind.INSERT_RANDOM:
        p = 1.0 / (task.n + 1)
        outs = tuple(
            (x[:j] + (task.new_item,) + x[j:], p) for j in range(task.n + 1)
        )
        return JointDistribution(input=x, outcomes=outs)
    if k is TaskKind.REMOVE_RANDOM:
        p = 1.0 / task.n
        outs = tuple((x[:j] + x[j + 1 :], p) for j in range(task.n))
        return JointDistribution(input=x, outcomes=outs)
    if k is TaskKind.SHUFFLE:
        if task.n > MAX_SHUFFLE_ENUM:
            raise ValueError(
                f"refusing to enumerate {task.n}! shuffle outputs (cap {MAX_SHUFFLE_ENUM})"
            )
        p = 1.0 / math.factorial(task.n)
        outs = tuple((perm, p) for perm in itertools.permutations(x))
        return JointDistribution(input=x, outcomes=outs)
    raise ValueError(f"unknown task kind {k}")


def is_valid_output(task: TaskSpec, input_seq: Sequence[Item], output: Sequence[Item]) -> bool:
    """Membership in the support of :func:`enumerate_valid_outputs`.

    Closed-form per kind, so it works for any n without enumeration.
    Malformed outputs return False rather than raising.
    """
    x = _check_input(task, input_seq)
    y = tuple(output)
    if len(y) != task.output_length:
        return False
    k = task.kind
    if k in DETERMINISTIC_KINDS:
        return y == deterministic_target(task, x)
    if k is TaskKind.SHUFFLE:
        return sorted(y) == sorted(x)
    if k is TaskKind.REPLACE_RANDOM:
        diffs = [j for j in range(task.n) if y[j] != x[j]]
        return len(diffs) == 1 and y[diffs[0]] == task.new_item
    if k is TaskKind.INSERT_RANDOM:
        return any(
            y[j] == task.new_item and y[:j] + y[j + 1 :] == x for j in range(task.n + 1)
        )
    if k is TaskKind.REMOVE_RANDOM:
        return any(x[:j] + x[j + 1 :] == y for j in range(task.n))
    raise ValueError(f"unknown task kind {k}")


def sample_output(task: TaskSpec, input_seq: Sequence[Item], rng: SplitMix64) -> Seq:
    """One draw from P(Y|X); works for any n (no enumeration)."""
    x = _check_input(task, input_seq)
    k = task.kind
    if k in DETERMINISTIC_KINDS:
        return deterministic_target(task, x)
    if k is TaskKind.REPLACE_RANDOM:
        j = rng.randbelow(task.n)
        return x[:j] + (task.new_item,) + x[j + 1 :]
    if k is TaskKind.INSERT_RANDOM:
        j = rng.randbelow(task.n + 1)
        return x[:j] + (task.new_item,) + x[j:]
    if k is TaskKind.REMOVE_RANDOM:
        j = rng.randbelow(task.n)
        return x[:j] + x[j + 1 :]
    if k is TaskKind.SHUFFLE:
        items = list(x)
        rng.shuffle(items)
        return tuple(items)
    raise ValueError(f"unknown task kind {k}")


def make_task(
    kind: TaskKind | str,
    n: int,
    vocabulary: Iterable[Item] | None = None,
    index: int | None = None,
    new_item: Item | None = None,
) -> tuple[TaskSpec, Seq]:
    """Convenience constructor: a task over a default alphabet vocabulary.

    Returns the task together with its canonical input (the first n
    vocabulary items).  Kinds that need a new item get the item after the
    input block, so it is never part of the input.
    """
    kind = TaskKind(kind)
    if vocabulary is None:
        size = n + (1 if kind in NEW_ITEM_KINDS else 0)
        letters = [chr(ord("A") + i) for i in range(26)]
        if size > len(letters):
            vocabulary = tuple(f"item{i:02d}" for i in range(size))
        else:
            vocabulary = tuple(letters[:size])
    else:
        vocabulary = tuple(vocabulary)
    if kind in NEW_ITEM_KINDS and new_item is None:
        new_item = vocabulary[n]
    if kind in INDEX_KINDS and index is None:
        index = 0
    task = TaskSpec(kind=kind, n=n, vocabulary=vocabulary, index=index, new_item=new_item)
    return task, vocabulary[:n]
