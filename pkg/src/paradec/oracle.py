"""Exact posterior oracle over partially decoded sequences.

Plays the role of a perfectly calibrated masked-diffusion model: given the
task, the input, and a partial output (some positions revealed, the rest
masked), it returns the exact marginal distribution of every masked
position under the task's conditional distribution.  Decoding against it
isolates the effect of the unmasking strategy from model error.

Closed-form row construction exists for the deterministic tasks (point
masses), shuffle (uniform over the items not yet placed), and
replace-random (keep/replace odds (m-1)/m vs 1/m over the m still-masked
positions until the replacement lands, point mass afterwards); everything
else falls back to filtering the enumerated support, which is linear in
the support size.  Both paths agree to float precision; the fast paths
additionally mirror, operation for operation, the arithmetic used by the
compiled Monte Carlo kernel so that the two backends produce identical
samples.

Rows are ordered by vocabulary index.  This ordering is part of the
sampling contract (cumulative inversion walks rows in order), not a
cosmetic choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .tasks import (
    DETERMINISTIC_KINDS,
    Item,
    Seq,
    TaskKind,
    TaskSpec,
    deterministic_target,
    enumerate_valid_outputs,
)

MASKED = None

Row = tuple[tuple[Item, float], ...]


class InconsistentStateError(RuntimeError):
    """Raised when a state admits no valid completion.

    The decoding loop checks consistency before querying, so hitting this
    from inside a decode run signals a bug upstream, not a model miss.
    """


@dataclass(frozen=True)
class SequenceState:
    """Partially decoded output: per-position item or MASKED (None)."""

    slots: tuple[Item | None, ...]

    @staticmethod
    def all_masked(length: int) -> "SequenceState":
        return SequenceState((MASKED,) * length)

    def masked_positions(self) -> tuple[int, ...]:
        return tuple(j for j, s in enumerate(self.slots) if s is MASKED)

    def num_masked(self) -> int:
        return sum(1 for s in self.slots if s is MASKED)

    def reveal(self, assignments: Mapping[int, Item]) -> "SequenceState":
        slots = list(self.slots)
        for j, item in assignments.items():
            if slots[j] is not MASKED:
                raise ValueError(f"position {j} already revealed")
            slots[j] = item
        return SequenceState(tuple(slots))

    def matches(self, output: Seq) -> bool:
        return all(s is MASKED or s == y for s, y in zip(self.slots, output))


@dataclass(frozen=True)
class PosteriorTable:
    """Per masked position, the exact item distribution (rows sum to 1)."""

    rows: Mapping[int, Row]

    def confidence(self, pos: int) -> float:
        return max(p for _, p in self.rows[pos])

    def positions(self) -> tuple[int, ...]:
        return tuple(sorted(self.rows))


@lru_cache(maxsize=256)
def _support(task: TaskSpec, input_seq: Seq):
    return enumerate_valid_outputs(task, input_seq)


def _check_state(task: TaskSpec, state: SequenceState) -> None:
    if len(state.slots) != task.output_length:
        raise ValueError(
            f"state length {len(state.slots)} != output length {task.output_length}"
        )
    vocab = set(task.vocabulary)
    for s in state.slots:
        if s is not MASKED and s not in vocab:
            raise ValueError(f"revealed token {s!r} not in vocabulary")


def _row_sorted(task: TaskSpec, entries: dict[Item, float]) -> Row:
    order = {item: i for i, item in enumerate(task.vocabulary)}
    return tuple(sorted(entries.items(), key=lambda kv: order[kv[0]]))


def _consistent_closed_form(task: TaskSpec, x: Seq, state: SequenceState) -> bool:
    kind = task.kind
    if kind in DETERMINISTIC_KINDS:
        target = deterministic_target(task, x)
        return all(s is MASKED or s == t for s, t in zip(state.slots, target))
    if kind is TaskKind.SHUFFLE:
        revealed = [s for s in state.slots if s is not MASKED]
        return len(set(revealed)) == len(revealed) and set(revealed) <= set(x)
    if kind is TaskKind.REPLACE_RANDOM:
        f_count = 0
        for j, s in enumerate(state.slots):
            if s is MASKED:
                continue
            if s == task.new_item:
                f_count += 1
            elif s != x[j]:
                return False
        if f_count > 1:
            return False
        return f_count == 1 or state.num_masked() >= 1
    raise ValueError(f"no closed form for {kind}")


def _posterior_closed_form(task: TaskSpec, x: Seq, state: SequenceState) -> PosteriorTable:
    kind = task.kind
    masked = state.masked_positions()
    rows: dict[int, Row] = {}
    if kind in DETERMINISTIC_KINDS:
        target = deterministic_target(task, x)
        for j in masked:
            rows[j] = ((target[j], 1.0),)
    elif kind is TaskKind.SHUFFLE:
        used = {s for s in state.slots if s is not MASKED}
        unused = [item for item in x if item not in used]
        order = {item: i for i, item in enumerate(task.vocabulary)}
        unused.sort(key=order.__getitem__)
        m = len(unused)
        row: Row = tuple((item, 1.0 / m) for item in unused)
        for j in masked:
            rows[j] = row
    elif kind is TaskKind.REPLACE_RANDOM:
        replaced = any(s == task.new_item for s in state.slots)
        m = len(masked)
        for j in masked:
            if replaced:
                rows[j] = ((x[j], 1.0),)
            elif m == 1:
                rows[j] = ((task.new_item, 1.0),)
            else:
                rows[j] = _row_sorted(
                    task, {x[j]: (m - 1) / m, task.new_item: 1.0 / m}
                )
    else:
        raise ValueError(f"no closed form for {kind}")
    return PosteriorTable(rows)


def _posterior_enumeration(task: TaskSpec, x: Seq, state: SequenceState) -> PosteriorTable:
    joint = _support(task, x)
    consistent = [(y, p) for y, p in joint.outcomes if state.matches(y)]
    if not consistent:
        raise InconsistentStateError(f"state {state.slots} admits no valid completion")
    weight = sum(p for _, p in consistent)
    rows: dict[int, Row] = {}
    for j in state.masked_positions():
        marg: dict[Item, float] = {}
        for y, p in consistent:
            marg[y[j]] = marg.get(y[j], 0.0) + p
        rows[j] = _row_sorted(task, {item: p / weight for item, p in marg.items()})
    return PosteriorTable(rows)


_CLOSED_FORM_KINDS = DETERMINISTIC_KINDS | {TaskKind.SHUFFLE, TaskKind.REPLACE_RANDOM}


def consistency_check(task: TaskSpec, input_seq: Sequence[Item], state: SequenceState) -> bool:
    """True iff at least one valid completion of ``state`` exists."""
    x = tuple(input_seq)
    _check_state(task, state)
    if task.kind in _CLOSED_FORM_KINDS:
        return _consistent_closed_form(task, x, state)
    joint = _support(task, x)
    return any(state.matches(y) for y in joint.support())


def posterior_marginals(
    task: TaskSpec,
    input_seq: Sequence[Item],
    state: SequenceState,
    method: str = "auto",
) -> PosteriorTable:
    """Exact per-position marginals of the masked slots given the revealed ones.

    ``method`` is "auto" (closed form where available), "closed_form", or
    "enumeration"; the latter two exist so tests can cross-check the paths
    against each other.  Raises InconsistentStateError when no valid
    completion exists.
    """
    x = tuple(input_seq)
    _check_state(task, state)
    if method not in ("auto", "closed_form", "enumeration"):
        raise ValueError(f"unknown method {method!r}")
    use_closed = task.kind in _CLOSED_FORM_KINDS and method != "enumeration"
    if method == "closed_form" and not use_closed:
        raise ValueError(f"no closed form for {task.kind}")
    if use_closed:
        if not _consistent_closed_form(task, x, state):
            raise InconsistentStateError(f"state {state.slots} admits no valid completion")
        return _posterior_closed_form(task, x, state)
    return _posterior_enumeration(task, x, state)


class IdealModel:
    """Model-interface wrapper binding the oracle to one task instance.

    The decoding loop talks to this through three members only
    (``output_length``, ``posterior(state)``, ``consistent(state)``), which
    is the same surface a remote adapter-backed model presents.
    """

    def __init__(self, task: TaskSpec, input_seq: Sequence[Item], method: str = "auto"):
        self.task = task
        self.input = tuple(input_seq)
        self.method = method
        self.output_length = task.output_length

    def posterior(self, state: SequenceState) -> PosteriorTable:
        return posterior_marginals(self.task, self.input, state, method=self.method)

    def consistent(self, state: SequenceState) -> bool:
        return consistency_check(self.task, self.input, state)

    def is_valid(self, output: Seq) -> bool:
        from .tasks import is_valid_output

        return is_valid_output(self.task, self.input, output)
