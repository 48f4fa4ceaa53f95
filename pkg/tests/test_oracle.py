import itertools

import pytest

from paradec import (
    InconsistentStateError,
    SequenceState,
    SplitMix64,
    TaskKind,
    consistency_check,
    enumerate_valid_outputs,
    make_task,
    posterior_marginals,
)
from paradec.oracle import MASKED

CLOSED_FORM_KINDS = [
    TaskKind.COPY,
    TaskKind.REVERSE,
    TaskKind.SORT,
    TaskKind.REPLACE_INDEX,
    TaskKind.INSERT_INDEX,
    TaskKind.REMOVE_INDEX,
    TaskKind.SHUFFLE,
    TaskKind.REPLACE_RANDOM,
]


def rows_as_dicts(table):
    return {pos: dict(row) for pos, row in table.rows.items()}


def test_shuffle_partial_state_uniform_over_unused():
    task, x = make_task(TaskKind.SHUFFLE, 3, vocabulary=("A", "B", "C"))
    table = posterior_marginals(task, x, SequenceState(("B", MASKED, MASKED)))
    assert rows_as_dicts(table) == {
        1: {"A": 0.5, "C": 0.5},
        2: {"A": 0.5, "C": 0.5},
    }


def test_replace_random_all_masked_keep_odds():
    task, x = make_task(TaskKind.REPLACE_RANDOM, 3, vocabulary=("A", "B", "C", "F"))
    table = posterior_marginals(task, x, SequenceState.all_masked(3))
    rows = rows_as_dicts(table)
    for j, orig in enumerate(x):
        assert rows[j][orig] == pytest.approx(2 / 3)
        assert rows[j]["F"] == pytest.approx(1 / 3)


def test_replace_random_after_replacement_point_masses():
    task, x = make_task(TaskKind.REPLACE_RANDOM, 3, vocabulary=("A", "B", "C", "F"))
    table = posterior_marginals(task, x, SequenceState(("F", MASKED, MASKED)))
    assert rows_as_dicts(table) == {1: {"B": 1.0}, 2: {"C": 1.0}}


def test_replace_random_last_mask_must_replace():
    task, x = make_task(TaskKind.REPLACE_RANDOM, 3, vocabulary=("A", "B", "C", "F"))
    table = posterior_marginals(task, x, SequenceState(("A", "B", MASKED)))
    assert rows_as_dicts(table) == {2: {"F": 1.0}}


def test_copy_point_masses():
    task, x = make_task(TaskKind.COPY, 2, vocabulary=("A", "B"))
    table = posterior_marginals(task, x, SequenceState.all_masked(2))
    assert rows_as_dicts(table) == {0: {"A": 1.0}, 1: {"B": 1.0}}


def test_consistency_examples():
    task, x = make_task(TaskKind.SHUFFLE, 3, vocabulary=("A", "B", "C"))
    assert not consistency_check(task, x, SequenceState(("B", "B", MASKED)))
    assert consistency_check(task, x, SequenceState.all_masked(3))

    task, x = make_task(TaskKind.REPLACE_RANDOM, 3, vocabulary=("A", "B", "C", "F"))
    assert not consistency_check(task, x, SequenceState(("F", "F", MASKED)))
    assert consistency_check(task, x, SequenceState(("F", MASKED, MASKED)))
    # a non-original, non-replacement reveal can never complete
    assert not consistency_check(task, x, SequenceState(("B", MASKED, MASKED)))


def test_inconsistent_state_raises():
    task, x = make_task(TaskKind.SHUFFLE, 3)
    with pytest.raises(InconsistentStateError):
        posterior_marginals(task, x, SequenceState((x[0], x[0], MASKED)))
    task, x = make_task(TaskKind.INSERT_RANDOM, 3)
    bad = SequenceState((task.new_item, task.new_item, MASKED, MASKED))
    with pytest.raises(InconsistentStateError):
        posterior_marginals(task, x, bad)


def _reachable_states(task, x, rng, count):
    """States sampled by revealing a random subset of a random outcome."""
    joint = enumerate_valid_outputs(task, x)
    support = joint.support()
    out = []
    for _ in range(count):
        y = support[rng.randbelow(len(support))]
        slots = list(y)
        for j in range(len(slots)):
            if rng.random() < 0.5:
                slots[j] = MASKED
        out.append(SequenceState(tuple(slots)))
    return out


@pytest.mark.parametrize(
    "kind",
    [TaskKind.SHUFFLE, TaskKind.REPLACE_RANDOM, TaskKind.COPY, TaskKind.REVERSE,
     TaskKind.SORT],
)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_fast_paths_match_enumeration(kind, n):
    # 50 states x 20 parameter combinations: 1000 random reachable states
    task, x = make_task(kind, n)
    rng = SplitMix64(555)
    states = _reachable_states(task, x, rng, 50)
    for state in states:
        if state.num_masked() == 0:
            continue
        fast = posterior_marginals(task, x, state, method="closed_form")
        slow = posterior_marginals(task, x, state, method="enumeration")
        assert fast.positions() == slow.positions()
        for pos in fast.positions():
            f, s = dict(fast.rows[pos]), dict(slow.rows[pos])
            assert set(f) == {k for k, v in s.items() if v > 0}
            for item, p in f.items():
                assert p == pytest.approx(s[item], abs=1e-9)


@pytest.mark.parametrize("kind", list(TaskKind))
def test_rows_sum_to_one_and_cover_masked(kind):
    task, x = make_task(kind, 4)
    rng = SplitMix64(777)
    for state in _reachable_states(task, x, rng, 40):
        if state.num_masked() == 0:
            continue
        table = posterior_marginals(task, x, state)
        assert table.positions() == state.masked_positions()
        for pos in table.positions():
            assert sum(p for _, p in table.rows[pos]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kind", [TaskKind.SHUFFLE, TaskKind.REPLACE_RANDOM, TaskKind.REMOVE_RANDOM])
def test_chain_rule_reproduces_joint(kind):
    """Revealing tokens one at a time, in any order, multiplies back to the
    joint probability of the final sequence."""
    task, x = make_task(kind, 4)
    joint = enumerate_valid_outputs(task, x)
    length = joint.output_length
    for y, p_joint in joint.outcomes:
        for order in itertools.permutations(range(length)):
            state = SequenceState.all_masked(length)
            product = 1.0
            for j in order:
                table = posterior_marginals(task, x, state)
                product *= dict(table.rows[j]).get(y[j], 0.0)
                state = state.reveal({j: y[j]})
            assert product == pytest.approx(p_joint, rel=1e-9)


def test_rows_are_vocabulary_ordered():
    task, x = make_task(TaskKind.SHUFFLE, 4, vocabulary=("D", "C", "B", "A"))
    table = posterior_marginals(task, x, SequenceState.all_masked(4))
    for pos in table.positions():
        items = [item for item, _ in table.rows[pos]]
        assert items == ["D", "C", "B", "A"]


def test_state_validation():
    task, x = make_task(TaskKind.COPY, 3)
    with pytest.raises(ValueError):
        posterior_marginals(task, x, SequenceState.all_masked(4))
    with pytest.raises(ValueError):
        posterior_marginals(task, x, SequenceState(("Z", MASKED, MASKED)))
