"""Waiting-line instances: queue management over sampled customer names.

Lists render as ["First Last", "First Last", ...].  Items stay whole names
end to end; the checker descriptor carries the task parameters so scoring
can test membership in the exact valid-output set for any n.  The shuffle
prompt demands an order different from the original, so its checker
excludes the identity even though the underlying distribution includes it.
"""

from __future__ import annotations

import json
from importlib import resources

from ..rng import SplitMix64
from ..tasks import INDEX_KINDS, NEW_ITEM_KINDS, TaskKind, TaskSpec, sample_output
from . import BenchInstance, CATEGORY_WAITING_LINE

_PREAMBLE = "You are managing a waiting line at a customer service desk."

TEMPLATES = {
    TaskKind.COPY: _PREAMBLE + (
        " You need to record the following people in the order they arrived: "
        "{context} Please copy the list exactly and provide only the final list."
    ),
    TaskKind.SORT: _PREAMBLE + (
        " The following people should be organized alphabetically by last name "
        "for efficient processing: {context} Please sort the list in "
        "alphabetical order and provide only the final list."
    ),
    TaskKind.REVERSE: _PREAMBLE + (
        " The previous staff member put the waiting line in the wrong order. "
        "Please reverse the order of the following people in the waiting line "
        "to correct it: {context} Please reverse the order of the list and "
        "provide only the final list."
    ),
    TaskKind.SHUFFLE: _PREAMBLE + (
        " The waiting line should be randomly shuffled to ensure fair service "
        "distribution: {context} Please randomly shuffle the list and provide "
        "only the final list. Ensure the sequence is different from the original."
    ),
    TaskKind.REPLACE_INDEX: _PREAMBLE + (
        ' The person at position {index} must be replaced with "{word}": '
        "{context} Please replace the person at the specified position with "
        '"{word}" and provide only the final list.'
    ),
    TaskKind.REPLACE_RANDOM: _PREAMBLE + (
        ' One person in the waiting line must be replaced with "{word}": '
        '{context} Please replace one random person with "{word}" and provide '
        "only the final list."
    ),
    TaskKind.INSERT_INDEX: _PREAMBLE + (
        ' A new person "{word}" is inserted into the line at position {index}: '
        "{context} Please put the new person at the specified position and "
        "provide only the final list."
    ),
    TaskKind.INSERT_RANDOM: _PREAMBLE + (
        ' A new person "{word}" is inserted into the line at a random position: '
        "{context} Please put the new person in the random position and provide "
        "only the final list."
    ),
    TaskKind.REMOVE_INDEX: _PREAMBLE + (
        " The person at position {index} has left the waiting line: {context} "
        "Please remove the person at the specified position and provide only "
        "the final list."
    ),
    TaskKind.REMOVE_RANDOM: _PREAMBLE + (
        " One person has left the waiting line: {context} Please remove a "
        "random person and provide only the final list."
    ),
}


def _name_pools() -> tuple[list[str], list[str]]:
    raw = resources.files("paradec.benchgen").joinpath("data/names.json").read_text("utf-8")
    pools = json.loads(raw)
    return pools["first"], pools["last"]


def render_name_list(names: list[str] | tuple[str, ...]) -> str:
    return "[" + ", ".join(f'"{name}"' for name in names) + "]"


def _sample_names(rng: SplitMix64, count: int) -> list[str]:
    """Distinct full names with distinct last names (keeps sort-by-last-name
    well defined)."""
    first, last = _name_pools()
    if count > len(last):
        raise ValueError(f"n={count} exceeds the name pool")
    last_idx = list(range(len(last)))
    rng.shuffle(last_idx)
    return [f"{first[rng.randbelow(len(first))]} {last[i]}" for i in last_idx[:count]]


def sort_vocabulary(names: list[str]) -> tuple[str, ...]:
    """Vocabulary order = alphabetical by (last, first) name, which makes
    the item-level sort task agree with the prompt's instruction."""
    def key(name: str) -> tuple[str, str]:
        first, _, last = name.rpartition(" ")
        return (last, first)

    return tuple(sorted(names, key=key))


def task_for_names(
    kind: TaskKind, names: list[str], index: int | None, new_person: str | None
) -> tuple[TaskSpec, tuple[str, ...]]:
    all_names = list(names) + ([new_person] if new_person else [])
    task = TaskSpec(
        kind=kind,
        n=len(names),
        vocabulary=sort_vocabulary(all_names),
        index=index,
        new_item=new_person,
    )
    return task, tuple(names)


def _reference_answer(
    kind: TaskKind, task: TaskSpec, names: tuple[str, ...], rng: SplitMix64
) -> tuple[str, ...]:
    answer = sample_output(task, names, rng)
    if kind is TaskKind.SHUFFLE:
        while answer == names:  # the prompt forbids the identity order
            answer = sample_output(task, names, rng)
    return answer


def _build(kind: TaskKind, n: int, rng: SplitMix64, instance_id: str | None) -> tuple:
    extra = 1 if kind in NEW_ITEM_KINDS else 0
    names = _sample_names(rng, n + extra)
    new_person = names.pop() if extra else None
    index = None
    if kind in INDEX_KINDS:
        upper = n + 1 if kind is TaskKind.INSERT_INDEX else n
        index = rng.randbelow(upper)
    task, input_names = task_for_names(kind, names, index, new_person)
    prompt = TEMPLATES[kind].format(
        context=render_name_list(names), index=index, word=new_person
    )
    return task, input_names, prompt, index, new_person


def gen_waiting_line(
    kind: TaskKind, n: int, rng: SplitMix64, instance_id: str
) -> BenchInstance:
    if n < 2:
        raise ValueError("waiting-line tasks need n >= 2")
    task, names, prompt, index, new_person = _build(kind, n, rng, instance_id)

    shot_task, shot_names, shot_prompt, _, _ = _build(kind, n, rng, None)
    shot_answer = _reference_answer(kind, shot_task, shot_names, rng)
    one_shot = {"prompt": shot_prompt, "answer": render_name_list(shot_answer)}

    checker = {
        "type": "exact_set",
        "task_kind": kind.value,
        "input": list(names),
        "index": index,
        "new_item": new_person,
        "exclude_identity": kind is TaskKind.SHUFFLE,
    }
    metadata = {"n": n, "names": list(names), "index": index, "new_person": new_person}
    return BenchInstance(
        id=instance_id,
        category=CATEGORY_WAITING_LINE,
        task_kind=kind.value,
        prompt=prompt,
        one_shot=one_shot,
        checker=checker,
        metadata=metadata,
    )
