"""Procedural benchmark instance generation and JSONL export.

Three categories: waiting-line queue management (the list operations in
natural-language clothing, one-shot), 4x4 puzzles (Latin square and
unique-solution Sudoku, one-shot), and text writing (words-to-sentence at
three difficulty levels, zero-shot, plus prompt wrapping for user-supplied
summarization/paraphrasing corpora).

Generation is a pure function of (parameters, seed): the same call always
produces byte-identical JSONL.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..rng import SplitMix64, substream_seed
from ..tasks import TaskKind

CATEGORY_WAITING_LINE = "waiting_line"
CATEGORY_PUZZLE = "puzzle"
CATEGORY_TEXT_WRITING = "text_writing"

ONE_SHOT_CATEGORIES = frozenset({CATEGORY_WAITING_LINE, CATEGORY_PUZZLE})

_CHECKERS_BY_CATEGORY = {
    CATEGORY_WAITING_LINE: frozenset({"exact_set"}),
    CATEGORY_PUZZLE: frozenset({"latin_square", "sudoku"}),
    CATEGORY_TEXT_WRITING: frozenset({"word_inclusion", "unscored"}),
}


@dataclass(frozen=True)
class BenchInstance:
    id: str
    category: str
    task_kind: str
    prompt: str
    one_shot: dict | None
    checker: dict
    metadata: dict

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        allowed = _CHECKERS_BY_CATEGORY.get(self.category)
        if allowed is None:
            raise ValueError(f"unknown category {self.category!r}")
        if self.checker.get("type") not in allowed:
            raise ValueError(
                f"checker type {self.checker.get('type')!r} does not fit {self.category}"
            )
        needs_one_shot = self.category in ONE_SHOT_CATEGORIES
        if (self.one_shot is not None) != needs_one_shot:
            raise ValueError(
                f"{self.category} instances are "
                f"{'one-shot' if needs_one_shot else 'zero-shot'}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "task_kind": self.task_kind,
            "prompt": self.prompt,
            "one_shot": self.one_shot,
            "checker": self.checker,
            "metadata": self.metadata,
        }

    @staticmethod
    def from_dict(d: dict) -> "BenchInstance":
        return BenchInstance(
            id=d["id"],
            category=d["category"],
            task_kind=d["task_kind"],
            prompt=d["prompt"],
            one_shot=d.get("one_shot"),
            checker=d["checker"],
            metadata=d.get("metadata", {}),
        )


def export_jsonl(instances: Iterable[BenchInstance], destination: str | Path) -> int:
    """Write one JSON object per line (UTF-8, stable field order)."""
    count = 0
    with open(destination, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_dict(), ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def load_jsonl(source: str | Path) -> list[BenchInstance]:
    instances = []
    with open(source, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                instances.append(BenchInstance.from_dict(json.loads(line)))
    return instances


WAITING_LINE_TASKS = tuple(kind.value for kind in TaskKind)
PUZZLE_TASKS = ("latin_square", "sudoku")
W2S_TASKS = ("w2s_easy", "w2s_medium", "w2s_hard")


def generate_batch(
    category: str, task: str, count: int, seed: int, n: int | None = None
) -> list[BenchInstance]:
    """``count`` instances of one task, deterministically from ``seed``."""
    from . import line, puzzles, words

    if count < 0:
        raise ValueError("count must be nonnegative")
    instances: list[BenchInstance] = []
    if category == CATEGORY_WAITING_LINE:
        if task not in WAITING_LINE_TASKS:
            raise ValueError(f"unknown waiting-line task {task!r}")
        if n is None:
            raise ValueError("waiting-line generation needs n")
        kind = TaskKind(task)
        for i in range(count):
            rng = SplitMix64(substream_seed(seed, i))
            instance_id = f"{category}-{task}-n{n}-{i:04d}"
            instances.append(line.gen_waiting_line(kind, n, rng, instance_id))
    elif category == CATEGORY_PUZZLE:
        for i in range(count):
            rng = SplitMix64(substream_seed(seed, i))
            instance_id = f"{category}-{task}-{i:04d}"
            if task == "latin_square":
                instances.append(puzzles.gen_latin_square(4, rng, instance_id))
            elif task == "sudoku":
                instances.append(puzzles.gen_sudoku(rng, instance_id))
            else:
                raise ValueError(f"unknown puzzle task {task!r}")
    elif category == CATEGORY_TEXT_WRITING:
        if task not in W2S_TASKS:
            raise ValueError(
                f"unknown text-writing task {task!r}; summarization/paraphrasing "
                "instances wrap a user-supplied corpus (see words.wrap_external_texts)"
            )
        difficulty = task.removeprefix("w2s_")
        instances = words.gen_w2s_batch(difficulty, count, seed)
    else:
        raise ValueError(f"unknown category {category!r}")
    return instances
