"""Words-to-sentence instances plus prompt wrapping for external corpora.

The four-word sets ship as a static data file with one list per
difficulty (easy: related words, medium: loosely connected, hard:
unrelated).  A batch draws sets without replacement, so asking for more
instances than the file holds is an error rather than a silent repeat.

Summarization and paraphrasing need third-party corpora we do not
redistribute; ``wrap_external_texts`` applies their prompt templates to a
user-supplied list of source texts and marks the result unscored (their
metrics need external models).
"""

from __future__ import annotations

import json
from importlib import resources

from ..rng import SplitMix64
from . import BenchInstance, CATEGORY_TEXT_WRITING

W2S_PROMPT = "Construct a single, coherent sentence using the words {a}, {b}, {c}, and {d}."

SUMMARIZATION_PROMPT = (
    "Summarize the following conversation. Only output the final result. "
    "{text} Summary:"
)
PARAPHRASING_PROMPT = (
    "Paraphrase the following sentence. Only output the final result. "
    "Sentence: {text} Paraphrase:"
)

DIFFICULTIES = ("easy", "medium", "hard")


def word_sets(difficulty: str) -> list[list[str]]:
    if difficulty not in DIFFICULTIES:
        raise ValueError(f"difficulty must be one of {DIFFICULTIES}, got {difficulty!r}")
    raw = resources.files("paradec.benchgen").joinpath("data/word_sets.json").read_text("utf-8")
    return json.loads(raw)[difficulty]


def gen_w2s_batch(difficulty: str, count: int, seed: int) -> list[BenchInstance]:
    sets = word_sets(difficulty)
    if count > len(sets):
        raise ValueError(
            f"word-set file for {difficulty!r} has {len(sets)} sets, requested {count}"
        )
    rng = SplitMix64(seed)
    order = list(range(len(sets)))
    rng.shuffle(order)
    instances = []
    for i in range(count):
        words = sets[order[i]]
        prompt = W2S_PROMPT.format(a=words[0], b=words[1], c=words[2], d=words[3])
        instances.append(
            BenchInstance(
                id=f"{CATEGORY_TEXT_WRITING}-w2s_{difficulty}-{i:04d}",
                category=CATEGORY_TEXT_WRITING,
                task_kind=f"w2s_{difficulty}",
                prompt=prompt,
                one_shot=None,
                # inclusion is scored locally; the grammar metric needs an
                # external model and is recorded as unscored
                checker={
                    "type": "word_inclusion",
                    "words": list(words),
                    "unscored": ["grammar"],
                },
                metadata={"difficulty": difficulty, "words": list(words)},
            )
        )
    return instances


def wrap_external_texts(task: str, texts: list[str]) -> list[BenchInstance]:
    """Apply the summarization/paraphrasing templates to user-supplied texts."""
    if task == "summarization":
        template, metrics = SUMMARIZATION_PROMPT, ["grammar", "rouge_l"]
    elif task == "paraphrasing":
        template, metrics = PARAPHRASING_PROMPT, ["grammar", "bertscore", "one_minus_bleu"]
    else:
        raise ValueError(f"unknown external text task {task!r}")
    instances = []
    for i, text in enumerate(texts):
        instances.append(
            BenchInstance(
                id=f"{CATEGORY_TEXT_WRITING}-{task}-{i:04d}",
                category=CATEGORY_TEXT_WRITING,
                task_kind=task,
                prompt=template.format(text=text),
                one_shot=None,
                checker={"type": "unscored", "metrics": metrics},
                metadata={"source_text": text},
            )
        )
    return instances
