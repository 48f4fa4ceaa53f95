"""Scoring of model outputs and speed-quality trade-off aggregation.

Scoring is binary per instance: waiting-line answers must parse to a list
that is a valid output of the underlying task (shuffle additionally must
not echo the input order), puzzle answers must be valid grids consistent
with the givens, words-to-sentence answers must contain all four words.
Answer parsing is deliberately forgiving about surrounding prose: the
scorer extracts the first well-formed bracketed list / grid and
canonicalizes quotes and whitespace before comparing.

Trade-off points pair mean accuracy with mean tokens-per-step (the
per-record ratio output-length/steps, averaged).  The oracle point picks,
per instance, the best-scoring run across a threshold grid, breaking ties
toward fewer steps: an upper bound no fixed threshold can beat.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .benchgen import BenchInstance
from .benchgen.puzzles import SIZE as GRID_SIZE
from .benchgen.puzzles import grid_from_string, is_latin_square
from .tasks import TaskKind, is_valid_output
from .benchgen.line import task_for_names

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScoreResult:
    score: float
    parse_failure: bool = False
    unscored: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunRecord:
    instance_id: str
    strategy: dict | str | None
    sampler: dict | None
    output: str
    score: float
    total_steps: int | None = None
    num_tokens: int | None = None
    parse_failure: bool = False

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if self.total_steps is not None and self.total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        if self.num_tokens is not None and self.num_tokens < 1:
            raise ValueError("num_tokens must be >= 1")

    @property
    def tokens_per_step(self) -> float | None:
        if self.total_steps and self.num_tokens:
            return self.num_tokens / self.total_steps
        return None


@dataclass(frozen=True)
class TradeoffPoint:
    tokens_per_step: float
    accuracy: float
    label: str

    def __post_init__(self):
        if self.tokens_per_step < 1.0 - 1e-12:
            raise ValueError("tokens_per_step must be >= 1")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must be in [0, 1]")


# ---------------------------------------------------------------------------
# answer parsing

_QUOTE_CHARS = "\"'“”‘’«»`"
_LIST_RE = re.compile(r"\[[^\[\]]*\]")


def _canonical_name(raw: str) -> str:
    return " ".join(raw.strip(_QUOTE_CHARS + " \t").split())


def extract_name_list(text: str) -> list[str] | None:
    """First well-formed bracketed, comma-separated list in ``text``."""
    for match in _LIST_RE.finditer(text):
        inner = match.group(0)[1:-1].strip()
        if not inner:
            continue
        items = [_canonical_name(part) for part in inner.split(",")]
        if all(items):
            return items
    return None


def _extract_grid(text: str) -> list[list[str]] | None:
    """First SIZE x SIZE block of comma-separated rows (CSV Latin square)."""
    rows: list[list[str]] = []
    for token in text.replace("\n", " ").split():
        parts = [p.strip(_QUOTE_CHARS) for p in token.split(",") if p.strip(_QUOTE_CHARS)]
        if len(parts) == GRID_SIZE:
            rows.append(parts)
            if len(rows) == GRID_SIZE:
                return rows
        else:
            rows = []
    return None


_DIGIT_GROUP_RE = re.compile(r"\b[0-9]{%d}\b" % GRID_SIZE)


def _extract_digit_grid(text: str) -> list[str] | None:
    groups = _DIGIT_GROUP_RE.findall(text)
    if len(groups) < GRID_SIZE:
        return None
    return groups[:GRID_SIZE]


# ---------------------------------------------------------------------------
# checkers

def _score_exact_set(checker: Mapping, output: str) -> ScoreResult:
    answer = extract_name_list(output)
    if answer is None:
        return ScoreResult(score=0.0, parse_failure=True)
    names = list(checker["input"])
    kind = TaskKind(checker["task_kind"])
    task, input_names = task_for_names(
        kind, names, checker.get("index"), checker.get("new_item")
    )
    candidate = tuple(answer)
    if checker.get("exclude_identity") and candidate == input_names:
        return ScoreResult(score=0.0)
    try:
        ok = is_valid_output(task, input_names, candidate)
    except ValueError:
        return ScoreResult(score=0.0, parse_failure=True)
    return ScoreResult(score=1.0 if ok else 0.0)


def _score_latin(checker: Mapping, output: str) -> ScoreResult:
    rows = _extract_grid(output)
    if rows is None:
        return ScoreResult(score=0.0, parse_failure=True)
    ok = is_latin_square(rows, tuple(checker["symbols"]))
    return ScoreResult(score=1.0 if ok else 0.0)


def _score_sudoku(checker: Mapping, output: str) -> ScoreResult:
    groups = _extract_digit_grid(output)
    if groups is None:
        return ScoreResult(score=0.0, parse_failure=True)
    try:
        grid = grid_from_string(" ".join(groups))
        givens = grid_from_string(checker["givens"])
    except ValueError:
        return ScoreResult(score=0.0, parse_failure=True)
    want = set(range(1, GRID_SIZE + 1))
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            if givens[r][c] and grid[r][c] != givens[r][c]:
                return ScoreResult(score=0.0)
    for r in range(GRID_SIZE):
        if set(grid[r]) != want:
            return ScoreResult(score=0.0)
    for c in range(GRID_SIZE):
        if {grid[r][c] for r in range(GRID_SIZE)} != want:
            return ScoreResult(score=0.0)
    box = GRID_SIZE // 2
    for br in range(0, GRID_SIZE, box):
        for bc in range(0, GRID_SIZE, box):
            cells = {grid[r][c] for r in range(br, br + box) for c in range(bc, bc + box)}
            if cells != want:
                return ScoreResult(score=0.0)
    return ScoreResult(score=1.0)


def _score_word_inclusion(checker: Mapping, output: str) -> ScoreResult:
    lowered = output.lower()
    ok = all(
        re.search(r"\b" + re.escape(word.lower()) + r"\b", lowered)
        for word in checker["words"]
    )
    return ScoreResult(
        score=1.0 if ok else 0.0, unscored=tuple(checker.get("unscored", ()))
    )


_CHECKERS = {
    "exact_set": _score_exact_set,
    "latin_square": _score_latin,
    "sudoku": _score_sudoku,
    "word_inclusion": _score_word_inclusion,
}


def score_output(checker: Mapping, output: str) -> ScoreResult:
    kind = checker.get("type")
    if kind == "unscored":
        return ScoreResult(score=0.0, unscored=tuple(checker.get("metrics", ())))
    scorer = _CHECKERS.get(kind)
    if scorer is None:
        raise ValueError(f"unknown checker type {kind!r}")
    return scorer(checker, output)


def score_instance(instance: BenchInstance, output: str) -> ScoreResult:
    return score_output(instance.checker, output)


# ---------------------------------------------------------------------------
# aggregation

def _strategy_key(record: RunRecord) -> str:
    return json.dumps(record.strategy, sort_keys=True)


def aggregate_tradeoff(records: Sequence[RunRecord]) -> list[TradeoffPoint]:
    """One point per distinct strategy descriptor: mean accuracy and mean
    tokens-per-step over its records (records lacking step/length data
    contribute to accuracy only)."""
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict[str, list[RunRecord]] = {}
    for rec in records:
        groups.setdefault(_strategy_key(rec), []).append(rec)
    points = []
    for key in sorted(groups):
        recs = groups[key]
        accuracy = sum(r.score for r in recs) / len(recs)
        ratios = [r.tokens_per_step for r in recs if r.tokens_per_step is not None]
        tokens_per_step = sum(ratios) / len(ratios) if ratios else 1.0
        points.append(
            TradeoffPoint(tokens_per_step=tokens_per_step, accuracy=accuracy, label=key)
        )
    return points


def oracle_tradeoff(per_instance: Mapping[str, Sequence[tuple[float, float, int, int]]]) -> TradeoffPoint:
    """Per-instance best pick across a threshold grid.

    ``per_instance`` maps instance id -> runs of (gamma, score, total_steps,
    num_tokens); every instance's grid must include gamma = 1.0, the
    one-by-one fallback.  Picks maximize score, then minimize steps.
    """
    if not per_instance:
        raise ValueError("empty oracle grid")
    accs: list[float] = []
    ratios: list[float] = []
    for instance_id, runs in per_instance.items():
        if not runs:
            raise ValueError(f"instance {instance_id} has no runs")
        if not any(g == 1.0 for g, *_ in runs):
            raise ValueError(f"instance {instance_id} grid lacks gamma=1.0")
        # best score, then fewest steps, then the smallest threshold
        best = min(runs, key=lambda r: (-r[1], r[2], r[0]))
        _, score, steps, num_tokens = best
        accs.append(score)
        ratios.append(num_tokens / steps)
    return TradeoffPoint(
        tokens_per_step=sum(ratios) / len(ratios),
        accuracy=sum(accs) / len(accs),
        label="oracle",
    )


def parallelizability_center_of_mass(scores_by_k: Mapping[int, float]) -> float:
    """sum_k k*score_k / sum_k score_k: where along the k-axis the
    scores' mass sits; smaller means harder to parallelize."""
    total = sum(scores_by_k.values())
    if total <= 0.0:
        raise ValueError("all scores are zero")
    return sum(k * s for k, s in scores_by_k.items()) / total


def order_sensitivity_slope(scores_by_block_length: Mapping[int, float]) -> float:
    """Least-squares slope of score against (raw) block length."""
    if len(scores_by_block_length) < 2:
        raise ValueError("need at least two block lengths")
    xs = list(scores_by_block_length)
    ys = [scores_by_block_length[x] for x in xs]
    x_mean = sum(xs) / len(xs)
    y_mean = sum(ys) / len(ys)
    sxx = sum((x - x_mean) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("block lengths must be distinct")
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    return sxy / sxx
