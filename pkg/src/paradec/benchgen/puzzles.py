"""4x4 puzzle instances: Latin squares and unique-solution Sudoku.

A Latin square instance asks for any valid square over four random
symbols, so many answers are correct; the Sudoku generator keeps only
puzzles a backtracking solver certifies as having exactly one completion.
Grids serialize as four 4-character groups separated by spaces, with 0
standing for a blank Sudoku cell.
"""

from __future__ import annotations

import string

from ..rng import SplitMix64
from . import BenchInstance, CATEGORY_PUZZLE

SIZE = 4
BOX = 2
SYMBOL_POOL = tuple(string.ascii_uppercase + string.digits)

LATIN_PROMPT = (
    "Generate a Latin square of size {size} with the symbols [{symbols}]. "
    "Only output the final result as CSV."
)
SUDOKU_PROMPT = (
    "Fill the positions where the values are 0 in a 4x4 grid with digits 1-4 "
    "so that each column, each row, and each of the four 2x2 subgrids that "
    "compose the grid contains all of the digits from 1 to 4. "
    "Input: {puzzle} Output:"
)

Grid = list[list[int]]


def _row_ok(grid: Grid, r: int, c: int, v: int, sudoku: bool) -> bool:
    for i in range(SIZE):
        if grid[r][i] == v or grid[i][c] == v:
            return False
    if sudoku:
        br, bc = (r // BOX) * BOX, (c // BOX) * BOX
        for i in range(br, br + BOX):
            for j in range(bc, bc + BOX):
                if grid[i][j] == v:
                    return False
    return True


def _fill(grid: Grid, cell: int, rng: SplitMix64 | None, sudoku: bool) -> bool:
    if cell == SIZE * SIZE:
        return True
    r, c = divmod(cell, SIZE)
    if grid[r][c] != 0:
        return _fill(grid, cell + 1, rng, sudoku)
    values = list(range(1, SIZE + 1))
    if rng is not None:
        rng.shuffle(values)
    for v in values:
        if _row_ok(grid, r, c, v, sudoku):
            grid[r][c] = v
            if _fill(grid, cell + 1, rng, sudoku):
                return True
            grid[r][c] = 0
    return False


def random_complete_grid(rng: SplitMix64, sudoku: bool) -> Grid:
    grid: Grid = [[0] * SIZE for _ in range(SIZE)]
    if not _fill(grid, 0, rng, sudoku):
        raise RuntimeError("backtracking failed to build a complete grid")
    return grid


def count_solutions(grid: Grid, sudoku: bool, limit: int = 2) -> int:
    """Number of completions of a partial grid, stopping at ``limit``."""
    found = 0

    def rec(cell: int) -> bool:  # returns True once the limit is reached
        nonlocal found
        if cell == SIZE * SIZE:
            found += 1
            return found >= limit
        r, c = divmod(cell, SIZE)
        if grid[r][c] != 0:
            return rec(cell + 1)
        for v in range(1, SIZE + 1):
            if _row_ok(grid, r, c, v, sudoku):
                grid[r][c] = v
                if rec(cell + 1):
                    grid[r][c] = 0
                    return True
                grid[r][c] = 0
        return False

    rec(0)
    return found


def grid_to_string(grid: Grid) -> str:
    return " ".join("".join(str(v) for v in row) for row in grid)


def grid_from_string(text: str) -> Grid:
    groups = text.split()
    if len(groups) != SIZE or any(len(g) != SIZE for g in groups):
        raise ValueError(f"not a {SIZE}x{SIZE} grid: {text!r}")
    return [[int(ch) for ch in group] for group in groups]


def is_latin_square(rows: list[list[str]], symbols: tuple[str, ...]) -> bool:
    want = set(symbols)
    if len(rows) != SIZE or any(len(r) != SIZE for r in rows):
        return False
    for r in rows:
        if set(r) != want:
            return False
    for c in range(SIZE):
        if {rows[r][c] for r in range(SIZE)} != want:
            return False
    return True


def latin_to_csv(grid: Grid, symbols: tuple[str, ...]) -> str:
    return " ".join(",".join(symbols[v - 1] for v in row) for row in grid)


def _sample_symbols(rng: SplitMix64) -> tuple[str, ...]:
    idx = list(range(len(SYMBOL_POOL)))
    rng.shuffle(idx)
    return tuple(SYMBOL_POOL[i] for i in idx[:SIZE])


def gen_latin_square(size: int, rng: SplitMix64, instance_id: str) -> BenchInstance:
    if size != SIZE:
        raise ValueError("the benchmark uses 4x4 Latin squares")
    symbols = _sample_symbols(rng)
    prompt = LATIN_PROMPT.format(size=size, symbols=", ".join(symbols))

    shot_symbols = _sample_symbols(rng)
    shot_answer = latin_to_csv(random_complete_grid(rng, sudoku=False), shot_symbols)
    one_shot = {
        "prompt": LATIN_PROMPT.format(size=size, symbols=", ".join(shot_symbols)),
        "answer": shot_answer,
    }
    reference = latin_to_csv(random_complete_grid(rng, sudoku=False), symbols)
    return BenchInstance(
        id=instance_id,
        category=CATEGORY_PUZZLE,
        task_kind="latin_square",
        prompt=prompt,
        one_shot=one_shot,
        checker={"type": "latin_square", "size": size, "symbols": list(symbols)},
        metadata={"symbols": list(symbols), "reference_answer": reference},
    )


# Givens range: enough cells to make uniqueness achievable at 4x4, few
# enough to leave real blanks; non-unique draws are rejected and retried.
MIN_GIVENS = 6
MAX_GIVENS = 10


def _make_sudoku(rng: SplitMix64) -> tuple[Grid, Grid]:
    while True:
        solution = random_complete_grid(rng, sudoku=True)
        givens = MIN_GIVENS + rng.randbelow(MAX_GIVENS - MIN_GIVENS + 1)
        cells = list(range(SIZE * SIZE))
        rng.shuffle(cells)
        puzzle = [[0] * SIZE for _ in range(SIZE)]
        for cell in cells[:givens]:
            r, c = divmod(cell, SIZE)
            puzzle[r][c] = solution[r][c]
        if count_solutions([row[:] for row in puzzle], sudoku=True) == 1:
            return puzzle, solution


def gen_sudoku(rng: SplitMix64, instance_id: str) -> BenchInstance:
    puzzle, solution = _make_sudoku(rng)
    shot_puzzle, shot_solution = _make_sudoku(rng)
    one_shot = {
        "prompt": SUDOKU_PROMPT.format(puzzle=grid_to_string(shot_puzzle)),
        "answer": grid_to_string(shot_solution),
    }
    return BenchInstance(
        id=instance_id,
        category=CATEGORY_PUZZLE,
        task_kind="sudoku",
        prompt=SUDOKU_PROMPT.format(puzzle=grid_to_string(puzzle)),
        one_shot=one_shot,
        checker={"type": "sudoku", "givens": grid_to_string(puzzle)},
        metadata={
            "givens": grid_to_string(puzzle),
            "solution": grid_to_string(solution),
        },
    )
