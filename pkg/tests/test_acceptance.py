"""Acceptance suite: one test per release criterion, at its stated
tolerance and runtime budget.

Run with ``pytest -s tests/test_acceptance.py`` to see one [PASS]/[FAIL]
line per criterion.
"""

import json
import math
import time
from contextlib import contextmanager

import pytest

from paradec import (
    IdealModel,
    SamplerConfig,
    StrategyConfig,
    StrategyFamily,
    TaskKind,
    closed_form_C,
    closed_form_C_limit,
    decode,
    enumerate_valid_outputs,
    is_valid_output,
    make_task,
    monte_carlo_run,
    optimal_lower_bound,
    replace_random_temperature_onestep_accuracy,
    shuffle_topk_accuracy,
    substream_seed,
    total_correlation,
)
from paradec._backend import run_trials
from paradec.benchgen import generate_batch
from paradec.benchgen.line import render_name_list, task_for_names
from paradec.benchgen.puzzles import count_solutions, grid_from_string
from paradec.cli import main as cli_main
from paradec.harness import aggregate_tradeoff, oracle_tradeoff, score_instance
from paradec.harness import RunRecord
from paradec.rng import SplitMix64


@contextmanager
def criterion(name):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name} ({time.perf_counter() - started:.1f}s)")


def within_sigmas(p_hat, p, trials, sigmas=4.0):
    sigma = math.sqrt(max(p * (1 - p), 1e-12) / trials)
    return abs(p_hat - p) <= sigmas * sigma


def mc(kind, n, family, temperature, trials, seed=0, **params):
    task, x = make_task(kind, n)
    cfg = StrategyConfig(family=family, **params)
    return monte_carlo_run(task, x, cfg, SamplerConfig(temperature, seed), trials)


def test_table1_reproduction_exact():
    with criterion("Table 1 closed forms match enumeration (n=2..6, 1e-9) and limits"):
        start = time.perf_counter()
        for n in range(2, 7):
            rr = closed_form_C(TaskKind.REPLACE_RANDOM, n)
            assert rr == pytest.approx((n - 1) * (math.log2(n) - math.log2(n - 1)), abs=1e-12)
            sh = closed_form_C(TaskKind.SHUFFLE, n)
            assert sh == pytest.approx(
                n * math.log2(n) - math.log2(math.factorial(n)), abs=1e-12
            )
            for kind, expected in ((TaskKind.REPLACE_RANDOM, rr), (TaskKind.SHUFFLE, sh)):
                task, x = make_task(kind, n)
                enum = total_correlation(enumerate_valid_outputs(task, x))
                assert abs(enum - expected) <= 1e-9, (kind, n)
        limit = closed_form_C_limit(TaskKind.REPLACE_RANDOM)
        assert limit == math.log2(math.e)
        assert abs(limit - 1.4427) < 1e-4
        assert math.isinf(closed_form_C_limit(TaskKind.SHUFFLE))
        assert time.perf_counter() - start < 10.0


def test_theorem2_monotonicity():
    with criterion("Theorem 2: optimal bounds decrease with steps (n<=5, <60s)"):
        start = time.perf_counter()
        for kind in (TaskKind.SHUFFLE, TaskKind.REPLACE_RANDOM):
            for n in range(2, 6):
                task, x = make_task(kind, n)
                joint = enumerate_valid_outputs(task, x)
                values = [
                    optimal_lower_bound(joint, steps)[0]
                    for steps in range(1, joint.output_length + 1)
                ]
                for earlier, later in zip(values, values[1:]):
                    assert earlier >= later - 1e-9, (kind, n, values)
                assert values[0] == pytest.approx(total_correlation(joint), abs=1e-9)
                assert values[-1] == pytest.approx(0.0, abs=1e-9)
        assert time.perf_counter() - start < 60.0


def test_eq4_shuffle_topk_validation():
    with criterion("Shuffle top-k accuracy: Monte Carlo within 4 sigma of the product formula"):
        start = time.perf_counter()
        assert shuffle_topk_accuracy(4, 2).mean == 0.375
        trials = 100_000
        for n, k in [(2, 2), (3, 3), (4, 2), (4, 4), (6, 2), (6, 3)]:
            expected = shuffle_topk_accuracy(n, k).mean
            summary = mc(TaskKind.SHUFFLE, n, StrategyFamily.RANDOM_TOPK, 1.0,
                         trials, seed=n * 100 + k, k=k)
            assert within_sigmas(summary.estimate.mean, expected, trials), (
                n, k, summary.estimate.mean, expected,
            )
        assert time.perf_counter() - start < 120.0


def test_replace_random_strategy_accuracies():
    with criterion("Replace-random: greedy k=2 -> 0.5, greedy k=n -> 0, one-step tau=1 formula"):
        trials = 100_000
        summary = mc(TaskKind.REPLACE_RANDOM, 4, StrategyFamily.RANDOM_TOPK, 0.0,
                     trials, seed=21, k=2)
        assert within_sigmas(summary.estimate.mean, 0.5, trials)

        summary = mc(TaskKind.REPLACE_RANDOM, 4, StrategyFamily.CONFIDENCE_TOPK, 0.0,
                     10_000, seed=22, k=4)
        assert summary.total_successes == 0

        for n in (2, 4, 8):
            expected = replace_random_temperature_onestep_accuracy(n).mean
            assert expected == pytest.approx(((n - 1) / n) ** (n - 1))
            summary = mc(TaskKind.REPLACE_RANDOM, n, StrategyFamily.RANDOM_TOPK, 1.0,
                         trials, seed=23 + n, k=n)
            assert within_sigmas(summary.estimate.mean, expected, trials), n


def test_threshold_behavior_and_crossover():
    with criterion("Threshold: shuffle gamma=0.6 one-by-one success; replace-random n=10 "
                   "fails below (n-1)/n, succeeds at 0.95; opposite-trend crossover"):
        # shuffle, gamma=0.6: every run takes exactly n steps and succeeds
        for n in range(2, 8):
            task, x = make_task(TaskKind.SHUFFLE, n)
            cfg = StrategyConfig(family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=0.6)
            valid, steps = run_trials(task, x, cfg, SamplerConfig(0.0, seed=n), 2_000)
            assert valid.all(), n
            assert (steps == n).all(), n

        # replace-random n=10
        task, x = make_task(TaskKind.REPLACE_RANDOM, 10)
        low = StrategyConfig(family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=0.8)
        valid, steps = run_trials(task, x, low, SamplerConfig(0.0, seed=7), 2_000)
        assert not valid.any()
        assert (steps == 1).all()
        high = StrategyConfig(family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=0.95)
        valid, steps = run_trials(task, x, high, SamplerConfig(0.0, seed=8), 2_000)
        assert valid.all()
        assert (steps == 10).all()

        # opposite trends over the gamma grid (the crossover region)
        shuffle_acc = {}
        rr_acc = {}
        for gamma in (0.3, 0.8, 0.95):
            cfg = StrategyConfig(family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=gamma)
            s = mc(TaskKind.SHUFFLE, 10, StrategyFamily.CONFIDENCE_THRESHOLD, 0.0,
                   5_000, seed=31, gamma=gamma)
            r = mc(TaskKind.REPLACE_RANDOM, 10, StrategyFamily.CONFIDENCE_THRESHOLD, 0.0,
                   5_000, seed=32, gamma=gamma)
            shuffle_acc[gamma] = s.estimate.mean
            rr_acc[gamma] = r.estimate.mean
        assert shuffle_acc[0.3] < 1.0 and rr_acc[0.3] == 0.0
        assert shuffle_acc[0.8] == 1.0 and rr_acc[0.8] == 0.0  # the crossover gap
        assert shuffle_acc[0.95] == 1.0 and rr_acc[0.95] == 1.0


def test_benchmark_generation():
    with criterion("Benchmark gen: 100 instances per task, sudoku uniqueness, "
                   "1000-instance checker/validity agreement (<30s)"):
        start = time.perf_counter()
        for task_name in [k.value for k in TaskKind]:
            batch = generate_batch("waiting_line", task_name, count=100, seed=1, n=4)
            assert len(batch) == 100
            assert len({inst.id for inst in batch}) == 100
        latin = generate_batch("puzzle", "latin_square", count=100, seed=2)
        assert len(latin) == 100
        sudoku = generate_batch("puzzle", "sudoku", count=100, seed=3)
        assert len(sudoku) == 100
        for inst in sudoku:
            puzzle = grid_from_string(inst.checker["givens"])
            assert count_solutions(puzzle, sudoku=True, limit=3) == 1

        # checker agreement with the item-level task over 1000 instances
        from paradec.benchgen.line import gen_waiting_line
        from paradec.tasks import sample_output

        rng = SplitMix64(777)
        kinds = list(TaskKind)
        for i in range(1000):
            kind = kinds[i % len(kinds)]
            n = 3 + rng.randbelow(3)
            inst = gen_waiting_line(kind, n, SplitMix64(substream_seed(55, i)), f"acc-{i}")
            task, input_names = task_for_names(
                kind, inst.metadata["names"], inst.metadata["index"],
                inst.metadata["new_person"],
            )
            candidate = list(sample_output(task, input_names, rng))
            if rng.random() < 0.5 and len(candidate) >= 2:
                a, b = rng.randbelow(len(candidate)), rng.randbelow(len(candidate))
                candidate[a], candidate[b] = candidate[b], candidate[a]
            expected = is_valid_output(task, input_names, tuple(candidate))
            if kind is TaskKind.SHUFFLE and tuple(candidate) == input_names:
                expected = False
            got = score_instance(inst, render_name_list(candidate)).score == 1.0
            assert got == expected, (kind, candidate)
        assert time.perf_counter() - start < 30.0


def test_oracle_dominance():
    with criterion("Oracle trade-off dominates every fixed threshold on 500+ ideal runs"):
        gammas = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        per_instance = {}
        records = []
        instance_idx = 0
        for kind in (TaskKind.SHUFFLE, TaskKind.REPLACE_RANDOM):
            for n in (3, 4, 5, 6):
                task, x = make_task(kind, n)
                model = IdealModel(task, x)
                for rep in range(11):
                    instance_id = f"{kind.value}-{n}-{rep}"
                    seed = substream_seed(909, instance_idx)
                    instance_idx += 1
                    runs = []
                    for gamma in gammas:
                        cfg = StrategyConfig(
                            family=StrategyFamily.CONFIDENCE_THRESHOLD, gamma=gamma
                        )
                        trace = decode(model, cfg, SamplerConfig(0.0, seed))
                        score = float(is_valid_output(task, x, trace.final_sequence))
                        runs.append((gamma, score, trace.total_steps, n))
                        records.append(
                            RunRecord(
                                instance_id=instance_id,
                                strategy={"gamma": gamma},
                                sampler=None,
                                output="",
                                score=score,
                                total_steps=trace.total_steps,
                                num_tokens=n,
                            )
                        )
                    per_instance[instance_id] = runs
        total_runs = sum(len(r) for r in per_instance.values())
        assert total_runs >= 500
        oracle = oracle_tradeoff(per_instance)
        for point in aggregate_tradeoff(records):
            assert oracle.accuracy >= point.accuracy - 1e-12, point
            if abs(point.accuracy - oracle.accuracy) < 1e-12:
                assert oracle.tokens_per_step >= point.tokens_per_step - 1e-12, point


def test_cli_determinism(tmp_path):
    with criterion("CLI determinism: repeated invocations are byte-identical"):
        pairs = [
            (["gen", "--category", "waiting_line", "--task", "shuffle", "--n", "5",
              "--count", "20", "--seed", "13"], "gen.jsonl"),
            (["gen", "--category", "puzzle", "--task", "sudoku",
              "--count", "10", "--seed", "14"], "sud.jsonl"),
            (["simulate", "--task", "shuffle", "--n", "6", "--strategy", "random_topk",
              "--k", "2", "--temperature", "1", "--trials", "50000", "--seed", "15"],
             "sim.json"),
            (["analyze", "--task", "replace_random", "--n", "5", "--optimal"],
             "analyze.json"),
        ]
        for argv, filename in pairs:
            a = tmp_path / ("a_" + filename)
            b = tmp_path / ("b_" + filename)
            assert cli_main(argv + ["--out", str(a)]) == 0
            assert cli_main(argv + ["--out", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes(), filename
