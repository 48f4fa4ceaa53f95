"""Command-line interface.

Subcommands: ``analyze`` (exact information-theoretic limits per task),
``simulate`` (Monte Carlo strategy accuracy with closed-form references),
``gen`` (benchmark JSONL), ``eval`` (score model outputs), ``tradeoff``
(aggregate speed-quality points, optionally the oracle pick).  All output
is JSON with a schema_version field, to stdout or --out, and every
invocation is a pure function of its arguments: equal seeds give
byte-identical files.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import benchgen
from ._backend import kernel_supported
from .accuracy import (
    monte_carlo_run,
    replace_random_greedy_topk_accuracy,
    replace_random_temperature_onestep_accuracy,
    shuffle_topk_accuracy,
    threshold_accuracy,
)
from .decoding import StrategyConfig, StrategyFamily, SamplerConfig
from .harness import (
    RunRecord,
    SCHEMA_VERSION,
    aggregate_tradeoff,
    oracle_tradeoff,
    score_output,
)
from .info import (
    closed_form_C,
    closed_form_C_limit,
    optimal_lower_bound,
    total_correlation,
)
from .tasks import TaskKind, enumerate_valid_outputs, make_task


class DataError(Exception):
    pass


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=1) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_jsonl(rows, out: str | None) -> None:
    lines = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
    if out:
        Path(out).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)


# ---------------------------------------------------------------------------


def _cmd_analyze(args) -> None:
    kind = TaskKind(args.task)
    task, input_seq = make_task(kind, args.n)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "task": kind.value,
        "n": args.n,
    }
    try:
        payload["closed_form_bits"] = closed_form_C(kind, args.n)
        limit = closed_form_C_limit(kind)
        payload["limit_bits"] = "diverges" if limit == float("inf") else limit
    except ValueError:
        payload["closed_form_bits"] = None
        payload["limit_bits"] = None
    joint = enumerate_valid_outputs(task, input_seq)
    payload["enumerated_bits"] = total_correlation(joint)
    if args.optimal:
        bounds = []
        for steps in range(1, joint.output_length + 1):
            value, partition = optimal_lower_bound(joint, steps)
            bounds.append(
                {
                    "steps": steps,
                    "bits": value,
                    "partition": [sorted(block) for block in partition.sets],
                }
            )
        payload["optimal_bounds"] = bounds
    _emit(payload, args.out)


def _closed_form_reference(kind: TaskKind, config: StrategyConfig, temperature: float, n: int):
    try:
        if config.family is StrategyFamily.CONFIDENCE_THRESHOLD and temperature == 0.0:
            return threshold_accuracy(kind, n, config.gamma).mean
        if config.k is None:
            return None
        if kind is TaskKind.SHUFFLE and n % config.k == 0:
            return shuffle_topk_accuracy(n, config.k).mean
        if kind is TaskKind.REPLACE_RANDOM and n % config.k == 0:
            if temperature == 0.0:
                return replace_random_greedy_topk_accuracy(n, config.k).mean
            if config.k == n:
                return replace_random_temperature_onestep_accuracy(n).mean
    except ValueError:
        return None
    return None


def _cmd_simulate(args) -> None:
    kind = TaskKind(args.task)
    task, input_seq = make_task(kind, args.n)
    family = StrategyFamily(args.strategy)
    config = StrategyConfig(
        family=family,
        k=args.k,
        gamma=args.gamma,
        f=args.factor,
        block_length=args.block_length,
    )
    sampler = SamplerConfig(temperature=args.temperature, seed=args.seed)
    summary = monte_carlo_run(
        task, input_seq, config, sampler, args.trials, backend=args.backend
    )
    row = {
        "schema_version": SCHEMA_VERSION,
        "task": kind.value,
        "n": args.n,
        "strategy": family.value,
        "k_or_gamma": args.k if args.k is not None else args.gamma,
        "f": args.factor,
        "block_length": args.block_length,
        "temperature": args.temperature,
        "seed": args.seed,
        "trials": args.trials,
        "mean": summary.estimate.mean,
        "ci": summary.estimate.half_width_95,
        "tokens_per_step_mean": summary.tokens_per_step_mean,
        "closed_form": _closed_form_reference(kind, config, args.temperature, args.n),
        "backend": "kernel" if kernel_supported(task, config, sampler) and args.backend != "reference" else "reference",
    }
    _emit(row, args.out)


def _cmd_gen(args) -> None:
    if args.source:
        texts = [
            line.strip()
            for line in Path(args.source).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        from .benchgen.words import wrap_external_texts

        instances = wrap_external_texts(args.task, texts[: args.count or len(texts)])
    else:
        instances = benchgen.generate_batch(
            category=args.category, task=args.task, count=args.count, seed=args.seed, n=args.n
        )
    if args.out:
        benchgen.export_jsonl(instances, args.out)
    else:
        _emit_jsonl([inst.to_dict() for inst in instances], None)


def _cmd_eval(args) -> None:
    instances = {inst.id: inst for inst in benchgen.load_jsonl(args.instances)}
    rows = []
    with open(args.outputs, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                instance_id = entry["instance_id"]
                output_text = entry["output_text"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError(f"{args.outputs}:{line_no}: bad output row ({exc})")
            inst = instances.get(instance_id)
            if inst is None:
                raise DataError(f"{args.outputs}:{line_no}: unknown instance {instance_id!r}")
            result = score_output(inst.checker, output_text)
            rows.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "instance_id": instance_id,
                    "strategy": entry.get("strategy"),
                    "sampler": entry.get("sampler"),
                    "score": result.score,
                    "parse_failure": result.parse_failure,
                    "unscored": list(result.unscored),
                    "total_steps": entry.get("total_steps"),
                    "num_tokens": entry.get("num_tokens"),
                }
            )
    _emit_jsonl(rows, args.out)


def _load_records(path: str) -> list[RunRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                records.append(
                    RunRecord(
                        instance_id=entry["instance_id"],
                        strategy=entry.get("strategy"),
                        sampler=entry.get("sampler"),
                        output="",
                        score=float(entry["score"]),
                        total_steps=entry.get("total_steps"),
                        num_tokens=entry.get("num_tokens"),
                        parse_failure=bool(entry.get("parse_failure", False)),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{line_no}: bad record ({exc})")
    if not records:
        raise DataError(f"{path}: no records")
    return records


def _cmd_tradeoff(args) -> None:
    records = _load_records(args.records)
    payload = {"schema_version": SCHEMA_VERSION}
    points = aggregate_tradeoff(records)
    payload["points"] = [
        {"label": p.label, "tokens_per_step": p.tokens_per_step, "accuracy": p.accuracy}
        for p in points
    ]
    if args.oracle:
        per_instance: dict[str, list[tuple[float, float, int, int]]] = {}
        for rec in records:
            strategy = rec.strategy or {}
            gamma = strategy.get("gamma") if isinstance(strategy, dict) else None
            if gamma is None:
                raise DataError(
                    f"record for {rec.instance_id} lacks strategy.gamma, required for --oracle"
                )
            if rec.total_steps is None or rec.num_tokens is None:
                raise DataError(
                    f"record for {rec.instance_id} lacks total_steps/num_tokens"
                )
            per_instance.setdefault(rec.instance_id, []).append(
                (float(gamma), rec.score, rec.total_steps, rec.num_tokens)
            )
        point = oracle_tradeoff(per_instance)
        payload["oracle"] = {
            "tokens_per_step": point.tokens_per_step,
            "accuracy": point.accuracy,
        }
    _emit(payload, args.out)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paradec",
        description="Parallel-decoding limits: exact analysis, simulation, benchmark generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="exact information-theoretic limits for a task")
    p.add_argument("--task", required=True, choices=[k.value for k in TaskKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--optimal", action="store_true", help="include optimal per-step bounds")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo accuracy of a decoding strategy")
    p.add_argument("--task", required=True, choices=[k.value for k in TaskKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strategy", required=True, choices=[s.value for s in StrategyFamily])
    p.add_argument("--k", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--factor", type=float)
    p.add_argument("--block-length", type=int, dest="block_length")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=["auto", "kernel", "reference"], default="auto")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("gen", help="generate benchmark instances as JSONL")
    p.add_argument(
        "--category",
        required=True,
        choices=[
            benchgen.CATEGORY_WAITING_LINE,
            benchgen.CATEGORY_PUZZLE,
            benchgen.CATEGORY_TEXT_WRITING,
        ],
    )
    p.add_argument("--task", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", help="user-supplied corpus for summarization/paraphrasing")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("eval", help="score model outputs against instances")
    p.add_argument("--instances", required=True)
    p.add_argument("--outputs", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("tradeoff", help="aggregate speed-quality points from records")
    p.add_argument("--records", required=True)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tradeoff)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        args.func(args)
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
