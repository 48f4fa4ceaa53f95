import json
import math

import pytest

from paradec.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_analyze_outputs_exact_values(tmp_path):
    out = tmp_path / "analyze.json"
    assert run_cli("analyze", "--task", "shuffle", "--n", "4", "--optimal",
                   "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["schema_version"] == 1
    expected = 4 * math.log2(4) - math.log2(24)
    assert payload["closed_form_bits"] == pytest.approx(expected, abs=1e-9)
    assert payload["enumerated_bits"] == pytest.approx(expected, abs=1e-9)
    assert payload["limit_bits"] == "diverges"
    bounds = payload["optimal_bounds"]
    assert [b["steps"] for b in bounds] == [1, 2, 3, 4]
    assert bounds[0]["bits"] == pytest.approx(expected, abs=1e-9)
    assert bounds[-1]["bits"] == 0.0
    values = [b["bits"] for b in bounds]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_analyze_replace_random_limit(tmp_path):
    out = tmp_path / "rr.json"
    assert run_cli("analyze", "--task", "replace_random", "--n", "5", "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["limit_bits"] == pytest.approx(math.log2(math.e), abs=1e-9)


def test_simulate_reports_closed_form_reference(tmp_path):
    out = tmp_path / "sim.json"
    assert run_cli(
        "simulate", "--task", "shuffle", "--n", "4", "--strategy", "random_topk",
        "--k", "2", "--temperature", "1", "--trials", "20000", "--seed", "1",
        "--out", str(out),
    ) == 0
    row = read_json(out)
    assert row["closed_form"] == pytest.approx(0.375)
    sigma = math.sqrt(0.375 * 0.625 / row["trials"])
    assert abs(row["mean"] - 0.375) < 4 * sigma
    assert row["tokens_per_step_mean"] == pytest.approx(2.0)


def test_simulate_threshold_row(tmp_path):
    out = tmp_path / "thr.json"
    assert run_cli(
        "simulate", "--task", "replace_random", "--n", "10", "--strategy",
        "confidence_threshold", "--gamma", "0.8", "--trials", "200",
        "--out", str(out),
    ) == 0
    row = read_json(out)
    assert row["mean"] == 0.0
    assert row["closed_form"] == 0.0
    assert row["tokens_per_step_mean"] == pytest.approx(10.0)


def test_gen_eval_tradeoff_pipeline(tmp_path):
    instances = tmp_path / "inst.jsonl"
    assert run_cli("gen", "--category", "waiting_line", "--task", "copy",
                   "--n", "3", "--count", "5", "--seed", "3", "--out", str(instances)) == 0
    lines = instances.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 5

    outputs = tmp_path / "outs.jsonl"
    rows = []
    for line in lines:
        inst = json.loads(line)
        answer = "[" + ", ".join(f'"{n}"' for n in inst["metadata"]["names"]) + "]"
        rows.append({
            "instance_id": inst["id"],
            "output_text": answer,
            "strategy": {"gamma": 1.0},
            "total_steps": 3,
            "num_tokens": 3,
        })
        rows.append({
            "instance_id": inst["id"],
            "output_text": "gibberish",
            "strategy": {"gamma": 0.5},
            "total_steps": 1,
            "num_tokens": 3,
        })
    outputs.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")

    records = tmp_path / "records.jsonl"
    assert run_cli("eval", "--instances", str(instances), "--outputs", str(outputs),
                   "--out", str(records)) == 0
    recs = [json.loads(l) for l in records.read_text().splitlines()]
    assert len(recs) == 10
    by_gamma = {}
    for rec in recs:
        by_gamma.setdefault(rec["strategy"]["gamma"], []).append(rec["score"])
    assert all(s == 1.0 for s in by_gamma[1.0])
    assert all(s == 0.0 for s in by_gamma[0.5])

    tradeoff = tmp_path / "tradeoff.json"
    assert run_cli("tradeoff", "--records", str(records), "--oracle",
                   "--out", str(tradeoff)) == 0
    payload = read_json(tradeoff)
    assert len(payload["points"]) == 2
    assert payload["oracle"]["accuracy"] == 1.0
    assert payload["oracle"]["tokens_per_step"] == pytest.approx(1.0)


def test_cli_byte_determinism(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        assert run_cli("gen", "--category", "puzzle", "--task", "sudoku",
                       "--count", "6", "--seed", "11", "--out", str(path)) == 0
    assert a.read_bytes() == b.read_bytes()

    sa, sb = tmp_path / "sa.json", tmp_path / "sb.json"
    for path in (sa, sb):
        assert run_cli("simulate", "--task", "shuffle", "--n", "4", "--strategy",
                       "random_topk", "--k", "2", "--temperature", "1",
                       "--trials", "5000", "--seed", "42", "--out", str(path)) == 0
    assert sa.read_bytes() == sb.read_bytes()


def test_simulate_backend_invariance(tmp_path):
    """auto (kernel when built) and reference backends must emit identical
    rows: the compiled path is an accelerator, not a semantic fork."""
    outs = []
    for backend in ("auto", "reference"):
        out = tmp_path / f"{backend}.json"
        assert run_cli("simulate", "--task", "replace_random", "--n", "6",
                       "--strategy", "confidence_topk", "--k", "2",
                       "--trials", "4000", "--seed", "7",
                       "--backend", backend, "--out", str(out)) == 0
        row = read_json(out)
        outs.append((row["mean"], row["ci"], row["tokens_per_step_mean"]))
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path):
    assert run_cli("analyze", "--task", "nope", "--n", "3") == 1  # argparse usage error
    assert run_cli("simulate", "--task", "shuffle", "--n", "4",
                   "--strategy", "random_topk") == 1  # missing k
    missing = tmp_path / "missing.jsonl"
    assert run_cli("eval", "--instances", str(missing), "--outputs", str(missing)) == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n", encoding="utf-8")
    inst = tmp_path / "inst.jsonl"
    run_cli("gen", "--category", "waiting_line", "--task", "copy", "--n", "3",
            "--count", "1", "--seed", "0", "--out", str(inst))
    assert run_cli("eval", "--instances", str(inst), "--outputs", str(bad)) == 2


def test_gen_external_corpus(tmp_path):
    source = tmp_path / "texts.txt"
    source.write_text("A: hello. B: goodbye.\nC: lunch? D: sure.\n", encoding="utf-8")
    out = tmp_path / "summ.jsonl"
    assert run_cli("gen", "--category", "text_writing", "--task", "summarization",
                   "--source", str(source), "--count", "2", "--out", str(out)) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == 2
    assert rows[0]["checker"]["type"] == "unscored"
    assert rows[0]["prompt"].startswith("Summarize the following conversation.")
