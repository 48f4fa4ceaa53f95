from paradec import TaskKind, make_task
from paradec_adapter import IdealBackend, conformance_check, handle_line
from paradec_adapter.cli import main as adapter_main
from paradec_adapter import manifest_entry, write_manifest


class LoopbackTransport:
    def __init__(self, backend):
        self.backend = backend

    def round_trip(self, line: str) -> str:
        return handle_line(self.backend, line)


def build_instances():
    registry = {}
    for instance_id, kind, n in [
        ("shuf5", TaskKind.SHUFFLE, 5),
        ("rr5", TaskKind.REPLACE_RANDOM, 5),
        ("ins4", TaskKind.INSERT_RANDOM, 4),
        ("copy4", TaskKind.COPY, 4),
    ]:
        task, x = make_task(kind, n)
        registry[instance_id] = (task, x)
    return registry


def test_fuzz_1000_requests_zero_violations():
    registry = build_instances()
    backend = IdealBackend(registry)
    report = conformance_check(
        LoopbackTransport(backend), registry, num_requests=1000, seed=3
    )
    assert report.requests_sent == 1000
    assert report.violations == []
    summary = report.latency_summary()
    assert summary["count"] == 1000 and summary["mean_ms"] > 0


def test_violations_are_detected():
    registry = build_instances()
    backend = IdealBackend(registry)

    class BrokenTransport(LoopbackTransport):
        """Denormalizes one row and drops another: both must be flagged."""

        def round_trip(self, line: str) -> str:
            import json

            reply = json.loads(handle_line(self.backend, line))
            if "rows" in reply and reply["rows"]:
                keys = sorted(reply["rows"])
                first = keys[0]
                reply["rows"][first] = [[t, p * 0.9] for t, p in reply["rows"][first]]
                if len(keys) > 1:
                    del reply["rows"][keys[-1]]
            return json.dumps(reply)

    report = conformance_check(
        BrokenTransport(backend), registry, num_requests=40, seed=3
    )
    assert any("sums to" in v for v in report.violations)
    assert any("rows cover" in v for v in report.violations)


def test_conformance_cli(tmp_path, capsys):
    registry = build_instances()
    entries = [manifest_entry(iid, task, x) for iid, (task, x) in registry.items()]
    path = tmp_path / "manifest.jsonl"
    write_manifest(entries, path)
    rc = adapter_main(["conformance", "--instances", str(path), "--requests", "200"])
    captured = capsys.readouterr()
    assert rc == 0
    assert '"violations": []' in captured.out


def test_conformance_cli_rejects_empty_manifest(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    rc = adapter_main(["conformance", "--instances", str(path)])
    assert rc == 2
    assert "empty instance manifest" in capsys.readouterr().err
