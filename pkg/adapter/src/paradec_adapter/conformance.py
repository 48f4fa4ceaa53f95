"""Protocol conformance checking for adapter endpoints.

Fires randomized well-formed requests (reachable decode states for
registered instances) plus deliberately malformed lines, and verifies:
row normalization within tolerance, coverage of exactly the masked
positions, request-id echoing and bijectivity, and graceful error
objects.  Collects latency statistics along the way.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from paradec import SplitMix64, TaskSpec, sample_output, substream_seed

from .protocol import ROW_SUM_TOLERANCE, Request, parse_response


@dataclass
class ConformanceReport:
    requests_sent: int = 0
    violations: list[str] = field(default_factory=list)
    latencies_ms: list[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def latency_summary(self) -> dict:
        if not self.latencies_ms:
            return {"count": 0}
        xs = sorted(self.latencies_ms)
        return {
            "count": len(xs),
            "mean_ms": sum(xs) / len(xs),
            "p50_ms": xs[len(xs) // 2],
            "max_ms": xs[-1],
        }


def _random_state(task: TaskSpec, input_seq, rng) -> tuple:
    """A reachable partial state: mask a random subset of a valid output."""
    y = sample_output(task, input_seq, rng)
    return tuple(item if rng.random() < 0.5 else None for item in y)


def conformance_check(
    transport,
    instances: dict[str, tuple[TaskSpec, tuple[str, ...]]],
    num_requests: int = 1000,
    seed: int = 0,
    malformed_every: int = 50,
) -> ConformanceReport:
    report = ConformanceReport()
    ids = sorted(instances)
    rng = SplitMix64(substream_seed(seed, 1))
    seen_ids: set[str] = set()

    for i in range(num_requests):
        if malformed_every and i % malformed_every == malformed_every - 1:
            started = time.perf_counter()
            reply = json.loads(transport.round_trip("this is not json"))
            report.latencies_ms.append((time.perf_counter() - started) * 1000)
            report.requests_sent += 1
            if "error" not in reply or reply.get("request_id") is not None:
                report.violations.append(
                    f"malformed line {i}: expected error object with null id, got {reply}"
                )
            continue

        instance_id = ids[rng.randbelow(len(ids))]
        task, input_seq = instances[instance_id]
        state = _random_state(task, input_seq, rng)
        masked = {j for j, s in enumerate(state) if s is None}
        request = Request(
            request_id=f"fuzz-{i}",
            instance_id=instance_id,
            prompt="",
            state=state,
        )
        started = time.perf_counter()
        raw = transport.round_trip(request.to_json())
        report.latencies_ms.append((time.perf_counter() - started) * 1000)
        report.requests_sent += 1

        reply = parse_response(raw)
        if isinstance(reply, dict):
            report.violations.append(f"request {i}: unexpected error {reply['error']}")
            continue
        if reply.request_id != request.request_id:
            report.violations.append(
                f"request {i}: id {reply.request_id!r} != {request.request_id!r}"
            )
        if reply.request_id in seen_ids:
            report.violations.append(f"request {i}: duplicate response id")
        seen_ids.add(reply.request_id)
        if set(reply.rows) != masked:
            report.violations.append(
                f"request {i}: rows cover {sorted(reply.rows)}, masked are {sorted(masked)}"
            )
        for pos, row in reply.rows.items():
            total = sum(p for _, p in row)
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                report.violations.append(
                    f"request {i}: row {pos} sums to {total}"
                )
            if any(p < 0 for _, p in row):
                report.violations.append(f"request {i}: row {pos} has negative mass")
    return report
