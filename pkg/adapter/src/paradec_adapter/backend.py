"""Model backends served over the protocol.

The ideal backend answers queries with exact task posteriors from the
paradec oracle, the mock standing in for a real masked-diffusion model.
Instances are registered through a JSONL manifest mapping instance ids to
task parameters.  A real-model backend would implement the same
``posterior_rows`` surface with "full-vocab" scope.
"""

from __future__ import annotations

import json
from pathlib import Path

from paradec import SequenceState, TaskKind, TaskSpec, posterior_marginals
from paradec.oracle import InconsistentStateError

from .protocol import SCOPE_ITEMS


class BackendError(RuntimeError):
    pass


def manifest_entry(instance_id: str, task: TaskSpec, input_seq: tuple[str, ...]) -> dict:
    return {
        "instance_id": instance_id,
        "kind": task.kind.value,
        "n": task.n,
        "input": list(input_seq),
        "index": task.index,
        "new_item": task.new_item,
        "vocabulary": list(task.vocabulary),
    }


def parse_manifest_entry(entry: dict) -> tuple[str, TaskSpec, tuple[str, ...]]:
    task = TaskSpec(
        kind=TaskKind(entry["kind"]),
        n=entry["n"],
        vocabulary=tuple(entry["vocabulary"]),
        index=entry.get("index"),
        new_item=entry.get("new_item"),
    )
    return entry["instance_id"], task, tuple(entry["input"])


def write_manifest(entries: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


class IdealBackend:
    """Exact-posterior mock backend over a registered instance set."""

    def __init__(self, instances: dict[str, tuple[TaskSpec, tuple[str, ...]]]):
        self._instances = dict(instances)

    @staticmethod
    def from_manifest(path: str | Path) -> "IdealBackend":
        instances = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                instance_id, task, input_seq = parse_manifest_entry(json.loads(line))
                instances[instance_id] = (task, input_seq)
        return IdealBackend(instances)

    def posterior_rows(
        self, instance_id: str, state: tuple[str | None, ...], candidate_scope: str
    ) -> dict[int, tuple[tuple[str, float], ...]]:
        if candidate_scope != SCOPE_ITEMS:
            raise BackendError("the ideal backend serves item-scope queries only")
        entry = self._instances.get(instance_id)
        if entry is None:
            raise BackendError(f"unknown instance {instance_id!r}")
        task, input_seq = entry
        try:
            table = posterior_marginals(task, input_seq, SequenceState(state))
        except InconsistentStateError as exc:
            raise BackendError(f"inconsistent state: {exc}") from None
        except ValueError as exc:
            raise BackendError(str(exc)) from None
        return dict(table.rows)
