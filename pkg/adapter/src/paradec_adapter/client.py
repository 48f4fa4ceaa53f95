"""Client side: a remote-backed model usable by the paradec decode loop.

``RemoteModel`` satisfies the same three-member interface the in-process
oracle exposes (output_length, posterior, consistent).  Posterior queries
go over the wire; consistency, which exists only for item-scope task
decoding, is evaluated locally from the task parameters so the loop never
ships an impossible state to the model.  One request is outstanding per
connection at a time.
"""

from __future__ import annotations

import socket
import subprocess
import sys
from pathlib import Path

from paradec import PosteriorTable, SequenceState, TaskSpec, consistency_check

from .protocol import Request, parse_response


class AdapterError(RuntimeError):
    pass


class StdioTransport:
    """Talks to ``paradec-adapter serve`` running as a child process."""

    def __init__(self, manifest_path: str | Path):
        self._proc = subprocess.Popen(
            [sys.executable, "-m", "paradec_adapter.cli", "serve",
             "--instances", str(manifest_path)],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
        )

    def round_trip(self, line: str) -> str:
        assert self._proc.stdin is not None and self._proc.stdout is not None
        self._proc.stdin.write(line + "\n")
        self._proc.stdin.flush()
        reply = self._proc.stdout.readline()
        if not reply:
            raise AdapterError("adapter process closed the stream")
        return reply

    def close(self) -> None:
        if self._proc.stdin is not None:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TcpTransport:
    def __init__(self, host: str, port: int):
        self._sock = socket.create_connection((host, port))
        self._file = self._sock.makefile("rw", encoding="utf-8", newline="\n")

    def round_trip(self, line: str) -> str:
        self._file.write(line + "\n")
        self._file.flush()
        reply = self._file.readline()
        if not reply:
            raise AdapterError("adapter connection closed")
        return reply

    def close(self) -> None:
        self._file.close()
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class RemoteModel:
    """paradec model interface backed by an adapter endpoint."""

    def __init__(
        self,
        transport,
        instance_id: str,
        task: TaskSpec,
        input_seq: tuple[str, ...],
        prompt: str = "",
    ):
        self.transport = transport
        self.instance_id = instance_id
        self.task = task
        self.input = tuple(input_seq)
        self.prompt = prompt
        self.output_length = task.output_length
        self._counter = 0

    def posterior(self, state: SequenceState) -> PosteriorTable:
        self._counter += 1
        request = Request(
            request_id=f"{self.instance_id}#{self._counter}",
            instance_id=self.instance_id,
            prompt=self.prompt,
            state=state.slots,
        )
        reply = parse_response(self.transport.round_trip(request.to_json()))
        if isinstance(reply, dict):
            raise AdapterError(f"adapter error: {reply['error']}")
        if reply.request_id != request.request_id:
            raise AdapterError(
                f"response id {reply.request_id!r} does not match {request.request_id!r}"
            )
        return PosteriorTable(reply.rows)

    def consistent(self, state: SequenceState) -> bool:
        return consistency_check(self.task, self.input, state)
