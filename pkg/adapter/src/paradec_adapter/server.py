"""Serve a backend over line-delimited JSON, on stdio or TCP.

One response per request, in order; requests are handled serially per
connection and the protocol is stateless, so any request order yields the
same responses.  Malformed input never crashes the server: it answers
with an error object and keeps reading.
"""

from __future__ import annotations

import socketserver
from typing import IO

from .backend import BackendError
from .protocol import ProtocolError, Response, error_json, parse_request


def handle_line(backend, line: str) -> str:
    line = line.strip()
    if not line:
        return error_json("empty request line", None)
    try:
        request = parse_request(line)
    except ProtocolError as exc:
        return error_json(str(exc), None)
    try:
        rows = backend.posterior_rows(
            request.instance_id, request.state, request.candidate_scope
        )
    except BackendError as exc:
        return error_json(str(exc), request.request_id)
    except Exception as exc:  # backend bug: report, never crash the bridge
        return error_json(f"backend failure: {exc!r}", request.request_id)
    return Response(request_id=request.request_id, rows=rows).to_json()


def serve(backend, infile: IO[str], outfile: IO[str]) -> None:
    """Blocking loop: one JSON line in, one JSON line out, until EOF."""
    for line in infile:
        outfile.write(handle_line(backend, line))
        outfile.write("\n")
        outfile.flush()


def serve_tcp(backend, host: str, port: int):
    """TCP variant with identical payloads; returns the bound server object
    (callers drive serve_forever / shutdown)."""

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            for raw in self.rfile:
                reply = handle_line(backend, raw.decode("utf-8"))
                self.wfile.write(reply.encode("utf-8") + b"\n")
                self.wfile.flush()

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    return Server((host, port), Handler)
