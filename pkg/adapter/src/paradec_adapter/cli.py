"""Adapter CLI: serve a backend, or conformance-check a manifest end to end."""

from __future__ import annotations

import argparse
import json
import sys

from .backend import IdealBackend
from .server import serve, serve_tcp


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="paradec-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="serve the ideal-model mock over stdio or TCP")
    p.add_argument("--instances", required=True, help="instance manifest (JSONL)")
    p.add_argument("--backend", choices=["ideal"], default="ideal")
    p.add_argument("--tcp", metavar="HOST:PORT", help="serve on TCP instead of stdio")

    p = sub.add_parser("conformance", help="fuzz an in-process server and report")
    p.add_argument("--instances", required=True)
    p.add_argument("--requests", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)

    if args.command == "serve":
        backend = IdealBackend.from_manifest(args.instances)
        if args.tcp:
            host, _, port = args.tcp.rpartition(":")
            server = serve_tcp(backend, host or "127.0.0.1", int(port))
            try:
                server.serve_forever()
            finally:
                server.server_close()
        else:
            serve(backend, sys.stdin, sys.stdout)
        return 0

    if args.command == "conformance":
        from .backend import parse_manifest_entry
        from .conformance import conformance_check
        from .server import handle_line

        # read the manifest exactly once (it may be a pipe)
        instances = {}
        with open(args.instances, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    instance_id, task, inp = parse_manifest_entry(json.loads(line))
                    instances[instance_id] = (task, inp)
        if not instances:
            print("error: empty instance manifest", file=sys.stderr)
            return 2
        backend = IdealBackend(instances)

        class LoopbackTransport:
            def round_trip(self, line: str) -> str:
                return handle_line(backend, line)

        report = conformance_check(
            LoopbackTransport(), instances, num_requests=args.requests, seed=args.seed
        )
        print(
            json.dumps(
                {
                    "requests": report.requests_sent,
                    "violations": report.violations,
                    "latency": report.latency_summary(),
                },
                indent=1,
            )
        )
        return 0 if report.ok else 2

    return 1


if __name__ == "__main__":
    sys.exit(main())
