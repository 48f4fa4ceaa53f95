"""Bridge process exposing a masked-diffusion model (or the ideal-model
mock) to the paradec decoding loop over line-delimited JSON."""

from .backend import IdealBackend, manifest_entry, parse_manifest_entry, write_manifest
from .client import AdapterError, RemoteModel, StdioTransport, TcpTransport
from .conformance import ConformanceReport, conformance_check
from .protocol import Request, Response, error_json, parse_request, parse_response
from .server import handle_line, serve, serve_tcp

__all__ = [
    "AdapterError",
    "ConformanceReport",
    "IdealBackend",
    "RemoteModel",
    "Request",
    "Response",
    "StdioTransport",
    "TcpTransport",
    "conformance_check",
    "error_json",
    "handle_line",
    "manifest_entry",
    "parse_manifest_entry",
    "parse_request",
    "parse_response",
    "serve",
    "serve_tcp",
    "write_manifest",
]
