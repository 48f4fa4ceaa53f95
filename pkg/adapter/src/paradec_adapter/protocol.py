"""Wire format: one JSON object per line, UTF-8, stateless per request.

Request:  {"request_id", "instance_id", "prompt", "state", "candidate_scope"}
          with ``state`` a list whose entries are a token string or null
          (masked), and candidate_scope "items" (distributions restricted
          to the task vocabulary) or "full-vocab" (reserved for real-model
          text decoding).
Response: {"request_id", "rows"} with rows mapping position (stringified
          by JSON) to [[token, probability], ...]; rows exist exactly for
          the masked positions, each summing to 1 within 1e-6.
Errors:   {"error", "request_id"}; request_id echoes the offending
          request when it could be parsed, else null.

Floats survive the wire exactly: json emits the shortest round-tripping
repr, so a response row compares bit-equal to the in-process posterior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

ROW_SUM_TOLERANCE = 1e-6

SCOPE_ITEMS = "items"
SCOPE_FULL_VOCAB = "full-vocab"
SCOPES = (SCOPE_ITEMS, SCOPE_FULL_VOCAB)


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class Request:
    request_id: str
    instance_id: str
    prompt: str
    state: tuple[str | None, ...]
    candidate_scope: str = SCOPE_ITEMS

    def to_json(self) -> str:
        return json.dumps(
            {
                "request_id": self.request_id,
                "instance_id": self.instance_id,
                "prompt": self.prompt,
                "state": list(self.state),
                "candidate_scope": self.candidate_scope,
            },
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class Response:
    request_id: str
    rows: dict[int, tuple[tuple[str, float], ...]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "request_id": self.request_id,
                "rows": {
                    str(pos): [[item, p] for item, p in row]
                    for pos, row in sorted(self.rows.items())
                },
            },
            ensure_ascii=False,
        )


def error_json(message: str, request_id: str | None) -> str:
    return json.dumps({"error": message, "request_id": request_id}, ensure_ascii=False)


def parse_request(line: str) -> Request:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ProtocolError("request must be a JSON object")
    try:
        request_id = payload["request_id"]
        instance_id = payload["instance_id"]
        state = payload["state"]
    except KeyError as exc:
        raise ProtocolError(f"missing field {exc}") from None
    if not isinstance(state, list) or not all(
        s is None or isinstance(s, str) for s in state
    ):
        raise ProtocolError("state must be a list of token-or-null")
    scope = payload.get("candidate_scope", SCOPE_ITEMS)
    if scope not in SCOPES:
        raise ProtocolError(f"candidate_scope must be one of {SCOPES}")
    return Request(
        request_id=str(request_id),
        instance_id=str(instance_id),
        prompt=str(payload.get("prompt", "")),
        state=tuple(state),
        candidate_scope=scope,
    )


def parse_response(line: str) -> Response | dict:
    """Returns a Response, or the raw dict when the line is an error object."""
    payload = json.loads(line)
    if "error" in payload:
        return payload
    rows = {
        int(pos): tuple((item, float(p)) for item, p in row)
        for pos, row in payload["rows"].items()
    }
    return Response(request_id=payload["request_id"], rows=rows)
