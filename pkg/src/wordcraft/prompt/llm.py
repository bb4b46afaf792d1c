"""Optional LLM task decomposition over a chat-completion HTTP endpoint.

The endpoint is pluggable and never required: callers fall back to the
deterministic grammar when it is absent or unreachable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import requests

from ..errors import (
    EndpointTimeout,
    EndpointUnreachable,
    SchemaViolation,
    SchemaViolationAfterRetries,
)
from .bundle import validate_document

ENV_URL = "WORDCRAFT_LLM_URL"


@dataclass(frozen=True)
class UserRequest:
    """Free-text request plus optional structural hints."""

    query: str
    region_count_hint: int | None = None
    attachments: object = None

    def __post_init__(self):
        if not self.query or not self.query.strip():
            raise ValueError("query must be non-empty")


@dataclass(frozen=True)
class EndpointConfig:
    """Adapter settings for a chat-completion style endpoint."""

    url: str = ""
    model: str = "gpt-4"
    auth_header: str = "Authorization"
    auth_value: str = ""
    temperature: float = 0.0
    timeout_s: float = 30.0
    retries: int = 2
    extra_headers: dict = field(default_factory=dict)

    def resolved_url(self):
        return os.environ.get(ENV_URL, "") or self.url


_INSTRUCTIONS = """\
You convert a user's typography request into exactly one JSON document and
nothing else. Three document shapes exist:

1. Whole-character styling:
   {"schema_version":1,"task":"global","character":"O","base_prompt":["solid","red","gray-background"]}
2. Styling split across numbered regions (ids contiguous from 1), plus a base
   description for everything else:
   {"schema_version":1,"task":"multi_regional","character":"W","base_prompt":["gray-background"],"regions":[{"id":1,"prompt":["stripes","red"]},{"id":2,"prompt":["dots","blue"]}]}
3. Editing regions of an existing result (no base prompt):
   {"schema_version":1,"task":"continuous_editing","character":"W","regions":[{"id":1,"prompt":["solid","green"]}]}

Prefer tokens from this vocabulary when they fit: colors red, green, blue,
gray; background colors red-background, green-background, blue-background,
gray-background; patterns solid, stripes, dots, checker. Keep other words as
plain tokens. Reply with the JSON document only.
"""


def _extract_document(text):
    """First balanced {...} block in a reply, or None."""
    start = text.find("{")
    while start != -1:
        depth = 0
        in_str = False
        escape = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_str:
                if escape:
                    escape = False
                elif ch == "\\":
                    escape = True
                elif ch == '"':
                    in_str = False
                continue
            if ch == '"':
                in_str = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    return text[start:i + 1]
        start = text.find("{", start + 1)
    return None


def _post_chat(config, messages):
    url = config.resolved_url()
    if not url:
        raise EndpointUnreachable("no LLM endpoint configured")
    headers = {"Content-Type": "application/json", **config.extra_headers}
    if config.auth_value:
        headers[config.auth_header] = config.auth_value
    body = {
        "model": config.model,
        "messages": messages,
        "temperature": config.temperature,
    }
    try:
        resp = requests.post(url, json=body, headers=headers,
                             timeout=config.timeout_s)
    except requests.Timeout as exc:
        raise EndpointTimeout(f"LLM endpoint timed out after {config.timeout_s}s") from exc
    except requests.RequestException as exc:
        raise EndpointUnreachable(f"LLM endpoint unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise EndpointUnreachable(f"LLM endpoint returned HTTP {resp.status_code}")
    try:
        payload = resp.json()
        return payload["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise EndpointUnreachable(f"malformed endpoint reply: {exc}") from exc


def llm_decompose(request, config):
    """Ask the endpoint to structure a request; validate, retry on violations.

    Every successful return has passed validate_document. After the configured
    retries the last raw reply is surfaced for debugging.
    """
    hint = ""
    if request.region_count_hint:
        hint = f"\nThe user indicated {request.region_count_hint} region(s)."
    messages = [
        {"role": "system", "content": _INSTRUCTIONS},
        {"role": "user", "content": request.query + hint},
    ]
    last_reply = ""
    attempts = config.retries + 1
    for _ in range(attempts):
        last_reply = _post_chat(config, messages)
        doc = _extract_document(last_reply)
        if doc is None:
            violation = "no JSON document found in the reply"
        else:
            try:
                return validate_document(doc)
            except SchemaViolation as exc:
                violation = str(exc)
        messages.append({"role": "assistant", "content": last_reply})
        messages.append({
            "role": "user",
            "content": f"That document is invalid ({violation}). "
                       "Reply with a corrected JSON document only.",
        })
    raise SchemaViolationAfterRetries(
        f"no valid document after {attempts} attempt(s)", last_reply=last_reply)


def config_from_env(base=None):
    """EndpointConfig with environment overrides applied."""
    cfg = base or EndpointConfig()
    url = os.environ.get(ENV_URL)
    if url:
        return EndpointConfig(
            url=url, model=cfg.model, auth_header=cfg.auth_header,
            auth_value=cfg.auth_value, temperature=cfg.temperature,
            timeout_s=cfg.timeout_s, retries=cfg.retries,
            extra_headers=cfg.extra_headers)
    return cfg
