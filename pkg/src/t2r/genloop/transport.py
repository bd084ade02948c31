"""LLM transports: live HTTP, deterministic cassette replay, and scripted.

Requests are canonicalized (sorted-key compact JSON over model/messages/
temperature) and keyed by SHA-256; a cassette is a JSON-lines file of
{request_hash, request, response} rows. Transports are safe for concurrent
use by independent runs.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Protocol


class TransportError(Exception):
    pass


class Transport(Protocol):
    def complete(self, messages: list[dict], temperature: float) -> str: ...


def canonical_request(model: str, messages: list[dict], temperature: float) -> str:
    body = {"model": model, "messages": messages, "temperature": round(float(temperature), 6)}
    return json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_hash(model: str, messages: list[dict], temperature: float) -> str:
    return hashlib.sha256(
        canonical_request(model, messages, temperature).encode("utf-8")
    ).hexdigest()


DEFAULT_MODEL = "reward-coder-1"


class LiveTransport:
    """Chat-completion HTTP client. Endpoint and credential come from
    T2R_LLM_ENDPOINT / T2R_LLM_API_KEY unless passed explicitly."""

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        model: str = DEFAULT_MODEL,
        timeout: float = 120.0,
    ):
        self.endpoint = endpoint or os.environ.get("T2R_LLM_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("T2R_LLM_API_KEY", "")
        self.model = model
        self.timeout = timeout
        if not self.endpoint:
            raise TransportError("no LLM endpoint configured (T2R_LLM_ENDPOINT)")

    def complete(self, messages: list[dict], temperature: float) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model, "messages": messages, "temperature": temperature}
        try:
            resp = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except TransportError:
            raise
        except Exception as exc:  # noqa: BLE001 - network/shape failures collapse to one category
            raise TransportError(f"live completion failed: {exc}") from exc


class ReplayTransport:
    """Deterministic playback from a cassette; a miss is an error, never a
    silent fallback to the network."""

    def __init__(self, cassette_path: str | Path, model: str = DEFAULT_MODEL):
        self.model = model
        self.path = Path(cassette_path)
        self._responses: dict[str, str] = {}
        if not self.path.exists():
            raise TransportError(f"cassette not found: {self.path}")
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            self._responses[row["request_hash"]] = row["response"]

    def complete(self, messages: list[dict], temperature: float) -> str:
        key = request_hash(self.model, messages, temperature)
        try:
            return self._responses[key]
        except KeyError:
            raise TransportError(
                f"cassette {self.path.name} has no response for request {key[:12]}…"
                f" ({len(self._responses)} recorded)"
            ) from None


class ScriptedTransport:
    """Ordered fixture responses for tests; exhaustion is an error."""

    def __init__(self, responses: list[str], model: str = DEFAULT_MODEL):
        self.model = model
        self._responses = list(responses)
        self._lock = threading.Lock()
        self.requests: list[list[dict]] = []

    def complete(self, messages: list[dict], temperature: float) -> str:
        with self._lock:
            self.requests.append(json.loads(json.dumps(messages)))
            if not self._responses:
                raise TransportError("scripted transport exhausted")
            return self._responses.pop(0)


class RecordingTransport:
    """Wraps another transport and appends every exchange to a cassette."""

    def __init__(self, inner, cassette_path: str | Path, model: str = DEFAULT_MODEL):
        self.inner = inner
        self.model = model
        self.path = Path(cassette_path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def complete(self, messages: list[dict], temperature: float) -> str:
        response = self.inner.complete(messages, temperature)
        row = {
            "request_hash": request_hash(self.model, messages, temperature),
            "request": {"model": self.model, "messages": messages, "temperature": temperature},
            "response": response,
        }
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        return response


def make_transport(kind: str, cassette: str | Path | None = None, responses: list[str] | None = None):
    """CLI-facing factory for --transport {live,replay,scripted}."""
    if kind == "live":
        return LiveTransport()
    if kind == "replay":
        if cassette is None:
            raise TransportError("replay transport requires --cassette")
        return ReplayTransport(cassette)
    if kind == "scripted":
        return ScriptedTransport(responses or [])
    raise TransportError(f"unknown transport kind '{kind}'")
