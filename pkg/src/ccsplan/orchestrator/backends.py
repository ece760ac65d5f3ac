"""LLM backends: replayed fixtures for tests and benchmarks, and a chat-completions client."""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Protocol, Sequence

from ..errors import BackendError, FixtureExhausted


class LlmBackend(Protocol):
    def complete(self, messages: Sequence[dict]) -> str: ...


class ReplayBackend:
    """Serves recorded responses in order; asking for one more is an error."""

    kind = "replay"

    def __init__(self, responses: Sequence[str], source: str = "<memory>"):
        if not all(isinstance(r, str) for r in responses):
            raise BackendError("replay fixtures must be a list of strings")
        self.responses = list(responses)
        self.source = source
        self.calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayBackend":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise BackendError(f"cannot read replay fixture {path}: {e}") from None
        if isinstance(data, dict):
            data = data.get("responses")
        if not isinstance(data, list):
            raise BackendError(f"replay fixture {path} must hold a JSON array of strings")
        return cls(data, str(path))

    def complete(self, messages: Sequence[dict]) -> str:
        with self._lock:
            if self.calls >= len(self.responses):
                raise FixtureExhausted(
                    f"replay fixture {self.source} has only {len(self.responses)} responses")
            r = self.responses[self.calls]
            self.calls += 1
            return r


class WireBackend:
    """Chat-completions style HTTP client (model, messages, temperature 0)."""

    kind = "wire"

    def __init__(self, endpoint: str, model: str, key_env: str = "OPENAI_API_KEY",
                 timeout: float = 120.0, retries: int = 3, backoff: float = 2.0, client=None):
        self.endpoint = endpoint
        self.model = model
        self.key_env = key_env
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._client = client

    def _http(self):
        if self._client is None:
            import httpx
            self._client = httpx.Client(timeout=self.timeout)
        return self._client

    def complete(self, messages: Sequence[dict]) -> str:
        key = os.environ.get(self.key_env)
        if not key:
            raise BackendError(f"environment variable {self.key_env} is not set")
        body = {"model": self.model, "messages": list(messages), "temperature": 0}
        headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
        last = None
        for attempt in range(self.retries + 1):
            try:
                resp = self._http().post(self.endpoint, json=body, headers=headers)
            except Exception as e:  # transport failures of any kind
                last = f"request failed: {e}"
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (ValueError, KeyError, IndexError, TypeError) as e:
                        raise BackendError(f"malformed completion response: {e}") from None
                last = f"HTTP {resp.status_code}: {resp.text[:200]}"
                if resp.status_code not in (408, 409, 429) and resp.status_code < 500:
                    break
            if attempt < self.retries:
                time.sleep(self.backoff * (2 ** attempt))
        raise BackendError(last or "request failed")
