"""Completion clients: a live HTTP binding and a deterministic mock.

The live client posts to an OpenAI-style chat completions endpoint.  It is
configured by constructor arguments or environment variables:

  NL2MPC_COMPLETIONS_URL    endpoint URL (required to construct from env)
  NL2MPC_COMPLETIONS_MODEL  model name (default "gpt-4")
  NL2MPC_API_KEY            bearer token, optional
  NL2MPC_TEMPERATURE        sampling temperature (default 0.2)

The mock client replays completions from a fixture directory (files in
sorted order) or from an in-memory list, one per send() call, and records
every prompt it saw.  It is pure: no network, no randomness.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Protocol

import httpx

from nl2mpc.errors import ConfigError, TranslationError


class CompletionClient(Protocol):
    def send(self, prompt: str) -> str: ...


class HttpCompletionClient:
    def __init__(
        self,
        url: str,
        model: str = "gpt-4",
        api_key: str | None = None,
        temperature: float = 0.2,
        timeout: float = 60.0,
        max_retries: int = 2,
    ):
        self.url = url
        self.model = model
        self.api_key = api_key
        self.temperature = temperature
        self.max_retries = max_retries
        self._client = httpx.Client(timeout=timeout)

    @classmethod
    def from_env(cls) -> "HttpCompletionClient":
        url = os.environ.get("NL2MPC_COMPLETIONS_URL")
        if not url:
            raise ConfigError("NL2MPC_COMPLETIONS_URL is not set")
        return cls(
            url=url,
            model=os.environ.get("NL2MPC_COMPLETIONS_MODEL", "gpt-4"),
            api_key=os.environ.get("NL2MPC_API_KEY"),
            temperature=float(os.environ.get("NL2MPC_TEMPERATURE", "0.2")),
        )

    def send(self, prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                resp = self._client.post(self.url, json=body, headers=headers)
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as e:
                last_error = e
        raise TranslationError(
            f"completion request failed after {self.max_retries + 1} attempts: {last_error}"
        )

    def close(self):
        self._client.close()


class MockCompletionClient:
    """Replays canned completions in order; optionally cycles."""

    def __init__(self, completions: Iterable[str], cyclic: bool = False):
        self._completions = list(completions)
        if not self._completions:
            raise ConfigError("mock client needs at least one completion")
        self.cyclic = cyclic
        self.calls: list[str] = []

    @classmethod
    def from_dir(cls, fixture_dir: str | Path, cyclic: bool = False) -> "MockCompletionClient":
        root = Path(fixture_dir)
        files = sorted(p for p in root.iterdir() if p.suffix == ".txt")
        if not files:
            raise ConfigError(f"no .txt fixtures in {root}")
        return cls([p.read_text() for p in files], cyclic=cyclic)

    def send(self, prompt: str) -> str:
        self.calls.append(prompt)
        index = len(self.calls) - 1
        if index >= len(self._completions):
            if not self.cyclic:
                raise TranslationError(
                    f"mock client exhausted after {len(self._completions)} completions"
                )
            index %= len(self._completions)
        return self._completions[index]
