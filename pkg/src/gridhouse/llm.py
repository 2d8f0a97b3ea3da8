"""LLM gateway: a uniform completion interface with offline and HTTP providers.

The scripted provider replays canned responses (keyed by episode id or by
prompt hash) for reproducible, network-free runs; the HTTP provider speaks the
completions-style JSON wire format. All calls go through ``LlmGateway``, which
counts them — the efficiency claims in the evaluation are asserted against
this counter.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class LlmError(Exception):
    pass


class ScriptMiss(LlmError):
    """The scripted provider has no response for this key."""


class Transport(LlmError):
    """The HTTP request could not be completed."""


class RateLimited(LlmError):
    """The endpoint returned 429; retried with exponential backoff."""


class MalformedResponse(LlmError):
    pass


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = 0.0
    max_tokens: int = 512
    logit_bias: dict[str, float] = field(default_factory=dict)
    retries: int = 2

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be nonnegative")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


def biased_params(allowed_tokens: list[str], bias: float = 0.1, **kwargs) -> CompletionParams:
    """Params with a small positive bias on every allowable output token.

    Token strings stand in for tokenizer ids, which are provider-specific;
    providers that cannot apply string-keyed bias ignore it.
    """
    return CompletionParams(logit_bias={t: bias for t in allowed_tokens}, **kwargs)


class LlmProvider:
    id: str = "base"

    def complete(self, prompt: str, params: CompletionParams, key: str | None = None) -> str:
        """Return the completion text. ``key`` is a routing hint for scripted providers."""
        raise NotImplementedError


class ScriptKeying(Enum):
    BY_EPISODE_ID = "episode_id"
    BY_PROMPT_HASH = "prompt_hash"


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedProvider(LlmProvider):
    """Deterministic provider replaying a key -> response table."""

    def __init__(self, script: dict[str, str], keying: ScriptKeying = ScriptKeying.BY_EPISODE_ID,
                 provider_id: str = "scripted"):
        if not script:
            raise ValueError("script must not be empty")
        self.script = dict(script)
        self.keying = keying
        self.id = provider_id

    def complete(self, prompt: str, params: CompletionParams, key: str | None = None) -> str:
        if self.keying is ScriptKeying.BY_PROMPT_HASH:
            lookup = prompt_hash(prompt)
        else:
            if key is None:
                raise ScriptMiss("episode-id-keyed script called without a key")
            lookup = key
        try:
            return self.script[lookup]
        except KeyError:
            raise ScriptMiss(f"no scripted response for key {lookup!r}") from None


def load_scripted_provider(path: str | Path) -> ScriptedProvider:
    """Load a script file: ``{"keying": "episode_id"|"prompt_hash", "responses": {...}}``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return ScriptedProvider(
        script=doc["responses"],
        keying=ScriptKeying(doc.get("keying", "episode_id")),
        provider_id=f"scripted:{Path(path).name}",
    )


class HttpProvider(LlmProvider):
    """Completions-style HTTP provider.

    Sends ``{model, prompt, temperature, max_tokens, logit_bias}`` and returns
    the first choice's text. 429 responses are retried with exponential
    backoff up to ``params.retries`` times.
    """

    def __init__(self, endpoint: str, model_name: str, auth_token_env: str | None = None,
                 timeout_s: float = 60.0, backoff_s: float = 0.5, max_in_flight: int = 4):
        self.endpoint = endpoint
        self.model_name = model_name
        self.auth_token_env = auth_token_env
        self.timeout_s = timeout_s
        self.backoff_s = backoff_s
        self.id = f"http:{model_name}@{endpoint}"
        self._slots = threading.Semaphore(max_in_flight)

    def complete(self, prompt: str, params: CompletionParams, key: str | None = None) -> str:
        import os

        import requests

        headers = {"Content-Type": "application/json"}
        if self.auth_token_env:
            token = os.environ.get(self.auth_token_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.model_name,
            "prompt": prompt,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        if params.logit_bias:
            body["logit_bias"] = params.logit_bias
        attempt = 0
        while True:
            try:
                with self._slots:
                    resp = requests.post(self.endpoint, json=body, headers=headers,
                                         timeout=self.timeout_s)
            except requests.RequestException as exc:
                raise Transport(f"request to {self.endpoint} failed: {exc}") from exc
            if resp.status_code == 429:
                if attempt >= params.retries:
                    raise RateLimited(f"rate limited after {attempt + 1} attempts")
                time.sleep(self.backoff_s * (2 ** attempt))
                attempt += 1
                continue
            if resp.status_code >= 400:
                raise Transport(f"endpoint returned HTTP {resp.status_code}")
            try:
                payload = resp.json()
                text = payload["choices"][0]["text"]
            except (ValueError, LookupError, TypeError) as exc:
                raise MalformedResponse(f"unparseable completion response: {exc}") from exc
            if not isinstance(text, str):
                raise MalformedResponse("completion text is not a string")
            return text


class LlmGateway:
    """Thread-safe wrapper that forwards prompts verbatim and counts calls."""

    def __init__(self, provider: LlmProvider, params: CompletionParams | None = None):
        self.provider = provider
        self.params = params or CompletionParams()
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        with self._lock:
            return self._calls

    def complete(self, prompt: str, key: str | None = None) -> str:
        with self._lock:
            self._calls += 1
        return self.provider.complete(prompt, self.params, key=key)
