"""Chat-completion gateway: one interface, two wire dialects, one stub.

``HttpLLMClient`` speaks either the OpenAI ``/v1/chat/completions`` schema or
the Ollama ``/api/chat`` schema, selected by config.  ``ScriptedStubBackend``
replays canned replies deterministically for offline runs and tests; rules
match on the request's pipeline-stage tag and/or prompt text, and each rule
cycles through its reply list.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .errors import (
    BackendRefused,
    BackendTimeout,
    BackendUnreachable,
    InvalidConfig,
    InvalidInput,
)

logger = logging.getLogger(__name__)

API_KEY_ENV_VAR = "SCORERAG_LLM_API_KEY"

VALID_TAGS = ("judge", "summarize", "generate", "evaluate")


@dataclass(frozen=True)
class ChatRequest:
    user_prompt: str
    system_prompt: str = ""
    temperature: float = 0.7
    max_tokens: int | None = None
    tag: str = "generate"

    def __post_init__(self):
        if not self.user_prompt:
            raise InvalidInput("ChatRequest.user_prompt must be non-empty")
        if self.temperature < 0:
            raise InvalidInput(f"temperature must be >= 0, got {self.temperature}")


class LLMBackend(Protocol):
    def complete(self, request: ChatRequest) -> str: ...


@dataclass
class LLMConfig:
    dialect: str = "stub"  # openai | ollama | stub
    endpoint_url: str = ""
    model_name: str = "llama3.1:8b"
    timeout_secs: float = 120.0
    retries: int = 3
    backoff_base_secs: float = 0.5
    stub_script: str | None = None
    capture_transcript: bool = False


class HttpLLMClient:
    """Chat client with retry-on-transient-network-error semantics."""

    def __init__(self, config: LLMConfig):
        if config.dialect not in ("openai", "ollama"):
            raise InvalidConfig(f"unknown LLM dialect {config.dialect!r}")
        if not config.endpoint_url:
            raise InvalidConfig("HTTP LLM client requires endpoint_url")
        self.config = config
        self.transcript: list[tuple[ChatRequest, str]] = []
        self._transcript_lock = threading.Lock()

    def _build(self, request: ChatRequest) -> tuple[str, dict]:
        messages = []
        if request.system_prompt:
            messages.append({"role": "system", "content": request.system_prompt})
        messages.append({"role": "user", "content": request.user_prompt})
        base = self.config.endpoint_url.rstrip("/")
        if self.config.dialect == "openai":
            payload = {
                "model": self.config.model_name,
                "messages": messages,
                "temperature": request.temperature,
            }
            if request.max_tokens is not None:
                payload["max_tokens"] = request.max_tokens
            return f"{base}/v1/chat/completions", payload
        payload = {
            "model": self.config.model_name,
            "messages": messages,
            "stream": False,
            "options": {"temperature": request.temperature},
        }
        if request.max_tokens is not None:
            payload["options"]["num_predict"] = request.max_tokens
        return f"{base}/api/chat", payload

    def _extract(self, data: dict) -> str:
        try:
            if self.config.dialect == "openai":
                return data["choices"][0]["message"]["content"]
            return data["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendRefused(f"LLM reply missing content field: {exc}") from exc

    def complete(self, request: ChatRequest) -> str:
        url, payload = self._build(request)
        headers = {}
        api_key = os.environ.get(API_KEY_ENV_VAR)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_exc: Exception | None = None
        for attempt in range(self.config.retries):
            if attempt:
                time.sleep(self.config.backoff_base_secs * (2 ** (attempt - 1)))
            try:
                response = requests.post(
                    url, json=payload, headers=headers, timeout=self.config.timeout_secs
                )
            except requests.Timeout as exc:
                last_exc = exc
                logger.warning("LLM call timed out (attempt %d/%d)", attempt + 1, self.config.retries)
                continue
            except requests.ConnectionError as exc:
                last_exc = exc
                logger.warning(
                    "LLM backend unreachable (attempt %d/%d): %s",
                    attempt + 1, self.config.retries, exc,
                )
                continue
            if not response.ok:
                raise BackendRefused(
                    f"LLM backend answered {response.status_code}",
                    status_code=response.status_code,
                    body=response.text[:500],
                )
            reply = self._extract(response.json())
            self._record(request, reply)
            return reply
        if isinstance(last_exc, requests.Timeout):
            raise BackendTimeout(
                f"LLM backend timed out after {self.config.retries} attempts"
            ) from last_exc
        raise BackendUnreachable(
            f"LLM backend unreachable after {self.config.retries} attempts"
        ) from last_exc

    def _record(self, request: ChatRequest, reply: str) -> None:
        if self.config.capture_transcript:
            with self._transcript_lock:
                self.transcript.append((request, reply))


@dataclass
class StubRule:
    """Canned replies served when tag/prompt constraints match."""

    responses: list[str]
    tag: str | None = None
    contains: str | None = None
    regex: str | None = None

    def __post_init__(self):
        if not self.responses:
            raise InvalidConfig("stub rule needs at least one response")
        self._cycle = itertools.cycle(self.responses)
        self._pattern = re.compile(self.regex) if self.regex else None

    @property
    def is_catch_all(self) -> bool:
        return self.tag is None and self.contains is None and self.regex is None

    def matches(self, request: ChatRequest) -> bool:
        if self.tag is not None and request.tag != self.tag:
            return False
        haystack = request.system_prompt + "\n" + request.user_prompt
        if self.contains is not None and self.contains not in haystack:
            return False
        if self._pattern is not None and not self._pattern.search(haystack):
            return False
        return True


class ScriptedStubBackend:
    """Deterministic scripted LLM; rules are checked in order."""

    def __init__(self, rules: list[StubRule], capture_transcript: bool = True):
        if not any(rule.is_catch_all for rule in rules):
            raise InvalidConfig("stub script must include at least one catch-all rule")
        self.rules = rules
        self.capture_transcript = capture_transcript
        self.transcript: list[tuple[ChatRequest, str]] = []
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            for rule in self.rules:
                if rule.matches(request):
                    reply = next(rule._cycle)
                    break
            else:  # unreachable: a catch-all always matches
                raise InvalidConfig("no stub rule matched")
            if self.capture_transcript:
                self.transcript.append((request, reply))
        return reply

    @classmethod
    def from_json_file(cls, path: str | Path, capture_transcript: bool = True) -> "ScriptedStubBackend":
        """Load rules from a JSON list of {tag?, contains?, regex?, responses}."""
        with Path(path).open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise InvalidConfig("stub script file must hold a JSON list of rules")
        rules = [
            StubRule(
                responses=list(entry["responses"]),
                tag=entry.get("tag"),
                contains=entry.get("contains"),
                regex=entry.get("regex"),
            )
            for entry in data
        ]
        return cls(rules, capture_transcript=capture_transcript)


def backend_from_config(config: LLMConfig) -> LLMBackend:
    if config.dialect == "stub":
        if not config.stub_script:
            raise InvalidConfig("stub dialect requires llm.stub_script")
        return ScriptedStubBackend.from_json_file(
            config.stub_script, capture_transcript=config.capture_transcript
        )
    return HttpLLMClient(config)
