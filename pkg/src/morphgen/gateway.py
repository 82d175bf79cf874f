"""Chat backends: HTTP client, scripted mock, and plan execution.

The HTTP client speaks the common chat-completions shape: POST JSON
{"model", "messages": [{"role", "content"}], "temperature", "max_tokens"}
and reads choices[0].message.content back. Credentials come only from
the environment variable named in the config; config files never hold
key material. Transient statuses (429, 500, 502, 503, 504) and transport
failures are retried with exponential backoff up to max_retries extra
attempts.

The mock backend is an ordered list of (regex, reply) rules; the first
rule whose pattern matches the outgoing prompt supplies the reply. It
records every request, which is what the tests use to prove that wire
text equals rendered text.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .errors import (
    ConfigurationError,
    RequestError,
    StepBindingError,
    TransportError,
    ValidationError,
)
from .prompts import PromptPlan, bind_step_inputs

log = logging.getLogger(__name__)

RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})

DEFAULT_GENERATION_TEMPERATURE = 0.7
DEFAULT_JUDGE_TEMPERATURE = 0.0


@dataclass(frozen=True)
class BackendConfig:
    endpoint: str = ""
    model_name: str = "mock"
    temperature: float = DEFAULT_GENERATION_TEMPERATURE
    max_tokens: int = 512
    timeout: float = 30.0
    max_retries: int = 2
    auth_env: str = ""
    concurrency: int = 4
    backoff_base: float = 0.5

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ConfigurationError(f"timeout must be > 0, got {self.timeout}")
        if self.max_retries < 0:
            raise ConfigurationError(
                f"max_retries must be >= 0, got {self.max_retries}"
            )
        if self.temperature < 0:
            raise ConfigurationError(
                f"temperature must be >= 0, got {self.temperature}"
            )

    def to_record(self) -> dict:
        # auth_env names the variable, never its value
        return {
            "endpoint": self.endpoint,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "auth_env": self.auth_env,
            "concurrency": self.concurrency,
        }


@dataclass
class Reply:
    request_text: str
    text: str
    token_usage: int
    latency: float
    attempts: int

    def to_record(self) -> dict:
        # latency is wall-clock and stays out of artifacts
        return {
            "request_text": self.request_text,
            "text": self.text,
            "token_usage": self.token_usage,
            "attempts": self.attempts,
        }


@dataclass
class TokenLogprobs:
    tokens: list[str]
    logprobs: list[float]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.logprobs):
            raise ValidationError(
                f"{len(self.tokens)} tokens vs {len(self.logprobs)} logprobs"
            )
        if any(lp > 0 for lp in self.logprobs):
            raise ValidationError("log probabilities cannot be positive")


class HttpChatBackend:
    """requests-backed chat client with retry and injectable transport.

    transport(url, payload, headers, timeout) -> (status_code, body_text)
    """

    def __init__(
        self,
        config: BackendConfig,
        transport: Optional[Callable[..., tuple[int, str]]] = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        if not config.endpoint:
            raise ConfigurationError("HTTP backend needs an endpoint")
        self.config = config
        self.transport = transport or _requests_transport
        self.sleeper = sleeper

    @property
    def name(self) -> str:
        return self.config.model_name

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env:
            key = os.environ.get(self.config.auth_env)
            if not key:
                raise ConfigurationError(
                    f"credential variable {self.config.auth_env} is not set"
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, payload: dict) -> dict:
        headers = self._headers()
        attempts = 0
        last_failure = ""
        while attempts <= self.config.max_retries:
            attempts += 1
            try:
                status, body = self.transport(
                    self.config.endpoint, payload, headers, self.config.timeout
                )
            except TransportError as exc:
                last_failure = str(exc)
                status, body = None, ""
            if status == 200:
                try:
                    parsed = json.loads(body)
                except json.JSONDecodeError as exc:
                    raise TransportError(f"backend sent unparseable JSON: {exc}")
                parsed["_attempts"] = attempts
                return parsed
            if status is not None and status not in RETRYABLE_STATUSES:
                raise RequestError(status, body[:200])
            if status is not None:
                last_failure = f"status {status}"
            if attempts <= self.config.max_retries:
                delay = self.config.backoff_base * (2 ** (attempts - 1))
                log.warning(
                    "retrying %s after %s (attempt %d/%d)",
                    self.config.endpoint,
                    last_failure,
                    attempts,
                    self.config.max_retries + 1,
                )
                self.sleeper(delay)
        raise TransportError(
            f"gave up after {attempts} attempts: {last_failure or 'no response'}"
        )

    def complete(self, text: str) -> Reply:
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": text}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        started = time.perf_counter()
        parsed = self._post(payload)
        latency = time.perf_counter() - started
        try:
            reply_text = parsed["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise TransportError("backend response missing choices[0].message.content")
        usage = parsed.get("usage", {}).get("total_tokens", 0)
        return Reply(
            request_text=text,
            text=reply_text,
            token_usage=int(usage),
            latency=latency,
            attempts=parsed["_attempts"],
        )

    def logprobs(self, text: str) -> TokenLogprobs:
        if not text.strip():
            raise ValidationError("logprobs needs non-empty text")
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": text}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
            "logprobs": True,
        }
        parsed = self._post(payload)
        try:
            entries = parsed["choices"][0]["logprobs"]["content"]
            tokens = [e["token"] for e in entries]
            values = [float(e["logprob"]) for e in entries]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"backend response missing logprobs content: {exc}")
        return TokenLogprobs(tokens=tokens, logprobs=values)


def _requests_transport(
    endpoint: str, payload: dict, headers: dict, timeout: float
) -> tuple[int, str]:
    import requests

    try:
        response = requests.post(endpoint, json=payload, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"request to {endpoint} failed: {exc}") from exc
    return response.status_code, response.text


class MockBackend:
    """Deterministic scripted backend.

    rules is an ordered list of (pattern, reply); the first pattern that
    matches (re.search) the outgoing prompt wins. Unmatched prompts are a
    configuration error so scripts fail loudly. Every request text is
    recorded in order under .requests.
    """

    def __init__(
        self,
        rules: Sequence[tuple[str | re.Pattern, str]],
        name: str = "mock",
        token_logprob: float = -3.0,
    ):
        self.rules = [
            (re.compile(p) if isinstance(p, str) else p, reply) for p, reply in rules
        ]
        self._name = name
        self.token_logprob = token_logprob
        self.requests: list[str] = []
        self._lock = threading.Lock()

    @property
    def name(self) -> str:
        return self._name

    def _reply_for(self, text: str) -> str:
        for pattern, reply in self.rules:
            if pattern.search(text):
                return reply
        raise ConfigurationError(
            f"no mock rule matches prompt starting {text[:80]!r}"
        )

    def complete(self, text: str) -> Reply:
        reply = self._reply_for(text)
        with self._lock:
            self.requests.append(text)
        return Reply(
            request_text=text,
            text=reply,
            token_usage=len(reply.split()),
            latency=0.0,
            attempts=1,
        )

    def logprobs(self, text: str) -> TokenLogprobs:
        if not text.strip():
            raise ValidationError("logprobs needs non-empty text")
        tokens = text.split()
        return TokenLogprobs(
            tokens=tokens, logprobs=[self.token_logprob] * len(tokens)
        )


def load_mock_script(path: str | Path) -> MockBackend:
    """Read a mock script file: a JSON array of {"match", "reply"} objects,
    applied in order."""
    path = Path(path)
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"mock script {path} is not valid JSON: {exc}")
    if not isinstance(entries, list):
        raise ConfigurationError(f"mock script {path} must be a JSON array")
    rules: list[tuple[str, str]] = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "match" not in entry or "reply" not in entry:
            raise ConfigurationError(
                f"mock script {path} entry {i} needs 'match' and 'reply'"
            )
        try:
            re.compile(entry["match"])
        except re.error as exc:
            raise ConfigurationError(
                f"mock script {path} entry {i} has a bad regex: {exc}"
            )
        rules.append((entry["match"], entry["reply"]))
    return MockBackend(rules, name=f"mock:{path.stem}")


@dataclass
class Transcript:
    """Everything that crossed the wire for one plan execution.

    status is "complete" exactly when every planned turn got a reply;
    an aborted run keeps the partial replies it collected.
    """

    strategy: str
    qt: str
    expects: tuple[str, ...]
    replies: list[Reply] = field(default_factory=list)
    status: str = "complete"
    error: Optional[str] = None

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.replies]

    def to_record(self) -> dict:
        return {
            "strategy": self.strategy,
            "qt": self.qt,
            "expects": list(self.expects),
            "status": self.status,
            "error": self.error,
            "replies": [r.to_record() for r in self.replies],
        }


def run_plan(plan: PromptPlan, backend) -> Transcript:
    """Execute a plan turn by turn against a backend.

    Multi-step turns past the first are completed from earlier replies;
    a reply the next step cannot use aborts the run, and the partial
    transcript (status "aborted") is returned rather than raised.
    """
    transcript = Transcript(
        strategy=plan.strategy.value, qt=plan.qt.value, expects=plan.expects
    )
    transcript.replies.append(backend.complete(plan.turns[0].text))
    for _ in range(1, len(plan.turns)):
        try:
            turn = bind_step_inputs(plan, transcript.texts)
        except StepBindingError as exc:
            transcript.status = "aborted"
            transcript.error = str(exc)
            return transcript
        transcript.replies.append(backend.complete(turn.text))
    return transcript


def run_plans(
    plans: Sequence[PromptPlan], backend, concurrency: int = 4
) -> list[Transcript]:
    """Execute plans with bounded parallelism, preserving input order."""
    if concurrency < 1:
        raise ConfigurationError(f"concurrency must be >= 1, got {concurrency}")
    if concurrency == 1 or len(plans) <= 1:
        return [run_plan(p, backend) for p in plans]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        return list(pool.map(lambda p: run_plan(p, backend), plans))
