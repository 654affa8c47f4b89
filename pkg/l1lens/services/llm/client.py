"""Chat-completion transports, retry/backoff and rate limiting.

A transport is any callable taking the request payload (``model``,
``messages``, ``temperature``, ``max_tokens``) and returning the
assistant text. Tests use recorded fixtures; nothing here is required to
touch the network.
"""

import datetime
import hashlib
import json
import logging
import os
import threading
import time
from collections.abc import Callable
from pathlib import Path

import requests

from l1lens.errors import ConfigError, TransportError
from l1lens.schemas.llm import GenerationConfig, PromptBundle

logger = logging.getLogger("l1lens")

Transport = Callable[[dict], str]


def build_request(bundle: PromptBundle, cfg: GenerationConfig) -> dict:
    return {
        "model": cfg.model_name,
        "messages": bundle.wire_messages(),
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_output_tokens,
    }


def request_digest(request: dict) -> str:
    canonical = json.dumps(
        request, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class HttpChatTransport:
    """POSTs the request to an OpenAI-compatible chat endpoint."""

    def __init__(self, cfg: GenerationConfig, session=None):
        self.cfg = cfg
        self.session = session or requests.Session()

    def __call__(self, request: dict) -> str:
        api_key = os.environ.get(self.cfg.api_key_env)
        if not api_key:
            raise ConfigError(
                f"environment variable {self.cfg.api_key_env} is not set"
            )
        response = self.session.post(
            self.cfg.endpoint_url,
            json=request,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=self.cfg.timeout_s,
        )
        response.raise_for_status()
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(
                f"unexpected response payload from {self.cfg.endpoint_url}",
                raw=response.text,
            ) from exc


class FixtureTransport:
    """Replays responses recorded under ``<digest>.json``."""

    def __init__(self, directory: Path):
        self.directory = directory

    def __call__(self, request: dict) -> str:
        digest = request_digest(request)
        path = self.directory / f"{digest}.json"
        if not path.is_file():
            raise TransportError(f"no recorded response for request {digest}")
        return json.loads(path.read_text(encoding="utf-8"))["response"]


class RecordingTransport:
    """Calls through to another transport and records each response."""

    def __init__(self, inner: Transport, directory: Path):
        self.inner = inner
        self.directory = directory

    def __call__(self, request: dict) -> str:
        response = self.inner(request)
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / f"{request_digest(request)}.json"
        path.write_text(
            json.dumps(
                {"request": request, "response": response},
                ensure_ascii=False,
                indent=2,
                sort_keys=True,
            ),
            encoding="utf-8",
        )
        return response


class TokenBucket:
    """Shared requests-per-minute limiter."""

    def __init__(
        self,
        requests_per_minute: float,
        capacity: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if requests_per_minute <= 0:
            raise ConfigError("requests per minute must be positive")
        self.rate = requests_per_minute / 60.0
        self.capacity = capacity
        self.tokens = capacity
        self.clock = clock
        self.sleep = sleep
        self.updated = clock()
        self.lock = threading.Lock()

    def acquire(self):
        while True:
            with self.lock:
                now = self.clock()
                self.tokens = min(
                    self.capacity,
                    self.tokens + (now - self.updated) * self.rate,
                )
                self.updated = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            self.sleep(wait)


def backoff_delays(cfg: GenerationConfig) -> list[float]:
    """Seconds to wait after each failed attempt but the last."""
    return [cfg.backoff_base_ms / 1000 * 2**k for k in range(cfg.retries)]


def call_with_retries(
    transport: Transport,
    request: dict,
    cfg: GenerationConfig,
    sleep: Callable[[float], None] = time.sleep,
    limiter: TokenBucket | None = None,
) -> str:
    """At most ``retries + 1`` attempts, waiting base * 2^k in between."""
    delays = backoff_delays(cfg)
    attempts = cfg.retries + 1
    last_error = None
    for attempt in range(attempts):
        if limiter is not None:
            limiter.acquire()
        try:
            return transport(request)
        except (requests.RequestException, TransportError) as exc:
            last_error = exc
            if attempt < len(delays):
                logger.warning(
                    "Chat request failed (%d/%d), retrying in %.2fs: %s",
                    attempt + 1,
                    attempts,
                    delays[attempt],
                    exc,
                )
                sleep(delays[attempt])
    raise TransportError(
        f"chat request failed after {attempts} attempts: {last_error}",
        attempts=attempts,
        raw=getattr(last_error, "raw", ""),
    )


class AuditLog:
    """Appends one JSON line per model call."""

    def __init__(self, path: Path | None):
        self.path = path
        self.lock = threading.Lock()

    def append(
        self,
        model: str,
        prompt_version: str,
        condition: str,
        raw: str,
        **extra,
    ):
        if self.path is None:
            return
        record = {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "model": model,
            "prompt_version": prompt_version,
            "condition": condition,
            **extra,
            "raw": raw,
        }
        with self.lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False))
                f.write("\n")
