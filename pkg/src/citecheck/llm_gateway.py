"""Provider-agnostic chat and embedding clients.

All remote providers are reached through one OpenAI-compatible wire shape
(chat completions and embeddings) with per-provider base URLs. API keys
live only in environment variables named by the config; key material is
never stored, logged, or serialized. Deterministic mock providers ship
with the library so the full pipeline can run offline.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import httpx

logger = logging.getLogger(__name__)

EMBED_BATCH_SIZE = 32
TRANSIENT_STATUSES = {429, 500, 502, 503, 504}
BACKOFF_BASE_SECONDS = 0.5


class ProviderError(Exception):
    """Base class for provider failures."""


class AuthError(ProviderError):
    """Authentication rejected (401/403); never retried."""


class TransientExhaustedError(ProviderError):
    """Timeouts / rate limits / 5xx persisted past max_retries."""


class MalformedResponseError(ProviderError):
    """Response body did not match the expected wire shape."""


@dataclass(frozen=True)
class ProviderConfig:
    kind: str  # "chat", "embedding", or "reranker"
    name: str
    base_url: str
    model: str
    api_key_env: str = ""
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = 0.0
    in_flight_cap: int = 4

    def __post_init__(self) -> None:
        if self.kind not in ("chat", "embedding", "reranker"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if not self.base_url.startswith(("http://", "https://")):
            raise ValueError(f"base_url must be http(s), got {self.base_url!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.in_flight_cap < 1:
            raise ValueError("in_flight_cap must be >= 1")


class ChatProvider(Protocol):
    model_id: str

    def complete(self, system: str, user: str, temperature: float | None = None) -> str: ...


class EmbeddingProvider(Protocol):
    model_id: str

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


def _request_with_retries(
    cfg: ProviderConfig,
    url: str,
    payload: dict,
    transport: httpx.BaseTransport | None,
    sleep: Callable[[float], None],
    rng: random.Random,
    limiter: "threading.BoundedSemaphore | None" = None,
) -> dict:
    headers = {"Content-Type": "application/json"}
    if cfg.api_key_env:
        key = os.environ.get(cfg.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
    attempts = 1 + max(cfg.max_retries, 0)
    last_error: Exception | None = None
    with httpx.Client(timeout=cfg.timeout, transport=transport) as client:
        for attempt in range(attempts):
            if attempt > 0:
                # Exponential backoff with full jitter.
                sleep(rng.uniform(0.0, BACKOFF_BASE_SECONDS * 2 ** (attempt - 1)))
            try:
                if limiter is not None:
                    with limiter:
                        response = client.post(url, json=payload, headers=headers)
                else:
                    response = client.post(url, json=payload, headers=headers)
            except httpx.TimeoutException as exc:
                last_error = exc
                logger.warning("provider %s timed out (attempt %d/%d)", cfg.name, attempt + 1, attempts)
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"provider {cfg.name} rejected credentials ({response.status_code})")
            if response.status_code in TRANSIENT_STATUSES:
                last_error = ProviderError(f"status {response.status_code}")
                logger.warning(
                    "provider %s transient failure %d (attempt %d/%d)",
                    cfg.name, response.status_code, attempt + 1, attempts,
                )
                continue
            if response.status_code >= 400:
                raise ProviderError(f"provider {cfg.name} returned status {response.status_code}")
            try:
                return response.json()
            except ValueError as exc:
                raise MalformedResponseError(f"provider {cfg.name} returned non-JSON body") from exc
    raise TransientExhaustedError(
        f"provider {cfg.name} failed after {attempts} attempts: {last_error}"
    )


class OpenAICompatChatClient:
    """Chat completions over the OpenAI-compatible wire shape."""

    def __init__(
        self,
        cfg: ProviderConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ) -> None:
        if cfg.kind != "chat":
            raise ValueError(f"expected a chat provider config, got kind={cfg.kind!r}")
        self.cfg = cfg
        self.model_id = cfg.model
        self._transport = transport
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._limiter = threading.BoundedSemaphore(cfg.in_flight_cap)

    def complete(self, system: str, user: str, temperature: float | None = None) -> str:
        payload = {
            "model": self.cfg.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.cfg.temperature if temperature is None else temperature,
        }
        url = self.cfg.base_url.rstrip("/") + "/chat/completions"
        body = _request_with_retries(
            self.cfg, url, payload, self._transport, self._sleep, self._rng, self._limiter
        )
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected chat response shape from {self.cfg.name}") from exc
        if not isinstance(content, str):
            raise MalformedResponseError(f"chat content is not text from {self.cfg.name}")
        return content


class OpenAICompatEmbeddingClient:
    """Embeddings over the OpenAI-compatible wire shape, batched transparently."""

    def __init__(
        self,
        cfg: ProviderConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ) -> None:
        if cfg.kind != "embedding":
            raise ValueError(f"expected an embedding provider config, got kind={cfg.kind!r}")
        self.cfg = cfg
        self.model_id = cfg.model
        self._transport = transport
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._limiter = threading.BoundedSemaphore(cfg.in_flight_cap)

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            raise ValueError("embed requires at least one text")
        url = self.cfg.base_url.rstrip("/") + "/embeddings"
        vectors: list[list[float]] = []
        for i in range(0, len(texts), EMBED_BATCH_SIZE):
            batch = list(texts[i : i + EMBED_BATCH_SIZE])
            payload = {"model": self.cfg.model, "input": batch}
            body = _request_with_retries(
                self.cfg, url, payload, self._transport, self._sleep, self._rng, self._limiter
            )
            try:
                rows = sorted(body["data"], key=lambda d: d["index"])
                batch_vectors = [[float(x) for x in row["embedding"]] for row in rows]
            except (KeyError, TypeError) as exc:
                raise MalformedResponseError(
                    f"unexpected embeddings response shape from {self.cfg.name}"
                ) from exc
            if len(batch_vectors) != len(batch):
                raise MalformedResponseError(
                    f"provider {self.cfg.name} returned {len(batch_vectors)} vectors for {len(batch)} inputs"
                )
            vectors.extend(batch_vectors)
        dims = {len(v) for v in vectors}
        if len(dims) != 1:
            raise MalformedResponseError(f"inconsistent embedding dimensions: {sorted(dims)}")
        return vectors


@dataclass
class MockChatProvider:
    """Canned chat provider: first fixture whose matcher substring occurs in the user prompt wins."""

    fixtures: list[tuple[str, str]] = field(default_factory=list)
    default_reply: str = ""
    model_id: str = "mock-chat"

    def complete(self, system: str, user: str, temperature: float | None = None) -> str:
        for matcher, reply in self.fixtures:
            if matcher in user:
                return reply
        return self.default_reply


def mock_chat_provider(
    fixtures: Sequence[tuple[str, str]], default_reply: str = ""
) -> MockChatProvider:
    return MockChatProvider(fixtures=list(fixtures), default_reply=default_reply)


class HashingEmbedder:
    """Deterministic offline embedder: content-hash-seeded pseudo-random unit vectors.

    Shipped as part of the library (not just tests) so the demo pipeline
    runs with zero network access.
    """

    def __init__(self, dimension: int = 8) -> None:
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.model_id = f"hash-embed-{dimension}d"

    def _vector(self, text: str) -> list[float]:
        raw: list[float] = []
        counter = 0
        while len(raw) < self.dimension:
            digest = hashlib.sha256(f"{counter}\x00{text}".encode("utf-8")).digest()
            for i in range(0, len(digest) - 7, 8):
                value = int.from_bytes(digest[i : i + 8], "big")
                raw.append(value / 2**63 - 1.0)  # map to [-1, 1)
            counter += 1
        raw = raw[: self.dimension]
        norm = math.sqrt(sum(x * x for x in raw))
        if norm == 0.0:
            raw[0] = 1.0
            norm = 1.0
        return [x / norm for x in raw]

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            raise ValueError("embed requires at least one text")
        return [self._vector(t) for t in texts]
