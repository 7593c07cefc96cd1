"""Embedding backends producing 1024-dimensional vectors.

Two interchangeable backends: an HTTP client for a real embedding server
(``POST {"model": ..., "texts": [...]}`` returning ``{"vectors": [[...]]}``)
and a deterministic hash-seeded mock for offline runs.  Batch embedding
always sub-batches requests and keeps output aligned with input order.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
import requests

from .errors import BackendRefused, BackendTimeout, BackendUnreachable, DimensionMismatch, InvalidInput

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 1024

TOKEN_ENV_VAR = "SCORERAG_EMBEDDING_TOKEN"


@dataclass(frozen=True)
class EmbeddingBackendConfig:
    endpoint_url: str = ""
    model_name: str = "multilingual-e5-large"
    batch_size: int = 1000
    device_hint: str | None = None
    # optional instruction prefixes; default none
    query_prefix: str = ""
    passage_prefix: str = ""
    timeout_secs: float = 60.0
    retries: int = 3
    backoff_base_secs: float = 0.5

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidInput(f"batch_size must be >= 1, got {self.batch_size}")


class EmbeddingBackend(Protocol):
    def embed(self, texts: Sequence[str]) -> list[np.ndarray]: ...


def mock_embed(text: str) -> np.ndarray:
    """Deterministic unit-norm vector derived from a seeded hash of ``text``.

    Equal texts map to equal vectors across process restarts; similar texts
    are not required to be near each other.
    """
    if not text:
        raise InvalidInput("cannot embed empty text")
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=16).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    vec = rng.standard_normal(EMBEDDING_DIM)
    return vec / np.linalg.norm(vec)


class MockEmbeddingBackend:
    """Offline stand-in for the embedding server."""

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [mock_embed(t) for t in texts]


class HttpEmbeddingBackend:
    """Client for a minimal JSON embedding service."""

    def __init__(self, config: EmbeddingBackendConfig):
        if not config.endpoint_url:
            raise InvalidInput("HTTP embedding backend requires endpoint_url")
        self.config = config

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        payload = {"model": self.config.model_name, "texts": list(texts)}
        if self.config.device_hint:
            payload["device"] = self.config.device_hint
        headers = {}
        token = os.environ.get(TOKEN_ENV_VAR)
        if token:
            headers["Authorization"] = f"Bearer {token}"

        response = _post_with_retries(
            self.config.endpoint_url,
            payload,
            headers=headers,
            timeout=self.config.timeout_secs,
            retries=self.config.retries,
            backoff_base=self.config.backoff_base_secs,
        )
        try:
            vectors = response.json()["vectors"]
        except (ValueError, KeyError) as exc:
            raise BackendRefused(
                f"embedding server returned malformed body: {exc}",
                status_code=response.status_code,
                body=response.text[:500],
            ) from exc
        if len(vectors) != len(texts):
            raise BackendRefused(
                f"embedding server returned {len(vectors)} vectors for {len(texts)} texts"
            )
        return [np.asarray(v, dtype=np.float64) for v in vectors]


def _post_with_retries(url, payload, *, headers, timeout, retries, backoff_base):
    last_exc: Exception | None = None
    for attempt in range(retries):
        if attempt:
            time.sleep(backoff_base * (2 ** (attempt - 1)))
        try:
            response = requests.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.Timeout as exc:
            last_exc = exc
            logger.warning("request to %s timed out (attempt %d/%d)", url, attempt + 1, retries)
            continue
        except requests.ConnectionError as exc:
            last_exc = exc
            logger.warning("request to %s failed (attempt %d/%d): %s", url, attempt + 1, retries, exc)
            continue
        if not response.ok:
            raise BackendRefused(
                f"{url} answered {response.status_code}",
                status_code=response.status_code,
                body=response.text[:500],
            )
        return response
    if isinstance(last_exc, requests.Timeout):
        raise BackendTimeout(f"{url} timed out after {retries} attempts") from last_exc
    raise BackendUnreachable(f"could not reach {url} after {retries} attempts") from last_exc


def embed_batch(
    texts: Sequence[str],
    backend: EmbeddingBackend,
    batch_size: int = 1000,
) -> list[np.ndarray]:
    """Embed ``texts`` in sub-batches of at most ``batch_size``.

    Output is order-aligned with input and every vector is validated to be
    finite and exactly 1024-dimensional.
    """
    if not texts:
        raise InvalidInput("embed_batch requires at least one text")
    if any(not t for t in texts):
        raise InvalidInput("embed_batch texts must all be non-empty")
    if batch_size < 1:
        raise InvalidInput(f"batch_size must be >= 1, got {batch_size}")

    out: list[np.ndarray] = []
    for start in range(0, len(texts), batch_size):
        sub = texts[start : start + batch_size]
        vectors = backend.embed(sub)
        if len(vectors) != len(sub):
            raise BackendRefused(
                f"backend returned {len(vectors)} vectors for a sub-batch of {len(sub)}"
            )
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (EMBEDDING_DIM,):
                raise DimensionMismatch(
                    f"expected {EMBEDDING_DIM}-dim vectors, got shape {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise DimensionMismatch("backend returned non-finite vector components")
            out.append(arr)
    return out


def backend_from_config(config: EmbeddingBackendConfig, kind: str) -> EmbeddingBackend:
    """Build the configured backend; ``kind`` is ``"mock"`` or ``"http"``."""
    if kind == "mock":
        return MockEmbeddingBackend()
    if kind == "http":
        return HttpEmbeddingBackend(config)
    raise InvalidInput(f"unknown embedding backend kind {kind!r}")
