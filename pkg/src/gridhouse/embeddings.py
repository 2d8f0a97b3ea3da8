"""Embedding providers and cosine similarity.

All similarity math in the planner and the replanner runs through the provider
interface defined here. The default provider is an offline trigram-hash
embedder (deterministic, no model weights); a fixture-table provider serves
curated vectors for reproducing qualitative replacements, and an HTTP provider
can delegate to any hosted embedding endpoint.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class EmbeddingError(Exception):
    pass


class DimensionMismatch(EmbeddingError):
    """Vectors come from different providers or have different dimensions."""


class ZeroVector(EmbeddingError):
    pass


class EmptyText(EmbeddingError):
    pass


class InconsistentDimension(EmbeddingError):
    """A fixture table mixes vector dimensions."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    provider_id: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise EmbeddingError("embedding must be a nonempty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise EmbeddingError("embedding contains non-finite entries")
        if not np.any(arr):
            raise ZeroVector("provider produced an all-zero vector")

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Standard cosine similarity; requires matching provider and dimension."""
    if a.provider_id != b.provider_id:
        raise DimensionMismatch(
            f"vectors from different providers: {a.provider_id!r} vs {b.provider_id!r}"
        )
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimension {a.dimension} vs {b.dimension}")
    va, vb = a.as_array(), b.as_array()
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.dot(va, vb) / (na * nb))


class EmbeddingProvider:
    """Interface: deterministic text -> vector mapping with a stable id."""

    id: str = "base"
    dimension: int = 0

    def embed_text(self, text: str) -> EmbeddingVector:
        raise NotImplementedError


DEFAULT_DIMENSION = 64
DEFAULT_SEED = 13


class TrigramHashProvider(EmbeddingProvider):
    """Offline embedder: signed trigram hashing into a fixed-size vector.

    Text is lowercased and wrapped in boundary markers, split into character
    trigrams, and each trigram is hashed (SHA-256, seeded) to a bucket with a
    +/-1 contribution; the bucket accumulator is L2-normalized. Lexically
    similar strings share trigrams and therefore correlate.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION, seed: int = DEFAULT_SEED):
        if dimension < 2:
            raise EmbeddingError("dimension must be at least 2")
        self.dimension = dimension
        self.seed = seed
        self.id = f"trigram-{dimension}-{seed}"
        self._cache: dict[str, EmbeddingVector] = {}
        self._lock = threading.Lock()

    def embed_text(self, text: str) -> EmbeddingVector:
        if not text:
            raise EmptyText("cannot embed empty text")
        with self._lock:
            hit = self._cache.get(text)
        if hit is not None:
            return hit
        padded = f"^{text.lower()}$"
        acc = np.zeros(self.dimension)
        for i in range(len(padded) - 2):
            trigram = padded[i : i + 3]
            digest = hashlib.sha256(f"{self.seed}:{trigram}".encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:4], "big") % self.dimension
            sign = 1.0 if digest[4] & 1 else -1.0
            acc[bucket] += sign
        if not np.any(acc):
            # Cancellation is possible for repeated trigrams; nudge one bucket
            # derived from the whole string so the contract (never all-zero) holds.
            digest = hashlib.sha256(f"{self.seed}|{padded}".encode("utf-8")).digest()
            acc[int.from_bytes(digest[:4], "big") % self.dimension] = 1.0
        vec = EmbeddingVector(values=tuple(acc / np.linalg.norm(acc)), provider_id=self.id)
        with self._lock:
            self._cache[text] = vec
        return vec


def deterministic_text_embedding(text: str, dimension: int = DEFAULT_DIMENSION,
                                 seed: int = DEFAULT_SEED) -> EmbeddingVector:
    return TrigramHashProvider(dimension, seed).embed_text(text)


class FixtureProvider(EmbeddingProvider):
    """Table lookups over curated vectors, falling back to a deterministic embedder.

    Fallback vectors are re-tagged with this provider's id so they remain
    comparable with table vectors of the same dimension.
    """

    def __init__(self, table: dict[str, list[float]], fallback: EmbeddingProvider | None = None,
                 table_id: str = "fixture"):
        if not table:
            raise EmbeddingError("fixture table must not be empty")
        dims = {len(v) for v in table.values()}
        if len(dims) != 1:
            raise InconsistentDimension(f"fixture table mixes dimensions: {sorted(dims)}")
        self.dimension = dims.pop()
        self._fallback = fallback or TrigramHashProvider(self.dimension)
        if self._fallback.dimension != self.dimension:
            raise InconsistentDimension(
                f"fallback dimension {self._fallback.dimension} != table dimension {self.dimension}"
            )
        self.id = f"{table_id}+{self._fallback.id}"
        self._table = {k: tuple(float(x) for x in v) for k, v in table.items()}

    def embed_text(self, text: str) -> EmbeddingVector:
        stored = self._table.get(text)
        if stored is not None:
            return EmbeddingVector(values=stored, provider_id=self.id)
        fallback = self._fallback.embed_text(text)
        return EmbeddingVector(values=fallback.values, provider_id=self.id)

    def table_keys(self) -> list[str]:
        return sorted(self._table)


def fixture_embedding_provider(table: dict[str, list[float]],
                               fallback: EmbeddingProvider | None = None) -> FixtureProvider:
    return FixtureProvider(table, fallback)


def load_fixture_provider(path: str | Path, fallback: EmbeddingProvider | None = None) -> FixtureProvider:
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    return FixtureProvider(table, fallback, table_id=f"fixture:{Path(path).name}")


class HttpEmbeddingProvider(EmbeddingProvider):
    """Remote embedder speaking ``POST {"input": [texts]} -> {"data": [{"embedding": ...}]}``."""

    def __init__(self, endpoint: str, dimension: int, auth_token_env: str | None = None,
                 timeout_s: float = 30.0):
        self.endpoint = endpoint
        self.dimension = dimension
        self.auth_token_env = auth_token_env
        self.timeout_s = timeout_s
        self.id = f"http:{endpoint}"
        self._lock = threading.Lock()

    def embed_text(self, text: str) -> EmbeddingVector:
        import requests

        if not text:
            raise EmptyText("cannot embed empty text")
        headers = {"Content-Type": "application/json"}
        if self.auth_token_env:
            token = os.environ.get(self.auth_token_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        with self._lock:
            resp = requests.post(self.endpoint, json={"input": [text]}, headers=headers,
                                 timeout=self.timeout_s)
        resp.raise_for_status()
        try:
            payload = resp.json()
            values = payload["data"][0]["embedding"]
        except (ValueError, LookupError, TypeError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc
        if len(values) != self.dimension:
            raise DimensionMismatch(
                f"endpoint returned dimension {len(values)}, expected {self.dimension}"
            )
        return EmbeddingVector(values=tuple(float(v) for v in values), provider_id=self.id)


@dataclass
class ProviderBundle:
    """Per-role embedding providers; by default one shared text provider.

    ``language`` embeds instructions, ``environment`` embeds scene descriptors,
    ``replacement`` embeds object class names for plan repair.
    """

    language: EmbeddingProvider
    environment: EmbeddingProvider
    replacement: EmbeddingProvider

    @classmethod
    def shared(cls, provider: EmbeddingProvider) -> "ProviderBundle":
        return cls(language=provider, environment=provider, replacement=provider)
