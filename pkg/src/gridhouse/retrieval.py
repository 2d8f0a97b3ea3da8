"""In-context example retrieval by fused language + environment similarity.

Given a query instruction and a textualized snapshot of what the agent can see
at command time, every training example is scored on both channels with cosine
similarity; the two score vectors are sum-normalized, weighted, and added, and
the top-k examples by the fused score feed the prompt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .embeddings import EmbeddingProvider, EmbeddingVector, cosine_similarity


class RetrievalError(Exception):
    pass


class LengthMismatch(RetrievalError):
    pass


class DegenerateSimilarities(RetrievalError):
    """Similarity scores cannot be sum-normalized (non-finite or zero mass)."""


@dataclass(frozen=True)
class SimilarityWeights:
    w_l: float = 1.0
    w_e: float = 1.0

    def __post_init__(self):
        if self.w_l < 0 or self.w_e < 0:
            raise ValueError("similarity weights must be nonnegative")
        if self.w_l + self.w_e <= 0:
            raise ValueError("at least one similarity weight must be positive")

    @classmethod
    def language_only(cls) -> "SimilarityWeights":
        return cls(w_l=1.0, w_e=0.0)


def scene_descriptor(visible_classes: Iterable[str]) -> str:
    """Canonical text listing of the visible class set.

    Lexicographically sorted and comma-separated so that identical sets always
    produce identical text (and therefore identical embeddings).
    """
    names = sorted(set(visible_classes))
    if not names:
        return "scene:"
    return "scene: " + ", ".join(names)


def _normalized(scores: np.ndarray, label: str) -> np.ndarray:
    if not np.all(np.isfinite(scores)):
        raise DegenerateSimilarities(f"{label} similarities contain non-finite values")
    if np.min(scores) <= 0.0:
        # Cosine scores can be nonpositive, which would break sum-normalization;
        # shifting by 1 - min makes every entry >= 1 and preserves the ranking.
        scores = scores + (1.0 - np.min(scores))
    total = float(np.sum(scores))
    if total <= 0.0:
        raise DegenerateSimilarities(f"{label} similarities have nonpositive sum")
    return scores / total


def fused_similarity(s_l: Sequence[float], s_e: Sequence[float],
                     weights: SimilarityWeights) -> np.ndarray:
    """Weighted sum of the per-channel sum-normalized similarity vectors.

    The i-th fused score is ``w_l * s_l[i]/sum(s_l) + w_e * s_e[i]/sum(s_e)``,
    so the fused vector always sums to ``w_l + w_e``.
    """
    lang = np.asarray(s_l, dtype=float)
    env = np.asarray(s_e, dtype=float)
    if lang.ndim != 1 or env.ndim != 1:
        raise LengthMismatch("similarity inputs must be 1-D")
    if lang.size != env.size:
        raise LengthMismatch(f"similarity vectors differ in length: {lang.size} vs {env.size}")
    if lang.size == 0:
        raise LengthMismatch("similarity vectors must be nonempty")
    return weights.w_l * _normalized(lang, "language") + weights.w_e * _normalized(env, "environment")


@dataclass(frozen=True)
class RetrievalEntry:
    """A training example's precomputed embeddings."""

    episode_id: str
    language_vec: EmbeddingVector
    env_vec: EmbeddingVector


def retrieve_top_k(query_lang_vec: EmbeddingVector, query_env_vec: EmbeddingVector,
                   entries: Sequence[RetrievalEntry], weights: SimilarityWeights,
                   k: int) -> list[str]:
    """Episode ids of the k entries with the highest fused similarity.

    Ties are broken by lexicographic episode id so retrieval is deterministic.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not entries:
        raise RetrievalError("retrieval library is empty")
    if k > len(entries):
        raise ValueError(f"k={k} exceeds the {len(entries)}-entry library")
    s_l = [cosine_similarity(query_lang_vec, e.language_vec) for e in entries]
    s_e = [cosine_similarity(query_env_vec, e.env_vec) for e in entries]
    fused = fused_similarity(s_l, s_e, weights)
    order = sorted(range(len(entries)), key=lambda i: (-fused[i], entries[i].episode_id))
    return [entries[i].episode_id for i in order[:k]]


def build_entry(episode_id: str, instruction_text: str, visible_classes: Iterable[str],
                language_provider: EmbeddingProvider,
                environment_provider: EmbeddingProvider) -> RetrievalEntry:
    return RetrievalEntry(
        episode_id=episode_id,
        language_vec=language_provider.embed_text(instruction_text),
        env_vec=environment_provider.embed_text(scene_descriptor(visible_classes)),
    )
