"""Hybrid retrieval: fuse sparse and dense hits, deduplicate, rerank.

Dense and sparse top-k candidate sets are unioned by (doc_id, chunk index)
with no score mixing; the deduplicated candidates then go through a
reranking scorer that assigns each a relevance in [0, 1], and the top few
become the evidence passed to the verifier.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass
from typing import Protocol, Sequence

import httpx

from citecheck.chunker import Chunk
from citecheck.index import DenseIndex, SparseIndex, dense_search, sparse_search, tokenize
from citecheck.llm_gateway import EmbeddingProvider, MalformedResponseError, ProviderConfig

logger = logging.getLogger(__name__)

DEFAULT_K_DENSE = 15
DEFAULT_K_SPARSE = 15
DEFAULT_K_FINAL = 3


@dataclass(frozen=True)
class RetrievalConfig:
    k_dense: int = DEFAULT_K_DENSE
    k_sparse: int = DEFAULT_K_SPARSE
    k_final: int = DEFAULT_K_FINAL

    def __post_init__(self) -> None:
        if min(self.k_dense, self.k_sparse, self.k_final) <= 0:
            raise ValueError("all retrieval depths must be positive")
        if self.k_final > self.k_dense + self.k_sparse:
            raise ValueError("k_final cannot exceed k_dense + k_sparse")


@dataclass(frozen=True)
class RankedEvidence:
    chunk: Chunk
    relevance: float
    rank: int


class RerankScorer(Protocol):
    scorer_id: str

    def score(self, query: str, passages: Sequence[str]) -> list[float]: ...


class RerankError(Exception):
    """Reranking scorer failure, with candidate context."""


def hybrid_retrieve(
    query: str,
    dense: DenseIndex,
    sparse: SparseIndex,
    embedder: EmbeddingProvider,
    cfg: RetrievalConfig | None = None,
) -> list[Chunk]:
    """Union of dense and sparse top-k hits, deduplicated by chunk ref.

    An empty result is valid: an off-topic query can miss both indexes.
    Candidates are returned in ascending chunk order; ranking is the
    reranker's job.
    """
    cfg = cfg or RetrievalConfig()
    if tuple(c.ref for c in dense.chunks) != tuple(c.ref for c in sparse.chunks):
        raise ValueError("dense and sparse indexes were built over different chunk lists")
    query_vector = embedder.embed([query])[0]
    hits = dense_search(dense, query_vector, cfg.k_dense) + sparse_search(sparse, query, cfg.k_sparse)
    by_ref = {c.ref: c for c in dense.chunks}
    seen = {hit.chunk_ref for hit in hits}
    return [by_ref[ref] for ref in sorted(seen, key=lambda r: (r[0], r[1]))]


def rerank(
    scorer: RerankScorer,
    query: str,
    candidates: Sequence[Chunk],
    k_final: int = DEFAULT_K_FINAL,
) -> list[RankedEvidence]:
    """Score all candidates and keep the top k_final by relevance.

    Ties break toward the lower chunk index, so the output depends only on
    the candidate set, never on arrival order.
    """
    if not candidates:
        return []
    ordered = sorted(candidates, key=lambda c: (c.doc_id, c.index))
    try:
        scores = scorer.score(query, [c.text for c in ordered])
    except Exception as exc:
        raise RerankError(f"reranker failed over {len(ordered)} candidates: {exc}") from exc
    if len(scores) != len(ordered):
        raise RerankError(f"reranker returned {len(scores)} scores for {len(ordered)} candidates")
    ranked = sorted(zip(ordered, scores), key=lambda cs: (-cs[1], cs[0].index))
    return [
        RankedEvidence(chunk=chunk, relevance=score, rank=position)
        for position, (chunk, score) in enumerate(ranked[:k_final], start=1)
    ]


def lexical_rerank_score(query: str, chunk_text: str) -> float:
    """Fraction of unique query terms present in the chunk; 0 for empty queries."""
    query_terms = set(tokenize(query))
    if not query_terms:
        return 0.0
    chunk_terms = set(tokenize(chunk_text))
    return len(query_terms & chunk_terms) / len(query_terms)


class LexicalReranker:
    """Built-in deterministic scorer: unique-term overlap ratio.

    Offline substitute for a remote cross-encoder; keeps tests and demo
    runs free of model downloads.
    """

    scorer_id = "lexical-overlap"

    def score(self, query: str, passages: Sequence[str]) -> list[float]:
        return [lexical_rerank_score(query, p) for p in passages]


class RemoteReranker:
    """Cross-encoder endpoint speaking {"query","passages"} -> {"scores"}."""

    def __init__(
        self,
        cfg: ProviderConfig,
        scores_are_logits: bool = False,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        if cfg.kind != "reranker":
            raise ValueError(f"expected a reranker provider config, got kind={cfg.kind!r}")
        self.cfg = cfg
        self.scores_are_logits = scores_are_logits
        self.scorer_id = cfg.model or cfg.name
        self._transport = transport
        self._limiter = threading.BoundedSemaphore(cfg.in_flight_cap)

    def score(self, query: str, passages: Sequence[str]) -> list[float]:
        with httpx.Client(timeout=self.cfg.timeout, transport=self._transport) as client:
            with self._limiter:
                response = client.post(
                    self.cfg.base_url, json={"query": query, "passages": list(passages)}
                )
            response.raise_for_status()
            body = response.json()
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(passages):
            raise MalformedResponseError(f"reranker {self.cfg.name} returned misaligned scores")
        values = [float(s) for s in scores]
        if self.scores_are_logits:
            values = [1.0 / (1.0 + math.exp(-v)) for v in values]
        return [min(1.0, max(0.0, v)) for v in values]
