"""Sparse (BM25) and dense (cosine) indexes over document chunks.

Indexes are built per reference document, held in memory, and immutable
after construction. BM25 uses the non-negative IDF variant
ln(1 + (N - df + 0.5) / (df + 0.5)); dense vectors are stored unit-
normalized so cosine similarity is a plain dot product.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from citecheck.chunker import Chunk

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
INDEX_FORMAT_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Hit:
    """A single search result pointing at a chunk."""

    chunk_ref: tuple[str, int]
    score: float
    source: str  # "dense" or "sparse"


@dataclass(frozen=True)
class SparseIndex:
    """BM25 statistics over a chunk list."""

    chunks: tuple[Chunk, ...]
    doc_freq: dict[str, int]
    term_freqs: tuple[Counter, ...]
    lengths: tuple[int, ...]
    avg_length: float
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B


def build_sparse_index(chunks: Sequence[Chunk], k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> SparseIndex:
    if not chunks:
        raise ValueError("cannot build a sparse index over zero chunks")
    if k1 <= 0 or not (0.0 <= b <= 1.0):
        raise ValueError(f"invalid BM25 parameters k1={k1} b={b}")
    term_freqs = tuple(Counter(tokenize(c.text)) for c in chunks)
    lengths = tuple(sum(tf.values()) for tf in term_freqs)
    doc_freq: dict[str, int] = {}
    for tf in term_freqs:
        for term in tf:
            doc_freq[term] = doc_freq.get(term, 0) + 1
    return SparseIndex(
        chunks=tuple(chunks),
        doc_freq=doc_freq,
        term_freqs=term_freqs,
        lengths=lengths,
        avg_length=sum(lengths) / len(lengths),
        k1=k1,
        b=b,
    )


def idf(index: SparseIndex, term: str) -> float:
    """Non-negative inverse document frequency of a term."""
    n = len(index.chunks)
    df = index.doc_freq.get(term, 0)
    return math.log(1.0 + (n - df + 0.5) / (df + 0.5))


def bm25_score(index: SparseIndex, query_tokens: Sequence[str], chunk_pos: int) -> float:
    tf_map = index.term_freqs[chunk_pos]
    length = index.lengths[chunk_pos]
    norm = index.k1 * (1.0 - index.b + index.b * length / index.avg_length)
    score = 0.0
    for term in query_tokens:
        tf = tf_map.get(term, 0)
        if tf == 0:
            continue
        score += idf(index, term) * tf * (index.k1 + 1.0) / (tf + norm)
    return score


def sparse_search(index: SparseIndex, query: str, k: int) -> list[Hit]:
    """Top-k chunks by BM25 score; zero-scoring chunks are excluded."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    query_tokens = tokenize(query)
    scored = []
    for pos, chunk in enumerate(index.chunks):
        score = bm25_score(index, query_tokens, pos)
        if score > 0.0:
            scored.append((score, chunk.index, chunk.ref))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [Hit(chunk_ref=ref, score=score, source="sparse") for score, _, ref in scored[:k]]


@dataclass(frozen=True)
class DenseIndex:
    """Unit-normalized embedding vectors, one per chunk."""

    chunks: tuple[Chunk, ...]
    vectors: tuple[tuple[float, ...], ...]
    dimension: int
    provider_id: str = ""


def _normalize(vector: Sequence[float]) -> tuple[float, ...]:
    norm = math.sqrt(sum(x * x for x in vector))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return tuple(x / norm for x in vector)


def build_dense_index(chunks: Sequence[Chunk], embedder) -> DenseIndex:
    """Embed every chunk via the provider and store unit-normalized vectors."""
    if not chunks:
        raise ValueError("cannot build a dense index over zero chunks")
    raw = embedder.embed([c.text for c in chunks])
    if len(raw) != len(chunks):
        raise ValueError(f"embedder returned {len(raw)} vectors for {len(chunks)} chunks")
    dims = {len(v) for v in raw}
    if len(dims) != 1:
        raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
    return DenseIndex(
        chunks=tuple(chunks),
        vectors=tuple(_normalize(v) for v in raw),
        dimension=dims.pop(),
        provider_id=getattr(embedder, "model_id", ""),
    )


def dense_search(index: DenseIndex, query_vector: Sequence[float], k: int) -> list[Hit]:
    """Top-k chunks by dot product (cosine under unit norms); ties by chunk index."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if len(query_vector) != index.dimension:
        raise ValueError(
            f"query dimension {len(query_vector)} != index dimension {index.dimension}"
        )
    scored = []
    for chunk, vec in zip(index.chunks, index.vectors):
        score = sum(q * v for q, v in zip(query_vector, vec))
        scored.append((score, chunk.index, chunk.ref))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [Hit(chunk_ref=ref, score=score, source="dense") for score, _, ref in scored[:k]]


def save_indexes(path, sparse: SparseIndex, dense: DenseIndex) -> None:
    """Persist both indexes as one versioned JSON file."""
    payload = {
        "format_version": INDEX_FORMAT_VERSION,
        "chunks": [
            {"doc_id": c.doc_id, "index": c.index, "text": c.text, "start": c.start, "end": c.end}
            for c in sparse.chunks
        ],
        "sparse": {"k1": sparse.k1, "b": sparse.b},
        "dense": {
            "dimension": dense.dimension,
            "provider_id": dense.provider_id,
            "vectors": [list(v) for v in dense.vectors],
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_indexes(path) -> tuple[SparseIndex, DenseIndex]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index format version {version!r}")
    chunks = tuple(Chunk(**c) for c in payload["chunks"])
    sparse = build_sparse_index(chunks, k1=payload["sparse"]["k1"], b=payload["sparse"]["b"])
    dense = DenseIndex(
        chunks=chunks,
        vectors=tuple(tuple(v) for v in payload["dense"]["vectors"]),
        dimension=payload["dense"]["dimension"],
        provider_id=payload["dense"]["provider_id"],
    )
    return sparse, dense
