#!/usr/bin/env python3
"""Hybrid retrieval walkthrough: BM25 + dense cosine + reranking.

Builds both indexes over the sample reference, runs a claim query through
each retriever separately, fuses the candidate sets, and reranks with the
offline lexical scorer to pick the final evidence passages.
"""

from pathlib import Path

from citecheck.chunker import ChunkConfig, split
from citecheck.index import build_dense_index, build_sparse_index, dense_search, sparse_search
from citecheck.llm_gateway import HashingEmbedder
from citecheck.retrieval import LexicalReranker, RetrievalConfig, hybrid_retrieve, rerank

text = (Path(__file__).parent / "sample_reference.txt").read_text()
chunks = split(text, ChunkConfig(), doc_id="doc-sample")
print(f"indexing {len(chunks)} chunks")

embedder = HashingEmbedder(dimension=8)  # deterministic offline embedder
dense = build_dense_index(chunks, embedder)
sparse = build_sparse_index(chunks)

claim = "Exercise reduces cardiovascular risk by 30%"
print(f"\nclaim: {claim}\n")

print("sparse (BM25) hits:")
for hit in sparse_search(sparse, claim, k=5):
    print(f"  chunk {hit.chunk_ref[1]}  score {hit.score:.4f}")

print("\ndense (cosine) hits:")
query_vector = embedder.embed([claim])[0]
for hit in dense_search(dense, query_vector, k=5):
    print(f"  chunk {hit.chunk_ref[1]}  score {hit.score:+.4f}")

cfg = RetrievalConfig(k_dense=15, k_sparse=15, k_final=3)
candidates = hybrid_retrieve(claim, dense, sparse, embedder, cfg)
print(f"\ndeduplicated union: {sorted(c.index for c in candidates)}")

evidence = rerank(LexicalReranker(), claim, candidates, cfg.k_final)
print("\ntop passages after reranking:")
for item in evidence:
    snippet = " ".join(item.chunk.text.split())[:80]
    print(f"  rank {item.rank} (relevance {item.relevance:.3f}, chunk {item.chunk.index}): {snippet}...")
