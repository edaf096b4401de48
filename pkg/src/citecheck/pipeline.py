"""End-to-end verification pipeline and persistence.

One call runs the full chain: resolve the reference document (store,
path, or URL), chunk it, build or reuse its indexes, preprocess the
citation into a claim, retrieve and rerank evidence, and ask the verifier
for the verdict. Results are persisted under deterministic verification
ids so identical requests against identical configuration map to the
same record.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from citecheck.chunker import split
from citecheck.claims import PreprocessError, RawCitation, preprocess_citation, rule_based_claim
from citecheck.config import PipelineConfig
from citecheck.index import (
    DenseIndex,
    SparseIndex,
    build_dense_index,
    build_sparse_index,
    load_indexes,
    save_indexes,
)
from citecheck.ingest import (
    BiblioMetadata,
    DocumentStore,
    ReferenceDocument,
    ingest_bytes,
    ingest_document,
)
from citecheck.llm_gateway import ProviderError
from citecheck.retrieval import hybrid_retrieve, rerank
from citecheck.verifier import VerificationResult, VerifyContext, verify

logger = logging.getLogger(__name__)


class PipelineError(Exception):
    """Failure in a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class RequestShapeError(Exception):
    """The verification request violated its shape contract."""


@dataclass(frozen=True)
class VerificationRequest:
    citation: str
    doc_id: str | None = None
    source: str | None = None
    metadata: BiblioMetadata | None = None
    overrides: dict | None = None

    def __post_init__(self) -> None:
        if not self.citation or not self.citation.strip():
            raise RequestShapeError("citation must be non-empty")
        if (self.doc_id is None) == (self.source is None):
            raise RequestShapeError("exactly one of doc_id or source must be provided")


class VerificationStore:
    """Line-delimited JSON store of verification records; newest id wins."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        record = json.loads(line)
                        self._records[record["verification_id"]] = record

    def put(self, record: dict) -> None:
        with self._lock:
            self._records[record["verification_id"]] = record
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")

    def get(self, verification_id: str) -> dict:
        try:
            return self._records[verification_id]
        except KeyError:
            raise KeyError(f"no verification with id {verification_id!r}") from None

    def __contains__(self, verification_id: str) -> bool:
        return verification_id in self._records

    def ids(self) -> list[str]:
        return sorted(self._records)


class Pipeline:
    """Holds shared stores and per-config providers; thread-safe."""

    def __init__(self, cfg: PipelineConfig, pdf_extractor=None) -> None:
        self.cfg = cfg
        self.pdf_extractor = pdf_extractor
        cfg.store_dir.mkdir(parents=True, exist_ok=True)
        self.documents = DocumentStore(cfg.store_dir / "documents.jsonl")
        self.verifications = VerificationStore(cfg.store_dir / "verifications.jsonl")
        self._index_cache: dict[tuple, tuple[SparseIndex, DenseIndex]] = {}
        self._cache_lock = threading.Lock()

    def ingest(self, source: str, format_hint: str | None = None,
               metadata: BiblioMetadata | None = None) -> ReferenceDocument:
        return ingest_document(
            source,
            format_hint=format_hint,
            metadata=metadata,
            store=self.documents,
            pdf_extractor=self.pdf_extractor,
        )

    def ingest_bytes(self, name: str, data: bytes, format_hint: str | None = None,
                     metadata: BiblioMetadata | None = None) -> ReferenceDocument:
        return ingest_bytes(
            name,
            data,
            format_hint=format_hint,
            metadata=metadata,
            store=self.documents,
            pdf_extractor=self.pdf_extractor,
        )

    def _indexes_for(self, doc: ReferenceDocument, cfg: PipelineConfig,
                     embedder) -> tuple[SparseIndex, DenseIndex]:
        key = (doc.content_hash, cfg.chunking.max_size, cfg.chunking.overlap,
               tuple(cfg.chunking.separators), embedder.model_id)
        with self._cache_lock:
            cached = self._index_cache.get(key)
        if cached is not None:
            return cached
        persist_path = None
        if cfg.persist_indexes:
            digest = hashlib.sha256(repr(key).encode("utf-8")).hexdigest()[:16]
            persist_path = cfg.store_dir / "indexes" / f"{digest}.json"
            if persist_path.exists():
                indexes = load_indexes(persist_path)
                with self._cache_lock:
                    self._index_cache[key] = indexes
                return indexes
        chunks = split(doc.text, cfg.chunking, doc_id=doc.doc_id)
        sparse = build_sparse_index(chunks)
        dense = build_dense_index(chunks, embedder)
        indexes = (sparse, dense)
        if persist_path is not None:
            persist_path.parent.mkdir(parents=True, exist_ok=True)
            save_indexes(persist_path, sparse, dense)
        with self._cache_lock:
            self._index_cache[key] = indexes
        return indexes

    def run(self, request: VerificationRequest) -> tuple[str, VerificationResult]:
        cfg = self.cfg if not request.overrides else self.cfg.with_overrides(request.overrides)
        chat = cfg.build_chat()
        embedder = cfg.build_embedder()
        reranker = cfg.build_reranker()

        # Stage: document resolution (ingest when inline).
        try:
            if request.doc_id is not None:
                doc = self.documents.get(request.doc_id)
            else:
                doc = self.ingest(request.source, metadata=request.metadata)
        except Exception as exc:
            raise PipelineError("ingest", exc) from exc

        # Stage: chunk + index (cached per content hash / chunking / embedder).
        try:
            sparse, dense = self._indexes_for(doc, cfg, embedder)
        except Exception as exc:
            raise PipelineError("index", exc) from exc

        # Stage: citation preprocessing; lenient mode falls back to rules.
        citation = RawCitation(text=request.citation)
        try:
            if cfg.preprocess == "rules":
                claim = rule_based_claim(citation)
            else:
                try:
                    claim = preprocess_citation(chat, citation)
                except (PreprocessError, ProviderError) as exc:
                    if cfg.mode == "strict":
                        raise
                    logger.warning("claim preprocessing failed (%s); falling back to rules", exc)
                    claim = rule_based_claim(citation)
        except Exception as exc:
            raise PipelineError("preprocess", exc) from exc

        # Stage: hybrid retrieval + rerank.
        try:
            candidates = hybrid_retrieve(claim.text, dense, sparse, embedder, cfg.retrieval)
            evidence = rerank(reranker, claim.text, candidates, cfg.retrieval.k_final)
        except Exception as exc:
            raise PipelineError("retrieve", exc) from exc

        # Stage: verdict.
        metadata = request.metadata if request.metadata is not None else doc.metadata
        try:
            result = verify(
                chat,
                claim,
                evidence,
                metadata,
                mode=cfg.mode,
                temperature=cfg.verify_temperature,
                context=VerifyContext(
                    doc_id=doc.doc_id,
                    embedding_model=embedder.model_id,
                    reranker_id=reranker.scorer_id,
                    abstract_only=doc.abstract_only,
                    rule_based=claim.rule_based,
                    extra_warnings=claim.warnings,
                ),
            )
        except Exception as exc:
            raise PipelineError("verify", exc) from exc

        verification_id = "ver-" + hashlib.sha256(
            f"{doc.content_hash}\n{request.citation}\n{cfg.fingerprint()}".encode("utf-8")
        ).hexdigest()[:16]
        self.verifications.put(
            {
                "verification_id": verification_id,
                "doc_id": doc.doc_id,
                "citation": request.citation,
                "claim": claim.text,
                "result": result.to_dict(),
            }
        )
        return verification_id, result


def run_pipeline(request: VerificationRequest, cfg: PipelineConfig,
                 pdf_extractor=None) -> tuple[str, VerificationResult]:
    """One-shot convenience wrapper around a fresh Pipeline."""
    return Pipeline(cfg, pdf_extractor=pdf_extractor).run(request)
