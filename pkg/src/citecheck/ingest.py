"""Reference-document acquisition and normalization.

Documents arrive as local files or http(s) URLs in pdf, txt, or markdown
form and are reduced to plain text. PDF extraction is delegated to a
pluggable extractor (bytes -> text); txt and markdown pass through
verbatim. When extraction yields nothing but bibliographic metadata
carries an abstract, the abstract stands in for the full text and the
document is flagged abstract_only.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol
from urllib.parse import urlparse

import httpx

logger = logging.getLogger(__name__)

FORMATS = ("pdf", "txt", "markdown")
MAX_DOWNLOAD_BYTES = 50 * 1024 * 1024
FETCH_TIMEOUT_SECONDS = 60.0

_EXTENSION_FORMATS = {
    ".pdf": "pdf",
    ".txt": "txt",
    ".text": "txt",
    ".md": "markdown",
    ".markdown": "markdown",
}
_CONTENT_TYPE_FORMATS = {
    "application/pdf": "pdf",
    "text/plain": "txt",
    "text/markdown": "markdown",
}


class IngestError(Exception):
    """Base class for ingestion failures."""


class FetchError(IngestError):
    """Network failure, bad scheme, non-2xx status, or oversized response."""

    def __init__(self, message: str, status_code: int | None = None) -> None:
        super().__init__(message)
        self.status_code = status_code


class ExtractionError(IngestError):
    """Undecodable bytes, extractor failure, or empty extraction result."""


class FormatError(IngestError):
    """Document format could not be determined or is unsupported."""


@dataclass(frozen=True)
class BiblioMetadata:
    title: str | None = None
    authors: tuple[str, ...] | None = None
    year: int | None = None
    venue: str | None = None
    abstract: str | None = None

    def __post_init__(self) -> None:
        if self.year is not None and not (1000 <= self.year <= 9999):
            raise ValueError(f"year must be a 4-digit positive integer, got {self.year}")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "authors": list(self.authors) if self.authors is not None else None,
            "year": self.year,
            "venue": self.venue,
            "abstract": self.abstract,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BiblioMetadata":
        return cls(
            title=data.get("title"),
            authors=tuple(data["authors"]) if data.get("authors") is not None else None,
            year=data.get("year"),
            venue=data.get("venue"),
            abstract=data.get("abstract"),
        )


@dataclass(frozen=True)
class ReferenceDocument:
    doc_id: str
    source: str
    format: str
    text: str
    metadata: BiblioMetadata | None = None
    ingested_at: str = ""
    abstract_only: bool = False

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "source": self.source,
            "format": self.format,
            "text": self.text,
            "metadata": self.metadata.to_dict() if self.metadata is not None else None,
            "ingested_at": self.ingested_at,
            "abstract_only": self.abstract_only,
            "content_hash": self.content_hash,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReferenceDocument":
        return cls(
            doc_id=data["doc_id"],
            source=data["source"],
            format=data["format"],
            text=data["text"],
            metadata=BiblioMetadata.from_dict(data["metadata"]) if data.get("metadata") else None,
            ingested_at=data.get("ingested_at", ""),
            abstract_only=data.get("abstract_only", False),
        )


class PdfExtractor(Protocol):
    """Anything that turns PDF bytes into plain text."""

    def extract(self, data: bytes) -> str: ...


def fetch_url(
    url: str,
    transport: httpx.BaseTransport | None = None,
    max_bytes: int = MAX_DOWNLOAD_BYTES,
    timeout: float = FETCH_TIMEOUT_SECONDS,
) -> tuple[bytes, str]:
    """Download a URL; returns (body, declared content type)."""
    scheme = urlparse(url).scheme
    if scheme not in ("http", "https"):
        raise FetchError(f"unsupported URL scheme {scheme!r} (http and https only)")
    try:
        with httpx.Client(timeout=timeout, transport=transport, follow_redirects=True) as client:
            response = client.get(url)
    except httpx.HTTPError as exc:
        raise FetchError(f"network failure fetching {url}: {exc}") from exc
    if not (200 <= response.status_code < 300):
        raise FetchError(
            f"fetch of {url} returned status {response.status_code}",
            status_code=response.status_code,
        )
    body = response.content
    if len(body) > max_bytes:
        raise FetchError(f"response from {url} exceeds the {max_bytes}-byte cap ({len(body)} bytes)")
    content_type = response.headers.get("content-type", "").split(";")[0].strip()
    return body, content_type


def extract_text(data: bytes, format: str, pdf_extractor: PdfExtractor | None = None) -> str:
    """Reduce raw bytes to plain text for the given format."""
    if format not in FORMATS:
        raise FormatError(f"unsupported format {format!r}; expected one of {FORMATS}")
    if format in ("txt", "markdown"):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ExtractionError(f"bytes are not valid UTF-8: {exc}") from exc
    if pdf_extractor is None:
        raise ExtractionError("pdf input requires a configured PDF extractor")
    try:
        text = pdf_extractor.extract(data)
    except Exception as exc:
        raise ExtractionError(f"PDF extractor failed: {exc}") from exc
    if not text:
        raise ExtractionError("PDF extractor returned an empty result")
    return text


def _infer_format(source: str, content_type: str | None) -> str:
    suffix = Path(urlparse(source).path if "://" in source else source).suffix.lower()
    if suffix in _EXTENSION_FORMATS:
        return _EXTENSION_FORMATS[suffix]
    if content_type and content_type in _CONTENT_TYPE_FORMATS:
        return _CONTENT_TYPE_FORMATS[content_type]
    raise FormatError(
        f"cannot infer format of {source!r}"
        + (f" (content type {content_type!r})" if content_type else "")
    )


def _build_document(
    source: str,
    data: bytes,
    format: str,
    metadata: BiblioMetadata | None,
    pdf_extractor: PdfExtractor | None,
) -> ReferenceDocument:
    abstract_only = False
    try:
        text = extract_text(data, format, pdf_extractor=pdf_extractor)
    except ExtractionError:
        if metadata is not None and metadata.abstract:
            text = ""
        else:
            raise
    if not text.strip():
        if metadata is not None and metadata.abstract:
            text = metadata.abstract
            abstract_only = True
            logger.info("document %s has no extractable text; using abstract as fallback", source)
        else:
            raise ExtractionError(f"document {source} yielded no text")

    # Content-derived id: identical text maps to one document regardless of
    # where it came from, so repeat ingests are idempotent.
    doc_id = "doc-" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    return ReferenceDocument(
        doc_id=doc_id,
        source=source,
        format=format,
        text=text,
        metadata=metadata,
        ingested_at=datetime.now(timezone.utc).isoformat(),
        abstract_only=abstract_only,
    )


def ingest_document(
    source: str,
    format_hint: str | None = None,
    metadata: BiblioMetadata | None = None,
    store: "DocumentStore | None" = None,
    pdf_extractor: PdfExtractor | None = None,
    transport: httpx.BaseTransport | None = None,
) -> ReferenceDocument:
    """Acquire a document from a path or URL and normalize it to text."""
    content_type = None
    if urlparse(source).scheme in ("http", "https"):
        data, content_type = fetch_url(source, transport=transport)
    else:
        path = Path(source)
        if not path.is_file():
            raise FetchError(f"no such file: {source}")
        data = path.read_bytes()

    format = format_hint or _infer_format(source, content_type)
    if format not in FORMATS:
        raise FormatError(f"unsupported format {format!r}; expected one of {FORMATS}")
    document = _build_document(source, data, format, metadata, pdf_extractor)
    if store is not None:
        store.put(document)
    return document


def ingest_bytes(
    name: str,
    data: bytes,
    format_hint: str | None = None,
    metadata: BiblioMetadata | None = None,
    store: "DocumentStore | None" = None,
    pdf_extractor: PdfExtractor | None = None,
) -> ReferenceDocument:
    """Ingest an in-memory upload; the name is used for format inference."""
    format = format_hint or _infer_format(name, None)
    if format not in FORMATS:
        raise FormatError(f"unsupported format {format!r}; expected one of {FORMATS}")
    document = _build_document(f"upload:{name}", data, format, metadata, pdf_extractor)
    if store is not None:
        store.put(document)
    return document


class DocumentStore:
    """Line-delimited JSON store, one record per document.

    Reads are lock-free against the in-memory map; writes are serialized
    and appended to the backing file. Re-putting a doc_id replaces the
    in-memory entry; the newest record for an id wins on reload.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._docs: dict[str, ReferenceDocument] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        doc = ReferenceDocument.from_dict(json.loads(line))
                        self._docs[doc.doc_id] = doc

    def put(self, document: ReferenceDocument) -> None:
        with self._lock:
            self._docs[document.doc_id] = document
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(document.to_dict()) + "\n")

    def get(self, doc_id: str) -> ReferenceDocument:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise KeyError(f"no document with id {doc_id!r}") from None

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._docs

    def ids(self) -> list[str]:
        return sorted(self._docs)
