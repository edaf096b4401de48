"""Verdict generation: prompt assembly, structured-output parsing, validation.

The verifier sends the processed claim plus top-ranked evidence to a chat
model, expects a single JSON object back (label, confidence, reasoning,
evidence snippets), and defends the contract: snippets must quote chunks
that were actually supplied, labels must come from the closed set, and a
malformed reply gets exactly one repair attempt before the strict/lenient
policy decides between a hard error and an UNCERTAIN fallback.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import Sequence

from citecheck import __version__ as SYSTEM_VERSION
from citecheck.chunker import Chunk
from citecheck.claims import PREPROCESS_PROMPT_VERSION, ProcessedClaim
from citecheck.retrieval import RankedEvidence

logger = logging.getLogger(__name__)

VERIFY_PROMPT_VERSION = "verify_v1"
GUIDANCE_VERSION = "guidance_v1"
# A model-reported snippet relevance this far from the reranker's score for
# the same chunk is suspicious enough to flag.
RELEVANCE_DISAGREEMENT = 0.5


class SupportLabel(Enum):
    """Four-class support verdict with a fixed ordinal scale."""

    UNCERTAIN = 0
    UNSUPPORTED = 1
    PARTIALLY_SUPPORTED = 2
    SUPPORTED = 3

    @property
    def ordinal(self) -> int:
        return self.value

    @property
    def category_name(self) -> str:
        return _CATEGORY_NAMES[self]

    @classmethod
    def parse(cls, raw: str) -> "SupportLabel":
        normalized = raw.strip().upper().replace(" ", "_").replace("-", "_")
        try:
            return cls[normalized]
        except KeyError:
            raise ValueError(f"unknown support label {raw!r}") from None


_CATEGORY_NAMES = {
    SupportLabel.SUPPORTED: "Fully Aligned",
    SupportLabel.PARTIALLY_SUPPORTED: "Partially Aligned",
    SupportLabel.UNSUPPORTED: "Misaligned",
    SupportLabel.UNCERTAIN: "Indeterminate",
}


def _load_guidance() -> dict:
    text = resources.files("citecheck.resources").joinpath(f"{GUIDANCE_VERSION}.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


_GUIDANCE = _load_guidance()


def guidance_for(label: SupportLabel) -> str:
    """Fixed remedial-action text for each label."""
    return _GUIDANCE[label.name]


@dataclass(frozen=True)
class Reasoning:
    summary: str
    points: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class EvidenceSnippet:
    text: str
    relevance: float
    chunk_ref: tuple[str, int]
    char_span: tuple[int, int] | None = None


@dataclass(frozen=True)
class Provenance:
    processed_at: str
    doc_id: str
    chunk_refs: tuple[tuple[str, int], ...]
    system_version: str
    chat_model: str
    embedding_model: str
    reranker_id: str
    abstract_only: bool = False
    rule_based: bool = False
    parse_failed: bool = False
    prompt_versions: tuple[tuple[str, str], ...] = field(default_factory=tuple)
    warnings: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class VerificationResult:
    label: SupportLabel
    confidence: float
    reasoning: Reasoning
    evidence: tuple[EvidenceSnippet, ...]
    guidance: str
    provenance: Provenance

    def to_dict(self) -> dict:
        return {
            "label": self.label.name,
            "confidence": self.confidence,
            "reasoning": {"summary": self.reasoning.summary, "points": list(self.reasoning.points)},
            "evidence": [
                {
                    "text": s.text,
                    "relevance": s.relevance,
                    "chunk_ref": list(s.chunk_ref),
                    "char_span": list(s.char_span) if s.char_span is not None else None,
                }
                for s in self.evidence
            ],
            "guidance": self.guidance,
            "provenance": {
                "processed_at": self.provenance.processed_at,
                "doc_id": self.provenance.doc_id,
                "chunk_refs": [list(r) for r in self.provenance.chunk_refs],
                "system_version": self.provenance.system_version,
                "chat_model": self.provenance.chat_model,
                "embedding_model": self.provenance.embedding_model,
                "reranker_id": self.provenance.reranker_id,
                "abstract_only": self.provenance.abstract_only,
                "rule_based": self.provenance.rule_based,
                "parse_failed": self.provenance.parse_failed,
                "prompt_versions": {k: v for k, v in self.provenance.prompt_versions},
                "warnings": list(self.provenance.warnings),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationResult":
        prov = data["provenance"]
        return cls(
            label=SupportLabel.parse(data["label"]),
            confidence=float(data["confidence"]),
            reasoning=Reasoning(
                summary=data["reasoning"]["summary"],
                points=tuple(data["reasoning"]["points"]),
            ),
            evidence=tuple(
                EvidenceSnippet(
                    text=s["text"],
                    relevance=float(s["relevance"]),
                    chunk_ref=(s["chunk_ref"][0], s["chunk_ref"][1]),
                    char_span=tuple(s["char_span"]) if s.get("char_span") is not None else None,
                )
                for s in data["evidence"]
            ),
            guidance=data["guidance"],
            provenance=Provenance(
                processed_at=prov["processed_at"],
                doc_id=prov["doc_id"],
                chunk_refs=tuple((r[0], r[1]) for r in prov["chunk_refs"]),
                system_version=prov["system_version"],
                chat_model=prov["chat_model"],
                embedding_model=prov["embedding_model"],
                reranker_id=prov["reranker_id"],
                abstract_only=prov["abstract_only"],
                rule_based=prov["rule_based"],
                parse_failed=prov["parse_failed"],
                prompt_versions=tuple(sorted(prov["prompt_versions"].items())),
                warnings=tuple(prov["warnings"]),
            ),
        )


class ParseError(Exception):
    """Structured model output violated the response contract.

    kind is one of "malformed" (no balanced JSON object), "schema"
    (missing or ill-typed field), "label" (label outside the closed set),
    "range" (confidence outside [0, 1]).
    """

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class ParsedSnippet:
    text: str
    relevance: float
    chunk_index: int


@dataclass(frozen=True)
class ParsedVerdict:
    label: SupportLabel
    confidence: float
    reasoning: Reasoning
    evidence: tuple[ParsedSnippet, ...]


def _balanced_objects(raw: str):
    """Yield top-level {...} slices, honoring string literals and escapes."""
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    yield raw[start : i + 1]


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_structured_output(raw: str) -> ParsedVerdict:
    """Parse the model's reply into a verdict, tolerating fences and prose.

    The first balanced JSON object found in the text is used; everything
    around it (code fences, commentary) is ignored.
    """
    obj = None
    for candidate in _balanced_objects(raw):
        try:
            parsed = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(parsed, dict):
            obj = parsed
            break
    if obj is None:
        raise ParseError("malformed", "no balanced JSON object found in model output")

    label_raw = obj.get("label")
    if not isinstance(label_raw, str):
        raise ParseError("schema", "missing or non-string 'label' field")
    try:
        label = SupportLabel.parse(label_raw)
    except ValueError:
        raise ParseError("label", f"label {label_raw!r} is outside the closed set") from None

    confidence = obj.get("confidence")
    if not _is_number(confidence):
        raise ParseError("schema", "missing or non-numeric 'confidence' field")
    if not (0.0 <= float(confidence) <= 1.0):
        raise ParseError("range", f"confidence {confidence} outside [0, 1]")

    reasoning_obj = obj.get("reasoning")
    if not isinstance(reasoning_obj, dict):
        raise ParseError("schema", "missing or non-object 'reasoning' field")
    summary = reasoning_obj.get("summary")
    if not isinstance(summary, str) or not summary.strip():
        raise ParseError("schema", "reasoning requires a non-empty 'summary' string")
    points = reasoning_obj.get("points")
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise ParseError("schema", "reasoning requires a 'points' list of strings")

    evidence_obj = obj.get("evidence")
    if not isinstance(evidence_obj, list):
        raise ParseError("schema", "missing or non-list 'evidence' field")
    snippets = []
    for i, item in enumerate(evidence_obj):
        if not isinstance(item, dict):
            raise ParseError("schema", f"evidence[{i}] is not an object")
        text = item.get("text")
        relevance = item.get("relevance")
        chunk_index = item.get("chunk_index")
        if not isinstance(text, str):
            raise ParseError("schema", f"evidence[{i}] requires a string 'text'")
        if not _is_number(relevance):
            raise ParseError("schema", f"evidence[{i}] requires a numeric 'relevance'")
        if not isinstance(chunk_index, int) or isinstance(chunk_index, bool):
            raise ParseError("schema", f"evidence[{i}] requires an integer 'chunk_index'")
        snippets.append(ParsedSnippet(text=text, relevance=float(relevance), chunk_index=chunk_index))

    return ParsedVerdict(
        label=label,
        confidence=float(confidence),
        reasoning=Reasoning(summary=summary, points=tuple(points)),
        evidence=tuple(snippets),
    )


def _normalize_ws(text: str) -> tuple[str, list[int]]:
    """Collapse whitespace runs to single spaces; return the raw-index map."""
    chars: list[str] = []
    positions: list[int] = []
    pending_space_at = -1
    for i, ch in enumerate(text):
        if ch.isspace():
            if chars and pending_space_at < 0:
                pending_space_at = i
            continue
        if pending_space_at >= 0:
            chars.append(" ")
            positions.append(pending_space_at)
            pending_space_at = -1
        chars.append(ch)
        positions.append(i)
    return "".join(chars), positions


def validate_evidence(
    parsed: Sequence[ParsedSnippet], supplied: Sequence[Chunk]
) -> tuple[list[EvidenceSnippet], list[str]]:
    """Keep only snippets that quote a supplied chunk; locate their spans.

    Matching is whitespace-normalized substring search. Snippets that
    reference an unsupplied chunk or whose text cannot be found are
    dropped with a warning; survivors are re-sorted by relevance.
    """
    by_index = {c.index: c for c in supplied}
    kept: list[EvidenceSnippet] = []
    warnings: list[str] = []
    for snippet in parsed:
        chunk = by_index.get(snippet.chunk_index)
        if chunk is None:
            warnings.append(
                f"dropped snippet citing chunk {snippet.chunk_index}, "
                f"which was not supplied to the model"
            )
            continue
        norm_chunk, positions = _normalize_ws(chunk.text)
        norm_snippet, _ = _normalize_ws(snippet.text)
        if not norm_snippet:
            warnings.append(f"dropped empty snippet citing chunk {snippet.chunk_index}")
            continue
        found = norm_chunk.find(norm_snippet)
        if found < 0:
            warnings.append(
                f"dropped snippet citing chunk {snippet.chunk_index}: "
                f"text does not occur in that chunk"
            )
            continue
        span = (positions[found], positions[found + len(norm_snippet) - 1] + 1)
        kept.append(
            EvidenceSnippet(
                text=snippet.text,
                relevance=min(1.0, max(0.0, snippet.relevance)),
                chunk_ref=chunk.ref,
                char_span=span,
            )
        )
    kept.sort(key=lambda s: (-s.relevance, s.chunk_ref[1]))
    return kept, warnings


def _verify_prompt_template() -> str:
    return (
        resources.files("citecheck.resources.prompts")
        .joinpath(f"{VERIFY_PROMPT_VERSION}.txt")
        .read_text(encoding="utf-8")
    )


def build_prompt(
    claim: ProcessedClaim,
    evidence: Sequence[RankedEvidence],
    metadata=None,
) -> str:
    """Assemble the verification prompt from the template and inputs."""
    if evidence:
        lines = []
        for item in evidence:
            chunk = item.chunk
            lines.append(
                f"[chunk {chunk.index}, chars {chunk.start}-{chunk.end}, "
                f"relevance {item.relevance:.3f}]\n{chunk.text}"
            )
        evidence_block = "\n\n".join(lines)
    else:
        evidence_block = "No relevant passages retrieved from the reference document."

    metadata_block = ""
    if metadata is not None:
        parts = []
        if metadata.title:
            parts.append(f"Title: {metadata.title}")
        if metadata.authors:
            parts.append(f"Authors: {', '.join(metadata.authors)}")
        if metadata.year:
            parts.append(f"Year: {metadata.year}")
        if metadata.venue:
            parts.append(f"Venue: {metadata.venue}")
        if metadata.abstract:
            parts.append(f"Abstract: {metadata.abstract}")
        if parts:
            metadata_block = "\nREFERENCE METADATA:\n" + "\n".join(parts) + "\n"

    return _verify_prompt_template().format(
        claim=claim.text, metadata_block=metadata_block, evidence_block=evidence_block
    )


@dataclass(frozen=True)
class VerifyContext:
    """Identity and flags carried into the result's provenance."""

    doc_id: str
    embedding_model: str
    reranker_id: str
    abstract_only: bool = False
    rule_based: bool = False
    extra_warnings: tuple[str, ...] = field(default_factory=tuple)


_SYSTEM_MESSAGE = "You are a careful citation-verification assistant. Reply with JSON only."


def verify(
    chat,
    claim: ProcessedClaim,
    evidence: Sequence[RankedEvidence],
    metadata=None,
    *,
    mode: str = "lenient",
    temperature: float = 0.0,
    context: VerifyContext,
    now=None,
) -> VerificationResult:
    """Run the verification chat call and assemble a validated result.

    One repair attempt is made on a parse failure; a second failure is a
    hard error in strict mode and an UNCERTAIN / confidence-0 fallback in
    lenient mode.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    prompt = build_prompt(claim, evidence, metadata)
    raw = chat.complete(system=_SYSTEM_MESSAGE, user=prompt, temperature=temperature)

    parsed: ParsedVerdict | None = None
    parse_failed = False
    warnings: list[str] = list(context.extra_warnings)
    try:
        parsed = parse_structured_output(raw)
    except ParseError as first_error:
        repair_prompt = (
            f"{prompt}\n\nYour previous reply could not be parsed "
            f"({first_error.kind}: {first_error}).\nPrevious reply:\n{raw}\n\n"
            f"Reply again with a single valid JSON object exactly matching the schema."
        )
        raw2 = chat.complete(system=_SYSTEM_MESSAGE, user=repair_prompt, temperature=temperature)
        try:
            parsed = parse_structured_output(raw2)
            warnings.append(f"first reply unparseable ({first_error.kind}); repair attempt succeeded")
        except ParseError as second_error:
            if mode == "strict":
                raise second_error
            parse_failed = True
            warnings.append(
                f"structured output unparseable after repair attempt "
                f"({first_error.kind}, then {second_error.kind})"
            )

    supplied_chunks = [item.chunk for item in evidence]
    reranker_scores = {item.chunk.index: item.relevance for item in evidence}

    if parse_failed:
        label = SupportLabel.UNCERTAIN
        confidence = 0.0
        reasoning = Reasoning(summary="structured output unparseable", points=())
        snippets: list[EvidenceSnippet] = []
    else:
        assert parsed is not None
        label = parsed.label
        confidence = parsed.confidence
        reasoning = parsed.reasoning
        snippets, validation_warnings = validate_evidence(parsed.evidence, supplied_chunks)
        warnings.extend(validation_warnings)
        for snippet in snippets:
            expected = reranker_scores.get(snippet.chunk_ref[1])
            if expected is not None and abs(snippet.relevance - expected) > RELEVANCE_DISAGREEMENT:
                warnings.append(
                    f"model relevance {snippet.relevance:.2f} for chunk {snippet.chunk_ref[1]} "
                    f"disagrees with reranker score {expected:.2f}"
                )

    timestamp = (now() if now is not None else datetime.now(timezone.utc)).isoformat()
    provenance = Provenance(
        processed_at=timestamp,
        doc_id=context.doc_id,
        chunk_refs=tuple(c.ref for c in supplied_chunks),
        system_version=SYSTEM_VERSION,
        chat_model=getattr(chat, "model_id", "unknown"),
        embedding_model=context.embedding_model,
        reranker_id=context.reranker_id,
        abstract_only=context.abstract_only,
        rule_based=context.rule_based,
        parse_failed=parse_failed,
        prompt_versions=(
            ("preprocess", "rule_based" if context.rule_based else PREPROCESS_PROMPT_VERSION),
            ("verify", VERIFY_PROMPT_VERSION),
        ),
        warnings=tuple(warnings),
    )
    return VerificationResult(
        label=label,
        confidence=confidence,
        reasoning=reasoning,
        evidence=tuple(snippets),
        guidance=guidance_for(label),
        provenance=provenance,
    )
