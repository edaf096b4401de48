"""Turn raw citation sentences into standalone, fact-centric claims.

A raw citation like "Smith et al. (2020) found that exercise reduces
cardiovascular risk by 30%" carries attribution and reference markers
that obscure the verifiable assertion. Preprocessing produces the bare
claim ("Exercise reduces cardiovascular risk by 30%") either through an
LLM rewrite or, as a fallback, through rule-based marker stripping.
"""

from __future__ import annotations

import hashlib
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

logger = logging.getLogger(__name__)

MARKER_GRAMMAR_VERSION = "1"
PREPROCESS_PROMPT_VERSION = "preprocess_v1"

# Bracketed citation numbers: [12], [1,3], [4-7], [1; 4-7] (hyphen or en-dash ranges).
_BRACKET_MARKER = re.compile(r"\s?\[\s*\d+(?:\s*[-–]\s*\d+)?(?:\s*[,;]\s*\d+(?:\s*[-–]\s*\d+)?)*\s*\]")
# Parenthesized author-year: (Smith et al., 2020), (Smith & Jones, 2019),
# (Smith, 2020a; Jones, 2019), and the bare narrative-citation year (2020).
_AUTHOR_YEAR_GROUP = r"[A-Z][\w.\-']*(?:\s+(?:[\w.\-']+|&))*\s*,\s*(?:19|20)\d{2}[a-z]?"
_PAREN_MARKER = re.compile(
    r"\s?\(\s*(?:"
    + _AUTHOR_YEAR_GROUP
    + r"(?:\s*;\s*"
    + _AUTHOR_YEAR_GROUP
    + r")*"
    + r"|(?:19|20)\d{2}[a-z]?"
    + r")\s*\)"
)
_NUMERIC_TOKEN = re.compile(r"(?<![\w.])[-+]?\d+(?:\.\d+)?%?")
_MULTI_SPACE = re.compile(r" {2,}")


@dataclass(frozen=True)
class RawCitation:
    """The citation sentence or passage exactly as written, markers included."""

    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("citation text must be non-empty")

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ProcessedClaim:
    """Attribution-free, standalone claim distilled from a citation."""

    text: str
    numeric_tokens: Counter
    source_citation_hash: str
    rule_based: bool = False
    warnings: tuple[str, ...] = field(default_factory=tuple)


class PreprocessError(Exception):
    """Citation preprocessing failed (provider error or empty model output)."""


def strip_markers(text: str) -> str:
    """Remove reference markers and collapse the spaces they leave behind.

    Handles bracketed citation numbers, ranges, and lists, plus
    parenthesized author-year citations and bare narrative years.
    Idempotent.
    """
    out = _BRACKET_MARKER.sub("", text)
    out = _PAREN_MARKER.sub("", out)
    out = _MULTI_SPACE.sub(" ", out)
    return out.strip()


def numeric_tokens(text: str) -> Counter:
    """Multiset of numeric tokens: optional sign, decimal point, percent suffix."""
    return Counter(_NUMERIC_TOKEN.findall(text))


def preprocess_prompt_template() -> str:
    return (
        resources.files("citecheck.resources.prompts")
        .joinpath(f"{PREPROCESS_PROMPT_VERSION}.txt")
        .read_text(encoding="utf-8")
    )


def rule_based_claim(citation: RawCitation) -> ProcessedClaim:
    """Marker stripping only; no attribution rewrite."""
    text = strip_markers(citation.text)
    if not text:
        raise PreprocessError("citation is empty after marker stripping")
    return ProcessedClaim(
        text=text,
        numeric_tokens=numeric_tokens(text),
        source_citation_hash=citation.content_hash,
        rule_based=True,
    )


def preprocess_citation(chat, citation: RawCitation) -> ProcessedClaim:
    """Rewrite the citation into a standalone fact-centric claim via the LLM.

    Issued at temperature 0; the model output is passed through
    strip_markers as a safety net. Numeric tokens that appear in the claim
    but not in the citation trigger a warning, not a failure: the model
    may legitimately respell a number.
    """
    prompt = preprocess_prompt_template().format(citation=citation.text)
    reply = chat.complete(
        system="You rewrite citation sentences into standalone factual claims.",
        user=prompt,
        temperature=0.0,
    )
    text = strip_markers(reply)
    if not text:
        raise PreprocessError("model returned an empty claim")
    claim_numbers = numeric_tokens(text)
    citation_numbers = numeric_tokens(citation.text)
    warnings = []
    missing = claim_numbers - citation_numbers
    if missing:
        warnings.append(
            "claim introduces numeric tokens not present in the citation: "
            + ", ".join(sorted(missing))
        )
        logger.warning("numeric preservation check failed for citation %s: %s",
                       citation.content_hash[:12], warnings[0])
    return ProcessedClaim(
        text=text,
        numeric_tokens=claim_numbers,
        source_citation_hash=citation.content_hash,
        rule_based=False,
        warnings=tuple(warnings),
    )
