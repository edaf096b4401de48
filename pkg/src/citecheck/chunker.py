"""Recursive character chunking with hierarchical separators.

Splits document text into overlapping chunks of bounded size. Splitting
tries each separator in order (paragraph breaks first, then sentence
boundaries, punctuation, whitespace) and falls back to character-level
windows when no separator applies. Chunks carry exact character offsets
into the source text so every chunk is a faithful slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_MAX_SIZE = 512
DEFAULT_OVERLAP = 50
DEFAULT_SEPARATORS = ["\n\n", "\n", ". ", "? ", "! ", "; ", ", ", " ", ""]


@dataclass(frozen=True)
class Chunk:
    """A contiguous character span of a document; the unit of retrieval."""

    doc_id: str
    index: int
    text: str
    start: int
    end: int

    @property
    def ref(self) -> tuple[str, int]:
        return (self.doc_id, self.index)


@dataclass(frozen=True)
class ChunkConfig:
    max_size: int = DEFAULT_MAX_SIZE
    overlap: int = DEFAULT_OVERLAP
    separators: list[str] = field(default_factory=lambda: list(DEFAULT_SEPARATORS))

    def __post_init__(self) -> None:
        if not (0 <= self.overlap < self.max_size):
            raise ValueError(
                f"overlap must satisfy 0 <= overlap < max_size, got "
                f"overlap={self.overlap} max_size={self.max_size}"
            )
        if not self.separators or self.separators[-1] != "":
            raise ValueError("separators must be non-empty and end with the empty string")


def _split_spans(text: str, base: int, sep: str) -> list[tuple[int, int]]:
    """Split on a literal separator, attaching it to the end of the preceding piece."""
    spans = []
    pos = 0
    while True:
        hit = text.find(sep, pos)
        if hit < 0:
            break
        end = hit + len(sep)
        spans.append((base + pos, base + end))
        pos = end
    if pos < len(text):
        spans.append((base + pos, base + len(text)))
    return spans


def _fragment(text: str, base: int, separators: list[str], max_size: int) -> list[tuple[int, int]]:
    """Recursively cut text into contiguous spans no longer than max_size.

    Tries the first separator; oversized pieces are re-split with the
    remaining separators. The terminal empty separator yields single
    characters, which the merge phase packs into sliding windows.
    """
    if len(text) <= max_size:
        return [(base, base + len(text))] if text else []
    sep, rest = separators[0], separators[1:]
    if sep == "":
        return [(base + i, base + i + 1) for i in range(len(text))]
    fragments: list[tuple[int, int]] = []
    for start, end in _split_spans(text, base, sep):
        if end - start <= max_size:
            fragments.append((start, end))
        else:
            fragments.extend(_fragment(text[start - base : end - base], start, rest, max_size))
    return fragments


def split(text: str, config: ChunkConfig | None = None, doc_id: str = "") -> list[Chunk]:
    """Split document text into overlapping chunks.

    Adjacent fragments are merged greedily while the merged span stays
    within max_size; each emitted chunk donates up to `overlap` tail
    characters to the start of the next chunk. On separator-free text this
    reduces to a sliding window with step max_size - overlap.
    """
    if not text:
        raise ValueError("cannot chunk empty text")
    cfg = config or ChunkConfig()
    fragments = _fragment(text, 0, cfg.separators, cfg.max_size)

    spans: list[tuple[int, int]] = []
    cur_start, cur_end = fragments[0]
    for frag_start, frag_end in fragments[1:]:
        if frag_end - cur_start <= cfg.max_size:
            cur_end = frag_end
            continue
        spans.append((cur_start, cur_end))
        # Tail overlap consumes part of the next chunk's budget; shrink it
        # when the next fragment alone nearly fills max_size, and keep
        # chunk starts strictly increasing.
        take = min(cfg.overlap, cur_end - cur_start - 1, cfg.max_size - (frag_end - frag_start))
        cur_start = cur_end - max(take, 0)
        cur_end = frag_end
    spans.append((cur_start, cur_end))

    return [
        Chunk(doc_id=doc_id, index=i, text=text[s:e], start=s, end=e)
        for i, (s, e) in enumerate(spans)
    ]
