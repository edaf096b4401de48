#!/usr/bin/env python3
"""Walk through document chunking on the bundled sample reference.

Shows how hierarchical separators keep paragraphs together, how the
512-character bound and 50-character overlap interact, and how each chunk
maps back to exact character offsets in the source text.
"""

from pathlib import Path

from citecheck.chunker import ChunkConfig, split

text = (Path(__file__).parent / "sample_reference.txt").read_text()
print(f"document length: {len(text)} characters")

cfg = ChunkConfig()  # max_size=512, overlap=50, paragraph -> sentence -> word fallback
chunks = split(text, cfg, doc_id="doc-sample")
print(f"chunks produced: {len(chunks)}\n")

for chunk in chunks:
    preview = " ".join(chunk.text.split())[:70]
    print(f"chunk {chunk.index}: [{chunk.start:5d}:{chunk.end:5d}] ({len(chunk.text):3d} chars)  {preview}...")

print("\noverlap between consecutive chunks (characters):")
for a, b in zip(chunks, chunks[1:]):
    shared = a.end - b.start
    print(f"  chunk {a.index} -> {b.index}: {shared}")

# Offsets are exact: every chunk is a verbatim slice of the document.
assert all(text[c.start:c.end] == c.text for c in chunks)
print("\nall chunks verified as verbatim slices of the source text")

# Separator-free text degenerates to a sliding window with step 462.
flat = "x" * 1200
flat_chunks = split(flat, cfg, doc_id="flat")
print(f"\n1200 separator-free characters -> spans {[(c.start, c.end) for c in flat_chunks]}")
