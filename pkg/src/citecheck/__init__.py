"""Citation verification toolkit.

Checks whether a citing sentence is substantiated by its referenced source
document: hybrid sparse/dense retrieval over document chunks, cross-encoder
style reranking, an LLM verdict with a four-class ordinal support label, and
an ordinal-aware evaluation framework for scoring verifier outputs.
"""

__version__ = "0.1.0"

from citecheck.chunker import Chunk, ChunkConfig, split
from citecheck.verifier import SupportLabel, VerificationResult

__all__ = [
    "__version__",
    "Chunk",
    "ChunkConfig",
    "split",
    "SupportLabel",
    "VerificationResult",
]
