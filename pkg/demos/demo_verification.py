#!/usr/bin/env python3
"""Full offline verification run: citation in, markdown report out.

Uses the bundled demo configuration (mock chat provider, hashing
embedder, lexical reranker) so the complete pipeline executes with zero
network access, then prints the exported markdown report.
"""

import tempfile
from pathlib import Path

from citecheck.config import PipelineConfig
from citecheck.export import export_markdown
from citecheck.pipeline import Pipeline, VerificationRequest

HERE = Path(__file__).parent
CITATION = "Smith et al. (2020) found that exercise reduces cardiovascular risk by 30%"

with tempfile.TemporaryDirectory() as store_dir:
    cfg = PipelineConfig.load(HERE / "demo_config.json", flag_overrides={"store_dir": store_dir})
    pipeline = Pipeline(cfg)

    print(f"citation: {CITATION}")
    print(f"reference: {HERE / 'sample_reference.txt'}\n")

    verification_id, result = pipeline.run(
        VerificationRequest(citation=CITATION, source=str(HERE / "sample_reference.txt"))
    )

    print(f"verdict: {result.label.name} ({result.label.category_name})")
    print(f"confidence: {result.confidence:.2f}")
    print(f"evidence snippets: {len(result.evidence)}")
    for snippet in result.evidence:
        print(f"  - chunk {snippet.chunk_ref[1]} (relevance {snippet.relevance:.2f}): "
              f"{snippet.text[:60]}...")

    print("\n" + "=" * 72 + "\n")
    print(export_markdown(result, verification_id))
