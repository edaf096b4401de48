"""Markdown export of verification results.

Section order is fixed and the output is byte-deterministic for a given
result: title, verdict (label with category name), confidence, guidance,
reasoning, evidence snippets as quoted blocks, provenance table.
"""

from __future__ import annotations

from citecheck.verifier import VerificationResult


def export_markdown(result: VerificationResult, verification_id: str | None = None) -> str:
    lines: list[str] = ["# Citation Verification Report", ""]
    if verification_id:
        lines += [f"Verification id: `{verification_id}`", ""]

    lines += [
        f"## Verdict: {result.label.name} ({result.label.category_name})",
        "",
        f"Confidence: {result.confidence:.2f}",
        "",
        f"**Guidance:** {result.guidance}",
        "",
        "## Reasoning",
        "",
        result.reasoning.summary,
        "",
    ]
    for point in result.reasoning.points:
        lines.append(f"- {point}")
    if result.reasoning.points:
        lines.append("")

    lines += ["## Evidence", ""]
    if result.evidence:
        for snippet in result.evidence:
            doc_id, chunk_index = snippet.chunk_ref
            location = f"chunk {chunk_index} of `{doc_id}`"
            if snippet.char_span is not None:
                location += f", chars {snippet.char_span[0]}-{snippet.char_span[1]}"
            quoted = "\n".join("> " + line for line in snippet.text.splitlines())
            lines += [quoted, ">", f"> (relevance {snippet.relevance:.3f}; {location})", ""]
    else:
        lines += ["No evidence snippets.", ""]

    prov = result.provenance
    chunk_refs = ", ".join(f"{d}#{i}" for d, i in prov.chunk_refs) or "none"
    prompt_versions = ", ".join(f"{k}={v}" for k, v in prov.prompt_versions)
    rows = [
        ("Processed at", prov.processed_at),
        ("Document", prov.doc_id),
        ("Chunks supplied", chunk_refs),
        ("System version", prov.system_version),
        ("Chat model", prov.chat_model),
        ("Embedding model", prov.embedding_model),
        ("Reranker", prov.reranker_id),
        ("Abstract-only source", "yes" if prov.abstract_only else "no"),
        ("Rule-based preprocessing", "yes" if prov.rule_based else "no"),
        ("Parse failed", "yes" if prov.parse_failed else "no"),
        ("Prompt versions", prompt_versions),
    ]
    lines += ["## Provenance", "", "| Field | Value |", "| --- | --- |"]
    lines += [f"| {key} | {value} |" for key, value in rows]
    if prov.warnings:
        lines += ["", "Warnings:", ""]
        lines += [f"- {w}" for w in prov.warnings]
    lines.append("")
    return "\n".join(lines)
