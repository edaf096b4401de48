"""Structured-output parsing, evidence validation, and the verify flow."""

import json
from collections import Counter
from datetime import datetime, timezone

import pytest

from citecheck.chunker import Chunk
from citecheck.claims import ProcessedClaim
from citecheck.ingest import BiblioMetadata
from citecheck.llm_gateway import MockChatProvider, mock_chat_provider
from citecheck.retrieval import RankedEvidence
from citecheck.verifier import (
    EvidenceSnippet,
    ParseError,
    Reasoning,
    SupportLabel,
    VerificationResult,
    VerifyContext,
    build_prompt,
    guidance_for,
    parse_structured_output,
    validate_evidence,
    verify,
)
from tests.test_index import make_chunks


def make_claim(text="The human genome contains approximately 20,000 protein-coding genes"):
    return ProcessedClaim(
        text=text, numeric_tokens=Counter(), source_citation_hash="c" * 64, rule_based=False
    )


GENOME_SOURCE = (
    "Recent genomic studies have confirmed that the human genome encodes about "
    "20,000 protein-coding genes."
)


def make_evidence(texts, relevances=None):
    chunks = make_chunks(texts)
    relevances = relevances or [1.0 - 0.1 * i for i in range(len(chunks))]
    return [
        RankedEvidence(chunk=c, relevance=r, rank=i + 1)
        for i, (c, r) in enumerate(zip(chunks, relevances))
    ]


def verdict_json(label="SUPPORTED", confidence=0.92, evidence=None, summary="Aligned."):
    return json.dumps(
        {
            "label": label,
            "confidence": confidence,
            "reasoning": {"summary": summary, "points": ["point one"]},
            "evidence": evidence if evidence is not None else [],
        }
    )


def ctx(**kwargs):
    base = dict(doc_id="doc-abc", embedding_model="hash-embed-8d", reranker_id="lexical-overlap")
    base.update(kwargs)
    return VerifyContext(**base)


# --- support labels & guidance ------------------------------------------------

def test_ordinal_mapping_fixed():
    assert SupportLabel.SUPPORTED.ordinal == 3
    assert SupportLabel.PARTIALLY_SUPPORTED.ordinal == 2
    assert SupportLabel.UNSUPPORTED.ordinal == 1
    assert SupportLabel.UNCERTAIN.ordinal == 0


def test_label_parse_accepts_space_variant():
    assert SupportLabel.parse("PARTIALLY SUPPORTED") is SupportLabel.PARTIALLY_SUPPORTED
    assert SupportLabel.parse("supported") is SupportLabel.SUPPORTED


def test_guidance_texts():
    assert "no changes" in guidance_for(SupportLabel.SUPPORTED).lower()
    unsupported = guidance_for(SupportLabel.UNSUPPORTED).lower()
    assert "remove" in unsupported and "replace" in unsupported and "alternative" in unsupported
    uncertain = guidance_for(SupportLabel.UNCERTAIN).lower()
    assert "review" in uncertain and "revis" in uncertain and "removing" in uncertain
    partial = guidance_for(SupportLabel.PARTIALLY_SUPPORTED).lower()
    assert "nuance" in partial and "revise" in partial


# --- parse_structured_output --------------------------------------------------

def test_parse_happy_path():
    parsed = parse_structured_output(verdict_json())
    assert parsed.label is SupportLabel.SUPPORTED
    assert parsed.confidence == 0.92
    assert parsed.reasoning.summary == "Aligned."


def test_parse_tolerates_fences_and_prose():
    raw = "Sure, here's my analysis:\n```json\n" + verdict_json() + "\n```\nHope this helps."
    parsed = parse_structured_output(raw)
    assert parsed.label is SupportLabel.SUPPORTED


def test_parse_normalizes_space_label():
    parsed = parse_structured_output(verdict_json(label="PARTIALLY SUPPORTED"))
    assert parsed.label is SupportLabel.PARTIALLY_SUPPORTED


def test_parse_confidence_out_of_range():
    with pytest.raises(ParseError) as exc:
        parse_structured_output(verdict_json(confidence=1.7))
    assert exc.value.kind == "range"


def test_parse_unknown_label():
    with pytest.raises(ParseError) as exc:
        parse_structured_output(verdict_json(label="MAYBE"))
    assert exc.value.kind == "label"


def test_parse_no_object():
    with pytest.raises(ParseError) as exc:
        parse_structured_output("The citation seems fine to me.")
    assert exc.value.kind == "malformed"


def test_parse_missing_field_schema_error():
    with pytest.raises(ParseError) as exc:
        parse_structured_output('{"label": "SUPPORTED", "confidence": 0.5}')
    assert exc.value.kind == "schema"


def test_parse_evidence_item_types():
    raw = verdict_json(evidence=[{"text": "x", "relevance": "high", "chunk_index": 0}])
    with pytest.raises(ParseError) as exc:
        parse_structured_output(raw)
    assert exc.value.kind == "schema"


def test_parse_picks_first_valid_object():
    raw = 'prefix {"not": "the schema"} middle ' + verdict_json() + " tail"
    # The first balanced object parses as JSON but fails the schema.
    with pytest.raises(ParseError) as exc:
        parse_structured_output(raw)
    assert exc.value.kind == "schema"


def test_parse_skips_unparseable_braces():
    raw = "{broken json} then " + verdict_json()
    parsed = parse_structured_output(raw)
    assert parsed.label is SupportLabel.SUPPORTED


def test_malformed_corpus_classification():
    import pathlib

    corpus = json.loads(
        (pathlib.Path(__file__).parent / "data" / "malformed_outputs.json").read_text()
    )
    assert len(corpus) == 25
    for case in corpus:
        with pytest.raises(ParseError) as exc:
            parse_structured_output(case["raw"])
        assert exc.value.kind == case["expected"], f"case {case['name']}: {exc.value}"


# --- validate_evidence ----------------------------------------------------------

def test_validate_keeps_verbatim_snippet_and_locates_span():
    chunks = make_chunks(["alpha beta gamma delta", "unrelated text"])
    parsed = parse_structured_output(
        verdict_json(evidence=[{"text": "beta gamma", "relevance": 0.8, "chunk_index": 0}])
    )
    kept, warnings = validate_evidence(parsed.evidence, chunks)
    assert warnings == []
    assert len(kept) == 1
    snippet = kept[0]
    assert snippet.chunk_ref == ("d", 0)
    start, end = snippet.char_span
    assert chunks[0].text[start:end] == "beta gamma"


def test_validate_drops_unsupplied_chunk():
    chunks = make_chunks(["alpha beta"])
    parsed = parse_structured_output(
        verdict_json(evidence=[{"text": "alpha", "relevance": 0.9, "chunk_index": 9}])
    )
    kept, warnings = validate_evidence(parsed.evidence, chunks)
    assert kept == []
    assert len(warnings) == 1 and "chunk 9" in warnings[0]


def test_validate_whitespace_normalized_match():
    chunks = make_chunks(["first line\n  second   line here"])
    parsed = parse_structured_output(
        verdict_json(evidence=[{"text": "first line second line", "relevance": 0.7, "chunk_index": 0}])
    )
    kept, warnings = validate_evidence(parsed.evidence, chunks)
    assert warnings == []
    start, end = kept[0].char_span
    assert chunks[0].text[start:end].split() == ["first", "line", "second", "line"]


def test_validate_drops_fabricated_text():
    chunks = make_chunks(["alpha beta"])
    parsed = parse_structured_output(
        verdict_json(evidence=[{"text": "made up quote", "relevance": 0.9, "chunk_index": 0}])
    )
    kept, warnings = validate_evidence(parsed.evidence, chunks)
    assert kept == []
    assert "does not occur" in warnings[0]


def test_validate_resorts_by_relevance_and_clamps():
    chunks = make_chunks(["alpha beta", "gamma delta"])
    parsed = parse_structured_output(
        verdict_json(
            evidence=[
                {"text": "alpha", "relevance": 0.2, "chunk_index": 0},
                {"text": "gamma", "relevance": 7.5, "chunk_index": 1},
            ]
        )
    )
    kept, _ = validate_evidence(parsed.evidence, chunks)
    assert [s.chunk_ref[1] for s in kept] == [1, 0]
    assert kept[0].relevance == 1.0  # clamped


# --- build_prompt ---------------------------------------------------------------

def test_prompt_contains_snippets_scores_and_definitions():
    evidence = make_evidence(["first passage text", "second passage text", "third passage text"])
    prompt = build_prompt(make_claim(), evidence)
    for item in evidence:
        assert item.chunk.text in prompt
        assert f"{item.relevance:.3f}" in prompt
    for label in ("SUPPORTED", "PARTIALLY_SUPPORTED", "UNSUPPORTED", "UNCERTAIN"):
        assert label in prompt
    assert "textual evidence" in prompt
    assert make_claim().text in prompt


def test_prompt_omits_metadata_block_when_absent():
    prompt = build_prompt(make_claim(), make_evidence(["p"]))
    assert "REFERENCE METADATA" not in prompt


def test_prompt_includes_metadata_when_present():
    metadata = BiblioMetadata(title="Genome Study", authors=("Lee", "Park"), year=2021)
    prompt = build_prompt(make_claim(), make_evidence(["p"]), metadata)
    assert "REFERENCE METADATA" in prompt
    assert "Genome Study" in prompt
    assert "Lee, Park" in prompt
    assert "2021" in prompt


def test_prompt_empty_evidence_block():
    prompt = build_prompt(make_claim(), [])
    assert "No relevant passages retrieved" in prompt


# --- verify ----------------------------------------------------------------------

def test_verify_genome_worked_example():
    evidence = make_evidence([GENOME_SOURCE, "Other text about chromosomes."])
    reply = verdict_json(
        label="SUPPORTED",
        confidence=0.95,
        evidence=[
            {
                "text": "the human genome encodes about 20,000 protein-coding genes",
                "relevance": 0.97,
                "chunk_index": 0,
            }
        ],
        summary="The claim matches the source statement about gene count.",
    )
    chat = mock_chat_provider([("CLAIM:", reply)])
    result = verify(chat, make_claim(), evidence, context=ctx())
    assert result.label is SupportLabel.SUPPORTED
    assert result.guidance == guidance_for(SupportLabel.SUPPORTED)
    assert "no changes" in result.guidance.lower()
    assert len(result.evidence) == 1
    start, end = result.evidence[0].char_span
    assert evidence[0].chunk.text[start:end] == (
        "the human genome encodes about 20,000 protein-coding genes"
    )


def test_verify_lenient_double_parse_failure():
    chat = MockChatProvider(default_reply="I think it's probably fine!")
    result = verify(chat, make_claim(), make_evidence(["p"]), mode="lenient", context=ctx())
    assert result.label is SupportLabel.UNCERTAIN
    assert result.confidence == 0.0
    assert result.reasoning.summary == "structured output unparseable"
    assert result.evidence == ()
    assert result.provenance.parse_failed


def test_verify_strict_double_parse_failure_raises():
    chat = MockChatProvider(default_reply="still not json")
    with pytest.raises(ParseError):
        verify(chat, make_claim(), make_evidence(["p"]), mode="strict", context=ctx())


def test_verify_repair_attempt_succeeds():
    # First prompt gets garbage; the repair prompt (which embeds the parse
    # error) matches a fixture that returns valid JSON.
    chat = mock_chat_provider(
        [("could not be parsed", verdict_json())], default_reply="not json at all"
    )
    result = verify(chat, make_claim(), make_evidence(["p"]), mode="strict", context=ctx())
    assert result.label is SupportLabel.SUPPORTED
    assert not result.provenance.parse_failed
    assert any("repair attempt succeeded" in w for w in result.provenance.warnings)


def test_verify_partially_supported_snippet_located():
    evidence = make_evidence(["alpha beta gamma", "delta epsilon zeta"])
    reply = verdict_json(
        label="PARTIALLY_SUPPORTED",
        confidence=0.6,
        evidence=[{"text": "delta epsilon", "relevance": 0.66, "chunk_index": 1}],
    )
    chat = mock_chat_provider([("CLAIM:", reply)])
    result = verify(chat, make_claim(), evidence, context=ctx())
    assert result.label is SupportLabel.PARTIALLY_SUPPORTED
    snippet = result.evidence[0]
    assert snippet.chunk_ref == ("d", 1)
    start, end = snippet.char_span
    assert evidence[1].chunk.text[start:end] == "delta epsilon"


def test_verify_provenance_fields_complete():
    chat = mock_chat_provider([("CLAIM:", verdict_json())])
    evidence = make_evidence(["p1", "p2"])
    result = verify(chat, make_claim(), evidence, context=ctx(abstract_only=True, rule_based=True))
    prov = result.provenance
    assert prov.doc_id == "doc-abc"
    assert prov.chat_model == "mock-chat"
    assert prov.embedding_model == "hash-embed-8d"
    assert prov.reranker_id == "lexical-overlap"
    assert prov.system_version
    assert prov.processed_at
    assert prov.abstract_only and prov.rule_based
    assert prov.chunk_refs == (("d", 0), ("d", 1))
    assert dict(prov.prompt_versions)["verify"] == "verify_v1"
    assert dict(prov.prompt_versions)["preprocess"] == "rule_based"


def test_verify_flags_relevance_disagreement():
    evidence = make_evidence(["alpha beta gamma"], relevances=[0.1])
    reply = verdict_json(
        evidence=[{"text": "alpha beta", "relevance": 0.99, "chunk_index": 0}]
    )
    chat = mock_chat_provider([("CLAIM:", reply)])
    result = verify(chat, make_claim(), evidence, context=ctx())
    assert any("disagrees with reranker score" in w for w in result.provenance.warnings)


def test_verify_deterministic_with_fixed_clock():
    fixed = datetime(2024, 5, 1, 12, 0, 0, tzinfo=timezone.utc)
    chat = mock_chat_provider([("CLAIM:", verdict_json())])
    evidence = make_evidence(["p1"])
    r1 = verify(chat, make_claim(), evidence, context=ctx(), now=lambda: fixed)
    r2 = verify(chat, make_claim(), evidence, context=ctx(), now=lambda: fixed)
    assert r1 == r2
    assert json.dumps(r1.to_dict()) == json.dumps(r2.to_dict())


def test_result_round_trip():
    chat = mock_chat_provider(
        [("CLAIM:", verdict_json(evidence=[{"text": "p1", "relevance": 0.5, "chunk_index": 0}]))]
    )
    result = verify(chat, make_claim(), make_evidence(["p1 and more"]), context=ctx())
    restored = VerificationResult.from_dict(json.loads(json.dumps(result.to_dict())))
    assert restored == result


def test_verify_invariants_hold():
    chat = mock_chat_provider([("CLAIM:", verdict_json(label="UNSUPPORTED", confidence=0.2))])
    result = verify(chat, make_claim(), make_evidence(["p1"]), context=ctx())
    assert result.label in SupportLabel
    assert 0.0 <= result.confidence <= 1.0
    assert result.guidance == guidance_for(result.label)
    supplied = {("d", 0)}
    assert all(s.chunk_ref in supplied for s in result.evidence)
