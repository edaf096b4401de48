"""End-to-end pipeline behavior with the offline demo providers."""

import json

import pytest

from citecheck.config import PipelineConfig
from citecheck.pipeline import Pipeline, PipelineError, RequestShapeError, VerificationRequest
from citecheck.verifier import SupportLabel, VerificationResult, guidance_for
from tests.conftest import GOLDEN_CITATION, SAMPLE_DOC


def golden_request(**kwargs):
    base = dict(citation=GOLDEN_CITATION, source=str(SAMPLE_DOC))
    base.update(kwargs)
    return VerificationRequest(**base)


def strip_timestamps(result_dict: dict) -> dict:
    out = json.loads(json.dumps(result_dict))
    out["provenance"]["processed_at"] = None
    return out


def test_golden_run_matches_committed_result(demo_pipeline, golden_expected):
    vid, result = demo_pipeline.run(golden_request())
    assert vid == golden_expected["verification_id"]
    assert strip_timestamps(result.to_dict()) == golden_expected["result"]


def test_golden_run_byte_stable_across_pipelines(demo_config, tmp_path):
    first = Pipeline(demo_config).run(golden_request())[1]
    second = Pipeline(demo_config).run(golden_request())[1]
    assert strip_timestamps(first.to_dict()) == strip_timestamps(second.to_dict())


def test_golden_run_verdict_contents(demo_pipeline):
    _, result = demo_pipeline.run(golden_request())
    assert result.label is SupportLabel.SUPPORTED
    assert len(result.evidence) == 3
    assert result.guidance == guidance_for(SupportLabel.SUPPORTED)
    # Every snippet is locatable inside a supplied chunk.
    supplied = set(result.provenance.chunk_refs)
    for snippet in result.evidence:
        assert snippet.chunk_ref in supplied
        assert snippet.char_span is not None


def test_request_shape_both_doc_and_source():
    with pytest.raises(RequestShapeError, match="exactly one"):
        VerificationRequest(citation="c", doc_id="doc-1", source="x.txt")


def test_request_shape_neither_doc_nor_source():
    with pytest.raises(RequestShapeError, match="exactly one"):
        VerificationRequest(citation="c")


def test_request_shape_empty_citation():
    with pytest.raises(RequestShapeError, match="non-empty"):
        VerificationRequest(citation="  ", doc_id="doc-1")


def test_unknown_doc_id_fails_in_ingest_stage(demo_pipeline):
    with pytest.raises(PipelineError) as exc:
        demo_pipeline.run(VerificationRequest(citation="c", doc_id="doc-missing"))
    assert exc.value.stage == "ingest"


def test_verification_persisted_and_retrievable(demo_pipeline):
    vid, result = demo_pipeline.run(golden_request())
    record = demo_pipeline.verifications.get(vid)
    assert record["doc_id"] == result.provenance.doc_id
    assert record["citation"] == GOLDEN_CITATION
    assert VerificationResult.from_dict(record["result"]) == result


def test_verify_by_existing_doc_id(demo_pipeline, golden_expected):
    doc = demo_pipeline.ingest(str(SAMPLE_DOC))
    vid, result = demo_pipeline.run(VerificationRequest(citation=GOLDEN_CITATION, doc_id=doc.doc_id))
    assert strip_timestamps(result.to_dict()) == golden_expected["result"]


def test_index_cache_reused_across_runs(demo_config):
    pipeline = Pipeline(demo_config)
    calls = []

    class CountingEmbedder:
        model_id = "hash-embed-8d"

        def __init__(self, inner):
            self.inner = inner

        def embed(self, texts):
            calls.append(len(texts))
            return self.inner.embed(texts)

    counting = CountingEmbedder(demo_config.build_embedder())
    doc = pipeline.ingest(str(SAMPLE_DOC))
    pipeline._indexes_for(doc, demo_config, counting)
    pipeline._indexes_for(doc, demo_config, counting)
    assert len(calls) == 1, "second call must hit the cache"


def test_index_persistence_round_trip(tmp_path):
    cfg = PipelineConfig.load(
        "demos/demo_config.json",
        flag_overrides={"store_dir": str(tmp_path / "store"), "persist_indexes": True},
    )
    pipeline = Pipeline(cfg)
    vid1, _ = pipeline.run(golden_request())
    assert any((cfg.store_dir / "indexes").iterdir())
    # A fresh pipeline loads the persisted index instead of rebuilding.
    pipeline2 = Pipeline(cfg)
    vid2, _ = pipeline2.run(golden_request())
    assert vid1 == vid2


def test_rule_based_fallback_when_chat_preprocessing_fails(tmp_path):
    # The mock chat answers the verification prompt but returns an empty
    # string to the preprocess prompt, forcing the lenient fallback.
    cfg_data = json.loads(open("demos/demo_config.json").read())
    cfg_data["chat"]["fixtures"] = [f for f in cfg_data["chat"]["fixtures"]
                                    if "Rewrite" not in f["match"]]
    cfg_data["store_dir"] = str(tmp_path / "store")
    cfg = PipelineConfig.from_dict(cfg_data)
    _, result = Pipeline(cfg).run(golden_request())
    assert result.provenance.rule_based
    assert dict(result.provenance.prompt_versions)["preprocess"] == "rule_based"


def test_strict_mode_propagates_preprocess_failure(tmp_path):
    cfg_data = json.loads(open("demos/demo_config.json").read())
    cfg_data["chat"]["fixtures"] = []
    cfg_data["mode"] = "strict"
    cfg_data["store_dir"] = str(tmp_path / "store")
    cfg = PipelineConfig.from_dict(cfg_data)
    with pytest.raises(PipelineError) as exc:
        Pipeline(cfg).run(golden_request())
    assert exc.value.stage == "preprocess"


def test_overrides_change_providers_per_request(demo_pipeline):
    _, result = demo_pipeline.run(
        golden_request(overrides={"embedding": {"type": "hash", "dimension": 16}})
    )
    assert result.provenance.embedding_model == "hash-embed-16d"


def test_rules_preprocess_mode(tmp_path):
    cfg_data = json.loads(open("demos/demo_config.json").read())
    cfg_data["preprocess"] = "rules"
    cfg_data["store_dir"] = str(tmp_path / "store")
    cfg = PipelineConfig.from_dict(cfg_data)
    _, result = Pipeline(cfg).run(golden_request())
    assert result.provenance.rule_based
