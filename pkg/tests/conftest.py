import json
import pathlib

import pytest

from citecheck.config import PipelineConfig
from citecheck.pipeline import Pipeline

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
DEMO_CONFIG = REPO_ROOT / "demos" / "demo_config.json"
SAMPLE_DOC = REPO_ROOT / "demos" / "sample_reference.txt"
GOLDEN_CITATION = "Smith et al. (2020) found that exercise reduces cardiovascular risk by 30%"


@pytest.fixture
def demo_config(tmp_path) -> PipelineConfig:
    """The offline demo configuration with a per-test store directory."""
    return PipelineConfig.load(DEMO_CONFIG, flag_overrides={"store_dir": str(tmp_path / "store")})


@pytest.fixture
def demo_pipeline(demo_config) -> Pipeline:
    return Pipeline(demo_config)


@pytest.fixture
def golden_expected() -> dict:
    return json.loads((pathlib.Path(__file__).parent / "data" / "golden_result.json").read_text())
