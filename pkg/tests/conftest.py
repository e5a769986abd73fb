from pathlib import Path

import pytest

from bookimpact import ahp, engine, ingest
from bookimpact.config import EngineConfig

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "corpus"


@pytest.fixture(scope="session")
def fixture_config() -> EngineConfig:
    return EngineConfig(
        toc_topic_count=8,
        citlit_topic_count=8,
        iterations=200,
        seed=7,
    )


@pytest.fixture(scope="session")
def fixture_dataset():
    manifest = ingest.load_manifest(FIXTURE_DIR / "manifest.json")
    return ingest.load_dataset(manifest)


@pytest.fixture(scope="session")
def fixture_models(fixture_dataset, fixture_config):
    return engine.train_models(fixture_dataset, fixture_config)


@pytest.fixture(scope="session")
def fixture_state(fixture_dataset, fixture_models, fixture_config):
    return engine.build_state(
        fixture_dataset, fixture_models, ahp.reference_weights(), fixture_config
    )
