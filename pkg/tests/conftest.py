import json
import sys
from importlib import resources
from pathlib import Path

import pytest


def pytest_terminal_summary(terminalreporter):
    """Echo one line per acceptance criterion after capture ends."""
    acceptance = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if acceptance is None or not getattr(acceptance, "RESULTS", None):
        return
    terminalreporter.write_line("")
    for name, status in acceptance.RESULTS:
        terminalreporter.write_line(f"ACCEPTANCE {name}: {status}")

from scorerag.config import load_config
from scorerag.corpus import ingest_directory
from scorerag.embedding import MockEmbeddingBackend
from scorerag.pipeline import Pipeline, build_index

DEMO = resources.files("scorerag").joinpath("data/demo")


@pytest.fixture(scope="session")
def demo_raw_articles() -> list[dict]:
    text = DEMO.joinpath("raw_articles.jsonl").read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory) -> Path:
    """Demo corpus ingested and indexed into a session-scoped directory,
    with a config file pointing at everything."""
    root = tmp_path_factory.mktemp("demo_ws")
    raw_dir = root / "raw"
    raw_dir.mkdir()
    (raw_dir / "articles.jsonl").write_text(
        DEMO.joinpath("raw_articles.jsonl").read_text(encoding="utf-8"), encoding="utf-8"
    )
    (root / "stub_script.json").write_text(
        DEMO.joinpath("stub_script.json").read_text(encoding="utf-8"), encoding="utf-8"
    )
    (root / "config.yaml").write_text(
        DEMO.joinpath("config.yaml").read_text(encoding="utf-8"), encoding="utf-8"
    )

    config = load_config(root / "config.yaml")
    store = ingest_directory(raw_dir)
    store.save(config.corpus_dir)
    index = build_index(store, config.chunker, MockEmbeddingBackend(),
                        batch_size=config.embedding.batch_size)
    index.save(config.index_dir)
    return root


@pytest.fixture()
def demo_pipeline(demo_workspace) -> Pipeline:
    config = load_config(demo_workspace / "config.yaml")
    return Pipeline.from_config(config)
