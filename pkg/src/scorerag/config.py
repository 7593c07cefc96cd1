"""Pipeline configuration: file schema, defaults and env-var overrides.

Config files are YAML (or JSON) with sections mirroring the pipeline
stages; every leaf can be overridden by an environment variable named
``SCORERAG_<SECTION>_<KEY>`` (top-level keys drop the section part).
Relative paths are resolved against the config file's directory so a config
can travel with its data.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .chunking import SplitterConfig
from .embedding import EmbeddingBackendConfig
from .errors import InvalidConfig
from .llm import LLMConfig
from .scoring import ScoringConfig

ENV_PREFIX = "SCORERAG_"


@dataclass
class PipelineConfig:
    corpus_dir: str = "corpus"
    index_dir: str = "index"
    k: int = 4
    prompt_language: str = "zh-TW"
    port: int = 8000
    embedding_backend: str = "mock"  # mock | http
    summarize_temperature: float = 0.7
    generate_temperature: float = 0.7
    chunker: SplitterConfig = field(default_factory=SplitterConfig)
    embedding: EmbeddingBackendConfig = field(default_factory=EmbeddingBackendConfig)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    llm: LLMConfig = field(default_factory=LLMConfig)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig(f"k must be >= 1, got {self.k}")
        if self.embedding_backend not in ("mock", "http"):
            raise InvalidConfig(f"embedding backend must be mock or http, got {self.embedding_backend!r}")


def _env(name: str, cast, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        if cast is bool:
            return raw.lower() in ("1", "true", "yes")
        return cast(raw)
    except ValueError as exc:
        raise InvalidConfig(f"cannot parse env {ENV_PREFIX + name}={raw!r}: {exc}") from exc


def _section(data: dict, name: str) -> dict:
    value = data.get(name) or {}
    if not isinstance(value, dict):
        raise InvalidConfig(f"config section {name!r} must be a mapping")
    return value


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Build a PipelineConfig from an optional file plus env overrides."""
    data: dict = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        base = path.parent
        text = path.read_text(encoding="utf-8")
        data = (json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)) or {}
        if not isinstance(data, dict):
            raise InvalidConfig(f"config file {path} must hold a mapping")

    chunker_d = _section(data, "chunker")
    embedding_d = _section(data, "embedding")
    scoring_d = _section(data, "scoring")
    llm_d = _section(data, "llm")
    summarizer_d = _section(data, "summarizer")

    def resolve(p: str | None) -> str | None:
        if p is None:
            return None
        p = str(p)
        return p if os.path.isabs(p) else str((base / p).resolve())

    separators = chunker_d.get("separators")
    chunker = SplitterConfig(
        chunk_size=_env("CHUNKER_CHUNK_SIZE", int, int(chunker_d.get("chunk_size", 500))),
        chunk_overlap=_env("CHUNKER_CHUNK_OVERLAP", int, int(chunker_d.get("chunk_overlap", 50))),
        separators=tuple(separators) if separators is not None else SplitterConfig().separators,
    )
    embedding = EmbeddingBackendConfig(
        endpoint_url=_env("EMBEDDING_ENDPOINT_URL", str, embedding_d.get("endpoint_url", "")),
        model_name=_env("EMBEDDING_MODEL_NAME", str, embedding_d.get("model_name", "multilingual-e5-large")),
        batch_size=_env("EMBEDDING_BATCH_SIZE", int, int(embedding_d.get("batch_size", 1000))),
        device_hint=embedding_d.get("device_hint"),
        query_prefix=embedding_d.get("query_prefix", ""),
        passage_prefix=embedding_d.get("passage_prefix", ""),
        timeout_secs=float(embedding_d.get("timeout_secs", 60.0)),
    )
    prompt_language = _env(
        "SUMMARIZER_PROMPT_LANGUAGE", str, summarizer_d.get("prompt_language", "zh-TW")
    )
    scoring = ScoringConfig(
        num_samples=_env("SCORING_NUM_SAMPLES", int, int(scoring_d.get("num_samples", 3))),
        threshold=_env("SCORING_THRESHOLD", float, float(scoring_d.get("threshold", 20.0))),
        judge_temperature=_env("SCORING_TEMPERATURE", float, float(scoring_d.get("temperature", 0.7))),
        prompt_language=prompt_language,
    )
    llm = LLMConfig(
        dialect=_env("LLM_DIALECT", str, llm_d.get("dialect", "stub")),
        endpoint_url=_env("LLM_ENDPOINT_URL", str, llm_d.get("endpoint_url", "")),
        model_name=_env("LLM_MODEL_NAME", str, llm_d.get("model_name", "llama3.1:8b")),
        timeout_secs=_env("LLM_TIMEOUT_SECS", float, float(llm_d.get("timeout_secs", 120.0))),
        stub_script=resolve(_env("LLM_STUB_SCRIPT", str, llm_d.get("stub_script"))),
        capture_transcript=bool(llm_d.get("capture_transcript", False)),
    )
    return PipelineConfig(
        corpus_dir=resolve(_env("CORPUS_DIR", str, data.get("corpus_dir", "corpus"))),
        index_dir=resolve(_env("INDEX_DIR", str, data.get("index_dir", "index"))),
        k=_env("K", int, int(data.get("k", 4))),
        prompt_language=prompt_language,
        port=_env("PORT", int, int(data.get("port", 8000))),
        embedding_backend=_env("EMBEDDING_BACKEND", str, embedding_d.get("backend", "mock")),
        summarize_temperature=float(data.get("summarize_temperature", 0.7)),
        generate_temperature=float(data.get("generate_temperature", 0.7)),
        chunker=chunker,
        embedding=embedding,
        scoring=scoring,
        llm=llm,
    )


def redacted_dict(config: PipelineConfig) -> dict:
    """Config as a JSON-safe dict with secrets left out (none are stored,
    tokens live in env vars that are never echoed)."""
    return {
        "corpus_dir": config.corpus_dir,
        "index_dir": config.index_dir,
        "k": config.k,
        "prompt_language": config.prompt_language,
        "port": config.port,
        "embedding": {
            "backend": config.embedding_backend,
            "endpoint_url": config.embedding.endpoint_url,
            "model_name": config.embedding.model_name,
            "batch_size": config.embedding.batch_size,
        },
        "scoring": {
            "num_samples": config.scoring.num_samples,
            "threshold": config.scoring.threshold,
            "temperature": config.scoring.judge_temperature,
        },
        "llm": {
            "dialect": config.llm.dialect,
            "endpoint_url": config.llm.endpoint_url,
            "model_name": config.llm.model_name,
            "timeout_secs": config.llm.timeout_secs,
        },
        "chunker": {
            "chunk_size": config.chunker.chunk_size,
            "chunk_overlap": config.chunker.chunk_overlap,
            "separators": list(config.chunker.separators),
        },
    }
