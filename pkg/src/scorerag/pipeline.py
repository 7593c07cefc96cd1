"""End-to-end wiring: retrieve, score, filter/rerank, summarize, generate.

One ``Pipeline`` object owns the loaded corpus, index and backends; both the
CLI and the HTTP service call the same :meth:`Pipeline.run`, so their
outputs cannot drift apart.  The response carries the generated article,
every scored article (kept or filtered, for UI transparency) and per-stage
wall-clock timings.  Timings are the single non-deterministic field, so the
canonical serialization used for golden comparisons excludes them.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import embedding as embedding_mod
from . import llm as llm_mod
from .chunking import SplitterConfig, chunk_article
from .config import PipelineConfig
from .corpus import CorpusStore
from .errors import EmptyCorpus, InvalidInput, PipelineStageError, ScoreRAGError
from .generation import GeneratedArticle, build_context, generate
from .retrieval import Retriever
from .scoring import ScoredArticle, ScoringConfig, filter_and_rerank, score_article
from .summarizing import SummaryGrade, grade_for, summarize
from .vector_index import ChunkMetadata, IndexedChunk, VectorIndex

logger = logging.getLogger(__name__)


def build_index(
    corpus: CorpusStore,
    chunker: SplitterConfig,
    backend: embedding_mod.EmbeddingBackend,
    batch_size: int = 1000,
    passage_prefix: str = "",
) -> VectorIndex:
    """Chunk every stored article, embed the chunks, build a fresh index."""
    if len(corpus) == 0:
        raise EmptyCorpus("cannot index an empty corpus")
    chunks = []
    for record in corpus.all_records():
        chunks.extend(chunk_article(record, chunker))
    if not chunks:
        raise EmptyCorpus("corpus produced no chunks to index")
    vectors = embedding_mod.embed_batch(
        [passage_prefix + c.text for c in chunks], backend, batch_size
    )
    index = VectorIndex()
    index.add(
        IndexedChunk(
            chunk_id=chunk.chunk_id,
            vector=vector,
            metadata=ChunkMetadata(
                published_date=corpus.get_full(chunk.news_id).published_date,
                title=corpus.get_full(chunk.news_id).title,
                news_id=chunk.news_id,
            ),
            page_content=chunk.text,
        )
        for chunk, vector in zip(chunks, vectors)
    )
    return index


@dataclass
class GenerateResponse:
    article: GeneratedArticle
    scored: list[ScoredArticle]
    kept_news_ids: list[int]
    k: int
    threshold: float
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = True) -> dict:
        art = self.article
        payload = {
            "query": art.query,
            "body": art.body,
            "references": [
                {
                    "ref_number": r.ref_number,
                    "date": r.published_date.isoformat(),
                    "title": r.title,
                    "score": round(r.consistency_score, 2),
                    "summary": r.summary_text,
                }
                for r in art.references
            ],
            "citations": [
                {"position": pos, "ref_number": num} for pos, num in art.citations_found
            ],
            "warnings": list(art.warnings),
            "scored_articles": [
                {
                    "news_id": s.article.record.news_id,
                    "title": s.article.record.title,
                    "published_date": s.article.record.published_date.isoformat(),
                    "best_distance": round(s.article.best_distance, 6),
                    "matched_chunk_ids": list(s.article.matched_chunk_ids),
                    "raw_scores": list(s.raw_scores),
                    "mean_score": round(s.mean_score, 2),
                    "band": s.band.value,
                    "kept": s.article.record.news_id in set(self.kept_news_ids),
                    "drop_reason": (
                        None
                        if s.article.record.news_id in set(self.kept_news_ids)
                        else f"below threshold {self.threshold:g}"
                    ),
                }
                for s in self.scored
            ],
            "k": self.k,
            "threshold": self.threshold,
        }
        if include_timings:
            payload["timings"] = self.timings
        return payload

    def canonical_json(self) -> str:
        """Deterministic serialization: wall-clock timings excluded."""
        return json.dumps(self.to_dict(include_timings=False), ensure_ascii=False, sort_keys=True)


class Pipeline:
    """Shared read-only state plus the staged query path."""

    def __init__(
        self,
        config: PipelineConfig,
        corpus: CorpusStore,
        index: VectorIndex,
        llm_backend: llm_mod.LLMBackend,
        embedding_backend: embedding_mod.EmbeddingBackend,
    ):
        self.config = config
        self.corpus = corpus
        self.index = index
        self.llm = llm_backend
        self.embedder = embedding_backend
        prefix = config.embedding.query_prefix
        self.retriever = Retriever(
            index,
            corpus,
            embed_query=lambda q: embedding_mod.embed_batch([prefix + q], embedding_backend)[0],
        )

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "Pipeline":
        corpus = CorpusStore.load(config.corpus_dir)
        if len(corpus) == 0:
            raise EmptyCorpus(f"no records found under {config.corpus_dir}")
        index_dir = Path(config.index_dir)
        if not (index_dir / "vectors.bin").exists():
            raise EmptyCorpus(f"no index found under {config.index_dir}; run `scorerag index`")
        index = VectorIndex.load(index_dir)
        llm_backend = llm_mod.backend_from_config(config.llm)
        embedder = embedding_mod.backend_from_config(config.embedding, config.embedding_backend)
        return cls(config, corpus, index, llm_backend, embedder)

    def run(self, query: str, k: int | None = None, threshold: float | None = None) -> GenerateResponse:
        """Execute the full pipeline for one query.

        ``k`` and ``threshold`` are bounded per-request overrides; stage
        failures surface as :class:`PipelineStageError` with the stage name
        and whatever intermediate results already existed.
        """
        if not query:
            raise InvalidInput("query must be non-empty")
        k = self.config.k if k is None else k
        threshold = self.config.scoring.threshold if threshold is None else float(threshold)
        if not 1 <= k <= 50:
            raise InvalidInput(f"k override must be in [1, 50], got {k}")
        if not 0 <= threshold <= 100:
            raise InvalidInput(f"threshold override must be in [0, 100], got {threshold}")

        scoring_cfg = ScoringConfig(
            num_samples=self.config.scoring.num_samples,
            threshold=threshold,
            judge_temperature=self.config.scoring.judge_temperature,
            prompt_language=self.config.prompt_language,
        )
        timings: dict[str, float] = {}
        partial: dict = {}
        pipeline_warnings: list[str] = []
        t_start = time.perf_counter()

        def stage(name: str, fn):
            begin = time.perf_counter()
            try:
                result = fn()
            except ScoreRAGError as exc:
                raise PipelineStageError(name, exc, partial=dict(partial)) from exc
            timings[name] = time.perf_counter() - begin
            return result

        retrieved = stage(
            "retrieve",
            lambda: self.retriever.retrieve(query, k, on_warning=pipeline_warnings.append),
        )
        partial["retrieved"] = retrieved

        scored = stage(
            "score",
            lambda: [score_article(query, art, self.llm, scoring_cfg) for art in retrieved],
        )
        partial["scored"] = scored

        survivors = stage("filter_rerank", lambda: filter_and_rerank(scored, scoring_cfg))
        partial["survivors"] = survivors

        def summarize_all():
            out = []
            for s in survivors:
                # a sub-20 threshold override can admit articles below the
                # grading floor; they get the most minimal summary
                grade = grade_for(s.mean_score) if s.mean_score >= 20 else SummaryGrade.MINIMAL
                out.append(
                    summarize(
                        s.article.record,
                        grade,
                        self.llm,
                        source_score=s.mean_score,
                        prompt_language=self.config.prompt_language,
                        temperature=self.config.summarize_temperature,
                    )
                )
            return out

        summaries = stage("summarize", summarize_all)
        partial["summaries"] = summaries

        refs = stage("build_context", lambda: build_context(summaries, survivors))
        article = stage(
            "generate",
            lambda: generate(
                query,
                refs,
                self.llm,
                prompt_language=self.config.prompt_language,
                temperature=self.config.generate_temperature,
            ),
        )
        article.warnings.extend(pipeline_warnings)
        timings["total"] = time.perf_counter() - t_start

        return GenerateResponse(
            article=article,
            scored=scored,
            kept_news_ids=[s.article.record.news_id for s in survivors],
            k=k,
            threshold=threshold,
            timings=timings,
        )
