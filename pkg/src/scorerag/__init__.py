"""Retrieval-augmented news generation with consistency scoring and
reranking, graded summarization, citation-grounded generation and a
weighted evaluation harness.  Runs fully offline against deterministic
stub backends."""

from .chunking import Chunk, SplitterConfig, chunk_article, split
from .config import PipelineConfig, load_config
from .corpus import CleaningRules, CorpusStore, NewsRecord, RawArticle, clean, clean_text
from .embedding import (
    EMBEDDING_DIM,
    EmbeddingBackendConfig,
    HttpEmbeddingBackend,
    MockEmbeddingBackend,
    embed_batch,
    mock_embed,
)
from .evaluation import (
    CRITERIA,
    WEIGHTS,
    ComparisonReport,
    EvaluationScore,
    compare,
    llm_judge,
    load_scores_csv,
    weighted_total,
)
from .generation import (
    GeneratedArticle,
    ReferenceBlock,
    build_context,
    generate,
    validate_citations,
)
from .llm import ChatRequest, HttpLLMClient, LLMConfig, ScriptedStubBackend, StubRule
from .pipeline import GenerateResponse, Pipeline, build_index
from .retrieval import RetrievedArticle, Retriever
from .scoring import (
    RelevanceBand,
    ScoredArticle,
    ScoringConfig,
    band_for,
    filter_and_rerank,
    judge_once,
    parse_judge_score,
    score_article,
)
from .summarizing import ContentElement, GradedSummary, SummaryGrade, grade_for, summarize
from .vector_index import ChunkMetadata, IndexedChunk, SearchHit, VectorIndex, sq_l2

__version__ = "0.1.0"
