"""Consistency scoring, threshold filtering and score-based reranking.

Each retrieved article is judged several times by the LLM against the
query using only date, title and summary; the judgments are averaged
(self-consistency) to damp sampling noise.  Articles whose mean score falls
below the threshold are dropped and the survivors are reordered by score.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass

from .errors import InvalidInput, UnparseableScore
from .llm import ChatRequest, LLMBackend
from .prompts import judge_prompt
from .retrieval import RetrievedArticle

logger = logging.getLogger(__name__)

_INT_RE = re.compile(r"\d+")


class RelevanceBand(enum.Enum):
    HIGH = "HIGH"            # 90-100: highly relevant
    STRONG = "STRONG"        # 70-89: strongly relevant
    SOMEWHAT = "SOMEWHAT"    # 50-69: somewhat relevant
    NOT = "NOT"              # 0-49: not relevant


def band_for(mean_score: float) -> RelevanceBand:
    """Rubric band for a mean score; lower bounds are closed so the real
    line [0, 100] is covered without gaps (89.5 is still STRONG)."""
    if not 0 <= mean_score <= 100:
        raise InvalidInput(f"mean score {mean_score} outside [0, 100]")
    if mean_score >= 90:
        return RelevanceBand.HIGH
    if mean_score >= 70:
        return RelevanceBand.STRONG
    if mean_score >= 50:
        return RelevanceBand.SOMEWHAT
    return RelevanceBand.NOT


@dataclass(frozen=True)
class ScoringConfig:
    num_samples: int = 3
    threshold: float = 20.0
    judge_temperature: float = 0.7
    prompt_language: str = "zh-TW"

    def __post_init__(self):
        if self.num_samples < 1:
            raise InvalidInput(f"num_samples must be >= 1, got {self.num_samples}")
        if not 0 <= self.threshold <= 100:
            raise InvalidInput(f"threshold must be in [0, 100], got {self.threshold}")


@dataclass(frozen=True)
class ScoredArticle:
    article: RetrievedArticle
    raw_scores: tuple[int, ...]
    mean_score: float
    band: RelevanceBand


def parse_judge_score(reply: str) -> int:
    """First integer in [0, 100] found in the reply.

    Judges are prompted to answer with the bare number; this recovers the
    score from chattier replies like ``"Score: 92/100"`` as well.
    """
    for match in _INT_RE.finditer(reply):
        value = int(match.group())
        if 0 <= value <= 100:
            return value
    raise UnparseableScore(f"no integer in [0, 100] found in judge reply {reply!r}")


def judge_once(
    query: str,
    published_date,
    title: str,
    summary: str,
    llm: LLMBackend,
    config: ScoringConfig | None = None,
) -> int:
    """One relevance judgment; unparseable replies are retried once, then
    scored 0 with a warning so a noisy judge cannot stall the pipeline."""
    if not title:
        raise InvalidInput("judge_once requires a non-empty title")
    config = config or ScoringConfig()
    prompt = judge_prompt(query, published_date, title, summary, config.prompt_language)
    for attempt in range(2):
        reply = llm.complete(
            ChatRequest(user_prompt=prompt, temperature=config.judge_temperature, tag="judge")
        )
        try:
            return parse_judge_score(reply)
        except UnparseableScore:
            if attempt == 0:
                logger.warning("unparseable judge reply %r, retrying once", reply[:80])
    logger.warning("judge reply unparseable after retry; treating article %r as score 0", title[:40])
    return 0


def score_article(
    query: str,
    article: RetrievedArticle,
    llm: LLMBackend,
    config: ScoringConfig | None = None,
) -> ScoredArticle:
    """Judge the article ``num_samples`` times independently and average."""
    config = config or ScoringConfig()
    record = article.record
    raw = tuple(
        judge_once(query, record.published_date, record.title, record.summary, llm, config)
        for _ in range(config.num_samples)
    )
    mean = sum(raw) / len(raw)
    return ScoredArticle(article=article, raw_scores=raw, mean_score=mean, band=band_for(mean))


def filter_and_rerank(
    scored: list[ScoredArticle], config: ScoringConfig | None = None
) -> list[ScoredArticle]:
    """Drop articles scoring strictly below the threshold, then sort the
    survivors by mean score descending; ties go to the newer article, then
    the smaller news_id."""
    config = config or ScoringConfig()
    survivors = [s for s in scored if s.mean_score >= config.threshold]
    survivors.sort(
        key=lambda s: (
            -s.mean_score,
            -s.article.record.published_date.toordinal(),
            s.article.record.news_id,
        )
    )
    return survivors
