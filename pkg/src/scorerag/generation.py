"""Reference assembly, guided article generation and citation validation.

Surviving articles become numbered reference blocks (date, title,
consistency score, graded summary) in rerank order; the generation prompt
couples them with the citation/factuality/tone/time-stamping instructions.
The produced body is scanned for ``(Reference X)`` citations, accepting
full-width parentheses since Chinese copy commonly uses them.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
import datetime as dt

from .errors import (
    AlignmentError,
    BackendRefused,
    BackendTimeout,
    BackendUnreachable,
    GenerationBackendError,
    InvalidInput,
)
from .llm import ChatRequest, LLMBackend
from .prompts import generation_prompt, reference_block_text
from .scoring import ScoredArticle
from .summarizing import GradedSummary

logger = logging.getLogger(__name__)

CITATION_RE = re.compile(r"[(（]\s*reference\s+(\d+)\s*[)）]", re.IGNORECASE)


@dataclass(frozen=True)
class ReferenceBlock:
    ref_number: int
    published_date: dt.date
    title: str
    consistency_score: float
    summary_text: str


@dataclass
class GeneratedArticle:
    query: str
    body: str
    references: list[ReferenceBlock]
    citations_found: list[tuple[int, int]]  # (position in body, ref_number)
    warnings: list[str] = field(default_factory=list)


def build_context(
    summaries: list[GradedSummary], scored: list[ScoredArticle]
) -> list[ReferenceBlock]:
    """Pair graded summaries with their scored articles, numbering from 1.

    Both lists must be aligned 1:1 in reranked order.
    """
    if len(summaries) != len(scored):
        raise AlignmentError(
            f"{len(summaries)} summaries cannot align with {len(scored)} scored articles"
        )
    blocks = []
    for i, (summary, scored_article) in enumerate(zip(summaries, scored), start=1):
        record = scored_article.article.record
        if summary.news_id != record.news_id:
            raise AlignmentError(
                f"summary for article {summary.news_id} paired with record {record.news_id}"
            )
        blocks.append(
            ReferenceBlock(
                ref_number=i,
                published_date=record.published_date,
                title=record.title,
                consistency_score=scored_article.mean_score,
                summary_text=summary.text,
            )
        )
    return blocks


def validate_citations(body: str, ref_count: int) -> tuple[list[tuple[int, int]], list[str]]:
    """Scan for citation tokens; report dangling and never-cited references.

    Pure: never mutates the body, same inputs give the same output.
    """
    if ref_count < 0:
        raise InvalidInput(f"ref_count must be >= 0, got {ref_count}")
    citations: list[tuple[int, int]] = []
    warnings: list[str] = []
    cited: set[int] = set()
    for match in CITATION_RE.finditer(body):
        number = int(match.group(1))
        citations.append((match.start(), number))
        if 1 <= number <= ref_count:
            cited.add(number)
        else:
            warnings.append(f"dangling citation {number}")
    for number in range(1, ref_count + 1):
        if number not in cited:
            warnings.append(f"reference {number} uncited")
    return citations, warnings


def generate(
    query: str,
    refs: list[ReferenceBlock],
    llm: LLMBackend,
    prompt_language: str = "zh-TW",
    temperature: float = 0.7,
) -> GeneratedArticle:
    """One guided LLM call producing the final article, citations validated.

    With no references the article is still generated (zero-shot style) and
    flagged with a prominent warning rather than refused.
    """
    if not query:
        raise InvalidInput("generate requires a non-empty query")
    rendered = [
        reference_block_text(
            r.ref_number, r.published_date, r.title, r.consistency_score, r.summary_text,
            prompt_language,
        )
        for r in refs
    ]
    prompt = generation_prompt(query, rendered, prompt_language)
    try:
        body = llm.complete(
            ChatRequest(user_prompt=prompt, temperature=temperature, tag="generate")
        )
    except (BackendUnreachable, BackendRefused, BackendTimeout) as exc:
        raise GenerationBackendError(f"generation call failed: {exc}") from exc

    citations, warnings = validate_citations(body, len(refs))
    if not refs:
        warnings.insert(0, "no grounded references: article generated from the model alone")
    return GeneratedArticle(
        query=query,
        body=body,
        references=refs,
        citations_found=citations,
        warnings=warnings,
    )
