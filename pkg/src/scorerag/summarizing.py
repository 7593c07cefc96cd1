"""Score-graded summarization: higher-scoring articles get richer summaries.

The consistency score picks a summary grade; the grade fixes which content
elements the summarization prompt demands.  One constant table controls the
band edges and the element sets, since both were resolved from qualitative
prose and may need a single place to adjust.
"""

from __future__ import annotations

import enum
import logging

from dataclasses import dataclass

from .corpus import NewsRecord
from .errors import OutOfRange
from .llm import ChatRequest, LLMBackend
from .prompts import summary_prompt

logger = logging.getLogger(__name__)


class ContentElement(enum.Enum):
    CORE_FACTS = "core_facts"
    KEY_DATA = "key_data"
    MAIN_QUOTES = "main_quotes"
    BACKGROUND = "background"
    IMPACT = "impact"


class SummaryGrade(enum.Enum):
    FULL = "FULL"          # score above 70
    STANDARD = "STANDARD"  # score in (50, 70]
    CORE = "CORE"          # score in (30, 50]
    MINIMAL = "MINIMAL"    # score in [20, 30]

    @property
    def required_elements(self) -> frozenset[ContentElement]:
        return GRADE_ELEMENTS[self]


# STANDARD asks for background too, rendered as "brief background" in the
# prompt, so element sets stay nested as grades climb.
GRADE_ELEMENTS: dict[SummaryGrade, frozenset[ContentElement]] = {
    SummaryGrade.FULL: frozenset(
        {
            ContentElement.CORE_FACTS,
            ContentElement.KEY_DATA,
            ContentElement.MAIN_QUOTES,
            ContentElement.BACKGROUND,
            ContentElement.IMPACT,
        }
    ),
    SummaryGrade.STANDARD: frozenset(
        {
            ContentElement.CORE_FACTS,
            ContentElement.KEY_DATA,
            ContentElement.MAIN_QUOTES,
            ContentElement.BACKGROUND,
        }
    ),
    SummaryGrade.CORE: frozenset({ContentElement.CORE_FACTS, ContentElement.KEY_DATA}),
    SummaryGrade.MINIMAL: frozenset({ContentElement.CORE_FACTS}),
}

# (lower, upper, grade) with the lower edge open except for the bottom band,
# covering [20, 100] without gaps: (70,100] (50,70] (30,50] [20,30]
GRADE_BOUNDS: tuple[tuple[float, float, SummaryGrade], ...] = (
    (70.0, 100.0, SummaryGrade.FULL),
    (50.0, 70.0, SummaryGrade.STANDARD),
    (30.0, 50.0, SummaryGrade.CORE),
    (20.0, 30.0, SummaryGrade.MINIMAL),
)


def grade_for(score: float) -> SummaryGrade:
    """Summary grade for a consistency score in [20, 100]."""
    if score < 20.0 or score > 100.0:
        raise OutOfRange(f"summary grading requires a score in [20, 100], got {score}")
    for lower, upper, grade in GRADE_BOUNDS:
        if (score > lower or (grade is SummaryGrade.MINIMAL and score >= lower)) and score <= upper:
            return grade
    raise OutOfRange(f"no grade band covers score {score}")  # unreachable


def _prompt_element_tags(grade: SummaryGrade) -> list[str]:
    """Element tags in presentation order; STANDARD's background renders brief."""
    order = [
        ContentElement.CORE_FACTS,
        ContentElement.KEY_DATA,
        ContentElement.MAIN_QUOTES,
        ContentElement.BACKGROUND,
        ContentElement.IMPACT,
    ]
    tags = []
    for element in order:
        if element not in grade.required_elements:
            continue
        if element is ContentElement.BACKGROUND and grade is SummaryGrade.STANDARD:
            tags.append("brief_background")
        else:
            tags.append(element.value)
    return tags


@dataclass(frozen=True)
class GradedSummary:
    news_id: int
    grade: SummaryGrade
    text: str
    source_score: float


def summarize(
    article: NewsRecord,
    grade: SummaryGrade,
    llm: LLMBackend,
    source_score: float,
    prompt_language: str = "zh-TW",
    temperature: float = 0.7,
) -> GradedSummary:
    """Summarize the full article content at the requested grade.

    A blank LLM reply is retried once; if the model stays silent the stored
    summary field is used (or a content snippet when that is empty too).
    """
    prompt = summary_prompt(
        article.title,
        article.published_date,
        article.content,
        _prompt_element_tags(grade),
        prompt_language,
    )
    text = ""
    for attempt in range(2):
        text = llm.complete(
            ChatRequest(user_prompt=prompt, temperature=temperature, tag="summarize")
        ).strip()
        if text:
            break
        if attempt == 0:
            logger.warning("blank summary reply for article %s, retrying", article.news_id)
    if not text:
        logger.warning(
            "summarization backend stayed blank for article %s; falling back to stored summary",
            article.news_id,
        )
        text = article.summary.strip() or article.content[:200]
    return GradedSummary(
        news_id=article.news_id, grade=grade, text=text, source_score=source_score
    )
