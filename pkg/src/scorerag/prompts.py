"""Prompt assembly from the versioned template assets in ``prompt_templates/``.

Templates exist per pipeline stage and language (``zh-TW`` default, ``en``
fallback); the evaluation rubric ships in English only.
"""

from __future__ import annotations

import datetime as dt
from functools import lru_cache
from importlib import resources

from .errors import InvalidConfig

SUPPORTED_LANGUAGES = ("zh-TW", "en")


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    path = resources.files("scorerag").joinpath(f"prompt_templates/{name}.txt")
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InvalidConfig(f"no prompt template named {name!r}") from None


def _pick(stage: str, language: str) -> str:
    if language not in SUPPORTED_LANGUAGES:
        raise InvalidConfig(f"unsupported prompt language {language!r}")
    return load_template(f"{stage}_{language}")


def judge_prompt(
    query: str, published_date: dt.date, title: str, summary: str, language: str = "zh-TW"
) -> str:
    return _pick("judge", language).format(
        query=query, date=published_date.isoformat(), title=title, summary=summary
    )


# labels for summary content elements, keyed by (element tag, language)
_ELEMENT_LABELS = {
    ("core_facts", "zh-TW"): "核心事實",
    ("key_data", "zh-TW"): "關鍵數據",
    ("main_quotes", "zh-TW"): "主要引述",
    ("background", "zh-TW"): "背景資訊",
    ("brief_background", "zh-TW"): "簡要背景資訊",
    ("impact", "zh-TW"): "影響評估",
    ("core_facts", "en"): "core facts",
    ("key_data", "en"): "key data",
    ("main_quotes", "en"): "main quotes",
    ("background", "en"): "background information",
    ("brief_background", "en"): "brief background information",
    ("impact", "en"): "impact assessment",
}


def element_label(tag: str, language: str = "zh-TW") -> str:
    try:
        return _ELEMENT_LABELS[(tag, language)]
    except KeyError:
        raise InvalidConfig(f"no label for element {tag!r} in {language!r}") from None


def summary_prompt(
    title: str,
    published_date: dt.date,
    content: str,
    element_tags: list[str],
    language: str = "zh-TW",
) -> str:
    elements = "\n".join(f"- {element_label(tag, language)}" for tag in element_tags)
    return _pick("summarize", language).format(
        elements=elements, title=title, date=published_date.isoformat(), content=content
    )


def reference_block_text(
    ref_number: int,
    published_date: dt.date,
    title: str,
    consistency_score: float,
    summary_text: str,
    language: str = "zh-TW",
) -> str:
    if language == "zh-TW":
        return (
            f"[Reference {ref_number}]\n"
            f"日期：{published_date.isoformat()}\n"
            f"標題：{title}\n"
            f"一致性分數：{consistency_score:.2f}\n"
            f"摘要：{summary_text}"
        )
    return (
        f"[Reference {ref_number}]\n"
        f"Date: {published_date.isoformat()}\n"
        f"Title: {title}\n"
        f"Consistency score: {consistency_score:.2f}\n"
        f"Summary: {summary_text}"
    )


def generation_prompt(query: str, rendered_references: list[str], language: str = "zh-TW") -> str:
    if not rendered_references:
        return _pick("generate_noref", language).format(query=query)
    return _pick("generate", language).format(
        query=query, references="\n\n".join(rendered_references)
    )


def evaluation_prompt(body: str) -> str:
    return load_template("evaluate_en").format(body=body)
