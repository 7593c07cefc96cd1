"""Four-criterion weighted evaluation and paired system comparison.

Generated articles are scored 1-5 on coherence, accuracy, professionalism
and informativeness, either by an LLM judge with the anchored rubric or by
human raters whose scores arrive as CSV.  Totals always use the fixed
weights 0.2 / 0.35 / 0.1 / 0.35 (accuracy and informativeness dominate
because hallucination and thin context are what the pipeline targets).
Two systems are compared pairwise by article id: per-criterion means,
boxplot quartiles and two-sided paired t-tests.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import InvalidInput, MismatchedIds, OutOfRange, UnparseableScores
from .llm import ChatRequest, LLMBackend
from .prompts import evaluation_prompt

logger = logging.getLogger(__name__)

CRITERIA = ("coherence", "accuracy", "professionalism", "informativeness")

WEIGHTS = {
    "coherence": 0.2,
    "accuracy": 0.35,
    "professionalism": 0.1,
    "informativeness": 0.35,
}


def weighted_total(
    coherence: float, accuracy: float, professionalism: float, informativeness: float
) -> float:
    """0.2*coherence + 0.35*accuracy + 0.1*professionalism + 0.35*informativeness."""
    values = {
        "coherence": coherence,
        "accuracy": accuracy,
        "professionalism": professionalism,
        "informativeness": informativeness,
    }
    for name, value in values.items():
        if not 1.0 <= value <= 5.0:
            raise OutOfRange(f"{name} score {value} outside [1, 5]")
    return sum(WEIGHTS[name] * values[name] for name in CRITERIA)


@dataclass(frozen=True)
class EvaluationScore:
    article_id: str
    system_label: str
    coherence: float
    accuracy: float
    professionalism: float
    informativeness: float
    weighted_total: float
    rater: str = "llm"

    @classmethod
    def from_criteria(
        cls,
        article_id: str,
        system_label: str,
        coherence: float,
        accuracy: float,
        professionalism: float,
        informativeness: float,
        rater: str = "llm",
    ) -> "EvaluationScore":
        return cls(
            article_id=article_id,
            system_label=system_label,
            coherence=coherence,
            accuracy=accuracy,
            professionalism=professionalism,
            informativeness=informativeness,
            weighted_total=weighted_total(coherence, accuracy, professionalism, informativeness),
            rater=rater,
        )

    def criterion(self, name: str) -> float:
        return getattr(self, name)


def parse_evaluation_reply(reply: str) -> dict[str, float]:
    """Extract the four criterion scores from a judge reply.

    Accepts ``name: value`` lines in any order as well as a JSON object.
    """
    values: dict[str, float] = {}
    # JSON-shaped replies first
    start, end = reply.find("{"), reply.rfind("}")
    if start != -1 and end > start:
        try:
            data = json.loads(reply[start : end + 1])
            for name in CRITERIA:
                if name in data:
                    values[name] = float(data[name])
        except (ValueError, TypeError):
            pass
    if len(values) < 4:
        for name in CRITERIA:
            if name in values:
                continue
            match = re.search(rf"{name}\s*[:=]?\s*([0-9]+(?:\.[0-9]+)?)", reply, re.IGNORECASE)
            if match:
                values[name] = float(match.group(1))
    missing = [name for name in CRITERIA if name not in values]
    if missing:
        raise UnparseableScores(f"criteria {missing} not found in reply {reply!r}")
    for name, value in values.items():
        if not 1.0 <= value <= 5.0:
            raise UnparseableScores(f"{name} score {value} outside [1, 5] in reply {reply!r}")
    return values


def llm_judge(
    article_id: str,
    body: str,
    llm: LLMBackend,
    system_label: str,
    temperature: float = 0.0,
) -> EvaluationScore:
    """Score one generated article with the anchored rubric.

    An unparseable reply is retried once; a second failure raises
    :class:`UnparseableScores` so callers can mark the article unevaluated
    rather than defaulting silently.
    """
    if not body:
        raise InvalidInput("llm_judge requires a non-empty article body")
    prompt = evaluation_prompt(body)
    last_error: UnparseableScores | None = None
    for attempt in range(2):
        reply = llm.complete(
            ChatRequest(user_prompt=prompt, temperature=temperature, tag="evaluate")
        )
        try:
            values = parse_evaluation_reply(reply)
        except UnparseableScores as exc:
            last_error = exc
            if attempt == 0:
                logger.warning("unparseable evaluation reply for %s, retrying", article_id)
            continue
        return EvaluationScore.from_criteria(
            article_id, system_label, values["coherence"], values["accuracy"],
            values["professionalism"], values["informativeness"], rater="llm",
        )
    raise last_error  # type: ignore[misc]


def judge_articles(
    items: list[tuple[str, str]],
    llm: LLMBackend,
    system_label: str,
) -> tuple[list[EvaluationScore], list[str]]:
    """Judge ``(article_id, body)`` pairs; unevaluable ids are returned, not defaulted."""
    scores: list[EvaluationScore] = []
    unevaluated: list[str] = []
    for article_id, body in items:
        try:
            scores.append(llm_judge(article_id, body, llm, system_label))
        except UnparseableScores:
            logger.warning("article %s marked unevaluated", article_id)
            unevaluated.append(article_id)
    return scores, unevaluated


def load_scores_csv(path: str | Path) -> list[EvaluationScore]:
    """Read rater scores; totals are recomputed, never trusted from the file.

    Expected columns: article_id, system, coherence, accuracy,
    professionalism, informativeness, rater.
    """
    out = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"article_id", "system", *CRITERIA}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise InvalidInput(
                f"scores CSV must carry columns {sorted(required)}, got {reader.fieldnames}"
            )
        for row in reader:
            out.append(
                EvaluationScore.from_criteria(
                    article_id=row["article_id"],
                    system_label=row["system"],
                    coherence=float(row["coherence"]),
                    accuracy=float(row["accuracy"]),
                    professionalism=float(row["professionalism"]),
                    informativeness=float(row["informativeness"]),
                    rater=row.get("rater", "") or "unknown",
                )
            )
    return out


def _quartiles(values: list[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=np.float64)
    return {
        "min": float(arr.min()),
        "q1": float(np.percentile(arr, 25)),
        "median": float(np.percentile(arr, 50)),
        "q3": float(np.percentile(arr, 75)),
        "max": float(arr.max()),
    }


def _paired_t(a: list[float], b: list[float]) -> float:
    """Two-sided paired t-test p-value; identical samples give p = 1.0."""
    diffs = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    if np.allclose(diffs, 0.0):
        return 1.0
    if len(diffs) < 2 or np.allclose(diffs, diffs[0]):
        # zero variance with a non-zero shift: the paired test degenerates
        return 0.0
    return float(stats.ttest_rel(a, b).pvalue)


@dataclass
class ComparisonReport:
    system_a: str
    system_b: str
    n_articles: int
    means_a: dict[str, float]          # per criterion plus "total"
    means_b: dict[str, float]
    mean_difference: dict[str, float]  # a minus b
    quartiles_a: dict[str, float]      # of weighted totals
    quartiles_b: dict[str, float]
    p_values: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "systems": [self.system_a, self.system_b],
            "n_articles": self.n_articles,
            "means": {self.system_a: self.means_a, self.system_b: self.means_b},
            "mean_difference": self.mean_difference,
            "quartiles": {self.system_a: self.quartiles_a, self.system_b: self.quartiles_b},
            "p_values": self.p_values,
        }


def compare(scores_a: list[EvaluationScore], scores_b: list[EvaluationScore]) -> ComparisonReport:
    """Compare two systems' scores paired by article_id.

    Means are plain arithmetic means of the inputs (no re-weighting); the
    significance test is a two-sided paired t-test per criterion and total.
    """
    if not scores_a or not scores_b:
        raise InvalidInput("compare requires non-empty score lists for both systems")
    by_id_a = {s.article_id: s for s in scores_a}
    by_id_b = {s.article_id: s for s in scores_b}
    if len(by_id_a) != len(scores_a) or len(by_id_b) != len(scores_b):
        raise MismatchedIds("duplicate article_id within one system's scores")
    if set(by_id_a) != set(by_id_b):
        only_a = sorted(set(by_id_a) - set(by_id_b))
        only_b = sorted(set(by_id_b) - set(by_id_a))
        raise MismatchedIds(
            f"article ids differ between systems (only in a: {only_a}, only in b: {only_b})"
        )

    ids = sorted(by_id_a)
    a = [by_id_a[i] for i in ids]
    b = [by_id_b[i] for i in ids]

    def column(scores: list[EvaluationScore], name: str) -> list[float]:
        if name == "total":
            return [s.weighted_total for s in scores]
        return [s.criterion(name) for s in scores]

    fields = list(CRITERIA) + ["total"]
    means_a = {name: float(np.mean(column(a, name))) for name in fields}
    means_b = {name: float(np.mean(column(b, name))) for name in fields}
    return ComparisonReport(
        system_a=a[0].system_label,
        system_b=b[0].system_label,
        n_articles=len(ids),
        means_a=means_a,
        means_b=means_b,
        mean_difference={name: means_a[name] - means_b[name] for name in fields},
        quartiles_a=_quartiles(column(a, "total")),
        quartiles_b=_quartiles(column(b, "total")),
        p_values={name: _paired_t(column(a, name), column(b, name)) for name in fields},
    )
