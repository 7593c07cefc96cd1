"""Article cleaning and the year-partitioned document store.

Raw scraped markup is reduced to plain news text (tags stripped, script/style
blocks and ad lines dropped, whitespace normalized with ``\\n\\n`` paragraph
breaks) and kept as :class:`NewsRecord` rows in per-year JSONL files named
``news_<year>.jsonl``.
"""

from __future__ import annotations

import datetime as dt
import html
import json
import logging
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateId, EmptyAfterCleaning, InvalidRecord, NotFound

logger = logging.getLogger(__name__)

HTML_TAG_RE = re.compile(r"<[a-zA-Z/!][^>]*>")

# tags whose entire content is noise, not text
_DROP_BLOCK_RE = re.compile(
    r"<(script|style|noscript)\b[^>]*>.*?</\1\s*>", re.IGNORECASE | re.DOTALL
)
# tags that imply a paragraph boundary when removed
_PARAGRAPH_TAG_RE = re.compile(
    r"</?(?:p|div|br|li|ul|ol|table|tr|td|th|h[1-6]|section|article|header|"
    r"footer|aside|blockquote|figure|figcaption)\b[^>]*/?>",
    re.IGNORECASE,
)
_BLANK_RUN_RE = re.compile(r"\n\s*\n+")
_SPACE_RUN_RE = re.compile(r"[^\S\n]+")

DEFAULT_AD_MARKERS: tuple[str, ...] = (
    "廣告",
    "贊助內容",
    "推薦閱讀",
    "延伸閱讀",
    "訂閱電子報",
    "加入好友",
    "Advertisement",
    "Sponsored",
)


@dataclass(frozen=True)
class CleaningRules:
    """Rule-driven noise removal; marker strings drop whole lines."""

    ad_markers: tuple[str, ...] = DEFAULT_AD_MARKERS


@dataclass(frozen=True)
class RawArticle:
    source_markup: str
    scraped_date: dt.date
    source_url: str | None = None


def clean_text(markup: str, rules: CleaningRules | None = None) -> str:
    """Reduce one markup/text field to clean plain text.

    Strips HTML tags, removes script/style blocks, drops lines carrying an
    ad marker, collapses whitespace runs to single spaces and renders
    paragraph breaks as ``\\n\\n``.  Raises :class:`EmptyAfterCleaning` when
    nothing survives.
    """
    rules = rules or CleaningRules()
    text = markup
    # Entity-unescape until stable so entity-encoded tags cannot survive one
    # pass; each round re-strips whatever the unescape revealed.
    for _ in range(10):
        stripped = _DROP_BLOCK_RE.sub(" ", text)
        stripped = _PARAGRAPH_TAG_RE.sub("\n\n", stripped)
        stripped = HTML_TAG_RE.sub("", stripped)
        unescaped = html.unescape(stripped)
        if unescaped == text:
            break
        text = unescaped

    kept_lines = []
    for line in text.split("\n"):
        if any(marker in line for marker in rules.ad_markers):
            continue
        kept_lines.append(line)
    text = "\n".join(kept_lines)

    paragraphs = []
    for para in _BLANK_RUN_RE.split(text):
        para = _SPACE_RUN_RE.sub(" ", para.replace("\n", " ")).strip()
        if para:
            paragraphs.append(para)
    cleaned = "\n\n".join(paragraphs)
    if not cleaned:
        raise EmptyAfterCleaning("no article text survived cleaning")
    return cleaned


def clean(raw: RawArticle, rules: CleaningRules | None = None) -> str:
    """Clean a raw scraped article's markup into plain article text."""
    if not raw.source_markup:
        raise EmptyAfterCleaning("raw article has no markup")
    return clean_text(raw.source_markup, rules)


@dataclass(frozen=True)
class NewsRecord:
    """A cleaned article; the unit of storage and citation."""

    news_id: int
    published_date: dt.date
    title: str
    summary: str
    content: str

    def __post_init__(self):
        if not isinstance(self.news_id, int):
            raise InvalidRecord(f"news_id must be an integer, got {self.news_id!r}")
        if not self.title:
            raise InvalidRecord(f"record {self.news_id}: empty title")
        if not self.content:
            raise InvalidRecord(f"record {self.news_id}: empty content")
        if HTML_TAG_RE.search(self.content):
            raise InvalidRecord(f"record {self.news_id}: content still carries HTML tags")

    def to_json_dict(self) -> dict:
        return {
            "news_id": self.news_id,
            "published_date": self.published_date.isoformat(),
            "title": self.title,
            "summary": self.summary,
            "content": self.content,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "NewsRecord":
        return cls(
            news_id=int(d["news_id"]),
            published_date=dt.date.fromisoformat(d["published_date"]),
            title=d["title"],
            summary=d.get("summary", ""),
            content=d["content"],
        )


@dataclass
class YearPartition:
    year: int
    records: list[NewsRecord] = field(default_factory=list)


class CorpusStore:
    """Embedded document store, partitioned by publication year.

    Concurrent reads are safe; writes are serialized by a store-level lock.
    """

    def __init__(self):
        self._by_id: dict[int, NewsRecord] = {}
        self._partitions: dict[int, YearPartition] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._by_id)

    def put(self, record: NewsRecord) -> int:
        """Store a record, routed to its year partition; returns the year."""
        with self._write_lock:
            if record.news_id in self._by_id:
                raise DuplicateId(f"news_id {record.news_id} already stored")
            year = record.published_date.year
            self._by_id[record.news_id] = record
            self._partitions.setdefault(year, YearPartition(year)).records.append(record)
            return year

    def get_full(self, news_id: int) -> NewsRecord:
        """Return the complete stored record for ``news_id``."""
        try:
            return self._by_id[news_id]
        except KeyError:
            raise NotFound(f"no record with news_id {news_id}") from None

    def __contains__(self, news_id: int) -> bool:
        return news_id in self._by_id

    def years(self) -> list[int]:
        return sorted(self._partitions)

    def partition(self, year: int) -> YearPartition:
        try:
            return self._partitions[year]
        except KeyError:
            raise NotFound(f"no partition for year {year}") from None

    def all_records(self) -> list[NewsRecord]:
        """All records, ordered by year then insertion order."""
        out = []
        for year in self.years():
            out.extend(self._partitions[year].records)
        return out

    def save(self, directory: str | Path) -> None:
        """Write one ``news_<year>.jsonl`` file per partition."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for year in self.years():
            path = directory / f"news_{year}.jsonl"
            with path.open("w", encoding="utf-8") as fh:
                for record in self._partitions[year].records:
                    fh.write(json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "CorpusStore":
        """Load every ``news_<year>.jsonl`` file found under ``directory``."""
        store = cls()
        directory = Path(directory)
        for path in sorted(directory.glob("news_*.jsonl")):
            with path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    record = NewsRecord.from_json_dict(json.loads(line))
                    store.put(record)
        return store


def ingest_record(raw: dict, rules: CleaningRules | None = None) -> NewsRecord:
    """Clean one raw article's text fields and build its NewsRecord.

    ``title`` and ``content`` must survive cleaning; a summary that cleans
    to nothing is kept empty.
    """
    title = clean_text(str(raw["title"]), rules)
    content = clean_text(str(raw["content"]), rules)
    summary_raw = str(raw.get("summary", "") or "")
    try:
        summary = clean_text(summary_raw, rules) if summary_raw.strip() else ""
    except EmptyAfterCleaning:
        summary = ""
    return NewsRecord(
        news_id=int(raw["news_id"]),
        published_date=dt.date.fromisoformat(str(raw["published_date"])),
        title=title,
        summary=summary,
        content=content,
    )


def ingest_directory(raw_dir: str | Path, rules: CleaningRules | None = None) -> CorpusStore:
    """Clean and store every article in the ``*.jsonl`` files under ``raw_dir``.

    Articles that clean to nothing are skipped with a warning rather than
    aborting the whole ingest.
    """
    store = CorpusStore()
    skipped = 0
    for path in sorted(Path(raw_dir).glob("*.jsonl")):
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                try:
                    store.put(ingest_record(raw, rules))
                except EmptyAfterCleaning:
                    skipped += 1
                    logger.warning(
                        "%s line %d: article %s empty after cleaning, skipped",
                        path.name, line_no, raw.get("news_id"),
                    )
    if skipped:
        logger.warning("ingest skipped %d empty-after-cleaning articles", skipped)
    return store
