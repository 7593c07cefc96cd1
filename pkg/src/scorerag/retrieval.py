"""Query-time retrieval: embed, search, map chunks back to full articles.

The index stores chunks; the scorer and summarizer want whole articles.
Hits are grouped by ``news_id`` so an article matched by several of its
chunks appears once, carrying all matching chunk ids and the best (lowest)
distance.  ``k`` counts chunks, so after grouping the article count may be
smaller.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import CorpusStore, NewsRecord
from .errors import InvalidInput, NotFound
from .vector_index import VectorIndex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RetrievedArticle:
    record: NewsRecord
    best_distance: float
    matched_chunk_ids: tuple[str, ...]


class Retriever:
    """Read-only view over an index and corpus; safe to share across calls."""

    def __init__(
        self,
        index: VectorIndex,
        corpus: CorpusStore,
        embed_query: Callable[[str], Sequence[float] | np.ndarray],
    ):
        self.index = index
        self.corpus = corpus
        self.embed_query = embed_query

    def retrieve(
        self,
        query: str,
        k: int,
        on_warning: Callable[[str], None] | None = None,
    ) -> list[RetrievedArticle]:
        """Top-k chunk search resolved to deduplicated full articles.

        A hit whose ``news_id`` is missing from the corpus (index and corpus
        out of sync) is skipped with a warning instead of failing the query.
        """
        if not query:
            raise InvalidInput("retrieve requires a non-empty query")
        if k < 1:
            raise InvalidInput(f"k must be >= 1, got {k}")
        warn = on_warning or (lambda msg: logger.warning("%s", msg))

        query_vector = self.embed_query(query)
        hits = self.index.search(query_vector, k)

        grouped: dict[int, dict] = {}
        order: list[int] = []
        for hit in hits:
            news_id = hit.chunk.metadata.news_id
            if news_id not in grouped:
                try:
                    record = self.corpus.get_full(news_id)
                except NotFound:
                    warn(f"retrieval hit {hit.chunk.chunk_id} has no corpus record "
                         f"(news_id {news_id}); skipping")
                    continue
                grouped[news_id] = {
                    "record": record,
                    "best": hit.distance,
                    "chunks": [hit.chunk.chunk_id],
                }
                order.append(news_id)
            else:
                entry = grouped[news_id]
                entry["chunks"].append(hit.chunk.chunk_id)
                entry["best"] = min(entry["best"], hit.distance)

        # hits arrive in ascending distance, so first-seen order already
        # sorts articles by best_distance
        return [
            RetrievedArticle(
                record=grouped[nid]["record"],
                best_distance=grouped[nid]["best"],
                matched_chunk_ids=tuple(grouped[nid]["chunks"]),
            )
            for nid in order
        ]
