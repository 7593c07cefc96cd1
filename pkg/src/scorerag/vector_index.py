"""Exact nearest-neighbor index over embedded chunks, squared-L2 metric.

A flat float32 array scanned in full for every query: retrieval semantics
here are exact top-k, and at the corpus scales this repository targets a
vectorized scan beats maintaining an approximate structure.  Ties are broken
lexicographically by chunk_id so searches are reproducible.

On disk an index is a directory holding ``vectors.bin`` (header with
dimension, count and a SHA-256 payload checksum, then packed little-endian
float32) and ``meta.jsonl`` (one chunk's metadata and content per line, in
vector order).
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import EMBEDDING_DIM
from .errors import (
    CorruptIndexFile,
    DimensionMismatch,
    DuplicateChunkId,
    EmptyIndex,
    InvalidInput,
)

_MAGIC = b"SRIX"
_HEADER = struct.Struct("<4sHIQ32s")  # magic, version, dim, count, sha256


def sq_l2(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Squared Euclidean distance between two 1024-dim vectors."""
    ax = np.asarray(x, dtype=np.float64)
    ay = np.asarray(y, dtype=np.float64)
    if ax.shape != (EMBEDDING_DIM,) or ay.shape != (EMBEDDING_DIM,):
        raise DimensionMismatch(
            f"sq_l2 requires {EMBEDDING_DIM}-dim vectors, got {ax.shape} and {ay.shape}"
        )
    diff = ax - ay
    return float(np.dot(diff, diff))


@dataclass(frozen=True)
class ChunkMetadata:
    published_date: dt.date
    title: str
    news_id: int


@dataclass(frozen=True)
class IndexedChunk:
    chunk_id: str
    vector: np.ndarray
    metadata: ChunkMetadata
    page_content: str

    def __post_init__(self):
        if not self.page_content:
            raise InvalidInput(f"chunk {self.chunk_id}: empty page_content")


@dataclass(frozen=True)
class SearchHit:
    chunk: IndexedChunk
    distance: float


class VectorIndex:
    """In-memory flat index; single writer, many concurrent readers."""

    def __init__(self):
        self._ids: list[str] = []
        self._meta: list[ChunkMetadata] = []
        self._content: list[str] = []
        self._rows: list[np.ndarray] = []  # float32 rows, the stored truth
        self._matrix: np.ndarray | None = None  # float32 scan cache
        self._sq_norms: np.ndarray | None = None
        self._id_array: np.ndarray | None = None
        self._lock = threading.Lock()
        self._id_set: set[str] = set()

    def __len__(self) -> int:
        return len(self._ids)

    def add(self, chunks: Iterable[IndexedChunk]) -> int:
        """Add chunks; returns how many were added."""
        chunks = list(chunks)
        with self._lock:
            for chunk in chunks:
                vec = np.asarray(chunk.vector, dtype=np.float32)
                if vec.shape != (EMBEDDING_DIM,):
                    raise DimensionMismatch(
                        f"chunk {chunk.chunk_id}: expected {EMBEDDING_DIM} dims, got {vec.shape}"
                    )
                if chunk.chunk_id in self._id_set:
                    raise DuplicateChunkId(f"chunk_id {chunk.chunk_id} already indexed")
                self._ids.append(chunk.chunk_id)
                self._meta.append(chunk.metadata)
                self._content.append(chunk.page_content)
                self._rows.append(vec)
                self._id_set.add(chunk.chunk_id)
            self._matrix = None
        return len(chunks)

    def _scan_state(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._matrix is None:
            matrix = np.vstack(self._rows)
            # _matrix is the cache-valid flag for concurrent readers: set last
            self._sq_norms = np.einsum("ij,ij->i", matrix, matrix)
            self._id_array = np.asarray(self._ids)
            self._matrix = matrix
        return self._matrix, self._sq_norms, self._id_array

    def search(self, query_vector: Sequence[float] | np.ndarray, k: int) -> list[SearchHit]:
        """Exact top-k hits, ascending distance, ties by chunk_id.

        The query is snapped to the same float32 grid the vectors are stored
        on, so a query equal to a stored vector scores distance exactly 0.
        Scanning is two-phase: a fast float32 norm-expansion pass picks
        candidates with a margin wide enough to absorb float32 rounding,
        then exact float64 difference-form distances rank the candidates.
        """
        if k < 1:
            raise InvalidInput(f"k must be >= 1, got {k}")
        if not self._ids:
            raise EmptyIndex("search on an empty index")
        q32 = np.asarray(query_vector, dtype=np.float32)
        if q32.shape != (EMBEDDING_DIM,):
            raise DimensionMismatch(f"query must be {EMBEDDING_DIM}-dim, got {q32.shape}")

        matrix, sq_norms, id_array = self._scan_state()
        kk = min(k, len(self._ids))
        approx = sq_norms - 2.0 * (matrix @ q32) + np.dot(q32, q32)
        kth = np.partition(approx, kk - 1)[kk - 1]
        margin = 1e-4 + abs(float(kth)) * 1e-4  # >> float32 rounding error
        candidates = np.flatnonzero(approx <= kth + margin)

        q64 = q32.astype(np.float64)
        diff = matrix[candidates].astype(np.float64) - q64
        exact = np.einsum("ij,ij->i", diff, diff)
        order = np.lexsort((id_array[candidates], exact))[:kk]
        return [
            SearchHit(
                chunk=IndexedChunk(
                    chunk_id=self._ids[candidates[i]],
                    vector=self._rows[candidates[i]],
                    metadata=self._meta[candidates[i]],
                    page_content=self._content[candidates[i]],
                ),
                distance=float(exact[i]),
            )
            for i in order
        ]

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        payload = b"".join(row.astype("<f4").tobytes() for row in self._rows)
        header = _HEADER.pack(
            _MAGIC, 1, EMBEDDING_DIM, len(self._rows), hashlib.sha256(payload).digest()
        )
        (directory / "vectors.bin").write_bytes(header + payload)
        with (directory / "meta.jsonl").open("w", encoding="utf-8") as fh:
            for chunk_id, meta, content in zip(self._ids, self._meta, self._content):
                fh.write(
                    json.dumps(
                        {
                            "chunk_id": chunk_id,
                            "news_id": meta.news_id,
                            "title": meta.title,
                            "published_date": meta.published_date.isoformat(),
                            "page_content": content,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    @classmethod
    def load(cls, directory: str | Path) -> "VectorIndex":
        directory = Path(directory)
        raw = (directory / "vectors.bin").read_bytes()
        if len(raw) < _HEADER.size:
            raise CorruptIndexFile("vectors.bin shorter than its header")
        magic, version, dim, count, checksum = _HEADER.unpack_from(raw)
        if magic != _MAGIC or version != 1:
            raise CorruptIndexFile("vectors.bin has an unknown header")
        if dim != EMBEDDING_DIM:
            raise CorruptIndexFile(f"index dimension {dim} != {EMBEDDING_DIM}")
        payload = raw[_HEADER.size :]
        if len(payload) != count * dim * 4:
            raise CorruptIndexFile(
                f"vectors.bin payload is {len(payload)} bytes, expected {count * dim * 4}"
            )
        if hashlib.sha256(payload).digest() != checksum:
            raise CorruptIndexFile("vectors.bin checksum mismatch")

        rows = np.frombuffer(payload, dtype="<f4").reshape(count, dim) if count else np.empty((0, dim), dtype=np.float32)

        index = cls()
        with (directory / "meta.jsonl").open("r", encoding="utf-8") as fh:
            lines = [line for line in fh if line.strip()]
        if len(lines) != count:
            raise CorruptIndexFile(f"meta.jsonl has {len(lines)} rows, expected {count}")
        for i, line in enumerate(lines):
            d = json.loads(line)
            index._ids.append(d["chunk_id"])
            index._meta.append(
                ChunkMetadata(
                    published_date=dt.date.fromisoformat(d["published_date"]),
                    title=d["title"],
                    news_id=int(d["news_id"]),
                )
            )
            index._content.append(d["page_content"])
            index._rows.append(np.array(rows[i], dtype=np.float32))
        index._id_set = set(index._ids)
        if len(index._id_set) != len(index._ids):
            raise CorruptIndexFile("meta.jsonl carries duplicate chunk_ids")
        return index
