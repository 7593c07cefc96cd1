"""Exception hierarchy shared by all pipeline stages."""


class ScoreRAGError(Exception):
    """Base class for every error raised by this package."""


# --- corpus ---------------------------------------------------------------

class EmptyAfterCleaning(ScoreRAGError):
    """Nothing survived the cleaning pass (non-article input)."""


class InvalidRecord(ScoreRAGError):
    """A news record violates its invariants."""


class DuplicateId(ScoreRAGError):
    """news_id already present in the store."""


class NotFound(ScoreRAGError):
    """No record with the requested identifier."""


class EmptyCorpus(ScoreRAGError):
    """The corpus holds no records but an operation requires some."""


# --- chunking / embedding / index ----------------------------------------

class InvalidConfig(ScoreRAGError):
    """A configuration value violates its invariants."""


class InvalidInput(ScoreRAGError):
    """Caller-supplied arguments violate an operation's preconditions."""


class DimensionMismatch(ScoreRAGError):
    """A vector does not have the expected dimensionality."""


class DuplicateChunkId(ScoreRAGError):
    """chunk_id already present in the vector index."""


class EmptyIndex(ScoreRAGError):
    """Search requested against an index with no vectors."""


class CorruptIndexFile(ScoreRAGError):
    """Persisted index failed its integrity checks."""


# --- backends --------------------------------------------------------------

class BackendUnreachable(ScoreRAGError):
    """Network failure talking to a backend, after retries."""


class BackendRefused(ScoreRAGError):
    """Backend answered with a non-2xx status or a malformed body."""

    def __init__(self, message: str, status_code: int | None = None, body: str = ""):
        super().__init__(message)
        self.status_code = status_code
        self.body = body


class BackendTimeout(ScoreRAGError):
    """Backend did not answer within the configured timeout."""


class GenerationBackendError(ScoreRAGError):
    """The generation LLM call failed after retries."""


# --- scoring / summarization / evaluation ----------------------------------

class UnparseableScore(ScoreRAGError):
    """Judge reply contained no usable score."""


class UnparseableScores(ScoreRAGError):
    """Evaluation reply did not yield all four criterion scores."""


class OutOfRange(ScoreRAGError):
    """A numeric value lies outside its documented range."""


class EmptySummary(ScoreRAGError):
    """Summarization backend returned a blank reply."""


class AlignmentError(ScoreRAGError):
    """Two lists that must correspond 1:1 have different lengths."""


class MismatchedIds(ScoreRAGError):
    """Two score sets do not cover the same article ids."""


# --- pipeline ----------------------------------------------------------------

class PipelineStageError(ScoreRAGError):
    """A pipeline stage failed; carries the stage name and partial results."""

    def __init__(self, stage: str, cause: Exception, partial: dict | None = None):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.partial = partial or {}
