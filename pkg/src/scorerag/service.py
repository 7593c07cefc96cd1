"""HTTP JSON API over the pipeline, serving the demo UI.

Three endpoints: ``POST /api/generate`` runs the full query pipeline,
``GET /api/health`` reports store sizes, ``GET /api/config`` echoes the
redacted configuration.  CORS is wide open because the bundled frontend is
served from a different origin during development.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .config import redacted_dict
from .errors import (
    BackendRefused,
    BackendTimeout,
    BackendUnreachable,
    GenerationBackendError,
    InvalidInput,
    PipelineStageError,
    ScoreRAGError,
)
from .pipeline import Pipeline

logger = logging.getLogger(__name__)

_BACKEND_ERRORS = (BackendUnreachable, BackendRefused, BackendTimeout, GenerationBackendError)


class GenerateRequestBody(BaseModel):
    query: str
    k: int | None = None
    threshold: float | None = None


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="scorerag", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/api/generate")
    def api_generate(body: GenerateRequestBody):
        try:
            response = pipeline.run(body.query, k=body.k, threshold=body.threshold)
        except InvalidInput as exc:
            return JSONResponse(status_code=400, content={"error": "InvalidInput", "message": str(exc)})
        except PipelineStageError as exc:
            status = 502 if isinstance(exc.cause, _BACKEND_ERRORS) else 500
            logger.error("pipeline stage %s failed: %s", exc.stage, exc.cause)
            return JSONResponse(
                status_code=status,
                content={
                    "error": type(exc.cause).__name__,
                    "stage": exc.stage,
                    "message": str(exc.cause),
                },
            )
        except ScoreRAGError as exc:
            return JSONResponse(status_code=500, content={"error": type(exc).__name__, "message": str(exc)})
        return JSONResponse(content=response.to_dict())

    @app.get("/api/health")
    def api_health():
        return {
            "status": "ok",
            "corpus_records": len(pipeline.corpus),
            "index_chunks": len(pipeline.index),
        }

    @app.get("/api/config")
    def api_config():
        return redacted_dict(pipeline.config)

    return app
