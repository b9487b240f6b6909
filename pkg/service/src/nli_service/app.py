"""FastAPI application exposing the scoring wire protocol.

    GET  /v1/health          200 {"model_id": ...} once loaded, 503 before
    POST /v1/score           {"pairs": [{"premise", "hypothesis"}, ...]}
                             -> {"results": [{"entail", "neutral",
                                 "contradict"}, ...], "model_id": ...}

400 malformed body, 413 batch too large, 503 model not ready. Result order
always matches request order; requests share no state.
"""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServiceConfig, config_from_env
from .models import ScoringModel, build_model

logger = logging.getLogger(__name__)


class PairIn(BaseModel):
    premise: str = Field(min_length=1)
    hypothesis: str = Field(min_length=1)


class ScoreRequest(BaseModel):
    pairs: list[PairIn]


class ScoreOut(BaseModel):
    entail: float
    neutral: float
    contradict: float


class ScoreResponse(BaseModel):
    results: list[ScoreOut]
    model_id: str


def create_app(config: ServiceConfig | None = None, model: ScoringModel | None = None) -> FastAPI:
    """Build the service; a preloaded model skips startup loading."""
    cfg = config or config_from_env()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.model is None:
            try:
                app.state.model = build_model(cfg)
                logger.info("loaded model %s", app.state.model.model_id)
            except Exception:
                logger.exception("model %s failed to load", cfg.model_id)
        yield

    app = FastAPI(title="nli-service", lifespan=lifespan)
    app.state.model = model
    app.state.config = cfg

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/v1/health")
    async def health():
        if app.state.model is None:
            return JSONResponse(status_code=503, content={"detail": "model not loaded"})
        return {"model_id": app.state.model.model_id}

    @app.post("/v1/score", response_model=ScoreResponse)
    async def score(request: ScoreRequest):
        if not request.pairs:
            return JSONResponse(status_code=400, content={"detail": "pairs must be non-empty"})
        if len(request.pairs) > cfg.max_batch:
            return JSONResponse(
                status_code=413,
                content={"detail": f"batch of {len(request.pairs)} exceeds {cfg.max_batch}"},
            )
        if app.state.model is None:
            return JSONResponse(status_code=503, content={"detail": "model not loaded"})
        triples = app.state.model.score_pairs(
            [(p.premise, p.hypothesis) for p in request.pairs]
        )
        return {
            "results": [
                {"entail": e, "neutral": n, "contradict": c} for e, n, c in triples
            ],
            "model_id": app.state.model.model_id,
        }

    return app
