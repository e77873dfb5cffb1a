"""HTTP service exposing the simulation commands.

Every endpoint accepts a full ``RunConfig`` body (the same schema the CLI
reads from TOML) and returns the JSON report plus the CSV artifacts as text,
so clients can persist byte-identical files.  Bad input maps to 400/422 and
numeric or resource failures to 500, always with a machine-readable code.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .config import RunConfig
from .errors import INPUT_FAILURES, NUMERIC_FAILURES, StarsyncError
from .runners import run_evolve, run_modes, run_oracle, run_sweep


class RunResponse(BaseModel):
    report: dict
    artifacts: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str


def _error_payload(exc: StarsyncError) -> dict:
    return {"error": {"code": exc.code, "message": str(exc)}}


def create_app() -> FastAPI:
    app = FastAPI(
        title="starsync",
        version=__version__,
        description="Star-network oscillator spectra, dynamics and sweeps",
    )

    @app.exception_handler(StarsyncError)
    async def starsync_error_handler(request: Request, exc: StarsyncError):
        if isinstance(exc, INPUT_FAILURES):
            status = 400
        elif isinstance(exc, NUMERIC_FAILURES):
            status = 500
        else:  # pragma: no cover - base class fallback
            status = 500
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.get("/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/modes", response_model=RunResponse)
    def modes(cfg: RunConfig) -> RunResponse:
        outcome = run_modes(cfg)
        return RunResponse(report=outcome.report, artifacts=outcome.artifacts)

    @app.post("/v1/sweep", response_model=RunResponse)
    def sweep(cfg: RunConfig) -> RunResponse:
        outcome = run_sweep(cfg)
        return RunResponse(report=outcome.report, artifacts=outcome.artifacts)

    @app.post("/v1/evolve", response_model=RunResponse)
    def evolve(cfg: RunConfig) -> RunResponse:
        outcome = run_evolve(cfg)
        return RunResponse(report=outcome.report, artifacts=outcome.artifacts)

    @app.post("/v1/oracle", response_model=RunResponse)
    def oracle(cfg: RunConfig) -> RunResponse:
        outcome = run_oracle(cfg)
        return RunResponse(report=outcome.report, artifacts=outcome.artifacts)

    return app


app = create_app()
