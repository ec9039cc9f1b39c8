"""FastAPI service wrapping the scoring pipeline.

Endpoints operate on server-local paths, mirroring the CLI subcommands, and
return the same numbers the CLI writes. Pipeline failures map to HTTP 400
with the stage-labeled message.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, pipeline
from ..errors import FacesymError
from .schemas import (
    CalibrateRequest,
    CalibrateResponse,
    FilesResponse,
    FlowDumpRequest,
    HealthResponse,
    OverlayRequest,
    ScoreRequest,
    ScoreResponse,
    SynthesizeRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(title="facesym service", version=__version__)

    @app.exception_handler(FacesymError)
    async def facesym_error_handler(request: Request, exc: FacesymError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": str(exc), "error": type(exc).__name__},
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest) -> ScoreResponse:
        report = pipeline.run_score(
            req.input_dir,
            req.landmarks_path,
            config=req.to_config(),
            flow_params=req.flow.to_params(),
            pattern=req.pattern,
        )
        return ScoreResponse.from_report(report)

    @app.post("/synthesize", response_model=FilesResponse)
    def synthesize(req: SynthesizeRequest) -> FilesResponse:
        files = pipeline.run_synthesize(
            req.input_dir,
            req.landmarks_path,
            req.output_dir,
            side=req.side,
            pattern=req.pattern,
        )
        return FilesResponse(files=files)

    @app.post("/overlay", response_model=FilesResponse)
    def overlay(req: OverlayRequest) -> FilesResponse:
        files = pipeline.run_overlay(
            req.input_dir,
            req.landmarks_path,
            req.output_dir,
            alpha=req.alpha,
            threshold_factor=req.threshold_factor,
            flow_params=req.flow.to_params(),
            pattern=req.pattern,
        )
        return FilesResponse(files=files)

    @app.post("/flow", response_model=FilesResponse)
    def flow(req: FlowDumpRequest) -> FilesResponse:
        files = pipeline.run_flow_dump(
            req.input_dir,
            req.landmarks_path,
            req.output_dir,
            flow_params=req.flow.to_params(),
            pattern=req.pattern,
        )
        return FilesResponse(files=files)

    @app.post("/calibrate", response_model=CalibrateResponse)
    def calibrate(req: CalibrateRequest) -> CalibrateResponse:
        lam = pipeline.run_calibrate(req.samples)
        return CalibrateResponse(**{"lambda": lam})

    return app


app = create_app()
