"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..flow_engine import FlowParams
from ..scoring import ScoreConfig, SymmetryReport


class FlowParamsModel(BaseModel):
    pyramid_levels: int = 3
    pyramid_scale: float = 0.5
    iterations_per_level: int = 3
    poly_n: int = 5
    poly_sigma: float = 1.1
    avg_window: int = 15

    def to_params(self) -> FlowParams:
        return FlowParams(**self.model_dump())


class ScoreRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    input_dir: str
    landmarks_path: str
    pattern: str = "*"
    lambda_: float = Field(default=3.8, alias="lambda")
    threshold_factor: float = 6.0
    flow: FlowParamsModel = FlowParamsModel()

    def to_config(self) -> ScoreConfig:
        return ScoreConfig(lambda_=self.lambda_, threshold_factor=self.threshold_factor)


class RegionScoreModel(BaseModel):
    region: str
    v_left: float
    v_right: float
    delta_v: float
    s_s: float
    m_left: int
    m_right: int


class ScoreResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n_frames: int
    lambda_: float = Field(alias="lambda")
    threshold_factor: float
    regions: list[RegionScoreModel]

    @classmethod
    def from_report(cls, report: SymmetryReport) -> "ScoreResponse":
        return cls(
            n_frames=report.n_frames,
            **{"lambda": report.config.lambda_},
            threshold_factor=report.config.threshold_factor,
            regions=[
                RegionScoreModel(
                    region=r.region,
                    v_left=r.v_left,
                    v_right=r.v_right,
                    delta_v=r.delta_v,
                    s_s=r.s_s,
                    m_left=r.m_left,
                    m_right=r.m_right,
                )
                for r in report.regions
            ],
        )


class SynthesizeRequest(BaseModel):
    input_dir: str
    landmarks_path: str
    output_dir: str
    side: str = "right"
    pattern: str = "*"


class FilesResponse(BaseModel):
    files: list[str]


class OverlayRequest(BaseModel):
    input_dir: str
    landmarks_path: str
    output_dir: str
    alpha: float = 0.5
    threshold_factor: float = 6.0
    flow: FlowParamsModel = FlowParamsModel()
    pattern: str = "*"


class FlowDumpRequest(BaseModel):
    input_dir: str
    landmarks_path: str
    output_dir: str
    flow: FlowParamsModel = FlowParamsModel()
    pattern: str = "*"


class CalibrateRequest(BaseModel):
    samples: list[tuple[float, float]]


class CalibrateResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lambda_: float = Field(alias="lambda")


class HealthResponse(BaseModel):
    status: str
    version: str
