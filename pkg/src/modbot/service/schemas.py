"""Request/response models for the HTTP service.

Angles cross the API as strings ("1/2 pi" or decimal radians) so catalog
values survive the trip bit-exact; summaries and artifacts are returned
verbatim as produced by the simulation layer.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ModuleGaitModel(BaseModel):
    theta_des: list[str]
    R: list[str]
    C: list[str]


class PresetModel(BaseModel):
    name: str
    period_s: float
    omega_rad_s: float
    module_count: int
    Theta_des: list[str]
    modules: list[ModuleGaitModel]
    valid: bool
    violations: list[str]


class CatalogReport(BaseModel):
    count: int
    presets: list[PresetModel]


class ParseCatalogRequest(BaseModel):
    content: str


class SimulateRequest(BaseModel):
    """One simulation run. Provide a shipped preset name, or catalog text
    (file contents) plus the preset name to pick from it (name optional
    when the catalog holds exactly one preset)."""

    preset: Optional[str] = None
    catalog: Optional[str] = None
    duration_s: float = 10.0
    dt_s: float = 0.002
    seed: int = 0
    mode: Literal["direct", "networked"] = "direct"
    loss: float = Field(default=0.0, ge=0.0, lt=1.0)
    latency_ms: float = Field(default=0.0, ge=0.0)
    jitter_ms: float = Field(default=0.0, ge=0.0)
    gamma: float = Field(default=2.0, ge=0.0)
    injection: Literal["first", "mean"] = "first"


class SimulateResponse(BaseModel):
    summary: dict
    artifacts: dict[str, str]


class ErrorBody(BaseModel):
    code: str
    message: str
    location: Optional[str] = None
    t: Optional[float] = None


class ErrorEnvelope(BaseModel):
    error: ErrorBody
