"""FastAPI application wrapping the gait catalog and simulators.

Domain failures map onto a stable error envelope::

    {"error": {"code": ..., "message": ..., "location": ..., "t": ...}}

codes: preset-not-found (404), catalog-parse-error (400), invalid-input
(400), bridge-error (400), numeric-divergence (422). Clients key off the
code, not the message.
"""

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..angles import format_angle
from ..errors import (
    BridgeError,
    CatalogError,
    DimensionError,
    NumericDivergenceError,
    ParameterError,
    PresetNotFoundError,
)
from ..gaits import GaitPreset, get_preset, list_presets, parse_catalog, validate
from ..simulation import RunConfig, run
from .schemas import (
    CatalogReport,
    ErrorBody,
    ErrorEnvelope,
    HealthResponse,
    ModuleGaitModel,
    ParseCatalogRequest,
    PresetModel,
    SimulateRequest,
    SimulateResponse,
)


def _envelope(status: int, code: str, message: str, location=None, t=None) -> JSONResponse:
    body = ErrorEnvelope(
        error=ErrorBody(code=code, message=message, location=location, t=t)
    )
    return JSONResponse(status_code=status, content=body.model_dump())


def _preset_model(preset: GaitPreset) -> PresetModel:
    violations = validate(preset)
    return PresetModel(
        name=preset.name,
        period_s=preset.period,
        omega_rad_s=preset.omega,
        module_count=preset.m,
        Theta_des=[format_angle(x) for x in preset.Theta_des],
        modules=[
            ModuleGaitModel(
                theta_des=[format_angle(x) for x in mod.theta_des],
                R=[format_angle(x) for x in mod.R],
                C=[format_angle(x) for x in mod.C],
            )
            for mod in preset.modules
        ],
        valid=not violations,
        violations=violations,
    )


def _catalog_report(presets) -> CatalogReport:
    models = [_preset_model(p) for p in presets]
    return CatalogReport(count=len(models), presets=models)


def _resolve_preset(request: SimulateRequest) -> GaitPreset:
    if request.catalog is not None:
        catalog = parse_catalog(request.catalog, source="request catalog")
        if request.preset:
            return get_preset(request.preset, catalog)
        if len(catalog) == 1:
            return next(iter(catalog.values()))
        raise ParameterError(
            f"catalog contains {len(catalog)} presets; specify 'preset' to pick one"
        )
    if not request.preset:
        raise ParameterError("either 'preset' or 'catalog' must be provided")
    return get_preset(request.preset)


def create_app() -> FastAPI:
    app = FastAPI(title="modbot", version=__version__)

    @app.exception_handler(PresetNotFoundError)
    async def _preset_not_found(_req: Request, exc: PresetNotFoundError):
        return _envelope(404, "preset-not-found", str(exc))

    @app.exception_handler(CatalogError)
    async def _catalog_error(_req: Request, exc: CatalogError):
        return _envelope(400, "catalog-parse-error", str(exc), location=exc.location)

    @app.exception_handler(NumericDivergenceError)
    async def _divergence(_req: Request, exc: NumericDivergenceError):
        return _envelope(422, "numeric-divergence", str(exc), t=exc.t)

    @app.exception_handler(BridgeError)
    async def _bridge_error(_req: Request, exc: BridgeError):
        return _envelope(400, "bridge-error", str(exc))

    @app.exception_handler(ParameterError)
    @app.exception_handler(DimensionError)
    async def _invalid_input(_req: Request, exc: Exception):
        return _envelope(400, "invalid-input", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_invalid(_req: Request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        return _envelope(400, "invalid-input", detail)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/gaits", response_model=CatalogReport)
    def gaits() -> CatalogReport:
        return _catalog_report(list_presets())

    @app.get("/gaits/{name}", response_model=PresetModel)
    def gait(name: str) -> PresetModel:
        return _preset_model(get_preset(name))

    @app.post("/gaits/parse", response_model=CatalogReport)
    def parse(request: ParseCatalogRequest) -> CatalogReport:
        catalog = parse_catalog(request.content, source="request catalog")
        return _catalog_report(catalog.values())

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        preset = _resolve_preset(request)
        config = RunConfig(
            preset=preset,
            duration_s=request.duration_s,
            dt_s=request.dt_s,
            seed=request.seed,
            mode=request.mode,
            loss=request.loss,
            latency_ms=request.latency_ms,
            jitter_ms=request.jitter_ms,
            gamma=request.gamma,
            injection=request.injection,
        )
        result = run(config)
        return SimulateResponse(summary=result.summary, artifacts=result.artifacts)

    return app


app = create_app()
