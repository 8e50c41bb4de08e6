"""HTTP service wrapping the simulator.

Run with ``uvicorn lambda_mixer.service:app``.  Each endpoint accepts the
same flat configuration the CLI reads from file, as a JSON object, and
returns JSON payloads; the CLI's ``--server`` mode writes them to the
same artifact formats byte for byte.
"""
from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import commands
from .config import RunConfig, parse_config
from .errors import ConfigError, LambdaMixerError
from .validate import CHECK_NAMES

app = FastAPI(
    title="lambda-mixer",
    description="Resonant four-wave mixing simulator for double-lambda media",
    version="0.1.0",
)


class ConfigModel(BaseModel):
    """Run configuration; unset fields take the documented defaults."""

    model_config = ConfigDict(protected_namespaces=())

    model: str | None = None
    method: str | None = None
    include_phase_terms: bool | None = None
    epsilon: float | None = None
    phi0: float | None = None
    omega_over_delta: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    gamma: float | None = Field(
        default=None, description="shorthand setting gamma1 and gamma2 together"
    )
    zeta_max: float | None = None
    rel_tol: float | None = None
    abs_tol: float | None = None
    sample_stride: float | None = None
    eps_min: float | None = None
    eps_max: float | None = None
    points_per_decade: int | None = None
    output_path: str | None = None

    def to_run_config(self) -> RunConfig:
        # reuse the flat-document parser so service and CLI validation agree
        lines = []
        for key, value in self.model_dump(exclude_none=True).items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            if value == "":
                continue
            lines.append(f"{key} = {value}")
        return parse_config("\n".join(lines))


class CommandRequest(BaseModel):
    config: ConfigModel = Field(default_factory=ConfigModel)


class ValidateRequest(CommandRequest):
    checks: list[str] | None = None


def _error_response(exc: Exception, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/checks")
def checks() -> dict:
    return {"checks": CHECK_NAMES}


@app.post("/eigen")
def eigen(request: CommandRequest):
    try:
        return commands.run_eigen(request.config.to_run_config())
    except ConfigError as exc:
        return _error_response(exc, 400)
    except LambdaMixerError as exc:
        return _error_response(exc, 500)


@app.post("/simulate")
def simulate(request: CommandRequest):
    try:
        traj = commands.run_simulate(request.config.to_run_config())
        return commands.trajectory_payload(traj)
    except ConfigError as exc:
        return _error_response(exc, 400)
    except LambdaMixerError as exc:
        return _error_response(exc, 500)


@app.post("/sweep")
def sweep(request: CommandRequest):
    try:
        rows = commands.run_sweep(request.config.to_run_config())
        return commands.sweep_payload(rows)
    except ConfigError as exc:
        return _error_response(exc, 400)
    except LambdaMixerError as exc:
        return _error_response(exc, 500)


@app.post("/validate")
def validate(request: ValidateRequest):
    try:
        request.config.to_run_config()  # reject bad configs up front
        return commands.run_validate(request.checks)
    except (ConfigError, ValueError) as exc:
        return _error_response(exc, 400)
    except LambdaMixerError as exc:
        return _error_response(exc, 500)
