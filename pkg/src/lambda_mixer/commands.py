"""Shared command handlers used by both the CLI and the HTTP service."""
from __future__ import annotations

import math

from .analysis import SeedSpec, SweepRow, make_initial_state, sweep_epsilon
from .config import RunConfig
from .levelsys import build_hamiltonian_4, build_hamiltonian_5, eig_exact
from .propagator import (
    BackendSpec,
    Model,
    PropagationGrid,
    Trajectory,
    integrate,
)
from .tables import eigen_payload, trajectory_rows, TRAJECTORY_COLUMNS
from .validate import report_payload, run_checks

__all__ = [
    "run_eigen",
    "run_simulate",
    "run_sweep",
    "run_validate",
    "trajectory_payload",
    "sweep_payload",
]


def _seed(cfg: RunConfig) -> SeedSpec:
    return SeedSpec(cfg.epsilon, cfg.phi0)


def run_eigen(cfg: RunConfig) -> dict:
    """Spectrum of the configured model at the configured field state."""
    state = make_initial_state(_seed(cfg))
    params = cfg.system_params()
    build = (
        build_hamiltonian_4
        if cfg.backend_spec().model is Model.FOUR_LEVEL
        else build_hamiltonian_5
    )
    results = eig_exact(build(state, params))
    return {
        "model": cfg.model,
        "delta": params.delta,
        "gamma1": params.gamma1,
        "gamma2": params.gamma2,
        "state": {
            "omega1": [state.omega1.real, state.omega1.imag],
            "omega2": [state.omega2.real, state.omega2.imag],
            "e1": [state.e1.real, state.e1.imag],
            "e2": [state.e2.real, state.e2.imag],
        },
        "spectrum": eigen_payload(results),
    }


def run_simulate(cfg: RunConfig) -> Trajectory:
    grid = PropagationGrid(
        zeta_max=cfg.zeta_max,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        sample_stride=cfg.sample_stride,
    )
    return integrate(
        make_initial_state(_seed(cfg)),
        cfg.system_params(),
        cfg.backend_spec(),
        grid,
    )


def run_sweep(cfg: RunConfig) -> list[SweepRow]:
    """Sweep both the with-phase and no-phase four-level specs."""
    base = cfg.backend_spec()
    specs = [
        BackendSpec(Model.FOUR_LEVEL, base.method, True),
        BackendSpec(Model.FOUR_LEVEL, base.method, False),
    ]
    return sweep_epsilon(
        cfg.eps_grid(),
        cfg.phi0,
        specs,
        cfg.system_params(),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
    )


def run_validate(checks: list[str] | None = None) -> dict:
    return report_payload(run_checks(checks))


def _null_nan(x: float):
    return None if isinstance(x, float) and math.isnan(x) else x


def trajectory_payload(traj: Trajectory) -> dict:
    """JSON-safe trajectory table (NaN encoded as null)."""
    return {
        "columns": TRAJECTORY_COLUMNS,
        "rows": [[_null_nan(v) for v in row] for row in trajectory_rows(traj)],
    }


def sweep_payload(rows: list[SweepRow]) -> dict:
    return {
        "rows": [
            {
                "epsilon": r.epsilon,
                "model": r.model,
                "phase_terms": r.phase_terms,
                "L_measured": _null_nan(r.length_measured),
                "e_measured": _null_nan(r.efficiency_measured),
                "L_analytic": _null_nan(r.length_analytic),
                "e_analytic": _null_nan(r.efficiency_analytic),
                "validity_flag": r.validity_flag,
            }
            for r in rows
        ]
    }
