"""Flat key = value run configuration.

The config format is one ``key = value`` pair per line with ``#``
comments; it is deliberately flat so files stay language-neutral and
diff-friendly.  Unknown keys are a hard error, as are values outside
the ranges of the types that consume them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields as dc_fields

from .errors import ParseError, UnknownKey, ValidationError
from .levelsys import SystemParams
from .propagator import BackendSpec, Method, Model

__all__ = ["RunConfig", "parse_config", "parse_config_file"]

_MODELS = {m.value for m in Model}
_METHODS = {m.value for m in Method}


@dataclass
class RunConfig:
    model: str = "four_level"
    method: str = "closed_form"
    include_phase_terms: bool = True
    epsilon: float = 1e-2
    phi0: float = math.pi / 4
    omega_over_delta: float = 0.01
    gamma1: float = 0.01
    gamma2: float = 0.01
    zeta_max: float = 200.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    sample_stride: float = 0.05
    eps_min: float = 1e-6
    eps_max: float = 1e-1
    points_per_decade: int = 25
    output_path: str = ""

    def backend_spec(self) -> BackendSpec:
        return BackendSpec(
            model=Model(self.model),
            method=Method(self.method),
            include_phase_terms=self.include_phase_terms,
        )

    def system_params(self) -> SystemParams:
        return SystemParams(
            delta=1.0,
            gamma1=self.gamma1,
            gamma2=self.gamma2,
            kappa=1.0,
            omega_over_delta=self.omega_over_delta,
        )

    def eps_grid(self) -> list[float]:
        if self.eps_min == self.eps_max:
            return [self.eps_min]
        decades = math.log10(self.eps_max) - math.log10(self.eps_min)
        n = max(2, round(decades * self.points_per_decade) + 1)
        lo, hi = math.log10(self.eps_min), math.log10(self.eps_max)
        return [10.0 ** (lo + (hi - lo) * i / (n - 1)) for i in range(n)]


_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


def _parse_bool(key: str, raw: str, line: int, col: int) -> bool:
    try:
        return _BOOL_WORDS[raw.lower()]
    except KeyError:
        raise ParseError(f"expected a boolean for {key!r}, got {raw!r}", line, col)


def _parse_float(key: str, raw: str, line: int, col: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"expected a number for {key!r}, got {raw!r}", line, col)
    if not math.isfinite(value):
        raise ValidationError(key, "must be finite")
    return value


def _parse_int(key: str, raw: str, line: int, col: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"expected an integer for {key!r}, got {raw!r}", line, col)


def _validate(cfg: RunConfig) -> None:
    def require(cond: bool, key: str, rule: str) -> None:
        if not cond:
            raise ValidationError(key, rule)

    require(cfg.model in _MODELS, "model", f"must be one of {sorted(_MODELS)}")
    require(cfg.method in _METHODS, "method", f"must be one of {sorted(_METHODS)}")
    require(cfg.epsilon > 0, "epsilon", "must be > 0")
    require(-math.pi < cfg.phi0 <= math.pi, "phi0", "must lie in (-pi, pi]")
    require(
        0 < cfg.omega_over_delta < 0.2, "omega_over_delta", "must lie in (0, 0.2)"
    )
    require(cfg.gamma1 >= 0, "gamma1", "must be >= 0")
    require(cfg.gamma2 >= 0, "gamma2", "must be >= 0")
    require(cfg.zeta_max > 0, "zeta_max", "must be > 0")
    require(1e-14 <= cfg.rel_tol <= 1e-3, "rel_tol", "must lie in [1e-14, 1e-3]")
    require(cfg.abs_tol >= 0, "abs_tol", "must be >= 0")
    require(cfg.sample_stride > 0, "sample_stride", "must be > 0")
    require(cfg.eps_min > 0, "eps_min", "must be > 0")
    require(cfg.eps_max >= cfg.eps_min, "eps_max", "must be >= eps_min")
    require(cfg.eps_max <= 1.0, "eps_max", "must be <= 1")
    require(cfg.points_per_decade >= 1, "points_per_decade", "must be >= 1")


def parse_config(source: str) -> RunConfig:
    """Parse and fully validate a flat key = value document."""
    cfg = RunConfig()
    field_types = {f.name: f.type for f in dc_fields(RunConfig)}
    seen: set[str] = set()

    for lineno, raw_line in enumerate(source.splitlines(), start=1):
        text = raw_line.split("#", 1)[0]
        if not text.strip():
            continue
        if "=" not in text:
            raise ParseError("expected 'key = value'", lineno, len(text.rstrip()))
        key_part, value_part = text.split("=", 1)
        key = key_part.strip()
        raw = value_part.strip()
        eq_index = raw_line.index("=")
        indent = len(value_part) - len(value_part.lstrip())
        value_col = eq_index + 1 + indent + 1  # 1-based first value character
        if not key:
            raise ParseError("missing key before '='", lineno, 1)
        if not raw:
            raise ParseError(f"missing value for {key!r}", lineno, value_col)

        if key == "gamma":  # shorthand setting both decay rates
            value = _parse_float(key, raw, lineno, value_col)
            cfg.gamma1 = value
            cfg.gamma2 = value
            seen.add(key)
            continue
        if key not in field_types:
            raise UnknownKey(key, lineno)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno, 1)
        seen.add(key)

        kind = field_types[key]
        if kind in (bool, "bool"):
            setattr(cfg, key, _parse_bool(key, raw, lineno, value_col))
        elif kind in (float, "float"):
            setattr(cfg, key, _parse_float(key, raw, lineno, value_col))
        elif kind in (int, "int"):
            setattr(cfg, key, _parse_int(key, raw, lineno, value_col))
        else:
            setattr(cfg, key, raw)

    _validate(cfg)
    return cfg


def parse_config_file(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
