"""Run-configuration schema (JSON) and the built-in scenario configs."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .errors import ConfigurationError

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridCfg(_Strict):
    x_min: float = -20.0
    x_max: float = 20.0
    n_points: int = 512


class SolverCfg(_Strict):
    dt: float
    t_start: float
    t_end: float
    record_every: int = 1


class EquationCfg(_Strict):
    name: str
    params: dict[str, float] = {}


class TransformCfg(_Strict):
    name: str
    params: dict[str, float | bool] = {}


class FamilyCfg(_Strict):
    """A closed-form family, optionally pulled back through transforms in order."""

    name: str
    params: dict[str, float] = {}
    transforms: list[TransformCfg] = []


class InitialCfg(_Strict):
    family: Optional[FamilyCfg] = None
    field_csv: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.family is None) == (self.field_csv is None):
            raise ValueError("initial needs exactly one of 'family' or 'field_csv'")
        return self


class CoefficientCfg(_Strict):
    family: str
    params: dict[str, Any] = {}
    expect: Optional[Literal["passes", "fails"]] = None


class PainleveCfg(_Strict):
    coefficients: list[CoefficientCfg] = []
    random_reciprocal: int = 0
    times: Optional[list[float]] = None
    manifold: Optional[list[float]] = None
    u0: float | list[float] = math.sqrt(2.0)


class ConvergenceCfg(_Strict):
    target_order: float = 2.0
    band: float = 0.2
    analytic_reference: bool = True


_REQUIRED = {
    "simulate": ("equation", "solver", "initial"),
    "convergence": ("equation", "solver", "initial"),
    "verify": ("equation", "initial", "times"),
    "transform": ("transform", "initial", "times"),
    "painleve": ("painleve",),
}


class RunConfig(_Strict):
    schema_version: Literal[1]
    command: Literal["simulate", "transform", "verify", "painleve", "convergence"]
    description: str = ""
    output_dir: str = "out"
    equation: Optional[EquationCfg] = None
    grid: GridCfg = GridCfg()
    source_grid: Optional[GridCfg] = None
    solver: Optional[SolverCfg] = None
    initial: Optional[InitialCfg] = None
    transform: Optional[TransformCfg] = None
    times: Optional[list[float]] = None
    threshold: float = 1e-6
    outside: Literal["wrap", "zero"] = "zero"
    painleve: Optional[PainleveCfg] = None
    convergence: ConvergenceCfg = ConvergenceCfg()

    @model_validator(mode="after")
    def _sections(self):
        missing = [k for k in _REQUIRED[self.command] if getattr(self, k) is None]
        if missing:
            raise ValueError(f"command {self.command!r} requires {', '.join(missing)}")
        return self


def _family(name, params=None, transforms=()):
    return {"name": name, "params": params or {}, "transforms": list(transforms)}


BUILTINS: dict[str, dict] = {
    "reciprocal-soliton": {
        "schema_version": 1,
        "command": "simulate",
        "description": "Soliton of i u_t + u_xx + |u|^2 u / t = 0 evolved on t in [0.5, 1]",
        "equation": {"name": "reciprocal"},
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 512},
        "solver": {"dt": 1e-3, "t_start": 0.5, "t_end": 1.0, "record_every": 100},
        "initial": {"family": _family("d_transformed", {"x0": 0.0})},
    },
    "linear-potential-soliton": {
        "schema_version": 1,
        "command": "simulate",
        "description": "Accelerated-frame soliton in the potential V = 2 alpha x, alpha = 0.3",
        "equation": {"name": "linear-potential", "params": {"alpha": 0.3, "coupling": 2.0}},
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 512},
        "solver": {"dt": 1e-3, "t_start": 0.0, "t_end": 1.0, "record_every": 100},
        "initial": {"family": _family(
            "standing", {"x0": 0.0, "coupling": 2.0},
            [{"name": "accelerated_frame", "params": {"alpha": 0.3}}])},
    },
    "oscillator-soliton": {
        "schema_version": 1,
        "command": "simulate",
        "description": "Niederer image of the standing soliton in the oscillator NLS, omega = 1",
        "equation": {"name": "oscillator-nls", "params": {"omega": 1.0}},
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
        "solver": {"dt": 5e-4, "t_start": 0.0, "t_end": 1.0, "record_every": 200},
        "initial": {"family": _family(
            "standing", {"x0": 0.0}, [{"name": "niederer", "params": {"omega": 1.0}}])},
    },
    "painleve-sweep": {
        "schema_version": 1,
        "command": "painleve",
        "description": "Reciprocal-linear couplings pass, others fail",
        "painleve": {
            "random_reciprocal": 20,
            "coefficients": [
                {"family": "reciprocal-linear", "params": {"a": 1.0, "b": 0.0}, "expect": "passes"},
                {"family": "reciprocal-linear", "params": {"a": 0.0, "b": 1.0}, "expect": "passes"},
                {"family": "constant", "params": {"c": 1.0}, "expect": "passes"},
                {"family": "power", "params": {"n": 1.0}, "expect": "fails"},
                {"family": "power", "params": {"n": 2.0}, "expect": "fails"},
                {"family": "exponential", "params": {"rate": 1.0}, "expect": "fails"},
                {"family": "power", "params": {"n": -2.0}, "expect": "fails"},
                {"family": "sine-plus", "params": {"offset": 2.0}, "expect": "fails"},
            ],
        },
    },
    "reciprocal-verify": {
        "schema_version": 1,
        "command": "verify",
        "description": "D-transformed soliton checked against the 1/t equation",
        "equation": {"name": "reciprocal"},
        "grid": {"x_min": -60.0, "x_max": 60.0, "n_points": 4096},
        "initial": {"family": _family("d_transformed", {"x0": 0.0})},
        "times": [0.5, 1.0, 2.0],
    },
    "dmap-transform": {
        "schema_version": 1,
        "command": "transform",
        "description": "D-map image of the standing soliton sampled at t = 1",
        "transform": {"name": "d_map"},
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 512},
        "initial": {"family": _family("standing", {"x0": 0.0})},
        "times": [1.0],
    },
    "strang-convergence": {
        "schema_version": 1,
        "command": "convergence",
        "description": "Observed Strang order on the travelling soliton",
        "equation": {"name": "nls", "params": {"coupling": 1.0}},
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 512},
        "solver": {"dt": 0.01, "t_start": 0.0, "t_end": 1.0, "record_every": 1},
        "initial": {"family": _family("travelling", {"x0": 0.0, "k": 1.0, "v": 0.0})},
    },
}


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid config: {exc}") from exc


def load_config(ref: str) -> tuple[RunConfig, Path]:
    """Load a config by built-in name or JSON path; returns it with its base directory."""
    if ref in BUILTINS:
        return parse_config(BUILTINS[ref]), Path.cwd()
    path = Path(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {ref!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{ref}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{ref}: top level must be a JSON object")
    return parse_config(data), path.resolve().parent
