"""Run configuration: pydantic schema plus TOML loading.

A single TOML file is the source of truth for a run.  The same models serve
as the request bodies of the HTTP service, so a config echoed into a JSON
report reloads to an equivalent ``RunConfig``.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

if sys.version_info >= (3, 11):  # pragma: no cover
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .dynamics import ModePrep
from .errors import ParameterError
from .model import NetworkParams

_STRICT = ConfigDict(extra="forbid")


class NetworkSection(BaseModel):
    model_config = _STRICT

    n: int = Field(ge=1)
    mass: float = Field(gt=0)
    hooke: list[float]
    couplings: list[float]
    bath_rate: float = Field(default=0.0, ge=0)
    bath_temp: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.hooke) != self.n + 1:
            raise ValueError(f"hooke must have n+1 = {self.n + 1} entries")
        if len(self.couplings) != self.n:
            raise ValueError(f"couplings must have n = {self.n} entries")
        if any(k <= 0 for k in self.hooke):
            raise ValueError("all hooke entries must be positive")
        if any(g < 0 for g in self.couplings):
            raise ValueError("all couplings must be non-negative")
        return self

    def to_params(self) -> NetworkParams:
        return NetworkParams(
            n=self.n,
            mass=self.mass,
            hooke=tuple(self.hooke),
            couplings=tuple(self.couplings),
            bath_rate=self.bath_rate,
            bath_temp=self.bath_temp,
        )


class DissipationSection(BaseModel):
    """Optional overrides for the leaking-mode rates."""

    model_config = _STRICT

    gamma_plus: float | None = Field(default=None, ge=0)
    gamma_minus: float | None = Field(default=None, ge=0)


class PreparationSpec(BaseModel):
    model_config = _STRICT

    kind: Literal["vacuum", "coherent", "thermal"] = "vacuum"
    alpha: float = 0.0
    alpha_im: float = 0.0
    nbar: float = Field(default=0.0, ge=0)

    def to_prep(self) -> ModePrep:
        return ModePrep(
            kind=self.kind,
            alpha=complex(self.alpha, self.alpha_im),
            nbar=self.nbar,
        )


class InitialStateSection(BaseModel):
    model_config = _STRICT

    frame: Literal["physical", "normal"] = "physical"
    preparations: list[PreparationSpec]


class TimeSection(BaseModel):
    model_config = _STRICT

    t_max: float = Field(gt=0)
    samples: int = Field(ge=2)


class SweepSection(BaseModel):
    model_config = _STRICT

    g_min: float = Field(gt=0)
    g_max: float
    steps: int = Field(ge=2)
    offsets: list[float]
    grid: Literal["log", "linear"] = "log"
    fit_threshold: float | None = None


class OracleSection(BaseModel):
    model_config = _STRICT

    cutoff: int = Field(ge=2)
    dim_cap: int = Field(default=10_000, ge=4)
    step_check: Literal["probe", "full"] = "probe"
    picture: Literal["interaction", "schroedinger"] = "interaction"


class MetricsSection(BaseModel):
    model_config = _STRICT

    window: float = Field(default=0.25, gt=0, le=1)


class OutputSection(BaseModel):
    model_config = _STRICT

    directory: str = "out"


class RunConfig(BaseModel):
    """Everything a run may need; commands validate their own sections."""

    model_config = _STRICT

    network: NetworkSection
    dissipation: DissipationSection = DissipationSection()
    initial_state: InitialStateSection | None = None
    time: TimeSection | None = None
    sweep: SweepSection | None = None
    oracle: OracleSection | None = None
    metrics: MetricsSection = MetricsSection()
    output: OutputSection = OutputSection()
    observables: list[str] | None = None

    def require(self, section: str) -> None:
        if getattr(self, section) is None:
            raise ParameterError(f"config section [{section}] is required for this command")


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def config_from_dict(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ParameterError(f"invalid configuration: {_format_validation_error(exc)}")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}")
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"malformed TOML in {path}: {exc}")
    return config_from_dict(data)
