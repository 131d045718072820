"""Run configuration (TOML) and process settings for stokes-sheet."""

import logging
import os
import tomllib
from pathlib import Path
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .models import FluidParams
from .profile import InterfaceProfile, is_power_of_two

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "spectrum", "branch", "fields", "validate", "sweep")


class ConfigError(ValueError):
    """Invalid or unreadable run configuration."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class Settings(BaseModel):
    """Process-level settings."""

    out_dir: Path = Path("./output")
    log_level: str = "WARNING"
    workers: int = Field(default_factory=lambda: min(8, os.cpu_count() or 1), ge=1)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, level: str) -> str:
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {level!r}")
        return level

    @classmethod
    def from_env(cls, env_file: Optional[str] = None) -> "Settings":
        """Load settings from environment variables (and a .env file)."""
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        values = {
            "out_dir": os.getenv("STOKES_SHEET_OUT_DIR", "./output"),
            "log_level": os.getenv("STOKES_SHEET_LOG_LEVEL", "WARNING").upper(),
        }
        if os.getenv("STOKES_SHEET_WORKERS"):
            values["workers"] = os.getenv("STOKES_SHEET_WORKERS")
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ConfigError(f"bad environment setting: {_first_error(exc)}") from exc


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = 64

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if not is_power_of_two(n) or not 16 <= n <= 1024:
            raise ValueError("n must be a power of two in [16, 1024]")
        return n


class InitialConfig(BaseModel):
    """Initial interface: a named profile, or explicit (k, a_k, b_k) Fourier triples."""

    model_config = ConfigDict(extra="forbid")

    profile: Literal["flat", "cosine", "two-mode", "custom"] = "cosine"
    amplitude: float = 0.1
    mode: int = Field(1, ge=1)
    mean: float = 0.0
    modes: list[tuple[int, float, float]] = []

    @model_validator(mode="after")
    def _custom_needs_modes(self) -> "InitialConfig":
        if self.profile == "custom" and not self.modes:
            raise ValueError("custom initial profile needs a modes list")
        return self

    def triples(self) -> list[tuple[int, float, float]]:
        if self.profile == "flat":
            return []
        if self.profile == "cosine":
            return [(self.mode, self.amplitude, 0.0)]
        if self.profile == "two-mode":
            return [(1, 3.0 * self.amplitude, 0.0), (2, 0.0, self.amplitude)]
        return list(self.modes)

    def build(self, n: int) -> InterfaceProfile:
        return InterfaceProfile.from_modes(n, self.triples(), mean=self.mean)


class TimeStepperConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scheme: Literal["imex1", "imex2", "rk4-explicit"] = "imex2"
    dt: Optional[float] = Field(None, gt=0)
    t_end: float = Field(1.0, gt=0)
    stride: int = Field(1, ge=1)
    dealias: bool = False
    modes: int = Field(8, ge=1)
    amp_cap: float = Field(50.0, gt=0)
    slope_cap: float = Field(20.0, gt=0)
    cfl: float = Field(0.5, gt=0)


class SpectrumConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    K: int = Field(8, ge=1)
    n: Optional[int] = None

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: Optional[int]) -> Optional[int]:
        if n is not None and (not is_power_of_two(n) or n < 16):
            raise ValueError("grid size must be a power of two >= 16")
        return n


class BranchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ell: int = Field(1, ge=1)
    s_max: float = Field(0.5, gt=0)
    ds: float = 0.02
    n: int = 128
    slope_cap: float = Field(15.0, gt=0)
    stability: bool = False
    stability_n: int = 64

    @field_validator("ds")
    @classmethod
    def _nonzero(cls, ds: float) -> float:
        if ds == 0.0:
            raise ValueError("ds must be nonzero")
        return ds

    @field_validator("n", "stability_n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if not is_power_of_two(n) or n < 16:
            raise ValueError("grid size must be a power of two >= 16")
        return n


class FieldsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x1_points: int = Field(32, ge=1)
    x2_min: float = -2.0
    x2_max: float = 2.0
    x2_points: int = Field(32, ge=1)
    refine: int = Field(4, ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> "FieldsConfig":
        if self.x2_max <= self.x2_min:
            raise ValueError("x2_max must exceed x2_min")
        return self


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: Literal["mu_plus", "mu_minus", "rho_plus", "rho_minus", "sigma", "g"] = "g"
    values: list[float] = []


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Optional[Path] = None
    snapshots: bool = True


class RunConfig(BaseModel):
    """A full run configuration; each command reads the sections it needs."""

    model_config = ConfigDict(extra="forbid")

    fluids: FluidParams = FluidParams()
    grid: GridConfig = GridConfig()
    initial: InitialConfig = InitialConfig()
    stepper: TimeStepperConfig = TimeStepperConfig()
    spectrum: SpectrumConfig = SpectrumConfig()
    branch: BranchConfig = BranchConfig()
    fields: FieldsConfig = FieldsConfig()
    sweep: SweepConfig = SweepConfig()
    output: OutputConfig = OutputConfig()

    @model_validator(mode="after")
    def _modes_resolved(self) -> "RunConfig":
        triples = self.initial.triples()
        if len(triples) >= self.grid.n // 2:
            raise ValueError("initial coefficient list must be shorter than n/2")
        for k, _, _ in triples:
            if not 1 <= k < self.grid.n // 2:
                raise ValueError(f"initial mode {k} is not resolved on a grid of {self.grid.n}")
        return self

    def initial_profile(self) -> InterfaceProfile:
        return self.initial.build(self.grid.n)

    def problems(self, command: str) -> list[str]:
        """Check what keeps ``command`` from running with this configuration."""
        issues = []

        if command not in COMMANDS:
            issues.append(f"unknown command {command!r}")
            return issues

        if command == "sweep" and not self.sweep.values:
            issues.append("sweep.values is empty")
        if command == "sweep":
            for value in self.sweep.values:
                try:
                    FluidParams(**{**self.fluids.model_dump(), self.sweep.parameter: value})
                except ValidationError as exc:
                    issues.append(f"sweep value {self.sweep.parameter}={value:g}: {_first_error(exc)}")
        if command == "spectrum" and self.spectrum.K >= (self.spectrum.n or self.grid.n) // 2:
            issues.append("spectrum.K must be below n/2")
        if command == "branch" and self.branch.stability and self.fluids.rho_plus <= self.fluids.rho_minus:
            issues.append("branch stability needs rho_plus > rho_minus so that Θ = −σλ is reachable")

        return issues


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {error['msg']}" if location else error["msg"]


def load_config(path: str | Path | None) -> RunConfig:
    """Read and validate a TOML run configuration; no path means all defaults.

    Raises:
        ConfigError: If the file is missing, is not TOML, or fails validation.
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        with path.open("rb") as handle:
            raw = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path} is not valid TOML: {exc}") from exc

    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        raise ConfigError(f"{path}: {_first_error(exc)}", field=".".join(map(str, error["loc"]))) from exc
    logger.debug("loaded config %s", path)
    return config
