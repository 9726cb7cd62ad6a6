import os
from pathlib import Path
from typing import Literal, Optional, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from constants import DEFAULT_ERROR_TARGET, GRID_RATIO_TOLERANCE
from errors import ConfigurationError

load_dotenv()

# Environment settings
CFC_LAB_THREADS = os.getenv("CFC_LAB_THREADS")
LOG_LEVEL = os.getenv("CFC_LAB_LOG_LEVEL", "WARNING").upper()


def require_thread_cap() -> int:
    """Returns the parallelism cap from CFC_LAB_THREADS, or the CPU count when unset."""
    if CFC_LAB_THREADS is None or not CFC_LAB_THREADS.strip():
        return os.cpu_count() or 1
    try:
        threads = int(CFC_LAB_THREADS)
    except ValueError as e:
        raise ConfigurationError(
            f"CFC_LAB_THREADS must be a positive integer, got {CFC_LAB_THREADS!r}"
        ) from e
    if threads < 1:
        raise ConfigurationError(f"CFC_LAB_THREADS must be a positive integer, got {threads}")
    return threads


def validate_grid(grid: Tuple[float, ...]) -> Tuple[float, ...]:
    """A θ grid must be positive, strictly decreasing and geometric."""
    if len(grid) < 2:
        raise ConfigurationError("an extrapolation grid needs at least two points")
    if any(h <= 0.0 for h in grid):
        raise ConfigurationError(f"grid points must be positive: {grid}")
    ratios = [grid[k] / grid[k + 1] for k in range(len(grid) - 1)]
    if ratios[0] <= 1.0:
        raise ConfigurationError(f"grid must be strictly decreasing: {grid}")
    if any(abs(r - ratios[0]) > GRID_RATIO_TOLERANCE * ratios[0] for r in ratios):
        raise ConfigurationError(f"grid must be geometric: {grid}")
    return tuple(float(h) for h in grid)


def parse_grid(text: str) -> Tuple[float, ...]:
    """'1e-2,5e-3,2.5e-3' -> validated grid."""
    try:
        grid = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigurationError(f"cannot parse grid {text!r}") from e
    return validate_grid(grid)


def parse_int_range(text: str) -> Tuple[int, ...]:
    """'5,10,20' or '2..8' (inclusive) or '2..64:2' (with step) -> sorted unique integers."""
    values = set()
    try:
        for part in (p.strip() for p in text.split(",") if p.strip()):
            if ".." in part:
                span, _, step = part.partition(":")
                lo, hi = (int(v) for v in span.split(".."))
                values.update(range(lo, hi + 1, int(step) if step else 1))
            else:
                values.add(int(part))
    except ValueError as e:
        raise ConfigurationError(f"cannot parse integer range {text!r}") from e
    if not values:
        raise ConfigurationError(f"empty integer range {text!r}")
    return tuple(sorted(values))


class _Options(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ReducedOptions(_Options):
    bit: int = Field(default=0, ge=0, le=1)
    theta1: float = Field(default=0.0, ge=0.0)
    theta2: float = Field(default=0.0, ge=0.0)
    postselect: bool = False
    published_table: bool = False


class FullOptions(_Options):
    n_outer: Optional[int] = Field(default=None, ge=2)
    m_inner: Optional[int] = Field(default=None, ge=2)
    mode: Literal["sum", "closed_form", "asymptotic", "simulate"] = "sum"
    method: Literal["auto", "fisher", "flux"] = "auto"
    bit: int = Field(default=0, ge=0, le=1)
    postselect: bool = False


class ClassicalOptions(_Options):
    length: int = Field(default=10_000, ge=1)
    message: Optional[str] = Field(default=None, pattern=r"^[01]+$")


class SweepOptions(_Options):
    n_values: str = "2..8"
    m_values: str = "2..64"


class RunConfig(BaseModel):
    """Options of one CLI run; mirrors the CLI flags and the YAML config file."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    output_format: Literal["json", "csv", "table"] = Field(default="table", description="report format")
    output: Optional[Path] = Field(default=None, description="write the report here instead of stdout")
    grid: Optional[Tuple[float, ...]] = Field(default=None, description="θ grid for the θ→0 limit")
    seed: Optional[int] = Field(default=None, description="seed for generated classical messages")
    threads: Optional[int] = Field(default=None, ge=1, description="parallelism override")
    epsilon: float = Field(default=DEFAULT_ERROR_TARGET, gt=0.0, lt=1.0, description="0-bit error target")
    log_level: Optional[str] = None
    reduced: ReducedOptions = ReducedOptions()
    full: FullOptions = FullOptions()
    classical: ClassicalOptions = ClassicalOptions()
    sweep: SweepOptions = SweepOptions()

    @field_validator("grid", mode="before")
    @classmethod
    def _check_grid(cls, grid):
        if grid is None:
            return grid
        try:
            return parse_grid(grid) if isinstance(grid, str) else validate_grid(tuple(grid))
        except ConfigurationError as e:
            raise ValueError(str(e)) from e


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            values = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"config file {path} is not valid YAML: {e}") from e
    if not isinstance(values, dict):
        raise ConfigurationError(f"config file {path} must hold a mapping")
    return values


def load_run_config(
    path: Optional[Path],
    command: Optional[str] = None,
    command_overrides: Optional[dict] = None,
    **overrides,
) -> RunConfig:
    """
    Reads an optional YAML config file. Explicit (non-None) overrides win over the
    file; ``command_overrides`` land in the section named ``command``.
    """
    values = _read_yaml(path) if path is not None else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    if command is not None:
        section = values.get(command) or {}
        if not isinstance(section, dict):
            raise ConfigurationError(f"config section {command!r} must hold a mapping")
        section = {**section, **{k: v for k, v in (command_overrides or {}).items() if v is not None}}
        values[command] = section
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(str(e)) from e
