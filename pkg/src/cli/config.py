"""
Run configuration.

Values come from, in increasing precedence: built-in defaults, environment
variables (a ``.env`` file is loaded), an INI file with sections [grid],
[scenario] and [run], and command-line flags. Unknown sections and keys in
the INI file are errors.
"""

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from dotenv import load_dotenv
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention, load_convention
from src.errors import ConfigError, DomainError
from src.fields.field import DERIVATIVE_MODES, REPRESENTATIONS
from src.fields.grid import Grid
from src.lax.dressing import DressingSpec
from src.transport.propagate import GridPath

# Load environment variables
load_dotenv()

SECTIONS: Dict[str, Tuple[str, ...]] = {
    "grid": ("dimension", "points", "spacing", "origin"),
    "scenario": ("spec", "seed", "representation", "beta", "derivatives"),
    "run": (
        "convention",
        "tolerance_profile",
        "expect",
        "lambdas",
        "plane",
        "corner",
        "substeps",
        "reproject",
        "sqrt_e",
        "radius",
        "paths",
        "dressing",
        "higgs",
        "output_prefix",
        "workers",
    ),
}
EXPECTATIONS = ("flat", "any")
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Tolerances:
    residual: float = 1e-10
    flat: float = 1e-12
    transport: float = 1e-8
    curve: float = 5e-3

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(
            residual=self.residual * factor,
            flat=self.flat * factor,
            transport=self.transport * factor,
            curve=self.curve * factor,
        )


TOLERANCE_PROFILES: Dict[str, Tolerances] = {
    "default": Tolerances(),
    "strict": Tolerances().scaled(0.1),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs; see docs/configuration.md for the INI keys."""

    dimension: int = 3
    points: Tuple[int, ...] = (16,)
    spacing: Tuple[float, ...] = (0.0625,)
    origin: Tuple[float, ...] = (0.0,)
    spec: str = "zero"
    seed: Optional[int] = None
    representation: str = "so3"
    beta: int = 1
    derivatives: str = "auto"
    convention_path: Optional[str] = None
    tolerance_profile: str = "default"
    expect: str = "flat"
    lambdas: Tuple[float, ...] = (0.0, 1.0, -1.0)
    plane: Tuple[str, str] = ("x", "y")
    corner: Optional[Tuple[int, ...]] = None
    substeps: int = 4
    reproject: bool = True
    sqrt_e: float = 1.0
    radius: Optional[float] = None
    paths: str = ""
    dressing: str = ""
    higgs: str = "zero"
    output_prefix: str = ""
    workers: int = 1
    output_dir: str = "reports"
    log_level: str = "INFO"
    log_file: Optional[str] = None
    compare: Optional[str] = None

    def __post_init__(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise ConfigError(f"representation must be one of {REPRESENTATIONS}")
        if self.beta not in (1, -1):
            raise ConfigError(f"beta must be +1 or -1, got {self.beta}")
        if self.derivatives not in DERIVATIVE_MODES:
            raise ConfigError(f"derivatives must be one of {DERIVATIVE_MODES}")
        if self.tolerance_profile not in TOLERANCE_PROFILES:
            raise ConfigError(f"tolerance_profile must be one of {sorted(TOLERANCE_PROFILES)}")
        if self.expect not in EXPECTATIONS:
            raise ConfigError(f"expect must be one of {EXPECTATIONS}")
        if self.substeps < 1:
            raise ConfigError(f"substeps must be >= 1, got {self.substeps}")
        if len(set(self.lambdas)) < 3:
            raise ConfigError(f"lambdas needs at least 3 distinct values, got {self.lambdas}")
        if self.sqrt_e <= 0:
            raise ConfigError(f"sqrt_e must be positive, got {self.sqrt_e}")
        if self.radius is not None and self.radius <= 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level!r}")

    def grid(self) -> Grid:
        # a single entry applies to every axis
        one = lambda v: v[0] if len(v) == 1 else v  # noqa: E731
        try:
            return Grid.uniform(self.dimension, one(self.points), one(self.spacing), one(self.origin))
        except DomainError as e:
            raise ConfigError(f"Invalid [grid] section: {e}") from e

    @property
    def tolerances(self) -> Tolerances:
        return TOLERANCE_PROFILES[self.tolerance_profile]

    def convention(self) -> SignConvention:
        if not self.convention_path:
            return DEFAULT_CONVENTION
        return load_convention(self.convention_path)

    def dressing_spec(self, convention: SignConvention) -> Optional[DressingSpec]:
        """``x=[0.5j,-0.5j,0.25j]; t=[...]`` diagonals; None when not configured."""
        if not self.dressing.strip():
            return None
        diagonals = {}
        for part in (p.strip() for p in self.dressing.split(";") if p.strip()):
            if "=" not in part:
                raise ConfigError(f"dressing entry {part!r} is not axis=[...]")
            axis, raw = (s.strip() for s in part.split("=", 1))
            entries = [e for e in raw.strip("[]").replace(":", ",").split(",") if e.strip()]
            try:
                diagonals[axis] = tuple(complex(e.strip()) for e in entries)
            except ValueError:
                raise ConfigError(f"dressing entries for {axis} must be complex numbers") from None
        return DressingSpec.from_convention(diagonals, convention)

    def path_pair(self, start: Tuple[int, ...]) -> Optional[Tuple[GridPath, GridPath]]:
        if not self.paths.strip():
            return None
        parts = [p for p in self.paths.split(";") if p.strip()]
        if len(parts) != 2:
            raise ConfigError(f"paths needs two step lists separated by ';', got {self.paths!r}")
        return GridPath.parse(start, parts[0]), GridPath.parse(start, parts[1])

    def output_path(self, command: str, suffix: str = ".json") -> Path:
        return Path(self.output_dir) / f"{self.output_prefix or command}{suffix}"


def _tuple(raw: str, cast: Any) -> Tuple:
    try:
        return tuple(cast(v.strip()) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"Cannot parse list {raw!r}") from None


def _bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"Expected a boolean, got {raw!r}")


def _int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def _convert(key: str, raw: str) -> Tuple[str, Any]:
    """INI key and string value -> RunConfig field name and typed value."""
    if key == "dimension":
        return key, _int(raw, key)
    if key == "points":
        return key, _tuple(raw, int)
    if key in ("spacing", "origin"):
        return key, _tuple(raw, float)
    if key == "seed":
        return key, _int(raw, key) if raw.strip() else None
    if key == "beta":
        return key, _int(raw, key)
    if key == "convention":
        return "convention_path", raw.strip() or None
    if key == "lambdas":
        return key, _tuple(raw, float)
    if key == "plane":
        plane = tuple(a.strip() for a in raw.replace(",", " ").split())
        if len(plane) != 2:
            raise ConfigError(f"plane needs two axes, got {raw!r}")
        return key, plane
    if key == "corner":
        return key, _tuple(raw, int) if raw.strip() else None
    if key == "substeps":
        return key, _int(raw, key)
    if key == "reproject":
        return key, _bool(raw)
    if key == "sqrt_e":
        return key, _float(raw, key)
    if key == "radius":
        return key, _float(raw, key) if raw.strip() else None
    if key == "workers":
        return key, _int(raw, key)
    return key, raw.strip()


def read_ini(path: Union[str, Path]) -> Dict[str, Any]:
    """Typed RunConfig overrides from an INI file."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    values: Dict[str, Any] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"Unknown config section [{section}] in {path}")
        for key, raw in parser.items(section):
            if key not in SECTIONS[section]:
                raise ConfigError(f"Unknown key {key!r} in [{section}] of {path}")
            name, value = _convert(key, raw)
            values[name] = value
    logger.debug(f"Read {len(values)} settings from {path}")
    return values


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    environ = os.environ if environ is None else environ
    values: Dict[str, Any] = {}
    if environ.get("GCME_LOG_LEVEL"):
        values["log_level"] = environ["GCME_LOG_LEVEL"].upper()
    if environ.get("GCME_LOG_FILE"):
        values["log_file"] = environ["GCME_LOG_FILE"]
    if environ.get("GCME_OUTPUT_DIR"):
        values["output_dir"] = environ["GCME_OUTPUT_DIR"]
    if environ.get("GCME_CONVENTION_PATH"):
        values["convention_path"] = environ["GCME_CONVENTION_PATH"]
    return values


def load_config(
    path: Optional[Union[str, Path]] = None,
    flags: Optional[Dict[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """defaults < environment < INI file < flags (None-valued flags are ignored)."""
    known = {f.name for f in fields(RunConfig)}
    merged: Dict[str, Any] = {}
    merged.update(env_overrides(environ))
    if path is not None:
        merged.update(read_ini(path))
    merged.update({k: v for k, v in (flags or {}).items() if v is not None})
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"Unknown settings: {sorted(unknown)}")
    try:
        config = replace(RunConfig(), **merged)
    except TypeError as e:
        raise ConfigError(f"Invalid settings: {e}") from e
    config.grid()
    return config

