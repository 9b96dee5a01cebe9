"""
Sign and prefactor conventions.

Four choices are left open by the equations themselves: the su(2) prefactor of the
2x2 connection, the sign of the Lax-pencil potential, the sign of the
dressing exponent and the map from the SDYM light-cone derivatives to
(x, y, t). A SignConvention pins all four down; the calibration harness in
``src.lax.calibration`` produces one and every module consumes it.
"""

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Union

from loguru import logger

from src.errors import ConfigError

SCHEMA_VERSION = 1

# prefactor label -> complex multiplier of [[tau, k+i sigma], [k-i sigma, -tau]]
SU2_PREFACTORS: Dict[str, complex] = {
    "i/2": 0.5j,
    "1/(2i)": -0.5j,
}
PENCIL_SIGNS = (1, -1)
DRESSING_SIGNS = (-1, 1)
SDYM_MAPS = ("standard", "conjugate")


@dataclass(frozen=True)
class SignConvention:
    """Resolved convention choices plus where they came from."""

    su2_prefactor: str = "i/2"
    pencil_sign: int = 1
    dressing_sign: int = -1
    sdym_map: str = "standard"
    provenance: str = "hand-derived default"

    def __post_init__(self) -> None:
        if self.su2_prefactor not in SU2_PREFACTORS:
            raise ConfigError(f"Unknown su(2) prefactor: {self.su2_prefactor!r}")
        if self.pencil_sign not in PENCIL_SIGNS:
            raise ConfigError(f"Pencil sign must be +1 or -1, got {self.pencil_sign!r}")
        if self.dressing_sign not in DRESSING_SIGNS:
            raise ConfigError(
                f"Dressing exponent sign must be +1 or -1, got {self.dressing_sign!r}"
            )
        if self.sdym_map not in SDYM_MAPS:
            raise ConfigError(f"Unknown SDYM derivative map: {self.sdym_map!r}")

    @property
    def prefactor(self) -> complex:
        return SU2_PREFACTORS[self.su2_prefactor]

    def choices(self) -> Dict[str, Any]:
        """The four convention choices without provenance."""
        data = asdict(self)
        data.pop("provenance")
        return data

    def with_provenance(self, provenance: str) -> "SignConvention":
        return replace(self, provenance=provenance)

    def to_dict(self) -> Dict[str, Any]:
        return {"schemaVersion": SCHEMA_VERSION, **asdict(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SignConvention":
        payload = dict(data)
        version = payload.pop("schemaVersion", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported convention schemaVersion: {version}")
        known = {"su2_prefactor", "pencil_sign", "dressing_sign", "sdym_map", "provenance"}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"Unknown convention keys: {sorted(unknown)}")
        return cls(**payload)


DEFAULT_CONVENTION = SignConvention()


def save_convention(convention: SignConvention, path: Union[str, Path]) -> Path:
    """Write a convention document as JSON."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(convention.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise ConfigError(f"Cannot write convention file {path}: {e}") from e
    logger.info(f"Saved sign convention to {path} ({convention.provenance})")
    return path


def load_convention(path: Union[str, Path]) -> SignConvention:
    """Read a convention document written by ``save_convention``."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read convention file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Convention file {path} must hold a JSON object")
    convention = SignConvention.from_dict(data)
    logger.debug(f"Loaded sign convention from {path}: {convention.choices()}")
    return convention
