"""
Sign-convention calibration.

Every combination in the choice space (su(2) prefactor x pencil sign x
dressing sign x SDYM derivative map) is tested on a set of oracle
scenarios:

- equivalence: iso-mapped su(2) residuals match the so(3) residuals
- pencil: pencil coefficients invert onto the bracket-flipped residuals
- dressing: dressed frames solve the dressed linear system
- sdym: the three self-duality identities hold
- ymhb: Higgs-pencil coefficients invert onto the mapped Higgs residuals

Exactly one combination must pass. Bracket signs are invisible on abelian
flat fields, so an oracle set without a non-abelian or non-flat connection
ends in CalibrationAmbiguity.
"""

import hashlib
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from loguru import logger

from src.algebra.conventions import (
    DRESSING_SIGNS,
    PENCIL_SIGNS,
    SDYM_MAPS,
    SU2_PREFACTORS,
    SignConvention,
    save_convention,
)
from src.curvature.residuals import equivalence_su2_so3, max_difference, residual_2p1
from src.embeddings.sdym import sdym_identities
from src.embeddings.ymhb import mapped_ymhb_residual, ymhb_pencils
from src.errors import CalibrationAmbiguity, CalibrationFailure, DomainError
from src.fields.field import ConnectionField, MatrixField
from src.fields.grid import Grid
from src.fields.scenarios import sample_higgs, sample_scenario
from src.lax.dressing import DressingSpec, dressing_deviation
from src.lax.pencils import coeffs_to_gcme, gcme_pencils, pencil_commutator_coeffs

CHOICE_KEYS = ("su2_prefactor", "pencil_sign", "dressing_sign", "sdym_map")
FULL_CHOICE_SPACE: Dict[str, Sequence[Any]] = {
    "su2_prefactor": tuple(SU2_PREFACTORS),
    "pencil_sign": PENCIL_SIGNS,
    "dressing_sign": DRESSING_SIGNS,
    "sdym_map": SDYM_MAPS,
}
MAX_COMBINATIONS = 64
CHECKS = ("equivalence", "pencil", "dressing", "sdym", "ymhb")

# unitary dressing factors: purely imaginary diagonals
ORACLE_DRESSING = {
    "x": (0.5j, -0.5j, 0.25j),
    "y": (0.2j, 0.1j, -0.3j),
    "t": (-0.4j, 0.3j, 0.1j),
}


@dataclass
class OracleScenario:
    """A 3D so(3) test connection, optionally with its frame and a Higgs field."""

    name: str
    connection: ConnectionField
    frame: Optional[MatrixField] = None
    higgs: Optional[MatrixField] = None
    flat: bool = False

    def __post_init__(self) -> None:
        if self.connection.grid.dimension != 3:
            raise DomainError(f"Oracle {self.name!r} needs an (x, y, t) grid")
        if self.connection.representation != "so3" or self.connection.beta != 1:
            raise DomainError(f"Oracle {self.name!r} must be an so(3) connection with beta=+1")


def oracle_from_spec(
    spec: str,
    grid: Grid,
    *,
    higgs: Optional[str] = None,
    flat: bool = False,
    seed: Optional[int] = None,
) -> OracleScenario:
    sample = sample_scenario(spec, grid, seed=seed)
    phi = sample_higgs(higgs, grid) if higgs else None
    return OracleScenario(spec, sample.connection, sample.frame, phi, flat)


def default_oracles(grid: Optional[Grid] = None) -> List[OracleScenario]:
    """A non-abelian flat connection with its frame plus a non-flat one with a Higgs field."""
    grid = grid or Grid.uniform(3, 10, 0.1)
    return [
        oracle_from_spec("pure_gauge", grid, flat=True),
        oracle_from_spec(
            "random_smooth(seed=42, amplitude=1, bandwidth=2)",
            grid,
            higgs="random_smooth(seed=7, amplitude=1, bandwidth=2)",
        ),
    ]


def candidates(choice_space: Optional[Dict[str, Sequence[Any]]] = None) -> List[SignConvention]:
    """All combinations in fixed enumeration order."""
    space = dict(FULL_CHOICE_SPACE)
    if choice_space:
        unknown = set(choice_space) - set(CHOICE_KEYS)
        if unknown:
            raise DomainError(f"Unknown choice keys: {sorted(unknown)}")
        space.update({k: tuple(v) for k, v in choice_space.items()})
    values = [space[k] for k in CHOICE_KEYS]
    if any(len(v) == 0 for v in values):
        raise DomainError("Every choice needs at least one option")
    combinations = list(itertools.product(*values))
    if len(combinations) > MAX_COMBINATIONS:
        raise DomainError(f"Choice space has {len(combinations)} combinations, limit {MAX_COMBINATIONS}")
    return [
        SignConvention(**dict(zip(CHOICE_KEYS, combo)), provenance="calibration candidate")
        for combo in combinations
    ]


def provenance_digest(conventions: Sequence[SignConvention], oracle_names: Sequence[str]) -> str:
    payload = json.dumps(
        {"choices": [c.choices() for c in conventions], "oracles": list(oracle_names)},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def evaluate_candidate(
    convention: SignConvention,
    oracles: Sequence[OracleScenario],
    derivatives: str = "auto",
) -> Dict[str, float]:
    """Worst deviation of every check over all oracles (0.0 when not applicable)."""
    worst = {check: 0.0 for check in CHECKS}
    for oracle in oracles:
        connection = oracle.connection
        worst["equivalence"] = max(
            worst["equivalence"], equivalence_su2_so3(connection, convention, derivatives).deviation
        )

        mats = connection.matrices(convention)
        A, B, C = mats["x"], mats["y"], mats["t"]
        coeffs = pencil_commutator_coeffs(*gcme_pencils(A, B, C, convention.pencil_sign), derivatives)
        flipped = residual_2p1(A, B, C, bracket_sign=-1, derivatives=derivatives)
        worst["pencil"] = max(worst["pencil"], max_difference(coeffs_to_gcme(coeffs), flipped))

        if oracle.frame is not None:
            spec = DressingSpec(diagonals=ORACLE_DRESSING, sign=convention.dressing_sign)
            worst["dressing"] = max(
                worst["dressing"], dressing_deviation(oracle.frame, mats, spec, derivatives)
            )

        identities = sdym_identities(A, B, C, convention, derivatives)
        worst["sdym"] = max(worst["sdym"], max(identities.deviations.values()))

        phi = oracle.higgs if oracle.higgs is not None else MatrixField.zeros(A.grid, 3)
        higgs_coeffs = pencil_commutator_coeffs(
            *ymhb_pencils(A, B, C, phi, convention.pencil_sign), derivatives
        )
        mapped = mapped_ymhb_residual(A, B, C, phi, derivatives)
        worst["ymhb"] = max(worst["ymhb"], max_difference(coeffs_to_gcme(higgs_coeffs), mapped))
    return worst


def calibrate(
    oracles: Optional[Sequence[OracleScenario]] = None,
    choice_space: Optional[Dict[str, Sequence[Any]]] = None,
    *,
    tolerance: float = 1e-10,
    derivatives: str = "auto",
    workers: int = 1,
    output_path: Optional[Union[str, Path]] = None,
) -> SignConvention:
    """
    Test every combination and return the unique passing one.

    Raises CalibrationFailure (with the full deviation table) when nothing
    passes and CalibrationAmbiguity (listing the passing rows) when more
    than one does.
    """
    oracles = list(oracles) if oracles is not None else default_oracles()
    if not oracles:
        raise DomainError("Calibration needs at least one oracle scenario")
    if all(o.flat for o in oracles):
        logger.warning("All oracle scenarios are flat; bracket signs may be undetectable")
    convs = candidates(choice_space)
    logger.info(f"Calibrating {len(convs)} convention candidates on {len(oracles)} oracles")

    # pool.map yields results in candidate order
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(
            pool.map(lambda c: evaluate_candidate(c, oracles, derivatives), convs)
        )

    table = []
    for conv, deviations in zip(convs, results):
        passed = all(d <= tolerance for d in deviations.values())
        table.append({**conv.choices(), "deviations": deviations, "passed": passed})
        logger.debug(f"{conv.choices()} -> {'pass' if passed else 'fail'} {deviations}")

    passing = [row for row in table if row["passed"]]
    if not passing:
        raise CalibrationFailure(
            f"No convention candidate passed all checks at tolerance {tolerance:.1e}", table
        )
    if len(passing) > 1:
        raise CalibrationAmbiguity(
            f"{len(passing)} convention candidates passed every check", passing
        )

    digest = provenance_digest(convs, [o.name for o in oracles])
    winner = {k: passing[0][k] for k in CHOICE_KEYS}
    convention = SignConvention(**winner, provenance=f"calibration sha256:{digest}")
    logger.info(f"Calibrated convention: {convention.choices()}")
    if output_path is not None:
        save_convention(convention, output_path)
    return convention
