"""
Batch commands.

Each ``run_*`` function takes a RunConfig and returns a CommandOutcome; the
report is written by ``execute`` whether or not the command passed, and the
outcome is turned into an exit code there.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from loguru import logger

from src.algebra.conventions import SignConvention
from src.curvature.reports import (
    ResidualReport,
    compare_reports,
    load_report,
    make_report,
    save_report,
)
from src.curvature.residuals import (
    PLANE_LABELS,
    connection_residuals,
    equivalence_su2_so3,
    max_difference,
    residual_1p1_component,
    residual_2p1,
)
from src.embeddings.sdym import sdym_identities, sdym_reduction_check
from src.embeddings.ymhb import (
    covariant_derivative,
    mapped_ymhb_residual,
    ymhb_pencils,
    ymhb_residual,
)
from src.errors import (
    CalibrationAmbiguity,
    CalibrationFailure,
    ConfigError,
    IdentityViolation,
)
from src.fields.export import export_connection, export_matrix_field
from src.fields.field import MatrixField
from src.fields.scenarios import ScenarioSample, sample_higgs, sample_scenario
from src.lax.calibration import calibrate, default_oracles
from src.lax.dressing import dressing_deviation
from src.lax.pencils import (
    coeffs_to_gcme,
    gcme_pencils,
    lambda_sweep,
    pencil_commutator_coeffs,
)
from src.cli.config import RunConfig
from src.transport.curves import (
    arc_length,
    curve_family,
    export_family_csv,
    export_family_obj,
    circle_radius_error,
    fit_circle,
)
from src.transport.propagate import (
    GridPath,
    path_independence,
    plaquette_defect,
    plaquette_defects,
    propagate,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_AMBIGUITY = 4


@dataclass
class CommandOutcome:
    report: ResidualReport
    passed: bool
    artifacts: List[Path] = field(default_factory=list)
    exit_code: Optional[int] = None


def _sample(config: RunConfig, convention: SignConvention) -> ScenarioSample:
    return sample_scenario(
        config.spec,
        config.grid(),
        seed=config.seed,
        representation=config.representation,
        beta=config.beta,
        convention=convention,
    )


def _report(
    kind: str,
    config: RunConfig,
    convention: SignConvention,
    sample: Optional[ScenarioSample],
    residuals: Dict[str, Any],
    values: Dict[str, Any],
) -> ResidualReport:
    connection = sample.connection if sample else None
    return make_report(
        residuals,
        config.grid(),
        kind=kind,
        scenario=connection.scenario if connection else config.spec,
        seed=connection.seed if connection else config.seed,
        representation=config.representation,
        beta=config.beta,
        derivatives=config.derivatives,
        convention=convention,
        values=values,
    )


def _require_3d(config: RunConfig, command: str) -> None:
    if config.dimension != 3:
        raise ConfigError(f"'{command}' needs a 3D (x, y, t) grid")


def run_check(config: RunConfig) -> CommandOutcome:
    convention = config.convention()
    sample = _sample(config, convention)
    connection = sample.connection
    tol = config.tolerances
    residuals: Dict[str, Any] = dict(
        connection_residuals(connection, convention, derivatives=config.derivatives)
    )
    if config.dimension == 2:
        residuals.update(residual_1p1_component(connection, derivatives=config.derivatives))
    values: Dict[str, Any] = {"expect": config.expect, "flatTolerance": tol.flat}
    passed = True
    if config.beta == 1:
        deviation = equivalence_su2_so3(connection, convention, config.derivatives).deviation
        values["equivalenceDeviation"] = deviation
        values["equivalenceTolerance"] = tol.residual
        passed = deviation <= tol.residual
    report = _report("check", config, convention, sample, residuals, values)
    interior = report.max_norm(interior=True)
    report.values["interiorMax"] = interior
    if config.expect == "flat":
        passed = passed and interior <= tol.flat
    logger.info(f"check {connection.scenario}: interior max {interior:.3e}")
    return CommandOutcome(report, passed)


def run_lax(config: RunConfig) -> CommandOutcome:
    _require_3d(config, "lax")
    convention = config.convention()
    sample = _sample(config, convention)
    tol = config.tolerances
    mats = sample.connection.matrices(convention)
    A, B, C = mats["x"], mats["y"], mats["t"]
    pencils = gcme_pencils(A, B, C, convention.pencil_sign)
    coeffs = pencil_commutator_coeffs(*pencils, config.derivatives)
    reconstructed = coeffs_to_gcme(coeffs)
    flipped = residual_2p1(A, B, C, bracket_sign=-1, derivatives=config.derivatives)
    pencil_deviation = max_difference(reconstructed, flipped)
    sweep = lambda_sweep(*pencils, config.lambdas, config.derivatives)
    sweep_deviation = max_difference(sweep, coeffs)
    values: Dict[str, Any] = {
        "pencilDeviation": pencil_deviation,
        "sweepDeviation": sweep_deviation,
        "lambdas": list(config.lambdas),
    }
    passed = pencil_deviation <= tol.residual and sweep_deviation <= tol.flat

    spec = config.dressing_spec(convention)
    if spec is not None:
        if sample.frame is None:
            logger.warning(f"Scenario {config.spec!r} has no frame; dressing check skipped")
        else:
            deviation = dressing_deviation(sample.frame, mats, spec, config.derivatives)
            values["dressingDeviation"] = deviation
            passed = passed and deviation <= tol.residual

    residuals: Dict[str, Any] = dict(coeffs)
    residuals.update({f"{label}_minus": r for label, r in reconstructed.items()})
    report = _report("lax", config, convention, sample, residuals, values)
    logger.info(f"lax: pencil deviation {pencil_deviation:.3e}, sweep {sweep_deviation:.3e}")
    return CommandOutcome(report, passed)


def run_embed_ymhb(config: RunConfig) -> CommandOutcome:
    _require_3d(config, "embed-ymhb")
    convention = config.convention()
    sample = _sample(config, convention)
    tol = config.tolerances
    grid = config.grid()
    mats = sample.connection.matrices(convention)
    A, B, C = mats["x"], mats["y"], mats["t"]
    phi = sample_higgs(config.higgs, grid, config.representation, config.beta, convention)

    zero = MatrixField.zeros(grid, A.matrix_size, dtype=A.values.dtype.type)
    plain = residual_2p1(A, B, C, derivatives=config.derivatives)
    specialised = ymhb_residual(A, B, C, zero, derivatives=config.derivatives)
    identical = all(np.array_equal(plain[k].values, specialised[k].values) for k in plain)

    coeffs = pencil_commutator_coeffs(
        *ymhb_pencils(A, B, C, phi, convention.pencil_sign), config.derivatives
    )
    mapped = mapped_ymhb_residual(A, B, C, phi, config.derivatives)
    deviation = max_difference(coeffs_to_gcme(coeffs), mapped)

    Y = ymhb_residual(A, B, C, phi, derivatives=config.derivatives)
    residuals: Dict[str, Any] = {
        "Y1": Y["R_a"],
        "Y2": Y["R_b"],
        "Y3": Y["R_c"],
    }
    for axis, field_ in mats.items():
        residuals[f"D_{axis}"] = covariant_derivative(phi, field_, axis, config.derivatives)
    values = {
        "higgs": config.higgs,
        "zeroHiggsBitIdentical": identical,
        "pencilDeviation": deviation,
    }
    report = _report("embed-ymhb", config, convention, sample, residuals, values)
    passed = identical and deviation <= tol.residual
    logger.info(f"embed-ymhb: bit-identical={identical}, pencil deviation {deviation:.3e}")
    return CommandOutcome(report, passed)


def run_embed_sdym(config: RunConfig) -> CommandOutcome:
    _require_3d(config, "embed-sdym")
    convention = config.convention()
    sample = _sample(config, convention)
    tol = config.tolerances
    mats = sample.connection.matrices(convention)
    A, B, C = mats["x"], mats["y"], mats["t"]
    try:
        identities = sdym_reduction_check(A, B, C, convention, config.derivatives, tol.residual)
        passed = True
    except IdentityViolation as e:
        logger.error(str(e))
        identities = sdym_identities(A, B, C, convention, config.derivatives, tol.residual)
        passed = False
    values = {"deviations": identities.deviations, "tolerance": tol.residual}
    report = _report("embed-sdym", config, convention, sample, identities.combinations, values)
    return CommandOutcome(report, passed)


def _default_paths(config: RunConfig, corner: tuple, plane: tuple) -> tuple:
    grid = config.grid()
    a, b = plane
    ia, ib = grid.axis_index(a), grid.axis_index(b)
    na = min(4, grid.points[ia] - 1 - corner[ia])
    nb = min(4, grid.points[ib] - 1 - corner[ib])
    first = GridPath(corner, ((a, 1),) * na + ((b, 1),) * nb)
    second = GridPath(corner, ((b, 1),) * nb + ((a, 1),) * na)
    return first, second


def _plane(config: RunConfig) -> tuple:
    plane = tuple(config.plane)
    if config.dimension == 2 and plane == ("x", "y"):
        return ("x", "t")
    return plane


def run_transport(config: RunConfig) -> CommandOutcome:
    convention = config.convention()
    sample = _sample(config, convention)
    connection = sample.connection
    grid = config.grid()
    tol = config.tolerances
    plane = _plane(config)
    for axis in plane:
        if axis not in grid.axes:
            raise ConfigError(f"plane axis {axis!r} not in grid axes {grid.axes}")
    corner = tuple(config.corner) if config.corner else (0,) * grid.dimension

    defects = plaquette_defects(
        connection, plane, config.substeps, reproject=config.reproject, convention=convention
    )
    area = grid.step(plane[0]) * grid.step(plane[1])
    label = "R" if grid.dimension == 2 else PLANE_LABELS[tuple(sorted(plane, key=grid.axis_index))]
    residual = connection_residuals(connection, convention, derivatives=config.derivatives)[label]
    corner_defect = plaquette_defect(
        connection, corner, plane, config.substeps, reproject=config.reproject, convention=convention
    )

    paths = config.path_pair(corner) or _default_paths(config, corner, plane)
    path_gap = path_independence(
        connection, *paths, config.substeps, reproject=config.reproject, convention=convention
    )
    drift = propagate(
        connection, paths[0], config.substeps, reproject=config.reproject, convention=convention
    ).drift
    max_defect = float(np.max(defects))
    values = {
        "plane": list(plane),
        "corner": list(corner),
        "maxDefect": max_defect,
        "cornerDefect": corner_defect,
        "defectOverArea": max_defect / area,
        "residualLabel": label,
        "pathIndependence": path_gap,
        "drift": drift,
        "reproject": config.reproject,
        "substeps": config.substeps,
        "transportTolerance": tol.transport,
    }
    report = _report("transport", config, convention, sample, {label: residual}, values)
    passed = config.expect == "any" or (
        max_defect <= tol.transport and path_gap <= tol.transport
    )
    logger.info(f"transport: max defect {max_defect:.3e}, path gap {path_gap:.3e}")
    return CommandOutcome(report, passed)


def run_reconstruct(config: RunConfig) -> CommandOutcome:
    convention = config.convention()
    sample = _sample(config, convention)
    grid = config.grid()
    tol = config.tolerances
    family = curve_family(
        sample.connection,
        config.sqrt_e,
        substeps=config.substeps,
        reproject=config.reproject,
        convention=convention,
    )
    artifacts = [
        export_family_csv(family, config.output_path("reconstruct", ".csv")),
        export_family_obj(family, config.output_path("reconstruct", ".obj")),
    ]
    first = family[0]
    expected = (grid.points[0] - 1) * grid.step("x") * config.sqrt_e
    length = arc_length(first)
    relative = abs(length - expected) / expected
    centre, radius = fit_circle(first)
    values = {
        "slices": len(family),
        "arcLength": length,
        "expectedArcLength": expected,
        "arcLengthError": relative,
        "circleCentre": centre.tolist(),
        "circleRadius": radius,
        "artifacts": [p.name for p in artifacts],
    }
    passed = relative <= tol.curve
    if config.radius is not None:
        radius_error = circle_radius_error(first, config.radius)
        values["expectedRadius"] = config.radius
        values["radiusError"] = radius_error
        passed = passed and radius_error <= tol.curve
        logger.info(
            f"reconstruct: radius {radius:.6f} vs {config.radius}, error {radius_error:.3e}"
        )
    report = _report("reconstruct", config, convention, sample, {}, values)
    return CommandOutcome(report, passed, artifacts)


def run_calibrate(config: RunConfig) -> CommandOutcome:
    grid = config.grid() if config.dimension == 3 else None
    oracles = default_oracles(grid)
    target = config.convention_path or str(Path(config.output_dir) / "sign_convention.json")
    values: Dict[str, Any] = {
        "oracles": [o.name for o in oracles],
        "output": config.convention_path or Path(target).name,
    }
    exit_code = None
    convention: Optional[SignConvention] = None
    passed = False
    try:
        convention = calibrate(
            oracles,
            tolerance=config.tolerances.residual,
            derivatives=config.derivatives,
            workers=config.workers,
            output_path=target,
        )
        passed = True
        values["choices"] = convention.choices()
    except CalibrationFailure as e:
        logger.error(str(e))
        values["table"] = e.table
    except CalibrationAmbiguity as e:
        logger.error(str(e))
        values["candidates"] = e.candidates
        exit_code = EXIT_AMBIGUITY
    report = make_report(
        {},
        oracles[0].connection.grid,
        kind="calibrate",
        scenario=",".join(values["oracles"]),
        derivatives=config.derivatives,
        convention=convention,
        values=values,
    )
    return CommandOutcome(report, passed, [Path(target)] if passed else [], exit_code)


def run_gen(config: RunConfig) -> CommandOutcome:
    convention = config.convention()
    sample = _sample(config, convention)
    artifacts = [export_connection(sample.connection, config.output_path("gen", ".csv"))]
    if sample.frame is not None:
        artifacts.append(
            export_matrix_field(sample.frame, config.output_path("gen", "_frame.csv"))
        )
    values = {"artifacts": [p.name for p in artifacts]}
    report = _report("gen", config, convention, sample, {}, values)
    return CommandOutcome(report, True, artifacts)


COMMANDS: Dict[str, Callable[[RunConfig], CommandOutcome]] = {
    "check": run_check,
    "lax": run_lax,
    "embed-ymhb": run_embed_ymhb,
    "embed-sdym": run_embed_sdym,
    "transport": run_transport,
    "reconstruct": run_reconstruct,
    "calibrate": run_calibrate,
    "gen": run_gen,
}


def execute(command: str, config: RunConfig) -> int:
    """Run one command, always write its JSON report, return the exit code."""
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command {command!r}; choose from {sorted(COMMANDS)}")
    # read the reference first; it may live at the path about to be written
    reference = load_report(config.compare) if config.compare else None
    outcome = COMMANDS[command](config)
    outcome.report.passed = outcome.passed
    path = save_report(outcome.report, config.output_path(command))
    if reference is not None:
        differences = compare_reports(reference, outcome.report.to_dict())
        if differences:
            logger.error(f"Report differs from {config.compare} at: {', '.join(differences)}")
            return EXIT_TOLERANCE
        logger.info(f"Report matches {config.compare}")
    if outcome.exit_code is not None:
        return outcome.exit_code
    if not outcome.passed:
        logger.error(f"{command} failed its tolerances; see {path}")
        return EXIT_TOLERANCE
    logger.info(f"{command} passed")
    return EXIT_OK

