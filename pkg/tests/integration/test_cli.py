"""
End-to-end tests of the ``gcme`` command line: exit codes, reports,
artifacts and report comparison.
"""

import json
import sys

import pytest
from loguru import logger

from src.algebra.conventions import SignConvention, save_convention
from src.cli.main import build_parser, flags_from_args, main
from src.errors import ToleranceFailure

SMALL_3D = {"dimension": 3, "points": 6, "spacing": 0.1}
SMALL_2D = {"dimension": 2, "points": 9, "spacing": 0.1}
CIRCLE_2D = {"dimension": 2, "points": "129, 5", "spacing": "0.0078125, 0.1"}


@pytest.fixture
def run(ini_file, tmp_path):
    """Run ``gcme <command>`` against an INI file; returns (exit code, output dir)."""

    def invoke(command, grid=None, scenario=None, run_section=None, *extra):
        sections = {"grid": grid or SMALL_3D}
        if scenario:
            sections["scenario"] = scenario
        if run_section:
            sections["run"] = run_section
        path = ini_file(sections, name=f"{command}.ini")
        out = tmp_path / "out"
        code = main([command, "--config", str(path), "--out", str(out), *extra])
        return code, out

    return invoke


def read(out, name):
    return json.loads((out / name).read_text(encoding="utf-8"))


class TestParser:
    """Test cases for the argument parser."""

    def test_every_command_registered(self):
        """Test that each command parses with the shared options."""
        parser = build_parser()
        for command in ("check", "lax", "embed-ymhb", "embed-sdym", "transport", "reconstruct", "calibrate", "gen"):
            args = parser.parse_args([command, "--lambda", "0", "--lambda", "2", "--lambda", "-2"])
            assert args.command == command
            assert flags_from_args(args)["lambdas"] == (0.0, 2.0, -2.0)

    def test_lambda_comma_list(self):
        """Test that --lambda takes a comma-separated list and mixes with repeats."""
        parser = build_parser()
        args = parser.parse_args(["lax", "--lambda", "0,1,-1"])
        assert flags_from_args(args)["lambdas"] == (0.0, 1.0, -1.0)
        args = parser.parse_args(["lax", "--lambda", "0, 1", "--lambda", "-1"])
        assert flags_from_args(args)["lambdas"] == (0.0, 1.0, -1.0)
        args = parser.parse_args(["lax", "--lambda=-1,0,1"])
        assert flags_from_args(args)["lambdas"] == (-1.0, 0.0, 1.0)

    @pytest.mark.parametrize("raw", ["a,b,c", ","])
    def test_lambda_list_rejects_garbage(self, raw):
        """Test that non-numeric lambda lists are argparse errors."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["lax", "--lambda", raw])

    def test_no_command(self):
        """Test that running without a command prints help and exits 1."""
        assert main([]) == 1

    def test_invalid_choice(self):
        """Test that argparse rejects unknown tolerance profiles."""
        with pytest.raises(SystemExit):
            main(["check", "--tolerance-profile", "loose"])


class TestCheck:
    """Test cases for ``gcme check``."""

    def test_pure_gauge_passes(self, run):
        """Test a flat connection with closed-form derivatives."""
        code, out = run("check", scenario={"spec": "pure_gauge"})
        assert code == 0
        report = read(out, "check.json")
        assert report["kind"] == "check"
        assert report["passed"] is True
        assert report["values"]["interiorMax"] <= 1e-12
        assert set(report["residuals"]) == {"R_a", "R_b", "R_c"}

    def test_curved_field_fails_flatness(self, run):
        """Test that a random field fails expect=flat and still writes its report."""
        code, out = run("check", scenario={"spec": "random_smooth(seed=3)"})
        assert code == 3
        assert read(out, "check.json")["passed"] is False

    def test_curved_field_with_expect_any(self, run):
        """Test that expect=any only checks the su(2)/so(3) agreement."""
        code, out = run("check", None, {"spec": "random_smooth(seed=3)"}, {"expect": "any"})
        assert code == 0
        assert read(out, "check.json")["values"]["equivalenceDeviation"] <= 1e-10

    def test_componentwise_residuals_in_2d(self, run):
        """Test that 1+1 reports carry r1, r2 and r3."""
        code, out = run("check", SMALL_2D, {"spec": "abelian(theta=sin(x)*cos(t))"})
        assert code == 0
        assert set(read(out, "check.json")["residuals"]) == {"R", "r1", "r2", "r3"}

    def test_wrong_convention_fails(self, run, tmp_path):
        """Test that the 1/(2i) prefactor is caught on a curved field."""
        path = save_convention(SignConvention(su2_prefactor="1/(2i)"), tmp_path / "wrong.json")
        code, _ = run(
            "check", None, {"spec": "random_smooth(seed=3)"}, {"expect": "any", "convention": path}
        )
        assert code == 3

    def test_unknown_scenario(self, run):
        """Test that scenario errors exit 2."""
        code, _ = run("check", scenario={"spec": "spiral"})
        assert code == 2

    def test_bad_config(self, run):
        """Test that invalid INI values exit 2."""
        code, _ = run("check", {"dimension": 4, "points": 6, "spacing": 0.1})
        assert code == 2


class TestOtherCommands:
    """Test cases for lax, embeddings, transport, reconstruct and gen."""

    def test_lax_with_dressing(self, run):
        """Test pencils, sweep and dressing on a flat connection."""
        code, out = run(
            "lax", None, {"spec": "pure_gauge"}, {"dressing": "x=[0.5j,-0.5j,0.25j]; t=[0.1j,0,-0.1j]"}
        )
        assert code == 0
        values = read(out, "lax.json")["values"]
        assert values["pencilDeviation"] <= 1e-10
        assert values["sweepDeviation"] <= 1e-12
        assert values["dressingDeviation"] <= 1e-10

    def test_lax_comma_lambdas(self, tmp_path):
        """Test the documented comma form of --lambda end to end."""
        out = tmp_path / "out"
        code = main(["lax", "--scenario", "pure_gauge", "--lambda", "0,1,-1", "--out", str(out)])
        assert code == 0
        assert read(out, "lax.json")["values"]["lambdas"] == [0.0, 1.0, -1.0]

    def test_lax_needs_3d(self, run):
        """Test that lax refuses a 1+1 grid."""
        code, _ = run("lax", SMALL_2D, {"spec": "zero"})
        assert code == 2

    def test_embed_ymhb(self, run):
        """Test the Higgs embedding on a curved field."""
        code, out = run(
            "embed-ymhb",
            None,
            {"spec": "random_smooth(seed=5)"},
            {"higgs": "random_smooth(seed=7)"},
        )
        assert code == 0
        report = read(out, "embed-ymhb.json")
        assert report["values"]["zeroHiggsBitIdentical"] is True
        assert {"Y1", "Y2", "Y3", "D_x", "D_y", "D_t"} == set(report["residuals"])

    def test_embed_sdym(self, run):
        """Test the SDYM identities on a curved field."""
        code, out = run("embed-sdym", scenario={"spec": "random_smooth(seed=5)"})
        assert code == 0
        deviations = read(out, "embed-sdym.json")["values"]["deviations"]
        assert max(deviations.values()) <= 1e-10

    def test_embed_sdym_conjugate_map_fails(self, run, tmp_path):
        """Test that a wrong derivative map exits 3."""
        path = save_convention(SignConvention(sdym_map="conjugate"), tmp_path / "conj.json")
        code, _ = run("embed-sdym", None, {"spec": "random_smooth(seed=5)"}, {"convention": path})
        assert code == 3

    def test_transport_flat(self, run):
        """Test plaquettes and path independence on a flat connection."""
        code, out = run("transport", None, {"spec": "pure_gauge"}, {"plane": "x t"})
        assert code == 0
        values = read(out, "transport.json")["values"]
        assert values["residualLabel"] == "R_b"
        assert values["maxDefect"] <= 1e-8
        assert values["pathIndependence"] <= 1e-8

    def test_transport_curved(self, run):
        """Test that curved fields fail expect=flat and pass expect=any."""
        code, _ = run("transport", None, {"spec": "random_smooth(seed=2)"})
        assert code == 3
        code, out = run("transport", None, {"spec": "random_smooth(seed=2)"}, {"expect": "any"})
        assert code == 0
        assert read(out, "transport.json")["values"]["maxDefect"] > 1e-4

    def test_transport_bad_path(self, run):
        """Test that paths leaving the grid exit 2."""
        code, _ = run("transport", None, {"spec": "pure_gauge"}, {"paths": "x+9,y+1; y+1,x+9"})
        assert code == 2

    def test_reconstruct(self, run):
        """Test curve export for a straight-line family."""
        code, out = run("reconstruct", SMALL_2D, {"spec": "zero"}, {"sqrt_e": "2"})
        assert code == 0
        assert (out / "reconstruct.csv").exists()
        assert (out / "reconstruct.obj").exists()
        values = read(out, "reconstruct.json")["values"]
        assert values["slices"] == 9
        assert values["arcLength"] == pytest.approx(1.6)

    def test_reconstruct_circle_radius(self, run):
        """Test that constant k = 2 reconstructs a circle of the configured radius 1/2."""
        code, out = run("reconstruct", CIRCLE_2D, {"spec": "constants(k=2)"}, {"radius": "0.5"})
        assert code == 0
        values = read(out, "reconstruct.json")["values"]
        assert values["expectedRadius"] == 0.5
        assert values["radiusError"] <= 5e-3
        assert values["artifacts"] == ["reconstruct.csv", "reconstruct.obj"]

    def test_reconstruct_distorted_curvature_fails(self, run):
        """Test that a frame bent with k = 2.5 fails a radius 1/2 expectation."""
        code, out = run("reconstruct", CIRCLE_2D, {"spec": "constants(k=2.5)"}, {"radius": "0.5"})
        assert code == 3
        values = read(out, "reconstruct.json")["values"]
        assert values["arcLengthError"] <= 5e-3
        assert values["circleRadius"] == pytest.approx(0.4, rel=5e-3)
        assert values["radiusError"] > 5e-3

    def test_reconstruct_radius_flag(self, run):
        """Test that --radius overrides the INI expectation."""
        code, _ = run(
            "reconstruct", CIRCLE_2D, {"spec": "constants(k=2)"}, {"radius": "0.5"}, "--radius", "0.6"
        )
        assert code == 3

    def test_gen(self, run):
        """Test connection and frame snapshots."""
        code, out = run("gen", None, {"spec": "pure_gauge"}, {"output_prefix": "flat"})
        assert code == 0
        assert (out / "flat.csv").exists()
        assert (out / "flat_frame.csv").exists()
        assert read(out, "flat.json")["kind"] == "gen"


class TestCalibrate:
    """Test cases for ``gcme calibrate``."""

    def test_writes_convention_used_by_check(self, run):
        """Test that the calibrated convention feeds later runs."""
        code, out = run("calibrate")
        assert code == 0
        convention = out / "sign_convention.json"
        assert convention.exists()
        report = read(out, "calibrate.json")
        assert report["values"]["choices"]["su2_prefactor"] == "i/2"
        assert report["convention"]["provenance"].startswith("calibration sha256:")
        code, _ = run("check", None, {"spec": "pure_gauge"}, {"convention": convention})
        assert code == 0

    def test_workers_do_not_change_the_result(self, run, tmp_path):
        """Test that --workers 4 writes the same report as the single-threaded run."""
        code, out = run("calibrate")
        assert code == 0
        reference = tmp_path / "calibrate_serial.json"
        reference.write_text((out / "calibrate.json").read_text())
        code, _ = run("calibrate", None, None, None, "--workers", "4", "--compare", str(reference))
        assert code == 0


class TestCompare:
    """Test cases for --compare."""

    def test_identical_rerun(self, run):
        """Test that a rerun matches its own earlier report, even at the same path."""
        code, out = run("check", scenario={"spec": "random_smooth(seed=4)"}, run_section={"expect": "any"})
        assert code == 0
        previous = out / "check.json"
        code, _ = run(
            "check", None, {"spec": "random_smooth(seed=4)"}, {"expect": "any"}, "--compare", str(previous)
        )
        assert code == 0

    def test_changed_seed(self, run, tmp_path):
        """Test that a different seed makes the comparison fail."""
        code, out = run("check", None, {"spec": "random_smooth(seed=4)"}, {"expect": "any"})
        reference = tmp_path / "reference.json"
        reference.write_text((out / "check.json").read_text())
        code, _ = run(
            "check", None, {"spec": "random_smooth(seed=4)"}, {"expect": "any"},
            "--seed", "8", "--compare", str(reference),
        )
        assert code == 3

    def test_missing_reference(self, run, tmp_path):
        """Test that an unreadable reference exits 2."""
        code, _ = run("check", None, {"spec": "zero"}, None, "--compare", str(tmp_path / "none.json"))
        assert code == 2


class TestErrorHandling:
    """Test cases for exit codes of unexpected conditions."""

    def test_keyboard_interrupt(self, mocker):
        """Test that Ctrl-C exits 130."""
        mocker.patch.object(sys.modules["src.cli.main"], "execute", side_effect=KeyboardInterrupt)
        assert main(["check", "--scenario", "zero"]) == 130

    def test_unexpected_error(self, mocker):
        """Test that unexpected exceptions exit 1."""
        mocker.patch.object(sys.modules["src.cli.main"], "execute", side_effect=RuntimeError("boom"))
        assert main(["check", "--scenario", "zero"]) == 1

    def test_tolerance_failure(self, mocker):
        """Test that a ToleranceFailure escaping a command exits 3."""
        mocker.patch.object(sys.modules["src.cli.main"], "execute", side_effect=ToleranceFailure("too large"))
        assert main(["check", "--scenario", "zero"]) == 3

    def test_log_file(self, run, tmp_path):
        """Test that --log-file writes a log."""
        log = tmp_path / "logs" / "gcme.log"
        code, _ = run("check", None, {"spec": "zero"}, None, "--log-file", str(log))
        assert code == 0
        logger.remove()
        assert "check passed" in log.read_text(encoding="utf-8")
