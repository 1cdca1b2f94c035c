"""Tests for the verification harness: suites, reports, orbits, CLI.

Covers the registry coverage contract (every module invariant is backed
by at least one registered check), determinism of the structured report,
the orbit oracles, and the CLI exit-code protocol.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from covphase.einstein import LightconeViolation
from covphase.modelspec import load_builtin
from covphase.orbit import BoxExit, integrate_orbit
from covphase.report import CheckRecord, SuiteReport, emit_report
from covphase import suites as su


class TestRegistry:
    def test_fixed_suite_names(self):
        assert su.suite_names() == [
            "galilei-core", "galilei-brackets", "galilei-quantum",
            "einstein-identities", "einstein-brackets", "einstein-quantum",
            "section1-general", "orbits",
        ]

    def test_every_module_invariant_is_covered(self):
        # the registry is the coverage ledger: each invariant id that a
        # theory module promises must be certified by some check
        covered = {}
        for suite in su.SUITES.values():
            for check in suite.checks:
                if check.invariant is not None:
                    covered.setdefault(check.module, set()).add(
                        check.invariant)
        for module, invariants in su.MODULE_INVARIANTS.items():
            assert covered[module] == set(invariants), module

    def test_check_names_unique_within_suite(self):
        for suite in su.SUITES.values():
            names = [c.name for c in suite.checks]
            assert len(names) == len(set(names))

    def test_framework_tags(self):
        assert su.SUITES["galilei-core"].framework == "galilei"
        assert su.SUITES["einstein-brackets"].framework == "einstein"
        assert su.SUITES["section1-general"].framework == "any"
        assert su.SUITES["orbits"].framework == "any"


class TestRunSuite:
    def test_galilei_core_passes(self):
        rep = su.run_suite("flat-free", "galilei-core", points=12, seed=42)
        assert rep.all_passed()
        assert rep.model == "flat-free" and rep.seed == 42

    def test_einstein_identities_pass(self):
        rep = su.run_suite("uniform-e", "einstein-identities",
                           points=12, seed=7)
        assert rep.all_passed()

    def test_unknown_suite(self):
        with pytest.raises(su.UnknownSuiteError):
            su.run_suite("flat-free", "galilei-weird", points=4)

    def test_framework_mismatch(self):
        with pytest.raises(su.FrameworkMismatchError):
            su.run_suite("minkowski", "galilei-core", points=4)
        with pytest.raises(su.FrameworkMismatchError):
            su.run_suite("flat-free", "einstein-brackets", points=4)

    def test_any_framework_accepts_both(self):
        a = su.run_suite("flat-free", "section1-general", points=8, seed=1)
        b = su.run_suite("minkowski", "section1-general", points=8, seed=1)
        assert a.all_passed() and b.all_passed()

    def test_unknown_tolerance_override(self):
        with pytest.raises(ValueError):
            su.run_suite("flat-free", "galilei-core", points=4,
                         tol_overrides={"no-such-check": 1.0})

    def test_tolerance_override_causes_failure(self):
        rep = su.run_suite("flat-free", "galilei-brackets", points=6, seed=2,
                           tol_overrides={"bracket-jacobi": 1e-30})
        assert not rep.all_passed()
        failing = [r for r in rep.records if not r.passed]
        assert [r.name for r in failing] == ["bracket-jacobi"]

    def test_reports_are_byte_identical(self):
        a = su.run_suite("uniform-b", "galilei-core", points=10, seed=5)
        b = su.run_suite("uniform-b", "galilei-core", points=10, seed=5)
        assert emit_report(a, "json") == emit_report(b, "json")
        assert emit_report(a, "text") == emit_report(b, "text")

    def test_reports_depend_on_seed(self):
        a = su.run_suite("uniform-b", "galilei-brackets", points=8, seed=5)
        b = su.run_suite("uniform-b", "galilei-brackets", points=8, seed=6)
        assert emit_report(a, "json") != emit_report(b, "json")


class TestReport:
    def make(self):
        recs = [CheckRecord("alpha", "a = b", 1e-12, 1e-9),
                CheckRecord("beta", "c = d", 2e-3, 1e-8)]
        return SuiteReport("demo", "model-x", 3, 10, recs, wall_time=1.25)

    def test_pass_flag_matches_tolerance(self):
        rep = self.make()
        assert rep.records[0].passed and not rep.records[1].passed
        assert not rep.all_passed()

    def test_json_shape(self):
        doc = json.loads(emit_report(self.make(), "json"))
        assert doc["suite"] == "demo" and doc["model"] == "model-x"
        assert doc["seed"] == 3 and doc["points"] == 10
        assert [c["name"] for c in doc["checks"]] == ["alpha", "beta"]
        assert doc["checks"][1]["pass"] is False
        assert doc["all_pass"] is False
        assert "wall" not in emit_report(self.make(), "json").decode()

    def test_text_flags_failures(self):
        text = emit_report(self.make(), "text").decode()
        assert "[FAIL] beta" in text and "[pass] alpha" in text
        assert "result: FAIL (1/2 checks)" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(self.make(), "yaml")


class TestOrbit:
    def test_free_motion_is_straight(self):
        model = load_builtin("flat-free")
        res = integrate_orbit(model, "g", [0, -0.5, 0, 0], [0.6, 0, 0],
                              1.0, 1e-3)
        line = np.array([0, -0.5, 0, 0]) + np.outer(res.times,
                                                    [1, 0.6, 0, 0])
        assert np.max(np.abs(res.states[:, :4] - line)) < 1e-12
        assert res.max_law_residual < 1e-12

    def test_cyclotron_radius(self):
        model = load_builtin("uniform-b")
        period = np.pi  # 2 pi m / (q B) with B = 2
        res = integrate_orbit(model, "galilei", [0, 0, 0, 0], [0.5, 0, 0],
                              period, 1e-3)
        for i in (1, 2):
            spread = res.states[:, i].max() - res.states[:, i].min()
            assert abs(spread / 2.0 - 0.25) / 0.25 < 1e-5

    def test_hyperbolic_motion(self):
        model = load_builtin("uniform-e")
        res = integrate_orbit(model, "einstein", [0, 0, 0, 0], [0, 0, 0],
                              1.5, 1e-3)
        s = res.times
        assert np.max(np.abs(res.states[:, 0] - np.sinh(0.5 * s) / 0.5)) \
            < 1e-9
        assert np.max(np.abs(res.states[:, 1]
                             - (np.cosh(0.5 * s) - 1.0) / 0.5)) < 1e-9

    def test_box_exit(self):
        model = load_builtin("flat-free")
        with pytest.raises(BoxExit):
            integrate_orbit(model, "g", [0, 1.5, 0, 0], [1.0, 0, 0],
                            2.0, 1e-3)

    def test_lightcone_exit(self):
        model = load_builtin("uniform-e")
        with pytest.raises(LightconeViolation):
            integrate_orbit(model, "e", [0, 0, 0, 0], [1.2, 0, 0],
                            1.0, 1e-3)

    def test_framework_mismatch(self):
        model = load_builtin("uniform-e")
        with pytest.raises(ValueError):
            integrate_orbit(model, "g", [0, 0, 0, 0], [0, 0, 0], 1.0)


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "covphase.cli", *args],
                          capture_output=True, text=True, timeout=600)
    return proc


class TestCli:
    def test_verify_pass_exit_zero(self):
        proc = run_cli("verify", "--model", "flat-free",
                       "--suite", "galilei-brackets",
                       "--points", "8", "--seed", "1")
        assert proc.returncode == 0, proc.stderr
        assert "result: PASS" in proc.stdout

    def test_verify_failure_exit_one(self):
        proc = run_cli("verify", "--model", "flat-free",
                       "--suite", "galilei-core", "--points", "6",
                       "--tol", "lift-witness-not-projectable=1e-9")
        assert proc.returncode == 1
        assert "[FAIL]" in proc.stdout

    def test_verify_mismatch_exit_two(self):
        proc = run_cli("verify", "--model", "minkowski",
                       "--suite", "galilei-core")
        assert proc.returncode == 2
        assert "error" in proc.stderr

    def test_verify_bad_usage_exit_two(self):
        proc = run_cli("verify", "--suite", "galilei-core")
        assert proc.returncode == 2

    def test_verify_json_deterministic(self):
        args = ("verify", "--model", "uniform-b", "--suite", "galilei-core",
                "--points", "8", "--seed", "9", "--report", "json")
        a, b = run_cli(*args), run_cli(*args)
        assert a.returncode == 0 and a.stdout == b.stdout
        doc = json.loads(a.stdout)
        assert doc["all_pass"] is True

    def test_orbit_cli(self):
        proc = run_cli("orbit", "--model", "flat-free", "--framework", "g",
                       "--x0", "0", "0", "0", "0", "--v", "0.3", "0", "0",
                       "--duration", "1.0", "--step", "1e-3")
        assert proc.returncode == 0, proc.stderr
        assert "max law-of-motion residual" in proc.stdout

    def test_orbit_box_exit_one(self):
        proc = run_cli("orbit", "--model", "flat-free", "--framework", "g",
                       "--x0", "0", "1.5", "0", "0", "--v", "1", "0", "0",
                       "--duration", "3.0")
        assert proc.returncode == 1
        assert "orbit aborted" in proc.stderr

    def test_orbit_bad_initial_data_exit_two(self):
        proc = run_cli("orbit", "--model", "uniform-e", "--framework", "e",
                       "--x0", "0", "0", "0", "0", "--v", "2", "0", "0",
                       "--duration", "1.0")
        assert proc.returncode == 2
