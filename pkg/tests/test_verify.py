import numpy as np
import pytest

from mixedfs.errors import BadFamily, SizeLimit
from mixedfs.formats import dumps
from mixedfs.states import random_ginibre_family
from mixedfs.verify import (
    CHANNEL_CLASSES,
    PROFILES,
    SUITES,
    SuiteResult,
    UnknownSuite,
    cramer_rao_cases,
    dilated_kraus,
    evolution_paths,
    parse_metric_kind,
    profile,
    report,
    run_suites,
    suite_cramer_rao,
    suite_dynamical_phase,
    suite_experiment,
    suite_gauge_invariance,
    suite_monotonicity_metric,
    suite_trace_identities,
)

from conftest import SX, random_hermitian_np, random_unitary


class TestSuiteResult:
    def test_round_trip(self):
        r = SuiteResult("x", 3, 1, 0.5, [{"a": 1.0}], 7, 1.25, True, 1, {"k": [1.0, 2.0]})
        back = SuiteResult.from_json(r.to_json(timing=True))
        assert back == r and back.passed

    def test_timing_omitted_by_default(self):
        r = SuiteResult("x", 1, 0, 0.0, [], 0, 9.9)
        d = r.to_dict()
        assert "wall_time" not in d and d["passed"] is True
        assert SuiteResult.from_dict(d).wall_time == 0.0

    def test_passed_rules(self):
        assert not SuiteResult("x", 5, 1, 1.0, [], 0).passed
        assert SuiteResult("x", 5, 1, 1.0, [], 0, allowed_failures=1).passed
        assert SuiteResult("x", 5, 5, 1.0, [], 0, assertion=False).passed


class TestRegistry:
    def test_unknown_suite(self):
        with pytest.raises(UnknownSuite):
            run_suites(["nope"])

    def test_unknown_profile(self):
        with pytest.raises(ValueError):
            profile("lenient")

    def test_profiles_share_keys(self):
        assert set(PROFILES["default"]) == set(PROFILES["strict"])
        assert all(PROFILES["strict"][k] <= PROFILES["default"][k] for k in PROFILES["default"])

    def test_all_expands_in_order(self):
        names = [r.name for r in run_suites(["all"], seed=1, samples=2)]
        assert names[0] == "gauge" and names[-1] == "experiment"
        assert len(names) == len(SUITES) + 2  # three monotonicity kinds

    def test_duplicates_run_once(self):
        assert len(run_suites(["trace", "trace"], samples=2)) == 1

    def test_report_deterministic(self):
        a = dumps(report(run_suites(["gauge", "phase", "means"], seed=5, samples=3), 5))
        b = dumps(report(run_suites(["gauge", "phase", "means"], seed=5, samples=3), 5))
        assert a == b
        assert "wall_time" not in a

    def test_seed_changes_results(self):
        a = run_suites(["gauge"], seed=1, samples=3)[0].diagnostics
        b = run_suites(["gauge"], seed=2, samples=3)[0].diagnostics
        assert a != b

    @pytest.mark.parametrize("prof", ["default", "strict"])
    def test_small_run_passes(self, prof):
        res = run_suites(["gauge", "reduction", "trace", "generators"], seed=0, tolerance_profile=prof, samples=5)
        assert all(r.passed for r in res)


class TestSuites:
    def test_gauge_counts(self):
        r = suite_gauge_invariance({2: 4, 3: 2}, seed=0)
        assert r.cases == 6 and r.failures == 0
        assert r.summary["identity_gauge_worst"] <= 1e-12

    def test_gauge_tolerance_triggers(self):
        assert suite_gauge_invariance(3, seed=0, tol=-1.0).failures == 3

    def test_parse_metric_kind(self):
        assert parse_metric_kind("fs")[0] == "fs"
        assert parse_metric_kind("alpha:2")[2] is False
        assert parse_metric_kind("petz:harmonic")[2] is True
        for bad in ("alpha:x", "petz:nope", "bogus"):
            with pytest.raises(ValueError):
                parse_metric_kind(bad)

    def test_monotonicity_table(self):
        r = suite_monotonicity_metric("petz:arithmetic", samples=12, seed=2)
        assert r.assertion and r.failures == 0
        assert set(r.summary["table"]) == set(CHANNEL_CLASSES)
        assert sum(row["trials"] for row in r.summary["table"].values()) == 12

    def test_monotonicity_report_only(self):
        assert not suite_monotonicity_metric("fs", samples=4).assertion

    def test_cramer_rao_rows(self):
        cases = {label: (fam, th, b) for label, fam, th, b in cramer_rao_cases()}
        fam, th, b = cases["commuting"]
        r = suite_cramer_rao(fam, th, b, label="commuting")
        assert r.failures == 0
        for row in r.diagnostics:
            # diagonal basis is optimal for a commuting family; the metric is a quarter of it
            assert row["f_cl"] == pytest.approx(row["f_sld"], rel=1e-12)
            assert row["gamma"] == pytest.approx(row["f_cl"] / 4, rel=1e-12)
            assert row["gamma_vs_cl"] == "exceeds"
        const = suite_cramer_rao(*cases["constant"], label="constant")
        assert all(r["bound_gamma"] == np.inf and r["gamma_vs_cl"] == "equal" for r in const.diagnostics)

    def test_cramer_rao_needs_one_parameter(self):
        with pytest.raises(BadFamily):
            suite_cramer_rao(random_ginibre_family(2, 2, 0), [0.0], np.eye(2))

    def test_phase_example(self):
        r = suite_dynamical_phase(samples=5, seed=0)
        ex = r.summary["commuting_example"]
        assert ex["im"] == pytest.approx(-0.5, abs=1e-12)
        assert r.summary["constant_family_phase"] == 0.0

    def test_trace_limits(self):
        with pytest.raises(SizeLimit):
            suite_trace_identities(samples=1, alpha_max=6, dims=(16,))
        with pytest.raises(ValueError):
            suite_trace_identities(samples=1, alpha_max=7)

    def test_experiment_fraction(self):
        r = suite_experiment(samples=6, shots=20_000, seed=0)
        assert r.summary["required_within"] <= 6
        assert r.passed


class TestEvolutionPaths:
    def test_dilated_kraus_is_isometry(self, rng):
        h_ab = random_hermitian_np(rng, 6)
        nu = random_unitary(rng, 3)[:, 0]
        ops, dots = dilated_kraus(h_ab, nu, 2)
        assert np.abs(sum(a.conj().T @ a for a in ops) - np.eye(2)).max() <= 1e-12
        assert len(ops) == len(dots) == 3

    def test_paths_agree_on_product_generator(self):
        rho = np.diag([0.75, 0.25])
        paths = evolution_paths(rho, SX, np.array([1.0, 0.0]))
        values = np.array(list(paths.values()))
        assert np.ptp(values) <= 1e-12
        assert values[0] == pytest.approx(2 - np.sqrt(3), abs=1e-12)
