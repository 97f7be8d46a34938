"""Tests for the property suite runner, reports and instance generation."""

import json

import numpy as np
import pytest

from nnormlab import (
    ConfigError,
    InstanceSpec,
    SuiteConfig,
    curry,
    generate_instance,
    is_antisymmetric,
    property_ids,
    run_suite,
    space,
    uncurry,
    write_report_atomic,
)

FAST = SuiteConfig(seed=3, trials_per_property=10, dims=(2, 3), orders=(1, 2),
                   exponents=(1.0, 2.0))


def _strip_wall_time(report):
    data = report.to_dict()
    data.pop("wall_time_ms")
    return json.dumps(data, sort_keys=True)


def test_suite_config_defaults_valid():
    cfg = SuiteConfig()
    assert (2, 3) not in cfg.pairs()
    assert (3, 3) in cfg.pairs()


def test_suite_config_rejects_impossible_order():
    with pytest.raises(ConfigError):
        SuiteConfig(orders=(4,), dims=(3,))


def test_suite_config_rejects_unknown_tolerance():
    with pytest.raises(ConfigError):
        SuiteConfig(tolerances={"no.such.prop": 1.0})


def test_suite_config_rejects_empty():
    with pytest.raises(ConfigError):
        SuiteConfig(dims=())


def test_suite_config_trials_scaling():
    cfg = SuiteConfig(trials_per_property=100)
    assert cfg.trials_for("sip.g_properties") == 250
    assert cfg.trials_for("fnorm.norm_sandwich") == 15
    assert cfg.trials_for("fnorm.divergence_witness") == 1


def test_run_suite_fast_config_passes():
    report = run_suite(FAST)
    assert report.all_passed
    assert {p.property_id for p in report.properties} == set(property_ids())
    for prop in report.properties:
        assert prop.passes == prop.trials
        assert prop.counterexample is None


def test_run_suite_deterministic():
    a = run_suite(FAST)
    b = run_suite(FAST)
    assert _strip_wall_time(a) == _strip_wall_time(b)


def test_run_suite_parallel_flag_does_not_change_results():
    serial = run_suite(FAST)
    cfg = SuiteConfig(seed=3, trials_per_property=10, dims=(2, 3), orders=(1, 2),
                      exponents=(1.0, 2.0), parallel=True)
    concurrent = run_suite(cfg)
    a = _strip_wall_time(serial).replace('"parallel": false', '"parallel": true')
    assert a == _strip_wall_time(concurrent)


def test_run_suite_only_filter():
    report = run_suite(FAST, only=["fnorm.desk_values"])
    assert [p.property_id for p in report.properties] == ["fnorm.desk_values"]


def test_run_suite_only_unknown():
    with pytest.raises(ConfigError):
        run_suite(FAST, only=["bogus.prop"])


def test_run_suite_mutation_fails_with_counterexample():
    report = run_suite(FAST, only=["axioms.lp.degeneracy"],
                       mutate="axioms.lp.degeneracy")
    assert not report.all_passed
    prop = report.properties[0]
    assert prop.passes < prop.trials
    ce = prop.counterexample
    assert ce is not None
    assert "dependent_tuple" in ce["instance"]
    assert ce["violation"] > 1e-9
    # the re-run command reproduces the full grid configuration, mutation
    # included, so the failure really is one command away
    assert ce["rerun"] == ("nnormlab verify --seed 3 --trials 10 --dims 2,3 "
                           "--orders 1,2 --p 1,2 --only axioms.lp.degeneracy "
                           "--mutate axioms.lp.degeneracy")


def test_rerun_command_reproduces_failure_end_to_end():
    from nnormlab.cli import cli_main
    report = run_suite(FAST, only=["axioms.lp.degeneracy"],
                       mutate="axioms.lp.degeneracy")
    rerun = report.properties[0].counterexample["rerun"]
    argv = rerun.split()[1:]
    assert cli_main(argv) == 1


def test_run_suite_counterexample_iff_failure():
    good = run_suite(FAST, only=["axioms.lp.degeneracy"])
    assert good.properties[0].counterexample is None
    bad = run_suite(FAST, only=["axioms.lp.degeneracy"],
                    mutate="axioms.lp.degeneracy")
    assert bad.properties[0].counterexample is not None


def test_run_suite_mutation_unknown():
    with pytest.raises(ConfigError):
        run_suite(FAST, mutate="fnorm.desk_values")


def test_report_json_schema(tmp_path):
    report = run_suite(FAST, only=["fnorm.desk_values", "fnorm.divergence_witness"])
    path = tmp_path / "report.json"
    write_report_atomic(report, str(path))
    data = json.loads(path.read_text())
    assert set(data) == {"config", "properties", "wall_time_ms"}
    assert set(data["config"]) == {"seed", "trials_per_property", "dims", "orders",
                                   "exponents", "tolerances", "parallel"}
    for prop in data["properties"]:
        assert set(prop) == {"property_id", "statement", "trials", "passes",
                             "worst_violation", "counterexample"}
        assert (prop["counterexample"] is not None) == (prop["passes"] < prop["trials"])


def test_generate_instance_tuple_deterministic():
    spec = InstanceSpec(space(3, 2), 2)
    a = generate_instance("tuple", spec, 1)
    b = generate_instance("tuple", spec, 1)
    assert all(x == y for x, y in zip(a, b))
    assert len(a) == 2
    assert a[0].space.d == 3


def test_generate_instance_antisymmetric():
    spec = InstanceSpec(space(3, 2), 3)
    f = generate_instance("antisymmetric_tensor", spec, 2)
    assert is_antisymmetric(f)
    assert float(np.sqrt((f.coeffs ** 2).sum())) >= 1e-6


def test_generate_instance_operator_round_trip():
    spec = InstanceSpec(space(3, 2), 2)
    u = generate_instance("operator", spec, 3)
    assert np.array_equal(curry(uncurry(u)).inner.coeffs, u.inner.coeffs)


def test_generate_instance_unknown_kind():
    with pytest.raises(ConfigError):
        generate_instance("matrix", InstanceSpec(space(2, 2), 2), 0)


def test_soft_property_excluded_from_verdict():
    from nnormlab.verify import PropertyResult, VerificationReport
    soft_fail = PropertyResult("gahler.orth_invariance_general_p", "advisory",
                               10, 9, 1.0, {"trial": 0})
    hard_pass = PropertyResult("fnorm.desk_values", "desk", 3, 3, 0.0, None)
    report = VerificationReport({}, (soft_fail, hard_pass), 0.0)
    assert report.all_passed
    hard_fail = PropertyResult("fnorm.desk_values", "desk", 3, 2, 1.0, {"trial": 1})
    assert not VerificationReport({}, (soft_fail, hard_fail), 0.0).all_passed


def test_general_p_invariance_soft_suite():
    cfg = SuiteConfig(seed=5, trials_per_property=20, dims=(3, 4), orders=(2,),
                      exponents=(1.5, 3.0))
    report = run_suite(cfg, only=["gahler.orth_invariance_general_p"])
    prop = report.properties[0]
    assert prop.trials > 0
    assert prop.worst_violation <= 1e-4


def test_tolerance_override_applies():
    cfg = SuiteConfig(seed=3, trials_per_property=5, dims=(2,), orders=(1,),
                      exponents=(2.0,),
                      tolerances={"axioms.lp.degeneracy": 1e-30})
    report = run_suite(cfg, only=["axioms.lp.degeneracy"])
    assert report.config["tolerances"]["axioms.lp.degeneracy"] == 1e-30
