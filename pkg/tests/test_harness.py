"""Tests for instance generation, suite orchestration, and report emission."""
import dataclasses
import json
from fractions import Fraction

import pytest

from dualpiped.bodies import pseudo_compound
from dualpiped.harness import (
    TrialConfig,
    aggregate_outcomes,
    emit_report,
    evaluate_trial,
    gen_instance,
    run_suite,
)
from dualpiped.minima import first_minimum
from dualpiped.scalars import Quad3
from dualpiped.transference import check_claims


def test_trial_config_validation():
    TrialConfig(dimension=3, trials=2, seed=0)
    with pytest.raises(ValueError):
        TrialConfig(dimension=1, trials=2, seed=0)
    with pytest.raises(ValueError):
        TrialConfig(dimension=3, trials=-1, seed=0)
    with pytest.raises(ValueError):
        TrialConfig(dimension=3, trials=2, seed=0, mode="decimal")
    with pytest.raises(ValueError):
        TrialConfig(dimension=4, trials=2, seed=0, mode="exact")
    with pytest.raises(ValueError):
        TrialConfig(dimension=3, trials=2, seed=0, claims=("T3", "XX"))
    with pytest.raises(ValueError):
        TrialConfig(dimension=3, trials=2, seed=0, tau_samples=0)


def test_gen_instance_cube_and_errors():
    cube = gen_instance(4, 0, "cube")
    assert cube.kind == "float"
    assert cube.bounds == (1.0,) * 4
    exact_cube = gen_instance(3, 0, "cube", mode="exact")
    assert exact_cube.kind == "rational"
    with pytest.raises(ValueError):
        gen_instance(1, 0, "random")
    with pytest.raises(ValueError):
        gen_instance(3, 0, "hexagonal")
    with pytest.raises(ValueError):
        gen_instance(4, 0, "named-witness")


def test_gen_instance_named_witness():
    first = gen_instance(3, 0, "named-witness", mode="exact")
    second = gen_instance(3, 1, "named-witness", mode="exact")
    assert first.kind == "quad3"
    assert second.kind == "rational"
    assert first_minimum(second)[0] == 1
    value, _ = first_minimum(first)
    assert value == Quad3(0, Fraction(2, 3))
    floated = gen_instance(3, 1, "named-witness")
    assert floated.kind == "float"


def test_gen_instance_seed42_calibration():
    inst = gen_instance(3, 42, "random")
    value, _ = first_minimum(pseudo_compound(inst))
    assert abs(value - 1.0) <= 1e-9


def test_gen_instance_calibration_sweep():
    checked = 0
    for d in (3, 4, 5):
        for seed in range(34 if d == 3 else 33):
            inst = gen_instance(d, 1000 * d + seed, "random")
            value, _ = first_minimum(pseudo_compound(inst))
            assert abs(value - 1.0) <= 1e-9
            checked += 1
    assert checked == 100


def test_gen_instance_exact_mode_calibration():
    for seed in range(5):
        inst = gen_instance(3, seed, "random", mode="exact")
        assert inst.kind == "rational"
        value, _ = first_minimum(pseudo_compound(inst))
        assert value <= 1
        assert abs(float(value) - 1.0) <= 1e-9


def test_run_suite_zero_violations_and_determinism():
    config = TrialConfig(dimension=3, trials=10, seed=7)
    report = run_suite(config)
    assert report.config == config
    assert len(report.claims) == len(config.claims)
    for summary in report.claims:
        assert summary.instances == 10
        assert summary.passes + summary.skips + summary.violations == 10
        assert summary.violations == 0
    lo, hi = report.v_tau_range
    assert 1.0 - 1e-12 <= lo <= hi <= 2**0.5 + 1e-12
    assert report.runtime_ms >= 0

    again = run_suite(config)
    flat = dataclasses.replace(report, runtime_ms=0.0)
    flat_again = dataclasses.replace(again, runtime_ms=0.0)
    assert emit_report(flat, "json") == emit_report(flat_again, "json")


def test_run_suite_empty():
    config = TrialConfig(dimension=3, trials=0, seed=1)
    report = run_suite(config)
    assert report.v_tau_range is None
    for summary in report.claims:
        assert summary.instances == 0
        assert summary.worst_margin is None
        assert summary.extremal_instance is None
    document = emit_report(dataclasses.replace(report, runtime_ms=0.0), "json")
    parsed = json.loads(document)
    assert parsed["config"]["trials"] == 0
    assert parsed["claims"]


def test_aggregation_is_order_insensitive():
    config = TrialConfig(dimension=3, trials=6, seed=13, claims=("T3", "T4", "FAM"))
    outcomes = [evaluate_trial(config, t) for t in range(config.trials)]
    forward = aggregate_outcomes(config, outcomes, runtime_ms=0.0)
    backward = aggregate_outcomes(config, list(reversed(outcomes)), runtime_ms=0.0)
    assert forward == backward


def test_t7_skips_on_second_witness_form():
    piped = gen_instance(3, 1, "named-witness", mode="exact")
    (report,) = check_claims(piped, ("T7",))
    assert report.status == "skip"
    assert report.hypothesis is False


def test_emit_report_formats():
    config = TrialConfig(dimension=3, trials=3, seed=5, claims=("T3", "MK2"))
    report = dataclasses.replace(run_suite(config), runtime_ms=0.0)

    document = emit_report(report, "json")
    parsed = json.loads(document)
    assert sorted(parsed.keys()) == [
        "claims", "config", "runtime_ms", "v_tau_range", "version",
    ]
    assert json.dumps(parsed, sort_keys=True, indent=2) == document
    assert [row["claim"] for row in parsed["claims"]] == ["T3", "MK2"]

    csv_doc = emit_report(report, "csv")
    lines = csv_doc.strip().splitlines()
    assert lines[0] == (
        "claim,instances,passes,skips,violations,worst_margin,extremal_instance"
    )
    assert len(lines) == 3

    text_doc = emit_report(report, "text")
    assert "T3" in text_doc and "MK2" in text_doc

    with pytest.raises(ValueError):
        emit_report(report, "xml")
