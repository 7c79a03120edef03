"""The twenty functional cases and the mutation-detection demo."""

import time

from raypipe.datapath import DatapathConfig, FeatureSet, FuSharing
from raypipe.validation import ALL_CASES, BOX_CASES, TRIANGLE_CASES, run_validation


def test_case_counts():
    assert len(BOX_CASES) == 9
    assert len(TRIANGLE_CASES) == 11
    assert len(ALL_CASES) == 20


def test_all_twenty_pass_both_paths():
    results = run_validation()
    bad = [(r.case.name, r.detail) for r in results if not r.ok]
    assert not bad, bad
    assert all(r.golden_ok and r.pipeline_ok for r in results)


def test_coplanar_and_graze_cases_are_present():
    names = [c.name for c in ALL_CASES]
    expect_miss = [c for c in ALL_CASES if not c.expected_hit]
    assert len(expect_miss) >= 8
    assert any("along edge" in n for n in names)
    assert any("edge graze" in n for n in names)
    assert any("vertex graze" in n for n in names)


def test_extended_config_same_verdicts():
    results = run_validation(DatapathConfig(FeatureSet.EXTENDED, FuSharing.DISJOINT))
    assert all(r.ok for r in results)


def test_flipped_culling_is_caught():
    results = run_validation(flip_winding=True)
    by_name = {r.case.name: r for r in results}
    assert not by_name["tri-1 back face"].ok
    # box cases don't involve culling and stay green
    assert all(r.ok for r in results if r.case.kind == "box")


def test_suite_runs_fast():
    t0 = time.perf_counter()
    run_validation()
    assert time.perf_counter() - t0 < 1.0
