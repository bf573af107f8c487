"""The executable lemma suite: every block passes on the stock battery."""

import pytest

from jetsolve import run_lemma_suite


@pytest.fixture(scope="module")
def suite():
    return run_lemma_suite(n=2, R=1.0, res=13, alpha=0.5, seed=0)


def test_suite_passes(suite):
    assert suite["all_passed"] is True


def test_battery_is_large_enough(suite):
    assert suite["battery_size"] >= 20


def test_every_block_reports_zero_violations(suite):
    names = set()
    for block in suite["lemmas"]:
        names.add(block["name"])
        assert block["passed"] is True, block["name"]
        assert block.get("violations", []) == [], block["name"]
    assert {"taylor_remainder", "banach_algebra", "norm_comparison"} <= names


def test_blocks_carry_worst_case_diagnostics(suite):
    for block in suite["lemmas"]:
        if "worst_ratio" in block:
            assert block["worst_ratio"] <= 1.0 + 1e-9


def test_suite_3d_smoke():
    suite = run_lemma_suite(n=3, R=0.5, res=9, alpha=0.5, seed=0)
    assert suite["all_passed"] is True
