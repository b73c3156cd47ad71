"""Run every gating criterion and pin its expected outcome.

All criteria are expected green except c03, which is red on purpose.  Its
dominance clause asks the positive-part James-Stein rule never to lose to
the tuned shrinkage fit, but at a zero mean both losses are functions of
W = ||Y||^2 alone and compare pointwise as

    (W - (n-2))_+^2 / W  >=  (W - n)_+^2 / W,

so the tuned rule, which shrinks by the larger constant n, wins at every
single sample point.  The measured gap sits around +57 standard errors;
no replication budget or tolerance can flip a pointwise inequality, so the
criterion is recorded as failing rather than weakened until it passes.
"""

import pytest

from suretune.acceptance import CRITERIA, run_all

EXPECTED = {
    "c01": True,   # SURE unbiased for prediction error at fixed tuning
    "c02": True,   # analytic shrinkage edf matches Monte Carlo
    "c03": False,  # see module docstring: pointwise-impossible at the null
    "c04": True,   # tuned risk within oracle + 4 sigma^2
    "c05": True,   # two-model Cp edf matches the exact formula
    "c06": True,   # nested-chain edf under the sharpened null bound
    "c07": True,   # chi-square max bound dominates simulation
    "c08": True,   # soft threshold: jumps nonnegative, df lower bound
    "c09": True,   # implicit-diff edf agrees with unbiased statistic
    "c10": True,   # ridge rotation reproduces direct solves
    "c11": True,   # bootstrap edf centered and corrected error calibrated
    "c12": True,   # gas-stations rotation existence and uniqueness
    "c13": True,   # surface-area Monte Carlo matches closed forms
    "c14": True,   # best-subset constant and penalty curve
    "c15": True,   # simulation presets wired and byte-stable
}


def _cid(fn):
    return fn.__name__.split("_")[0]


def test_expectations_cover_the_battery():
    assert {_cid(fn) for fn in CRITERIA} == set(EXPECTED)


@pytest.mark.parametrize("criterion", CRITERIA, ids=_cid)
def test_criterion(criterion):
    res = criterion()
    tag = "PASS" if res.passed else "FAIL"
    print(f"[{tag}] {res.cid} {res.description}: {res.detail}")
    assert res.passed == EXPECTED[res.cid], f"{res.cid}: {res.detail}"


def test_c03_fails_for_the_documented_reason():
    res = next(fn for fn in CRITERIA if _cid(fn) == "c03")()
    assert not res.passed
    # the null cell shows a decisively positive James-Stein excess
    null_note = next(part for part in res.detail.split(";") if "null" in part)
    z = float(null_note.split("z=")[1])
    assert z > 10.0
    # the prediction-error clause itself holds in every cell
    assert res.detail.count("Err=") == 3


def test_run_all_filter_returns_single_result():
    results = run_all(only="c12")
    assert len(results) == 1
    assert results[0].cid == "c12"
    assert results[0].passed
