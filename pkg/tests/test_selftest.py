"""Tests for the selftest release gate."""

from dataclasses import replace

import numpy as np
import pytest

from arteria.selftest import random_band_limited, run_selftest


@pytest.fixture(scope="module")
def report():
    return run_selftest(n=32)


def test_selftest_passes(report):
    assert report.passed, report.render()
    names = [check.name for check in report.checks]
    assert names == [
        "helmholtz_identity",
        "s_symbol_modulus",
        "linear_rate_forms",
        "convolution_oracle",
        "nyquist_decay",
        "linear_oracle",
        "mean_conservation",
        "bbm_decay",
    ]
    assert report.render().splitlines()[-1] == "selftest passed"


def test_corrupted_multiplier_fails_the_helmholtz_check():
    def corrupt(table):
        return replace(table, p=table.p * 1.001)

    report = run_selftest(n=32, table_hook=corrupt)
    assert not report.passed
    assert report.failures == ["helmholtz_identity"]
    assert "FAILED: helmholtz_identity" in report.render()


def test_elastic_parameters_skip_the_helmholtz_check():
    report = run_selftest(nu=0.0, n=32)
    assert report.checks[0].status == "skip"
    assert report.passed


def test_report_serializes(report):
    data = report.to_dict()
    assert data["passed"] is True
    assert data["failures"] == []
    assert {check["status"] for check in data["checks"]} == {"pass"}


def test_random_band_limited_fields():
    f = random_band_limited(32, 5, np.random.default_rng(0))
    assert f.coeffs[0] == 0
    assert np.all(f.coeffs[6:] == 0)
    assert np.all(f.coeffs[1:6] != 0)
