"""Tests for norms, energies and the Lipschitz diagnostic."""

import numpy as np
import pytest

from arteria.diagnostics import (
    INV_LIP_SENTINEL,
    DiagnosticsError,
    DiagnosticsTracker,
    accumulate_integral,
    energies,
    fit_decay_rate,
    lipschitz_diag,
    mean_drift,
    nonincreasing,
    slowest_linear_rate,
    sobolev_norm,
    termination_summary,
)
from arteria.grid import SpectralField, make_grid, to_spectral, zeros
from arteria.model import NonFiniteStateError
from arteria.multipliers import build_table
from arteria.oracle import real_rate_closed_form
from arteria.types import DiagnosticsRow, ModelParams


def row(t, inv_lip=1.0, integral=0.0, mean=0.0):
    return DiagnosticsRow(
        t=t, mean=mean, l2=1.0, hs_energy=1.0, lip=1.0 / inv_lip, inv_lip=inv_lip,
        cum_integral=integral, e1=1.0, e2=1.0, d1=1.0, d2=1.0,
    )


def test_lipschitz_of_sech_squared():
    grid = make_grid(1024)
    x = grid.nodes
    f = to_spectral(1.0 / np.cosh(x - np.pi) ** 2, grid)
    lip, inv_lip = lipschitz_diag(f)
    # max |d/dx sech²| = 4 / (3√3)
    assert lip == pytest.approx(4 / (3 * np.sqrt(3)), rel=1e-3)
    assert inv_lip == pytest.approx(1 / lip)


def test_lipschitz_of_zero_field_uses_sentinel():
    assert lipschitz_diag(zeros(make_grid(16))) == (0.0, INV_LIP_SENTINEL)


def test_lipschitz_rejects_non_finite_fields():
    grid = make_grid(16)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[2] = np.inf
    with pytest.raises(NonFiniteStateError):
        lipschitz_diag(SpectralField(grid, coeffs))


def test_trapezoid_integral():
    assert accumulate_integral(1.0, 2.0, 0.0, 4.0, 0.5) == pytest.approx(2.5)
    with pytest.raises(DiagnosticsError) as exc:
        accumulate_integral(0.0, 1.0, 1.0, 1.0, 0.5)
    assert exc.value.code == "diagnostics.time_order"


def test_energies_of_a_single_mode():
    params = ModelParams(kappa=2.0)
    grid = make_grid(32)
    table = build_table(params, grid, sobolev_index=1.0)
    f = to_spectral(np.cos(2 * grid.nodes), grid)
    terms = energies(f, table, params)
    # ∫cos²(2x) = π; each derivative multiplies the energy by 4
    assert terms.l2 == pytest.approx(np.sqrt(np.pi))
    assert terms.hs_energy == pytest.approx(np.pi + 4 * np.pi)
    assert terms.d1 == pytest.approx(4 * np.pi)
    assert terms.d2 == pytest.approx(16 * np.pi)
    assert terms.e1 == pytest.approx(np.pi + 1.0 * 4 * np.pi)
    assert terms.e2 == pytest.approx(4 * np.pi + 1.0 * 16 * np.pi)


def test_sobolev_norm_is_inhomogeneous():
    grid = make_grid(32)
    f = to_spectral(np.cos(3 * grid.nodes), grid)
    assert sobolev_norm(f, 0.0) == pytest.approx(np.sqrt(np.pi))
    assert sobolev_norm(f, 1.0) == pytest.approx(np.sqrt(10 * np.pi))


def test_tracker_integrates_every_step_but_records_samples():
    params = ModelParams()
    grid = make_grid(32)
    tracker = DiagnosticsTracker(build_table(params, grid), params)
    f = to_spectral(np.sin(grid.nodes), grid)
    tracker(0.0, f.coeffs, True)
    tracker(0.25, f.coeffs, False)
    tracker(0.5, f.coeffs, True)
    assert [r.t for r in tracker.rows] == [0.0, 0.5]
    assert tracker.rows[-1].cum_integral == pytest.approx(0.5)
    tracker.finish(0.5, f.coeffs)
    assert len(tracker.rows) == 2
    tracker.finish(0.7, f.coeffs)
    assert tracker.rows[-1].t == 0.7


def test_termination_summary_flags_growing_lip():
    rows = []
    integral = 0.0
    for i in range(10):
        t = 0.1 * i
        lip = 1.0 / (1.05 - t)
        integral += 0.1 * lip
        rows.append(row(t, inv_lip=1.0 / lip, integral=integral))
    summary = termination_summary(rows)
    assert summary.window == 2
    assert summary.inv_lip_decreasing
    assert not summary.integral_accelerating

    summary = termination_summary(rows, window=0.5)
    assert summary.window == 5
    assert summary.integral_accelerating
    assert summary.last_time == pytest.approx(0.9)


def test_termination_summary_of_a_calm_run():
    rows = [row(0.1 * i, inv_lip=1.0 + 0.1 * i, integral=0.1 * i) for i in range(20)]
    summary = termination_summary(rows)
    assert not summary.inv_lip_decreasing
    assert not summary.integral_accelerating
    with pytest.raises(DiagnosticsError):
        termination_summary([])


def test_mean_drift_and_monotonicity():
    rows = [row(0.0, mean=1e-3), row(1.0, mean=1e-3 + 2e-12), row(2.0, mean=1e-3 - 1e-12)]
    assert mean_drift(rows) == pytest.approx(2e-12)
    assert nonincreasing(np.array([3.0, 2.0, 2.0, 1.0]))
    assert not nonincreasing(np.array([1.0, 1.1]))
    assert nonincreasing(np.array([1.0, 1.1]), slack=0.2)


def test_fit_decay_rate_recovers_exponential():
    t = np.linspace(0.0, 4.0, 41)
    assert fit_decay_rate(t, 3.0 * np.exp(-0.7 * t)) == pytest.approx(-0.7)
    with pytest.raises(DiagnosticsError):
        fit_decay_rate(t, -np.ones_like(t))


def test_slowest_linear_rate_is_the_first_mode():
    params = ModelParams(nu=0.0, beta=1.0)
    rate = slowest_linear_rate(params, make_grid(64))
    assert rate == pytest.approx(real_rate_closed_form(params, 1.0))
    assert rate < 0
