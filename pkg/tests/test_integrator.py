"""Tests for the adaptive Dormand-Prince integrator."""

import numpy as np
import pytest

from arteria.experiments import build_initial_data
from arteria.grid import SpectralField, make_grid
from arteria.integrator import (
    dormand_prince_step,
    error_norm,
    estimate_initial_step,
    fixed_step_integrate,
    integrate,
)
from arteria.model import make_rhs
from arteria.multipliers import build_table
from arteria.types import ModelParams, RhsVariant, SolverConfig


def decay(y):
    return -y


def test_exponential_decay_to_tolerance():
    config = SolverConfig(t_final=1.0, rtol=1e-10, atol=1e-12)
    final, stop = integrate(decay, np.array([1.0, 2.0]), config)
    assert stop.completed
    assert stop.t_stop == 1.0
    np.testing.assert_allclose(final, np.exp(-1.0) * np.array([1.0, 2.0]), rtol=1e-9)


def test_tighter_tolerance_gives_smaller_error():
    rate = -1.0 + 3.0j
    y0 = np.array([1.0 + 0.0j])
    errors = []
    for tol in (1e-5, 1e-8, 1e-11):
        config = SolverConfig(t_final=2.0, rtol=tol, atol=tol, sample_dt=2.0)
        final, _ = integrate(lambda y: rate * y, y0, config)
        errors.append(abs(final[0] - np.exp(2.0 * rate)))
    assert errors[0] > errors[1] > errors[2]


def test_fixed_step_convergence_order():
    rate = -1.0 + 2.0j
    y0 = np.array([1.0 + 0.0j])
    exact = np.exp(rate)
    coarse = abs(fixed_step_integrate(lambda y: rate * y, y0, 1 / 20, 20)[0] - exact)
    fine = abs(fixed_step_integrate(lambda y: rate * y, y0, 1 / 40, 40)[0] - exact)
    assert np.log2(coarse / fine) >= 4.5


def test_first_same_as_last_stage():
    y = np.array([0.5, -0.25])
    step = dormand_prince_step(decay, y, 0.1)
    np.testing.assert_allclose(step.k_last, decay(step.y_new))


def test_observer_sees_every_sampling_instant():
    config = SolverConfig(t_final=1.0, sample_dt=0.1)
    seen = []

    def observer(t, y, sample):
        seen.append((t, sample))

    integrate(decay, np.array([1.0]), config, observer)
    sampled = [t for t, sample in seen if sample]
    np.testing.assert_array_equal(sampled, config.sample_times())
    times = [t for t, _ in seen]
    assert times == sorted(times)


def test_spectral_field_in_spectral_field_out():
    grid = make_grid(16)
    f0 = build_initial_data(0.1, grid)
    params = ModelParams()
    rhs = make_rhs(RhsVariant.general(), params, build_table(params, grid))
    final, stop = integrate(rhs, f0, SolverConfig(t_final=0.1))
    assert isinstance(final, SpectralField)
    assert stop.completed


def test_matches_reference_runge_kutta():
    solve_ivp = pytest.importorskip("scipy.integrate").solve_ivp
    grid = make_grid(16)
    params = ModelParams(nu=0.5)
    rhs = make_rhs(RhsVariant.general(), params, build_table(params, grid))
    f0 = build_initial_data(0.5, grid)
    final, stop = integrate(rhs, f0, SolverConfig(t_final=1.0, rtol=1e-11, atol=1e-13))
    reference = solve_ivp(
        lambda t, y: rhs(y), (0.0, 1.0), f0.coeffs, method="RK45", rtol=1e-11, atol=1e-13
    )
    assert stop.completed and reference.success
    np.testing.assert_allclose(final.coeffs, reference.y[:, -1], atol=1e-8)


def test_step_budget_stops_the_run():
    _, stop = integrate(decay, np.array([1.0]), SolverConfig(t_final=10.0, max_steps=3))
    assert stop.tag == "step_budget"
    assert 0.0 < stop.t_stop < 10.0


def test_blow_up_ends_with_underflow_or_non_finite():
    final, stop = integrate(lambda y: y**2, np.array([1.0]), SolverConfig(t_final=2.0))
    assert stop.tag in ("step_underflow", "non_finite")
    assert stop.t_stop == pytest.approx(1.0, abs=1e-3)
    assert np.all(np.isfinite(final))


def test_raising_rhs_stops_immediately():
    def broken(y):
        raise FloatingPointError("overflow")

    final, stop = integrate(broken, np.array([1.0]), SolverConfig(t_final=1.0))
    assert stop.tag == "non_finite"
    assert stop.t_stop == 0.0
    np.testing.assert_array_equal(final, [1.0])


def test_initial_step_estimate():
    config = SolverConfig(t_final=5.0)
    estimate = estimate_initial_step(decay, np.array([1.0]), config)
    assert config.effective_dt_min <= estimate.dt <= 5.0
    assert not estimate.degraded
    assert estimate_initial_step(lambda y: 0 * y, np.array([1.0]), config).dt == 5.0
    degraded = estimate_initial_step(lambda y: y * np.nan, np.array([1.0]), config)
    assert degraded.degraded
    assert degraded.dt == config.effective_dt_min


def test_initial_step_shrinks_for_high_frequency_data():
    grid = make_grid(64)
    k = grid.wavenumbers

    def heat(y):
        return -(k**2) * y

    config = SolverConfig(t_final=10.0)
    smooth = np.zeros(grid.n_modes, dtype=complex)
    smooth[1] = 0.5
    stiff = np.zeros(grid.n_modes, dtype=complex)
    stiff[20] = 0.5
    dt_smooth = estimate_initial_step(heat, smooth, config).dt
    dt_stiff = estimate_initial_step(heat, stiff, config).dt
    assert config.effective_dt_min < dt_stiff < dt_smooth


def test_error_norm_counts_real_and_imaginary_parts():
    y = np.zeros(2, dtype=complex)
    error = np.array([1e-8 + 1e-8j, 0.0])
    # four components, two of them at one tolerance unit
    assert error_norm(error, y, y, rtol=1e-8, atol=1e-8) == pytest.approx(np.sqrt(0.5))
