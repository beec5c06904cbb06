"""Tests for the reference computations."""

import numpy as np
import pytest

from arteria.grid import SpectralField, make_grid, to_physical, to_spectral
from arteria.multipliers import build_table
from arteria.oracle import (
    OracleError,
    evolve_linear,
    linear_rate,
    linear_symbol,
    real_rate_closed_form,
    rhs_convolution,
)
from arteria.types import ModelParams


def test_linear_rate_reference_value():
    assert linear_rate(ModelParams(), 1) == pytest.approx(-0.36 + 0.52j)
    assert linear_rate(ModelParams(), 0) == 0


@pytest.mark.parametrize("beta", [-1.0, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("nu", [0.0, 0.1, 3.0])
def test_real_part_matches_closed_form(nu, beta):
    params = ModelParams(nu=nu, kappa=0.7, beta=beta, eps=0.5)
    for k in range(1, 40):
        assert linear_rate(params, k).real == pytest.approx(
            real_rate_closed_form(params, k), rel=1e-12, abs=1e-14
        )


def test_modes_decay_above_the_stability_threshold():
    grid = make_grid(64)
    assert np.all(linear_symbol(ModelParams(beta=-1.9), grid).real[1:] < 0)
    assert np.all(linear_symbol(ModelParams(beta=-2.5), grid).real[1:] > 0)


def test_evolve_linear_is_a_semigroup():
    params = ModelParams(nu=0.5)
    grid = make_grid(32)
    table = build_table(params, grid)
    f0 = to_spectral(np.random.default_rng(0).standard_normal(32), grid)
    twice = evolve_linear(evolve_linear(f0, params, table, 0.3), params, table, 0.4)
    once = evolve_linear(f0, params, table, 0.7)
    np.testing.assert_allclose(twice.coeffs, once.coeffs, atol=1e-14)
    np.testing.assert_array_equal(evolve_linear(f0, params, table, 0.0).coeffs, f0.coeffs)
    with pytest.raises(OracleError) as exc:
        evolve_linear(f0, params, table, -1.0)
    assert exc.value.code == "oracle.negative_time"


def test_convolution_of_a_single_mode_by_hand():
    # f = cos x: f f_x = -sin(2x)/2, f_x f_xx = sin(2x)/2, f f_xxx = sin(2x)/2
    params = ModelParams(nu=0.0, kappa=1.0, beta=0.0, eps=1.0)
    grid = make_grid(16)
    f = to_spectral(np.cos(grid.nodes), grid)
    out = rhs_convolution(params, f)
    k = np.array([1.0, 2.0])
    a = 1.0
    mp = (1.0 + 2j * k / a) / (1.0 + 4.0 * k**2 / a**2) / a
    # mode 1: linear bracket (k² + ik) / 2
    assert out.coeffs[1] == pytest.approx(mp[0] * (1.0 + 1j) / 2)
    # mode 2 of -sin(2x)/2 is i/4; bracket = 2·(2i)·(i/4) - 2·(i/4)
    ff_x = 0.25j
    assert out.coeffs[2] == pytest.approx(mp[1] * (2.0 * 2j * ff_x - 2.0 * ff_x))
    np.testing.assert_allclose(out.coeffs[3:], 0.0, atol=1e-13)


def test_linear_symbol_keeps_only_the_decay_at_nyquist():
    params = ModelParams(nu=0.1)
    grid = make_grid(64)
    rates = linear_symbol(params, grid)
    assert rates[-1].imag == 0
    assert rates[-1].real == pytest.approx(real_rate_closed_form(params, grid.k_max), rel=1e-12)
    assert rates[-1].real < 0


def test_convolution_nyquist_follows_the_linear_decay():
    params = ModelParams(nu=0.0)
    grid = make_grid(8)
    x = grid.nodes
    # cos(2x)·cos(2x) reaches k = ±4, the Nyquist mode of n = 8, but only the
    # input Nyquist value drives the output there
    out = rhs_convolution(params, to_spectral(np.cos(2 * x), grid))
    assert out.coeffs[-1] == pytest.approx(0.0, abs=1e-15)
    assert np.isfinite(to_physical(out)).all()

    sawtooth = to_spectral(0.01 * np.cos(4 * x), grid)
    out = rhs_convolution(params, sawtooth, mollify=0.01)
    expected = real_rate_closed_form(params, 4) * np.exp(-0.32) * sawtooth.coeffs[-1].real
    assert out.coeffs[-1] == pytest.approx(expected, rel=1e-12)


def test_convolution_limits():
    params = ModelParams()
    with pytest.raises(OracleError) as exc:
        rhs_convolution(params, SpectralField(make_grid(64), np.zeros(33)))
    assert exc.value.code == "oracle.grid_too_large"
    with pytest.raises(OracleError):
        rhs_convolution(params, SpectralField(make_grid(16), np.zeros(9)), mollify=-1.0)
