"""Tests for the right-hand side variants."""

import numpy as np
import pytest

from arteria.grid import SpectralField, make_grid, to_physical, to_spectral
from arteria.integrator import integrate
from arteria.model import (
    NonFiniteStateError,
    VariantError,
    evaluate,
    make_rhs,
    quadratic_products,
    rhs_bbm_local,
    rhs_general,
    rhs_mollified,
)
from arteria.multipliers import build_table
from arteria.oracle import linear_rate, linear_symbol, real_rate_closed_form, rhs_convolution
from arteria.selftest import random_band_limited
from arteria.types import ModelParams, RhsVariant, SolverConfig


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.mark.parametrize(
    "params",
    [ModelParams(), ModelParams(nu=0.0, beta=-1.0), ModelParams(nu=2.0, eps=0.5, kappa=3.0)],
)
def test_general_matches_convolution_sums(params, rng):
    grid = make_grid(32)
    table = build_table(params, grid)
    for _ in range(5):
        f = random_band_limited(32, 5, rng)
        np.testing.assert_allclose(
            rhs_general(params, table, f).coeffs, rhs_convolution(params, f).coeffs, atol=1e-12
        )


def test_mollified_matches_mollified_convolution(rng):
    params = ModelParams(nu=0.5)
    grid = make_grid(32)
    table = build_table(params, grid)
    f = random_band_limited(32, 5, rng)
    np.testing.assert_allclose(
        rhs_mollified(params, table, f, 0.01).coeffs,
        rhs_convolution(params, f, mollify=0.01).coeffs,
        atol=1e-12,
    )


def test_local_bbm_form_agrees_with_general_at_zero_viscosity(rng):
    params = ModelParams(nu=0.0, kappa=2.0, beta=0.5)
    grid = make_grid(64)
    table = build_table(params, grid)
    f = random_band_limited(64, 10, rng)
    np.testing.assert_allclose(
        rhs_bbm_local(params, table, f).coeffs, rhs_general(params, table, f).coeffs, atol=1e-12
    )


def test_output_has_zero_mean_and_real_nyquist(rng):
    params = ModelParams()
    grid = make_grid(64)
    table = build_table(params, grid)
    f = to_spectral(0.3 * rng.standard_normal(64) + 1.0, grid)
    for dealias in (True, False):
        out = rhs_general(params, table, f, dealias=dealias)
        assert out.coeffs[0] == 0
        assert out.coeffs[-1].imag == 0


def test_small_amplitude_limit_follows_linear_rate():
    params = ModelParams(nu=1.0, beta=0.5)
    grid = make_grid(32)
    table = build_table(params, grid)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[2] = 1e-9
    out = rhs_general(params, table, SpectralField(grid, coeffs))
    assert out.coeffs[2] == pytest.approx(linear_rate(params, 2) * 1e-9, rel=1e-6)


def test_quadratic_products_at_the_nodes():
    grid = make_grid(64)
    x = grid.nodes
    f = to_spectral(np.sin(x), grid)
    ff_x, fx_fxx, f_fxxx = quadratic_products(f)
    np.testing.assert_allclose(to_physical(ff_x), np.sin(x) * np.cos(x), atol=1e-13)
    np.testing.assert_allclose(to_physical(fx_fxx), -np.cos(x) * np.sin(x), atol=1e-13)
    np.testing.assert_allclose(to_physical(f_fxxx), -np.sin(x) * np.cos(x), atol=1e-13)


def test_variant_guards():
    params = ModelParams(nu=1.0)
    grid = make_grid(16)
    table = build_table(params, grid)
    f = to_spectral(np.sin(grid.nodes), grid)
    with pytest.raises(VariantError) as exc:
        rhs_bbm_local(params, table, f)
    assert exc.value.code == "model.variant_needs_elastic"
    with pytest.raises(VariantError):
        rhs_mollified(params, table, f, 0.0)
    with pytest.raises(VariantError) as exc:
        rhs_general(ModelParams(nu=2.0), table, f)
    assert exc.value.code == "model.table_mismatch"
    with pytest.raises(VariantError):
        make_rhs(RhsVariant.bbm_local(), params, table)


def test_non_finite_input_is_reported():
    params = ModelParams()
    grid = make_grid(16)
    table = build_table(params, grid)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[1] = np.nan
    with pytest.raises(NonFiniteStateError):
        rhs_general(params, table, SpectralField(grid, coeffs))


def test_make_rhs_dispatches_on_raw_coefficients(rng):
    params = ModelParams(nu=0.0)
    grid = make_grid(32)
    table = build_table(params, grid)
    f = random_band_limited(32, 5, rng)
    for variant in (RhsVariant.general(), RhsVariant.bbm_local(), RhsVariant.mollified(0.02)):
        rhs = make_rhs(variant, params, table)
        np.testing.assert_array_equal(
            rhs(f.coeffs), evaluate(variant, params, table, f).coeffs
        )


@pytest.mark.parametrize(
    "params",
    [
        ModelParams(nu=0.0, beta=0.0),
        ModelParams(nu=1.0, beta=1.0),
        ModelParams(nu=0.1, beta=1.0),
        ModelParams(nu=0.0, beta=-1.5),
        ModelParams(nu=3.0, kappa=0.2, beta=2.0),
    ],
)
def test_nyquist_mode_decays_in_every_variant(params):
    grid = make_grid(1024)
    table = build_table(params, grid)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[-1] = 1e-3
    f = SpectralField(grid, coeffs)
    expected = real_rate_closed_form(params, grid.k_max)
    assert expected < 0

    variants = [RhsVariant.general(), RhsVariant.mollified(1e-6)]
    if params.elastic:
        variants.append(RhsVariant.bbm_local())
    for variant in variants:
        out = evaluate(variant, params, table, f)
        rate = out.coeffs[-1] / coeffs[-1]
        assert rate.imag == 0
        assert rate.real <= 0
        np.testing.assert_allclose(out.coeffs[:-1], 0.0, atol=1e-18)
    general = rhs_general(params, table, f).coeffs[-1] / coeffs[-1]
    assert general.real == pytest.approx(expected, rel=1e-12)


def test_nyquist_sawtooth_does_not_grow_under_integration():
    params = ModelParams(nu=0.1)
    grid = make_grid(256)
    table = build_table(params, grid)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[-1] = 1e-6
    final, stop = integrate(
        make_rhs(RhsVariant.general(), params, table), SpectralField(grid, coeffs),
        SolverConfig(t_final=2.0),
    )
    assert stop.completed
    assert abs(final.coeffs[-1]) < 1e-6


@pytest.mark.parametrize("params", [ModelParams(), ModelParams(nu=0.0, beta=0.5)])
def test_linearization_error_is_second_order(params):
    grid = make_grid(32)
    table = build_table(params, grid)
    phi = to_spectral(np.random.default_rng(7).standard_normal(32), grid)
    phi = phi.with_coeffs(np.where(np.arange(grid.n_modes) == 0, 0.0, phi.coeffs))
    rates = linear_symbol(params, grid)

    def residual(delta):
        out = rhs_general(params, table, phi * delta)
        return np.max(np.abs(out.coeffs - delta * rates * phi.coeffs))

    r1, r2, r3 = residual(1e-4), residual(1e-5), residual(1e-6)
    assert 50 < r1 / r2 < 200
    assert 50 < r2 / r3 < 200


def test_mollified_form_approaches_the_general_form():
    params = ModelParams()
    grid = make_grid(64)
    table = build_table(params, grid)
    f = random_band_limited(64, 8, np.random.default_rng(3))
    reference = rhs_general(params, table, f).coeffs
    gaps = [
        np.max(np.abs(rhs_mollified(params, table, f, width).coeffs - reference))
        for width in (1e-2, 1e-4, 1e-6, 1e-8)
    ]
    assert gaps[-1] <= 1e-5
    assert gaps == sorted(gaps, reverse=True)
