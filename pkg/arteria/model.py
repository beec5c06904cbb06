"""Time derivative of the unidirectional model.

The general model reads

.. math::

    f_t = ℳ𝒫\\Big[-\\tfrac{1}{ε}(1-\\tfrac{β}{2})f_{xx} + \\tfrac{κ}{ε} f_x
          - \\tfrac{ν}{2ε} f_{xxx} + (2+\\tfrac{β}{4})(f f_x)_x
          + \\tfrac{ν}{4ε} f_x f_{xx} - \\tfrac{ν}{4} f f_{xxx} - 2κ f f_x\\Big].

Linear terms are applied as symbols; the quadratic products are formed
pointwise at the grid nodes from spectrally differentiated factors, then
transformed back and (by default) truncated with the 2/3 rule.  Every
variant returns a field whose mean mode is exactly zero.  The Nyquist mode
of a real field has no sine part, so it cannot carry the dispersive part of
the symbol; its coefficient is evolved by the real part of the linear rate
only, which is negative for β > −2.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from arteria.grid import (
    TWO_THIRDS,
    SpectralField,
    check_same_grid,
    dealias_mask,
    differentiate,
    enforce_real,
    to_physical,
    to_spectral,
)
from arteria.multipliers import MultiplierTable, apply_mollifier
from arteria.types import ModelParams, RhsVariant

RhsFunction = Callable[[np.ndarray], np.ndarray]


class VariantError(ValueError):
    """A right-hand side was requested for parameters it cannot represent."""

    def __init__(self, message: str, *, code: str = "model.variant_invalid") -> None:
        super().__init__(message)
        self.code = code


class NonFiniteStateError(FloatingPointError):
    """Raised when an evaluation produces NaN or infinite values."""


def _check_table(params: ModelParams, table: MultiplierTable, f: SpectralField) -> None:
    if table.params != params:
        raise VariantError(
            "multiplier table was built for different parameters", code="model.table_mismatch"
        )
    check_same_grid(table.grid, f)


def _check_finite(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteStateError(f"non-finite values in {where}")


def _truncate(field_: SpectralField, enabled: bool) -> SpectralField:
    if not enabled:
        return field_
    mask = dealias_mask(field_.grid, TWO_THIRDS)
    return field_.with_coeffs(np.where(mask, field_.coeffs, 0.0))


def quadratic_products(
    f: SpectralField, *, dealias: bool = True
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Return ``f f_x``, ``f_x f_xx`` and ``f f_xxx`` formed at the grid nodes."""
    g = _truncate(f, dealias)
    u = to_physical(g)
    ux = to_physical(differentiate(g, 1))
    uxx = to_physical(differentiate(g, 2))
    uxxx = to_physical(differentiate(g, 3))
    with np.errstate(over="ignore", invalid="ignore"):
        products = (u * ux, ux * uxx, u * uxxx)
    for values, name in zip(products, ("f*f_x", "f_x*f_xx", "f*f_xxx")):
        _check_finite(values, name)
    grid = f.grid
    return tuple(_truncate(to_spectral(values, grid), dealias) for values in products)  # type: ignore[return-value]


def _bracket(params: ModelParams, f: SpectralField, *, dealias: bool) -> SpectralField:
    """The expression inside ``ℳ𝒫[...]``."""
    eps, kappa, nu, beta = params.eps, params.kappa, params.nu, params.beta
    f_ff_x, f_x_f_xx, f_f_xxx = quadratic_products(f, dealias=dealias)
    linear = (
        differentiate(f, 2) * (-(1.0 - beta / 2.0) / eps)
        + differentiate(f, 1) * (kappa / eps)
        - differentiate(f, 3) * (nu / (2.0 * eps))
    )
    nonlinear = (
        differentiate(f_ff_x, 1) * (2.0 + beta / 4.0)
        + f_x_f_xx * (nu / (4.0 * eps))
        - f_f_xxx * (nu / 4.0)
        - f_ff_x * (2.0 * kappa)
    )
    return linear + nonlinear


def _finish(coeffs: np.ndarray, f: SpectralField, table: MultiplierTable, where: str) -> np.ndarray:
    """Zero the mean and evolve the Nyquist coefficient by its linear decay alone."""
    out = enforce_real(coeffs)
    out[0] = 0.0
    out[-1] = table.nyquist_rate * f.coeffs[-1].real
    _check_finite(out, where)
    return out


def rhs_general(
    params: ModelParams, table: MultiplierTable, f: SpectralField, *, dealias: bool = True
) -> SpectralField:
    """``f_t`` of the general nonlocal model."""
    _check_table(params, table, f)
    bracket = _bracket(params, f, dealias=dealias)
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = bracket.coeffs * table.mp
    return f.with_coeffs(_finish(coeffs, f, table, "general right-hand side"))


def rhs_mollified(
    params: ModelParams,
    table: MultiplierTable,
    f: SpectralField,
    width: float,
    *,
    dealias: bool = True,
) -> SpectralField:
    """``f_t`` of the regularized problem: every instance of f and the result pass through 𝒥^ϵ."""
    if width <= 0:
        raise VariantError(
            "the mollified right-hand side needs a positive width", code="model.mollify_invalid"
        )
    inner = rhs_general(params, table, apply_mollifier(f, width), dealias=dealias)
    return apply_mollifier(inner, width)


def rhs_bbm_local(
    params: ModelParams, table: MultiplierTable, f: SpectralField, *, dealias: bool = True
) -> SpectralField:
    """``f_t`` from the local BBM-type form, valid for ``nu = 0``.

    Solves ``(κ − (4/κ)∂ₓₓ) f_t = (Id + (2/κ)∂ₓ) Q`` with
    ``Q = a f_xx + b f_x + c (f f_x)_x − d f f_x``.
    """
    if not params.elastic:
        raise VariantError("the local BBM form requires nu = 0", code="model.variant_needs_elastic")
    _check_table(params, table, f)
    eps, kappa, beta = params.eps, params.kappa, params.beta
    a = (beta / 2.0 - 1.0) / eps
    b = kappa / eps
    c = 2.0 + beta / 4.0
    d = 2.0 * kappa
    f_ff_x, _, _ = quadratic_products(f, dealias=dealias)
    q = (
        differentiate(f, 2) * a
        + differentiate(f, 1) * b
        + differentiate(f_ff_x, 1) * c
        - f_ff_x * d
    )
    rhs = q + differentiate(q, 1) * (2.0 / kappa)
    k = f.grid.wavenumbers
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = rhs.coeffs / (kappa * (1.0 + 4.0 * k**2 / kappa**2))
    return f.with_coeffs(_finish(coeffs, f, table, "BBM right-hand side"))


def evaluate(
    variant: RhsVariant,
    params: ModelParams,
    table: MultiplierTable,
    f: SpectralField,
    *,
    dealias: bool = True,
) -> SpectralField:
    """Dispatch on *variant*."""
    if variant.tag == "general":
        return rhs_general(params, table, f, dealias=dealias)
    if variant.tag == "mollified":
        return rhs_mollified(params, table, f, variant.mollify, dealias=dealias)
    return rhs_bbm_local(params, table, f, dealias=dealias)


def make_rhs(
    variant: RhsVariant, params: ModelParams, table: MultiplierTable, *, dealias: bool = True
) -> RhsFunction:
    """Wrap a variant as a function of the raw coefficient array, for the integrator."""
    if variant.tag == "bbm_local" and not params.elastic:
        raise VariantError("the local BBM form requires nu = 0", code="model.variant_needs_elastic")
    grid = table.grid

    def rhs(coeffs: np.ndarray) -> np.ndarray:
        field_ = SpectralField(grid, coeffs)
        return evaluate(variant, params, table, field_, dealias=dealias).coeffs

    return rhs


__all__ = [
    "NonFiniteStateError",
    "RhsFunction",
    "VariantError",
    "evaluate",
    "make_rhs",
    "quadratic_products",
    "rhs_bbm_local",
    "rhs_general",
    "rhs_mollified",
]
