"""Fourier multiplier operators of the model.

All operators are diagonal in the Fourier basis.  With
``a(k) = κ + (ν/2) k²`` the symbols are

* ``𝒫``:   ``p(k) = 1 / a(k)``
* ``ℳ``:   ``m(k) = (1 + 4k²/a²)⁻¹ (1 + 2ik/a)``
* ``𝒮``:   ``m(k) − 1`` so that ``ℳ = Id + 𝒮``
* ``Λ^s``: ``|k|^s``
* ``𝒥^ϵ``: ``exp(−ϵ k²)``
* ``∂ₓ⁻¹``: ``1/(ik)`` off the mean, ``0`` on it.

``𝒮`` is always taken as ``m − 1``; its closed form is not used.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from arteria.grid import GridSpec, SpectralField, check_same_grid, differentiate, l2_norm
from arteria.types import DEFAULT_SOBOLEV_INDEX, ModelParams, ParameterError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Per-wavenumber symbols for one parameter set on one grid."""

    params: ModelParams
    grid: GridSpec
    sobolev_index: float
    a: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    lambda_s: np.ndarray = field(repr=False)

    @property
    def k(self) -> np.ndarray:
        return self.grid.wavenumbers

    @property
    def mp(self) -> np.ndarray:
        """Symbol of the composition ``ℳ𝒫``."""
        return self.m * self.p

    @property
    def nyquist_rate(self) -> float:
        """``Re λ(n/2)``, the rate at which the Nyquist coefficient evolves.

        A real field carries only the cosine part of the Nyquist mode, so the
        dispersive part of the symbol is dropped there and only the decay
        ``−(1 + β/2) a k² / (ε (a² + 4k²))`` is kept.
        """
        k = float(self.grid.k_max)
        a = float(self.a[-1])
        params = self.params
        return -(1.0 + params.beta / 2.0) * a * k**2 / (params.eps * (a**2 + 4.0 * k**2))


def build_table(
    params: ModelParams, grid: GridSpec, sobolev_index: float = DEFAULT_SOBOLEV_INDEX
) -> MultiplierTable:
    """Evaluate every symbol on the wavenumbers of *grid*."""
    if params.kappa <= 0:
        raise ParameterError(
            "kappa must be positive", code="params.kappa_unsupported", key="kappa"
        )
    if sobolev_index <= 0:
        raise ParameterError(
            "sobolev_index must be positive", code="params.s_index_invalid", key="s_index"
        )
    k = grid.wavenumbers
    a = params.kappa + 0.5 * params.nu * k**2
    p = 1.0 / a
    m = (1.0 + 2j * k / a) / (1.0 + 4.0 * k**2 / a**2)
    s = m - 1.0
    lambda_s = np.abs(k) ** sobolev_index
    logger.debug(
        "multiplier table for %s on n=%d (s=%g)", params, grid.n_points, sobolev_index
    )
    return MultiplierTable(
        params=params,
        grid=grid,
        sobolev_index=float(sobolev_index),
        a=_frozen(a),
        p=_frozen(p),
        m=_frozen(m),
        s=_frozen(s),
        lambda_s=_frozen(lambda_s),
    )


def _apply(table: MultiplierTable, field_: SpectralField, symbol: np.ndarray) -> SpectralField:
    check_same_grid(table.grid, field_)
    return field_.with_coeffs(field_.coeffs * symbol)


def apply_p(table: MultiplierTable, field_: SpectralField) -> SpectralField:
    """``𝒫 = (κ − (ν/2)∂ₓₓ)⁻¹``."""
    return _apply(table, field_, table.p)


def apply_m(table: MultiplierTable, field_: SpectralField) -> SpectralField:
    return _apply(table, field_, table.m)


def apply_s(table: MultiplierTable, field_: SpectralField) -> SpectralField:
    """The degree −1 remainder ``𝒮 = ℳ − Id``."""
    return _apply(table, field_, table.s)


def apply_lambda_s(table: MultiplierTable, field_: SpectralField) -> SpectralField:
    return _apply(table, field_, table.lambda_s)


def mollifier_symbol(grid: GridSpec, width: float) -> np.ndarray:
    """Heat-kernel symbol ``exp(−ϵk²)``."""
    if width < 0:
        raise ParameterError(
            "mollifier width must be non-negative", code="params.mollify_invalid", key="mollify"
        )
    return np.exp(-width * grid.wavenumbers**2)


def apply_mollifier(field_: SpectralField, width: float) -> SpectralField:
    """Periodic heat-kernel mollifier ``𝒥^ϵ``; ``width = 0`` is the identity."""
    return field_.with_coeffs(field_.coeffs * mollifier_symbol(field_.grid, width))


def apply_inv_dx(field_: SpectralField) -> SpectralField:
    """Antiderivative with zero mean: ``1/(ik)`` off the mean mode."""
    k = field_.grid.wavenumbers
    symbol = np.zeros_like(field_.coeffs)
    symbol[1:] = 1.0 / (1j * k[1:])
    symbol[-1] = 0.0
    return field_.with_coeffs(field_.coeffs * symbol)


def check_helmholtz_identity(table: MultiplierTable, field_: SpectralField) -> float:
    """Relative L² residual of ``∂ₓₓ𝒫 = −(2/ν)Id + (2κ/ν)𝒫`` applied to *field_*."""
    params = table.params
    if params.elastic:
        raise ParameterError(
            "the Helmholtz identity needs nu > 0; with nu = 0, P is a multiple of the identity",
            code="params.helmholtz_unavailable",
            key="nu",
        )
    pf = apply_p(table, field_)
    residual = (
        differentiate(pf, 2) + field_ * (2.0 / params.nu) - pf * (2.0 * params.kappa / params.nu)
    )
    norm = l2_norm(field_)
    if norm == 0:
        return 0.0
    return l2_norm(residual) / norm


def p_smoothing_constant(params: ModelParams) -> float:
    """Bound on ``sup_k (1+k²)² / a(k)²``, the squared gain of 𝒫 from H^s to H^{s+2}."""
    if params.elastic:
        return float("inf")
    return max(4.0 / params.kappa**2, 16.0 / params.nu**2)


def s_smoothing_constant(params: ModelParams) -> float:
    """Bound on ``sup_k (1+k²)|m(k) − 1|²``, the squared gain of 𝒮 from H^s to H^{s+1}."""
    if params.elastic:
        # |m(k) - 1| tends to 1 when a(k) = κ, so no uniform bound exists.
        return float("inf")
    return max(8.0 / params.kappa**2, 32.0 / params.nu**2)


__all__ = [
    "MultiplierTable",
    "apply_inv_dx",
    "apply_lambda_s",
    "apply_m",
    "apply_mollifier",
    "apply_p",
    "apply_s",
    "build_table",
    "check_helmholtz_identity",
    "mollifier_symbol",
    "p_smoothing_constant",
    "s_smoothing_constant",
]
