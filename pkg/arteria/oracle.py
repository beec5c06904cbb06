"""Reference computations that do not share code paths with the solver.

* :func:`linear_rate` / :func:`linear_symbol`: growth rate ``λ(k)`` of the
  linearized model, evaluated from its closed-form symbols.
* :func:`evolve_linear`: the exact solution ``f̂(k, t) = e^{λ(k) t} f̂(k, 0)``.
* :func:`rhs_convolution`: the nonlinear right-hand side with every quadratic
  term formed as an explicit sum over coefficient pairs.  No grid products
  are taken, so nothing aliases.
"""

from __future__ import annotations

import numpy as np

from arteria.grid import GridSpec, SpectralField, check_same_grid, enforce_real
from arteria.multipliers import MultiplierTable
from arteria.types import ModelParams

MAX_CONVOLUTION_POINTS = 32


class OracleError(ValueError):
    def __init__(self, message: str, *, code: str = "oracle.invalid") -> None:
        super().__init__(message)
        self.code = code


def _symbols(params: ModelParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(m(k) p(k), linear bracket symbol)`` for signed wavenumbers *k*."""
    kappa, nu, eps, beta = params.kappa, params.nu, params.eps, params.beta
    a = kappa + 0.5 * nu * k**2
    mp = (1.0 + 2j * k / a) / (1.0 + 4.0 * k**2 / a**2) / a
    bracket = ((1.0 - beta / 2.0) * k**2 + 1j * kappa * k + 0.5j * nu * k**3) / eps
    return mp, bracket


def linear_rate(params: ModelParams, k: int) -> complex:
    """``λ(k) = m(k) p(k) [(1/ε)(1−β/2)k² + (κ/ε) ik + (ν/2ε) ik³]``."""
    if k == 0:
        return 0j
    mp, bracket = _symbols(params, np.array([float(k)]))
    return complex(mp[0] * bracket[0])


def linear_symbol(params: ModelParams, grid: GridSpec) -> np.ndarray:
    """``λ(k)`` on the half spectrum of *grid*; ``λ(0) = 0``.

    The Nyquist entry keeps only ``Re λ(n/2)``: a real field has no sine
    component there for the imaginary part to act on.
    """
    mp, bracket = _symbols(params, grid.wavenumbers)
    rates = mp * bracket
    rates[0] = 0.0
    rates[-1] = rates[-1].real
    return rates


def real_rate_closed_form(params: ModelParams, k: float) -> float:
    """``Re λ(k) = −(1 + β/2) a k² / (ε (a² + 4k²))``."""
    a = params.kappa + 0.5 * params.nu * k**2
    return -(1.0 + params.beta / 2.0) * a * k**2 / (params.eps * (a**2 + 4.0 * k**2))


def evolve_linear(
    f0: SpectralField, params: ModelParams, table: MultiplierTable, t: float
) -> SpectralField:
    """Exact solution of the linearized model at time *t*."""
    if t < 0:
        raise OracleError(f"time must be non-negative, got {t}", code="oracle.negative_time")
    check_same_grid(table.grid, f0)
    growth = np.exp(linear_symbol(params, f0.grid) * t)
    return f0.with_coeffs(enforce_real(f0.coeffs * growth))


# ═══════════════════════════════════════════════════════════════════════════
# Convolution right-hand side
# ═══════════════════════════════════════════════════════════════════════════


def _full_spectrum(f: SpectralField) -> np.ndarray:
    """Coefficients for ``k = −N..N``; the Nyquist value is split between ±N."""
    half = f.coeffs.copy()
    n_max = f.grid.k_max
    half[-1] = half[-1].real / 2.0
    full = np.zeros(2 * n_max + 1, dtype=complex)
    full[n_max:] = half
    full[:n_max] = np.conj(half[:0:-1])
    return full


def _pair_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``c(k) = Σ_{i+j=k} a(i) b(j)`` over all index pairs."""
    out = np.zeros(a.size + b.size - 1, dtype=complex)
    i, j = np.indices((a.size, b.size))
    np.add.at(out, i + j, np.outer(a, b))
    return out


def rhs_convolution(
    params: ModelParams, f: SpectralField, mollify: float = 0.0
) -> SpectralField:
    """Right-hand side of the general model by explicit pair sums.

    Products are exact trigonometric polynomials of degree up to ``2N``;
    the result is returned on ``0..N`` with higher modes dropped.  The
    Nyquist coefficient follows the linear decay ``Re λ(N)`` of the input
    Nyquist value alone.  A positive *mollify* wraps the input and the
    result in ``exp(−mollify k²)``.
    """
    grid = f.grid
    if grid.n_points > MAX_CONVOLUTION_POINTS:
        raise OracleError(
            f"the convolution oracle is limited to n <= {MAX_CONVOLUTION_POINTS}, "
            f"got n={grid.n_points}",
            code="oracle.grid_too_large",
        )
    if mollify < 0:
        raise OracleError("mollify must be non-negative", code="oracle.mollify_invalid")
    n_max = grid.k_max
    k = np.arange(-n_max, n_max + 1, dtype=float)
    wide_k = np.arange(-2 * n_max, 2 * n_max + 1, dtype=float)
    full = _full_spectrum(f) * np.exp(-mollify * k**2)

    ik = 1j * k
    f_ff_x = _pair_sum(full, ik * full)
    f_x_f_xx = _pair_sum(ik * full, ik**2 * full)
    f_f_xxx = _pair_sum(full, ik**3 * full)

    eps, kappa, nu, beta = params.eps, params.kappa, params.nu, params.beta
    mp, linear = _symbols(params, wide_k)
    wide_f = np.zeros(wide_k.size, dtype=complex)
    wide_f[n_max : 3 * n_max + 1] = full
    bracket = (
        linear * wide_f
        + (2.0 + beta / 4.0) * 1j * wide_k * f_ff_x
        + nu / (4.0 * eps) * f_x_f_xx
        - nu / 4.0 * f_f_xxx
        - 2.0 * kappa * f_ff_x
    )
    result = mp * bracket * np.exp(-mollify * wide_k**2)

    centre = 2 * n_max
    half = result[centre : centre + n_max + 1].copy()
    nyquist_rate = (mp[centre + n_max] * linear[centre + n_max]).real
    half[-1] = nyquist_rate * f.coeffs[-1].real * np.exp(-2.0 * mollify * n_max**2)
    return SpectralField(grid, half)


__all__ = [
    "MAX_CONVOLUTION_POINTS",
    "OracleError",
    "evolve_linear",
    "linear_rate",
    "linear_symbol",
    "real_rate_closed_form",
    "rhs_convolution",
]
