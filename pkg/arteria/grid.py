"""Uniform periodic grid and Fourier representation of real fields.

Fields live on the torus ``[0, 2π)`` sampled at ``n`` uniform nodes.  Their
spectral form is the half spectrum ``k = 0, 1, ..., n/2`` returned by
:func:`numpy.fft.rfft`, scaled so that

.. math:: f(x) = \\sum_{k=-n/2+1}^{n/2} \\hat f(k) e^{ikx},
          \\qquad \\hat f(-k) = \\overline{\\hat f(k)}.

With this scaling ``f̂(0)`` is the spatial mean, and Parseval reads

.. math:: \\int_0^{2\\pi} f^2\\,dx = 2\\pi \\sum_k |\\hat f(k)|^2 .

Negative wavenumbers are implied by conjugate symmetry, so realness is
enforced by the storage itself.  The Nyquist coefficient ``k = n/2`` is only
meaningful through its real part; :func:`to_physical` discards the
imaginary part and :func:`differentiate` zeroes it for odd orders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

logger = logging.getLogger(__name__)

MIN_POINTS = 8
TWO_THIRDS = 2.0 / 3.0


class GridError(ValueError):
    """A grid or field shape error with a stable machine-readable code."""

    def __init__(self, message: str, *, code: str = "grid.invalid") -> None:
        super().__init__(message)
        self.code = code


# ═══════════════════════════════════════════════════════════════════════════
# Grid
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``n_points`` nodes on ``[0, 2π)``.

    Instances are immutable; derived arrays are computed once and marked
    read-only so a grid can be shared freely between runs and threads.
    """

    n_points: int

    def __post_init__(self) -> None:
        n = self.n_points
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise GridError(f"n_points must be an integer, got {n!r}", code="grid.not_integer")
        if n < MIN_POINTS or n % 2:
            raise GridError(
                f"n_points must be even and at least {MIN_POINTS}, got {n}",
                code="grid.size_invalid",
            )

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n_points

    @property
    def k_max(self) -> int:
        """Largest stored wavenumber (the Nyquist mode)."""
        return self.n_points // 2

    @property
    def n_modes(self) -> int:
        return self.n_points // 2 + 1

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Half-spectrum wavenumbers ``0, 1, ..., n/2`` as floats."""
        k = np.arange(self.n_modes, dtype=float)
        k.setflags(write=False)
        return k

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates ``x_j = 2πj/n``."""
        x = self.spacing * np.arange(self.n_points, dtype=float)
        x.setflags(write=False)
        return x

    @cached_property
    def mode_weights(self) -> np.ndarray:
        """Multiplicity of each stored mode in the full symmetric spectrum."""
        w = np.full(self.n_modes, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        w.setflags(write=False)
        return w


def make_grid(n_points: int) -> GridSpec:
    """Build the uniform periodic grid with ``n_points`` nodes."""
    grid = GridSpec(n_points)
    logger.debug("grid with %d nodes, k_max=%d", grid.n_points, grid.k_max)
    return grid


# ═══════════════════════════════════════════════════════════════════════════
# Spectral fields
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A real periodic field stored as its half-spectrum coefficients."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.grid.n_modes,):
            raise GridError(
                f"expected {self.grid.n_modes} coefficients for n={self.grid.n_points}, "
                f"got shape {coeffs.shape}",
                code="grid.shape_mismatch",
            )
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0].real)

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralField:
        return SpectralField(self.grid, coeffs)

    def _check_same_grid(self, other: SpectralField) -> None:
        if other.grid != self.grid:
            raise GridError(
                f"fields live on different grids (n={self.grid.n_points} "
                f"and n={other.grid.n_points})",
                code="grid.mismatch",
            )

    def __add__(self, other: SpectralField) -> SpectralField:
        self._check_same_grid(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        self._check_same_grid(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> SpectralField:
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return self.with_coeffs(-self.coeffs)


def zeros(grid: GridSpec) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_modes, dtype=complex))


def check_same_grid(grid: GridSpec, field_: SpectralField) -> None:
    """Raise :class:`GridError` unless *field_* lives on *grid*."""
    if field_.grid != grid:
        raise GridError(
            f"field on n={field_.grid.n_points} used with grid n={grid.n_points}",
            code="grid.mismatch",
        )


def to_spectral(values: np.ndarray, grid: GridSpec | None = None) -> SpectralField:
    """Transform nodal values to a :class:`SpectralField`.

    Parameters
    ----------
    values:
        Real samples at the grid nodes.
    grid:
        Target grid.  When omitted, a grid matching ``len(values)`` is built.
    """
    samples = np.asarray(values, dtype=float)
    if samples.ndim != 1:
        raise GridError("values must be one-dimensional", code="grid.shape_mismatch")
    if grid is None:
        grid = make_grid(samples.size)
    elif samples.size != grid.n_points:
        raise GridError(
            f"expected {grid.n_points} values, got {samples.size}", code="grid.shape_mismatch"
        )
    coeffs = np.fft.rfft(samples) / grid.n_points
    coeffs[0] = coeffs[0].real
    coeffs[-1] = coeffs[-1].real
    return SpectralField(grid, coeffs)


def to_physical(field_: SpectralField) -> np.ndarray:
    """Evaluate *field_* at the grid nodes."""
    n = field_.grid.n_points
    return np.fft.irfft(field_.coeffs * n, n)


def differentiate(field_: SpectralField, order: int = 1) -> SpectralField:
    """Spectral derivative of order 1, 2 or 3 (multiplication by ``(ik)^order``).

    Odd orders zero the Nyquist coefficient, which has no real derivative on
    the grid.
    """
    if order not in (1, 2, 3):
        raise GridError(f"unsupported derivative order: {order}", code="grid.order_unsupported")
    k = field_.grid.wavenumbers
    coeffs = field_.coeffs * (1j * k) ** order
    if order % 2:
        coeffs[-1] = 0.0
    return field_.with_coeffs(coeffs)


def dealias_mask(grid: GridSpec, fraction: float = TWO_THIRDS) -> np.ndarray:
    """Boolean mask of the modes kept by the truncation rule."""
    if not 0.0 < fraction <= 1.0:
        raise GridError(
            f"dealias fraction must lie in (0, 1], got {fraction}", code="grid.fraction_invalid"
        )
    return grid.wavenumbers <= fraction * grid.k_max


def dealias(field_: SpectralField, fraction: float = TWO_THIRDS) -> SpectralField:
    """Zero every mode with ``|k| > fraction * k_max``; identity for ``fraction=1``."""
    mask = dealias_mask(field_.grid, fraction)
    return field_.with_coeffs(np.where(mask, field_.coeffs, 0.0))


def enforce_real(coeffs: np.ndarray) -> np.ndarray:
    """Drop the imaginary parts a real field cannot carry (mean and Nyquist)."""
    out = np.array(coeffs, dtype=complex)
    out[0] = out[0].real
    out[-1] = out[-1].real
    return out


# ═══════════════════════════════════════════════════════════════════════════
# Norms
# ═══════════════════════════════════════════════════════════════════════════


def mode_power(field_: SpectralField) -> np.ndarray:
    """Per-mode contribution to ``∫ f² dx`` (Nyquist counted by its real part)."""
    power = np.abs(field_.coeffs) ** 2
    power[-1] = field_.coeffs[-1].real ** 2
    return 2.0 * np.pi * field_.grid.mode_weights * power


def l2_norm(field_: SpectralField) -> float:
    """``‖f‖_{L²(0, 2π)}`` computed in coefficient space."""
    return float(np.sqrt(mode_power(field_).sum()))


def inner(f: SpectralField, g: SpectralField) -> float:
    """``⟨f, g⟩ = ∫ f g dx`` for real fields, computed in coefficient space."""
    f._check_same_grid(g)
    products = (f.coeffs * np.conj(g.coeffs)).real
    products[-1] = f.coeffs[-1].real * g.coeffs[-1].real
    return float(2.0 * np.pi * np.sum(f.grid.mode_weights * products))


__all__ = [
    "MIN_POINTS",
    "TWO_THIRDS",
    "GridError",
    "GridSpec",
    "SpectralField",
    "check_same_grid",
    "dealias",
    "dealias_mask",
    "differentiate",
    "enforce_real",
    "inner",
    "l2_norm",
    "make_grid",
    "mode_power",
    "to_physical",
    "to_spectral",
    "zeros",
]
