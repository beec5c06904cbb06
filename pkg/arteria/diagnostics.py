"""Monitored quantities: norms, energies, the Lipschitz diagnostic and I(t).

All norms are taken on ``[0, 2π)`` and computed in coefficient space through
Parseval's identity; only ``‖f_x‖_{L∞}`` is evaluated at the grid nodes.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from arteria.grid import GridSpec, SpectralField, differentiate, l2_norm, mode_power, to_physical
from arteria.model import NonFiniteStateError
from arteria.multipliers import MultiplierTable
from arteria.oracle import linear_symbol
from arteria.types import DiagnosticsRow, ModelParams, RunRecord, TerminationSummary

logger = logging.getLogger(__name__)

INV_LIP_SENTINEL = 1e308
TERMINATION_WINDOW = 0.2


class DiagnosticsError(ValueError):
    def __init__(self, message: str, *, code: str = "diagnostics.invalid") -> None:
        super().__init__(message)
        self.code = code


# ═══════════════════════════════════════════════════════════════════════════
# Pointwise quantities
# ═══════════════════════════════════════════════════════════════════════════


def lipschitz_diag(f: SpectralField) -> tuple[float, float]:
    """``(‖f_x‖_{L∞}, 1/‖f_x‖_{L∞})`` from the grid maximum of the spectral derivative.

    ``inv_lip`` is :data:`INV_LIP_SENTINEL` when ``lip`` is zero.
    """
    if not np.all(np.isfinite(f.coeffs)):
        raise NonFiniteStateError("lipschitz diagnostic of a non-finite field")
    f_x = to_physical(differentiate(f, 1))
    lip = float(np.max(np.abs(f_x)))
    if lip == 0.0:
        return 0.0, INV_LIP_SENTINEL
    return lip, 1.0 / lip


def accumulate_integral(
    prev_integral: float, prev_lip: float, prev_t: float, lip: float, t: float
) -> float:
    """Advance ``I(t) = ∫ ‖f_x‖_{L∞}`` by one trapezoid panel."""
    if t < prev_t:
        raise DiagnosticsError(
            f"samples out of order: t={t} after t={prev_t}", code="diagnostics.time_order"
        )
    return prev_integral + (t - prev_t) * (lip + prev_lip) / 2.0


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Inhomogeneous ``‖f‖_{H^s}`` with symbol ``(1 + k²)^{s/2}``."""
    k = f.grid.wavenumbers
    return float(np.sqrt(np.sum(mode_power(f) * (1.0 + k**2) ** s)))


class EnergyTerms(NamedTuple):
    l2: float
    hs_energy: float
    e1: float
    e2: float
    d1: float
    d2: float


def energies(f: SpectralField, table: MultiplierTable, params: ModelParams) -> EnergyTerms:
    """Norms and energies of *f*.

    ``hs_energy`` is ``‖f‖² + ‖Λ^s f‖²`` with the table's Sobolev index;
    ``e1``/``e2`` carry the ``4/κ²`` weights of the elastic energies.
    """
    power = mode_power(f)
    l2_sq = float(power.sum())
    lambda_sq = float(np.sum(power * table.lambda_s**2))
    d1 = l2_norm(differentiate(f, 1)) ** 2
    d2 = l2_norm(differentiate(f, 2)) ** 2
    weight = 4.0 / params.kappa**2
    return EnergyTerms(
        l2=math.sqrt(l2_sq),
        hs_energy=l2_sq + lambda_sq,
        e1=l2_sq + weight * d1,
        e2=d1 + weight * d2,
        d1=d1,
        d2=d2,
    )


# ═══════════════════════════════════════════════════════════════════════════
# Sampling along a run
# ═══════════════════════════════════════════════════════════════════════════


class DiagnosticsTracker:
    """Integrator observer that accumulates I(t) and records sampled rows.

    The integral is advanced at every accepted step; a row is stored only on
    sampling instants and by :meth:`finish`.
    """

    def __init__(self, table: MultiplierTable, params: ModelParams) -> None:
        self.table = table
        self.params = params
        self.grid: GridSpec = table.grid
        self.rows: list[DiagnosticsRow] = []
        self.integral = 0.0
        self._prev: tuple[float, float] | None = None

    def __call__(self, t: float, y: np.ndarray, sample: bool) -> None:
        field_ = SpectralField(self.grid, y)
        lip, inv_lip = lipschitz_diag(field_)
        if self._prev is not None:
            prev_t, prev_lip = self._prev
            self.integral = accumulate_integral(self.integral, prev_lip, prev_t, lip, t)
        self._prev = (t, lip)
        if sample:
            self._record(t, field_, lip, inv_lip)

    def _record(self, t: float, f: SpectralField, lip: float, inv_lip: float) -> None:
        terms = energies(f, self.table, self.params)
        self.rows.append(
            DiagnosticsRow(
                t=t,
                mean=f.mean,
                l2=terms.l2,
                hs_energy=terms.hs_energy,
                lip=lip,
                inv_lip=inv_lip,
                cum_integral=self.integral,
                e1=terms.e1,
                e2=terms.e2,
                d1=terms.d1,
                d2=terms.d2,
            )
        )

    def finish(self, t: float, y: np.ndarray) -> None:
        """Close the series with the last accepted state if it was not sampled."""
        if self.rows and self.rows[-1].t == t:
            return
        field_ = SpectralField(self.grid, y)
        lip, inv_lip = lipschitz_diag(field_)
        self._record(t, field_, lip, inv_lip)


# ═══════════════════════════════════════════════════════════════════════════
# Run summaries
# ═══════════════════════════════════════════════════════════════════════════


def termination_summary(
    rows: list[DiagnosticsRow], window: float = TERMINATION_WINDOW
) -> TerminationSummary:
    """Continuation-criterion view of the final ``window`` fraction of samples."""
    if not rows:
        raise DiagnosticsError("no diagnostic rows to summarize", code="diagnostics.empty")
    count = min(len(rows), max(2, math.ceil(window * len(rows))))
    tail = rows[-count:]
    t = np.array([row.t for row in tail])
    inv_lip = np.array([row.inv_lip for row in tail])
    integral = np.array([row.cum_integral for row in tail])
    inv_lip_decreasing = count >= 2 and bool(np.all(np.diff(inv_lip) < 0))
    accelerating = False
    if count >= 3:
        spans = np.diff(t)
        if np.all(spans > 0):
            rates = np.diff(integral) / spans
            accelerating = bool(np.all(np.diff(rates) > 0))
    return TerminationSummary(
        last_time=rows[-1].t,
        last_lip=rows[-1].lip,
        inv_lip_decreasing=inv_lip_decreasing,
        integral_accelerating=accelerating,
        window=count,
    )


def mean_drift(rows: list[DiagnosticsRow]) -> float:
    """Largest ``|f̂(0)(t) − f̂(0)(0)|`` over the sampled rows."""
    if not rows:
        return 0.0
    means = np.array([row.mean for row in rows])
    return float(np.max(np.abs(means - means[0])))


def nonincreasing(values: np.ndarray, slack: float = 0.0) -> bool:
    """True when no value exceeds its predecessor by more than *slack*."""
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) <= slack))


def fit_decay_rate(times: np.ndarray, values: np.ndarray, start_fraction: float = 0.5) -> float:
    """Least-squares slope of ``log(values)`` against time over the tail of the run."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.size < 2:
        raise DiagnosticsError("need matching time and value series", code="diagnostics.fit_shape")
    if not 0.0 <= start_fraction < 1.0:
        raise DiagnosticsError("start_fraction must lie in [0, 1)", code="diagnostics.fit_window")
    start = times[0] + start_fraction * (times[-1] - times[0])
    keep = times >= start
    if keep.sum() < 2:
        raise DiagnosticsError("fit window holds fewer than two samples", code="diagnostics.fit_window")
    if np.any(values[keep] <= 0):
        raise DiagnosticsError("decay fit needs positive values", code="diagnostics.fit_values")
    slope, _ = np.polyfit(times[keep], np.log(values[keep]), 1)
    return float(slope)


class DecayReport(NamedTuple):
    fitted_rate: float
    linear_rate: float

    @property
    def ratio(self) -> float:
        return self.fitted_rate / self.linear_rate


def slowest_linear_rate(params: ModelParams, grid: GridSpec) -> float:
    """``max_{k ≠ 0} Re λ(k)`` over the wavenumbers of *grid*."""
    return float(np.max(linear_symbol(params, grid).real[1:]))


def bbm_decay_report(record: RunRecord, start_fraction: float = 0.5) -> DecayReport:
    """Fitted decay rate of ``√E₂`` next to the slowest linear rate."""
    fitted = fit_decay_rate(record.times, np.sqrt(record.column("e2")), start_fraction)
    grid = GridSpec(record.spec.grid_n)
    report = DecayReport(fitted, slowest_linear_rate(record.spec.params, grid))
    logger.info("decay rate fitted %.6g, linear %.6g", report.fitted_rate, report.linear_rate)
    return report


__all__ = [
    "INV_LIP_SENTINEL",
    "DecayReport",
    "DiagnosticsError",
    "DiagnosticsTracker",
    "EnergyTerms",
    "accumulate_integral",
    "bbm_decay_report",
    "energies",
    "fit_decay_rate",
    "lipschitz_diag",
    "mean_drift",
    "nonincreasing",
    "slowest_linear_rate",
    "sobolev_norm",
    "termination_summary",
]
