"""Adaptive Dormand-Prince 5(4) time stepping.

The integrator works on plain coefficient arrays (real or complex) and an
autonomous right-hand side ``rhs(y) -> y'``.  It never raises for numerical
trouble: overflow, step underflow and an exhausted step budget all end the
run with a :class:`~arteria.types.StopReason`.

Accepted steps are truncated so that they land exactly on the sampling
instants of :meth:`SolverConfig.sample_times`.  The observer is called at
``t = 0`` and after every accepted step with ``sample=True`` on those
instants.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import NamedTuple, Protocol, TypeVar

import numpy as np

from arteria.grid import SpectralField
from arteria.types import SolverConfig, StopReason

logger = logging.getLogger(__name__)

Rhs = Callable[[np.ndarray], np.ndarray]
State = TypeVar("State", np.ndarray, SpectralField)


class Observer(Protocol):
    def __call__(self, t: float, y: np.ndarray, sample: bool) -> None: ...


# ═══════════════════════════════════════════════════════════════════════════
# Butcher tableau
# ═══════════════════════════════════════════════════════════════════════════

_A: tuple[tuple[float, ...], ...] = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)

# fifth-order weights; equal to the last row of _A, so stage 7 is f(y_new)
_B = _A[6]

# difference between the fifth- and embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
_ALPHA = 0.17  # PI controller exponents (0.7/5, 0.4/5 rounded)
_BETA = 0.04
_FLOOR_HITS = 2


class DormandPrinceStep(NamedTuple):
    y_new: np.ndarray
    error: np.ndarray
    k_last: np.ndarray


def dormand_prince_step(
    rhs: Rhs, y: np.ndarray, dt: float, k1: np.ndarray | None = None
) -> DormandPrinceStep:
    """One Dormand-Prince step of size *dt* from *y*.

    ``k1`` may carry ``rhs(y)`` from the previous step (first same as last).
    Returns the fifth-order solution, the embedded error estimate and
    ``rhs(y_new)``.
    """
    stages = [rhs(y) if k1 is None else k1]
    for row in _A[1:]:
        increment = sum(a * k for a, k in zip(row, stages) if a)
        stages.append(rhs(y + dt * increment))
    # stage 7 was evaluated at the fifth-order solution
    y_new = y + dt * sum(b * k for b, k in zip(_B, stages) if b)
    error = dt * sum(e * k for e, k in zip(_E, stages) if e)
    return DormandPrinceStep(y_new, error, stages[-1])


def _components(values: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(values)
    if np.iscomplexobj(array):
        return array.view(np.float64)
    return array.astype(np.float64, copy=False)


def error_norm(
    error: np.ndarray, y: np.ndarray, y_new: np.ndarray, rtol: float, atol: float
) -> float:
    """Scaled RMS of the error estimate over real and imaginary parts."""
    scale = atol + rtol * np.maximum(np.abs(_components(y)), np.abs(_components(y_new)))
    ratio = _components(error) / scale
    return float(np.sqrt(np.mean(ratio**2)))


def _all_finite(*arrays: np.ndarray) -> bool:
    return all(bool(np.all(np.isfinite(array))) for array in arrays)


# ═══════════════════════════════════════════════════════════════════════════
# Initial step
# ═══════════════════════════════════════════════════════════════════════════


class InitialStep(NamedTuple):
    dt: float
    degraded: bool = False


def estimate_initial_step(
    rhs: Rhs, f0: np.ndarray | SpectralField, config: SolverConfig, f0_dot: np.ndarray | None = None
) -> InitialStep:
    """Starting step from the norms of ``f0``, ``rhs(f0)`` and a trial derivative.

    The result lies in ``[dt_min, t_final]``; ``degraded`` is set when the
    derivative could not be evaluated and the minimal step was returned.
    """
    y0 = f0.coeffs if isinstance(f0, SpectralField) else np.asarray(f0)
    t_final = config.t_final
    dt_min = min(config.effective_dt_min, t_final)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            d_y0 = rhs(y0) if f0_dot is None else f0_dot
    except FloatingPointError:
        logger.warning("rhs of the initial state is not finite; starting from dt_min")
        return InitialStep(dt_min, True)
    if not _all_finite(d_y0):
        logger.warning("rhs of the initial state is not finite; starting from dt_min")
        return InitialStep(dt_min, True)
    if not np.any(d_y0):
        return InitialStep(t_final)

    scale = config.atol + config.rtol * np.abs(_components(y0))
    d0 = float(np.sqrt(np.mean((_components(y0) / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((_components(d_y0) / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_final)

    try:
        with np.errstate(over="ignore", invalid="ignore"):
            d_y1 = rhs(y0 + h0 * d_y0)
    except FloatingPointError:
        return InitialStep(max(dt_min, h0), True)
    if not _all_finite(d_y1):
        return InitialStep(max(dt_min, h0), True)
    d2 = float(np.sqrt(np.mean((_components(d_y1 - d_y0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)
    return InitialStep(min(max(min(100.0 * h0, h1), dt_min), t_final))


# ═══════════════════════════════════════════════════════════════════════════
# Drivers
# ═══════════════════════════════════════════════════════════════════════════


def _unwrap(f0: np.ndarray | SpectralField) -> np.ndarray:
    if isinstance(f0, SpectralField):
        return np.array(f0.coeffs, copy=True)
    return np.array(f0, copy=True)


def _wrap(template: State, y: np.ndarray) -> State:
    if isinstance(template, SpectralField):
        return template.with_coeffs(y)
    return y


def integrate(
    rhs: Rhs,
    f0: State,
    config: SolverConfig,
    observer: Observer | None = None,
) -> tuple[State, StopReason]:
    """Integrate ``y' = rhs(y)`` from ``t = 0`` to ``config.t_final``.

    Returns the last accepted state (same type as *f0*) and why the run
    ended.
    """
    y = _unwrap(f0)
    t_final = config.t_final
    dt_min = config.effective_dt_min
    samples = config.sample_times()
    next_sample = 1
    t = 0.0
    accepted = rejected = 0

    def stop(tag: str) -> tuple[State, StopReason]:
        logger.info(
            "integration stopped: %s at t=%.6g (%d accepted, %d rejected)",
            tag, t, accepted, rejected,
        )
        return _wrap(f0, y), StopReason(tag, t)  # type: ignore[arg-type]

    if observer is not None:
        observer(0.0, y, True)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = rhs(y)
    except FloatingPointError:
        return stop("non_finite")
    if not _all_finite(k1):
        return stop("non_finite")

    if config.dt_init is not None:
        dt = min(config.dt_init, t_final)
    else:
        dt = estimate_initial_step(rhs, y, config, k1).dt
    dt = max(dt, dt_min)
    err_prev = 1.0
    floor_hits = 0

    while True:
        if accepted + rejected >= config.max_steps:
            logger.warning("step budget of %d exhausted at t=%.6g", config.max_steps, t)
            return stop("step_budget")

        target = float(samples[next_sample])
        h = min(dt, target - t)
        landing = h >= target - t

        finite = True
        err = np.inf
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                y_new, error, k_last = dormand_prince_step(rhs, y, h, k1)
            finite = _all_finite(y_new, k_last)
            if finite:
                err = error_norm(error, y, y_new, config.rtol, config.atol)
                finite = bool(np.isfinite(err))
        except FloatingPointError:
            finite = False

        if finite and err <= 1.0:
            accepted += 1
            floor_hits = 0
            y, k1 = y_new, k_last
            t = target if landing else t + h
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err**-_ALPHA * err_prev**_BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            if landing:
                next_sample += 1
            if observer is not None:
                observer(t, y, landing)
            if landing and next_sample == len(samples):
                return stop("reached_t_final")
            dt = max(dt, h * factor) if landing else h * factor
            dt = max(dt, dt_min)
            continue

        rejected += 1
        if h <= dt_min * (1.0 + 1e-12):
            floor_hits += 1
            logger.warning(
                "step rejected at the minimum step %.3g (t=%.6g, err=%.3g)", h, t, err
            )
            if floor_hits >= _FLOOR_HITS or t + h == t:
                return stop("step_underflow" if finite else "non_finite")
        factor = MIN_FACTOR if not finite else max(MIN_FACTOR, SAFETY * err**-0.2)
        dt = max(h * factor, dt_min)


def fixed_step_integrate(rhs: Rhs, f0: State, dt: float, n_steps: int) -> State:
    """Take *n_steps* fifth-order steps of size *dt* without error control."""
    y = _unwrap(f0)
    k1 = None
    for _ in range(n_steps):
        y, _, k1 = dormand_prince_step(rhs, y, dt, k1)
    return _wrap(f0, y)


__all__ = [
    "DormandPrinceStep",
    "InitialStep",
    "Observer",
    "Rhs",
    "dormand_prince_step",
    "error_norm",
    "estimate_initial_step",
    "fixed_step_integrate",
    "integrate",
]
