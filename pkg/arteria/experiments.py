"""Single runs and parameter sweeps of the evolution from sech² initial data."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from arteria.diagnostics import DiagnosticsTracker, termination_summary
from arteria.grid import GridSpec, SpectralField, make_grid, to_physical, to_spectral
from arteria.integrator import integrate
from arteria.model import make_rhs
from arteria.multipliers import build_table
from arteria.types import (
    ExperimentSpec,
    ParameterError,
    RunRecord,
    StopReason,
    SweepAxis,
    SweepSpec,
)

logger = logging.getLogger(__name__)

THREADS_ENV = "ARTERIA_THREADS"

# axis -> (values, fixed settings of the other parameters)
DEFAULT_SWEEPS: dict[SweepAxis, tuple[tuple[float, ...], dict[str, float]]] = {
    "nu": ((0.0, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0), {"amplitude": 0.1}),
    "amplitude": ((0.5, 1.0, 5.0, 10.0, 20.0), {"nu": 1.0}),
    "beta": ((2.0, 0.0, -1.0), {"nu": 0.0, "amplitude": 0.1}),
}


def build_initial_data(amplitude: float, grid: GridSpec) -> SpectralField:
    """``A sech²(x − π)`` at the nodes of *grid*, minus its discrete mean."""
    values = amplitude / np.cosh(grid.nodes - np.pi) ** 2
    return to_spectral(values - values.mean(), grid)


def snapshot_indices(n_samples: int, count: int) -> set[int]:
    """Indices of ``count`` evenly spaced samples out of ``0..n_samples``."""
    return set(np.round(np.linspace(0, n_samples, count)).astype(int).tolist())


def run_experiment(spec: ExperimentSpec) -> RunRecord:
    """Integrate one experiment and collect its diagnostics and snapshots.

    Snapshots are taken at evenly spaced sampling instants; a run that stops
    early also keeps its last accepted state.
    """
    started = time.perf_counter()
    grid = make_grid(spec.grid_n)
    table = build_table(spec.params, grid, spec.sobolev_index)
    rhs = make_rhs(spec.variant, spec.params, table, dealias=spec.dealias)
    f0 = build_initial_data(spec.amplitude, grid)

    tracker = DiagnosticsTracker(table, spec.params)
    wanted = snapshot_indices(len(spec.solver.sample_times()) - 1, spec.snapshots)
    snapshots: list[tuple[float, np.ndarray]] = []
    sample_index = 0

    def observe(t: float, y: np.ndarray, sample: bool) -> None:
        nonlocal sample_index
        tracker(t, y, sample)
        if sample:
            if sample_index in wanted:
                snapshots.append((t, to_physical(SpectralField(grid, y))))
            sample_index += 1

    logger.info(
        "run %s: %s, A=%g, n=%d, variant=%s",
        spec.label, spec.params, spec.amplitude, spec.grid_n, spec.variant.tag,
    )
    final, stop = integrate(rhs, f0, spec.solver, observe)
    tracker.finish(stop.t_stop, final.coeffs)
    if not snapshots or snapshots[-1][0] != stop.t_stop:
        snapshots.append((stop.t_stop, to_physical(final)))

    return RunRecord(
        spec=spec,
        rows=tracker.rows,
        snapshots=snapshots,
        stop=stop,
        wall_time=time.perf_counter() - started,
        summary=termination_summary(tracker.rows),
    )


# ═══════════════════════════════════════════════════════════════════════════
# Sweeps
# ═══════════════════════════════════════════════════════════════════════════


def default_sweep(axis: SweepAxis, base: ExperimentSpec | None = None) -> ExperimentSpec:
    """*base* with the standard value matrix for *axis* and its fixed settings."""
    base = base or ExperimentSpec()
    values, fixed = DEFAULT_SWEEPS[axis]
    spec = base
    for key, value in fixed.items():
        spec = _with_value(spec, key, value)
    return replace(spec, sweep=SweepSpec(axis, values))


def _with_value(spec: ExperimentSpec, axis: str, value: float) -> ExperimentSpec:
    if axis == "amplitude":
        return replace(spec, amplitude=value)
    return replace(spec, params=replace(spec.params, **{axis: value}))


def sweep_entry(spec: ExperimentSpec, value: float) -> ExperimentSpec:
    """The single-run spec for one value of the sweep axis."""
    if spec.sweep is None:
        raise ParameterError("spec has no sweep", code="params.sweep_missing", key="sweep")
    entry = _with_value(spec, spec.sweep.axis, value)
    return replace(entry, sweep=None, label=_entry_label(spec, value))


def _entry_label(spec: ExperimentSpec, value: float) -> str:
    return f"{spec.label}-{spec.sweep.axis}-{value:g}"  # type: ignore[union-attr]


def _run_entry(job: tuple[ExperimentSpec, float]) -> RunRecord:
    spec, value = job
    try:
        return run_experiment(sweep_entry(spec, value))
    except Exception as exc:  # noqa: BLE001
        logger.error("sweep entry %s=%g failed: %s", spec.sweep.axis, value, exc)  # type: ignore[union-attr]
        return RunRecord(
            spec=replace(spec, sweep=None, label=_entry_label(spec, value)),
            stop=StopReason("failed", 0.0),
            error=str(exc),
        )


def resolve_workers(count: int, env: dict[str, str] | None = None) -> int:
    """Worker processes for *count* entries, capped by ``ARTERIA_THREADS``."""
    env = os.environ if env is None else env
    limit = os.cpu_count() or 1
    raw = env.get(THREADS_ENV, "").strip()
    if raw:
        try:
            limit = int(raw)
        except ValueError:
            raise ParameterError(
                f"{THREADS_ENV} must be a positive integer, got {raw!r}",
                code="params.threads_invalid",
                key=THREADS_ENV,
            ) from None
        if limit < 1:
            raise ParameterError(
                f"{THREADS_ENV} must be a positive integer, got {raw!r}",
                code="params.threads_invalid",
                key=THREADS_ENV,
            )
    return max(1, min(count, limit))


def run_sweep(spec: ExperimentSpec, workers: int | None = None) -> list[RunRecord]:
    """One record per sweep value, in the order the values were given.

    Entries run in separate processes when more than one worker is
    available; a failing entry is recorded with stop tag ``failed``.
    """
    if spec.sweep is None:
        raise ParameterError("spec has no sweep", code="params.sweep_missing", key="sweep")
    jobs = [(spec, value) for value in spec.sweep.values]
    workers = resolve_workers(len(jobs)) if workers is None else max(1, workers)
    logger.info("sweep over %s with %d value(s), %d worker(s)", spec.sweep.axis, len(jobs), workers)
    if workers == 1:
        return [_run_entry(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run_entry, jobs))


def sweep_summary(spec: ExperimentSpec, records: list[RunRecord]) -> list[dict[str, object]]:
    """Per value: stop tag, stop time, final ``‖f‖_{L²}`` and final lip."""
    if spec.sweep is None:
        raise ParameterError("spec has no sweep", code="params.sweep_missing", key="sweep")
    entries: list[dict[str, object]] = []
    for value, record in zip(spec.sweep.values, records):
        last = record.rows[-1] if record.rows else None
        entries.append(
            {
                "value": value,
                "label": record.spec.label,
                "stop": record.stop.to_dict(),
                "final_l2": None if last is None else last.l2,
                "final_lip": None if last is None else last.lip,
                "error": record.error,
            }
        )
    return entries


__all__ = [
    "DEFAULT_SWEEPS",
    "THREADS_ENV",
    "build_initial_data",
    "default_sweep",
    "resolve_workers",
    "run_experiment",
    "run_sweep",
    "snapshot_indices",
    "sweep_entry",
    "sweep_summary",
]
