"""Run directories: diagnostic CSV, snapshot CSVs, manifest and plot script.

Every floating-point value is written with 17 significant digits, so the
CSV files parse back to the exact stored doubles.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from arteria.cli_common import render_json
from arteria.config import spec_to_mapping
from arteria.grid import make_grid
from arteria.types import DIAGNOSTIC_COLUMNS, DiagnosticsRow, ExperimentSpec, RunRecord

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DIAGNOSTICS_FILE = "diagnostics.csv"
MANIFEST_FILE = "manifest.json"
SWEEP_FILE = "sweep.json"
FLOAT_FORMAT = "%.17g"


def _artifact_version() -> str:
    from arteria import __version__

    return __version__


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Structured summary of one run directory."""

    schema_version: int
    spec: dict[str, Any]
    artifact_version: str
    started: str
    finished: str
    stop: dict[str, Any]
    output_files: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    summary: dict[str, Any] | None = None
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunManifest:
        return cls(**data)


# ═══════════════════════════════════════════════════════════════════════════
# CSV
# ═══════════════════════════════════════════════════════════════════════════


def write_diagnostics_csv(rows: list[DiagnosticsRow], path: Path) -> None:
    """One line per sampled instant, columns in :data:`DIAGNOSTIC_COLUMNS` order."""
    table = np.array([row.as_tuple() for row in rows], dtype=float).reshape(
        -1, len(DIAGNOSTIC_COLUMNS)
    )
    np.savetxt(
        path, table, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(DIAGNOSTIC_COLUMNS),
        comments="",
    )


def read_diagnostics_csv(path: Path) -> np.ndarray:
    """Inverse of :func:`write_diagnostics_csv` as a ``(rows, columns)`` array."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_snapshot_csv(x: np.ndarray, values: np.ndarray, path: Path) -> None:
    np.savetxt(
        path, np.column_stack([x, values]), fmt=FLOAT_FORMAT, delimiter=",", header="x,f",
        comments="",
    )


def spec_echo(spec: ExperimentSpec) -> dict[str, Any]:
    """Effective settings plus the sweep axis, if any."""
    echo = spec_to_mapping(spec)
    if spec.sweep is not None:
        echo["sweep"] = {"axis": spec.sweep.axis, "values": list(spec.sweep.values)}
    return echo


def write_outputs(
    record: RunRecord,
    out_dir: str | Path,
    *,
    started: str | None = None,
    finished: str | None = None,
) -> RunManifest:
    """Write the CSV files and ``manifest.json`` for *record* into *out_dir*.

    Raises :class:`OSError` when the directory or a file cannot be written.
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    files = [DIAGNOSTICS_FILE]
    write_diagnostics_csv(record.rows, directory / DIAGNOSTICS_FILE)

    x = make_grid(record.spec.grid_n).nodes
    for index, (_, values) in enumerate(record.snapshots):
        name = f"snapshot_{index}.csv"
        write_snapshot_csv(x, values, directory / name)
        files.append(name)

    finished = finished or _now()
    manifest = RunManifest(
        schema_version=SCHEMA_VERSION,
        spec=spec_echo(record.spec),
        artifact_version=_artifact_version(),
        started=started or finished,
        finished=finished,
        stop=record.stop.to_dict(),
        output_files=files,
        wall_time=record.wall_time,
        summary=None if record.summary is None else record.summary.to_dict(),
        error=record.error,
    )
    files.append(MANIFEST_FILE)
    (directory / MANIFEST_FILE).write_text(render_json(manifest.to_dict()), encoding="utf-8")
    logger.info("wrote %d file(s) to %s", len(files), directory)
    return manifest


def read_manifest(path: str | Path) -> RunManifest:
    """Load ``manifest.json`` from a run directory or file path."""
    location = Path(path)
    if location.is_dir():
        location = location / MANIFEST_FILE
    return RunManifest.from_dict(json.loads(location.read_text(encoding="utf-8")))


def write_sweep_summary(
    spec: ExperimentSpec, entries: list[dict[str, Any]], out_dir: str | Path
) -> Path:
    path = Path(out_dir) / SWEEP_FILE
    payload = {
        "schema_version": SCHEMA_VERSION,
        "spec": spec_echo(spec),
        "artifact_version": _artifact_version(),
        "entries": entries,
    }
    path.write_text(render_json(payload), encoding="utf-8")
    return path


# ═══════════════════════════════════════════════════════════════════════════
# Plot script
# ═══════════════════════════════════════════════════════════════════════════


def plot_script(run_dir: str | Path) -> str:
    """A gnuplot script drawing the diagnostics and snapshots of *run_dir*."""
    manifest = read_manifest(run_dir)
    directory = Path(run_dir)
    column = {name: index + 1 for index, name in enumerate(DIAGNOSTIC_COLUMNS)}
    diagnostics = (directory / DIAGNOSTICS_FILE).as_posix()
    lines = [
        f"# {manifest.spec.get('label', 'run')}: stop {manifest.stop['tag']} "
        f"at t={manifest.stop['t_stop']:g}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 1200,900",
        f"set output '{(directory / 'diagnostics.png').as_posix()}'",
        "set multiplot layout 2,2",
        "set xlabel 't'",
    ]
    for name in ("l2", "inv_lip", "cum_integral", "e2"):
        lines.append(f"plot '{diagnostics}' using {column['t']}:{column[name]} with lines")
    lines += [
        "unset multiplot",
        f"set output '{(directory / 'snapshots.png').as_posix()}'",
        "set xlabel 'x'",
    ]
    snapshots = [name for name in manifest.output_files if name.startswith("snapshot_")]
    if snapshots:
        plots = ", ".join(
            f"'{(directory / name).as_posix()}' using 1:2 with lines" for name in snapshots
        )
        lines.append(f"plot {plots}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DIAGNOSTICS_FILE",
    "MANIFEST_FILE",
    "SCHEMA_VERSION",
    "SWEEP_FILE",
    "RunManifest",
    "plot_script",
    "read_diagnostics_csv",
    "read_manifest",
    "spec_echo",
    "write_diagnostics_csv",
    "write_outputs",
    "write_snapshot_csv",
    "write_sweep_summary",
]
