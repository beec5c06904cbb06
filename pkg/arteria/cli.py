"""Command-line interface for the arteria package.

Uses Typer/Click for command registration and provides a root-level ``--json``
option for machine-readable output with stable success/error envelopes.

Exit codes:

* ``0`` - the run reached t_final, or the selftest passed.
* ``1`` - configuration or usage error.
* ``2`` - a selftest check failed.
* ``3`` - a run (or a sweep entry) stopped before t_final.
* ``4`` - I/O failure or internal error.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import click.exceptions
import typer

import arteria
from arteria.cli_common import (
    EARLY_TERMINATION,
    EXIT_CONFIG,
    EXIT_EARLY_STOP,
    EXIT_FATAL,
    EXIT_SELFTEST_FAILED,
    INTERNAL_ERROR,
    IO_READ_FAILED,
    IO_WRITE_FAILED,
    SELFTEST_FAILED,
    SWEEP_ENTRY_FAILED,
    USAGE_ERROR,
    ArteriaCLIError,
    CLIState,
    cli_state_from_context,
    emit_error,
    emit_payload,
    render_json,
)
from arteria.config import (
    PRESETS,
    ConfigError,
    atomic_save_config,
    load_raw_config,
    parse_config,
    resolve_config_path,
    spec_to_mapping,
    starter_config,
)
from arteria.experiments import DEFAULT_SWEEPS, run_experiment, run_sweep, sweep_summary
from arteria.output import plot_script, write_outputs, write_sweep_summary
from arteria.selftest import run_selftest
from arteria.types import SWEEP_AXES, ExperimentSpec, ParameterError, RunRecord, SweepSpec

logger = logging.getLogger(__name__)

# codes whose payload was already emitted; cli_main only sets the exit code
_REPORTED_CODES = (EARLY_TERMINATION, SELFTEST_FAILED, SWEEP_ENTRY_FAILED)

# typer may raise from its own bundled copy of click rather than the installed one
_USAGE_ERRORS = tuple(
    {click.exceptions.UsageError}
    | {cls for cls in typer.BadParameter.__mro__ if cls.__name__ == "UsageError"}
)
_ABORTS = tuple({click.exceptions.Abort, typer.Abort})

# ═══════════════════════════════════════════════════════════════════════════
# Typer application
# ═══════════════════════════════════════════════════════════════════════════

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Simulate the unidirectional viscoelastic blood-flow model with a Fourier pseudospectral solver.",
)
config_app = typer.Typer(help="Inspect and create the arteria run configuration file.")
app.add_typer(config_app, name="config")


def _configure_logging(verbose: int, debug: bool) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    if verbose > 1 or debug:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


# ═══════════════════════════════════════════════════════════════════════════
# Root callback
# ═══════════════════════════════════════════════════════════════════════════


@app.callback(invoke_without_command=True)
def root_callback(
    ctx: typer.Context,
    version: bool = typer.Option(False, "--version", is_eager=True, help="Show version and exit."),
    json_output: bool = typer.Option(False, "--json", is_eager=True, help="Emit JSON output."),
    debug: bool = typer.Option(False, "--debug", is_eager=True, help="Show tracebacks on error."),
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="Log progress (repeat for debug)."),
    config: Path | None = typer.Option(None, "--config", help="Path to an arteria config.yaml."),
) -> None:
    """Root callback that initializes CLIState."""
    _configure_logging(verbose, debug)
    config_path, config_source = resolve_config_path(config)
    ctx.obj = CLIState(
        json_output=json_output,
        debug=debug,
        config_path=config_path,
        config_source=config_source,
    )

    if version:
        if json_output:
            emit_payload(ctx, {"version": arteria.__version__}, result_type="version")
        else:
            typer.echo(f"arteria {arteria.__version__}")
        return

    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _config_error(exc: ConfigError | ParameterError) -> ArteriaCLIError:
    """Convert config errors to the CLI's stable error contract."""
    details = {"key": exc.key} if isinstance(exc, ParameterError) and exc.key else None
    return ArteriaCLIError(str(exc), code=exc.code, exit_code=EXIT_CONFIG, details=details)


def _load_spec(
    ctx: typer.Context,
    preset: str | None,
    overrides: dict[str, Any],
    defaults: dict[str, Any] | None = None,
) -> ExperimentSpec:
    """Defaults, preset, config file, *defaults* layer, then flags."""
    state = cli_state_from_context(ctx)
    try:
        return parse_config(
            state.config_path,
            {**(defaults or {}), **{k: v for k, v in overrides.items() if v is not None}},
            preset=preset,
            required=state.config_source != "default",
        )
    except (ConfigError, ParameterError) as exc:
        raise _config_error(exc) from exc


# ═══════════════════════════════════════════════════════════════════════════
# Shared run options
# ═══════════════════════════════════════════════════════════════════════════

PRESET_OPTION = typer.Option(None, "--preset", help=f"Start from a preset: {', '.join(PRESETS)}.")
NU_OPTION = typer.Option(None, "--nu", help="Viscoelastic coefficient (0 = purely elastic).")
EPS_OPTION = typer.Option(None, "--eps", help="Asymptotic parameter epsilon.")
KAPPA_OPTION = typer.Option(None, "--kappa", help="Friction coefficient (must be positive).")
BETA_OPTION = typer.Option(None, "--beta", help="Elasticity coefficient.")
AMP_OPTION = typer.Option(None, "--amp", help="Amplitude A of the sech^2 initial profile.")
N_OPTION = typer.Option(None, "--n", help="Number of grid points (even).")
T_FINAL_OPTION = typer.Option(None, "--t-final", help="Final time.")
RTOL_OPTION = typer.Option(None, "--rtol", help="Relative tolerance.")
ATOL_OPTION = typer.Option(None, "--atol", help="Absolute tolerance.")
DT_MIN_OPTION = typer.Option(None, "--dt-min", help="Smallest admissible step.")
MAX_STEPS_OPTION = typer.Option(None, "--max-steps", help="Step budget.")
SAMPLE_DT_OPTION = typer.Option(None, "--sample-dt", help="Diagnostic sampling interval.")
S_INDEX_OPTION = typer.Option(None, "--s-index", help="Sobolev index of the monitored energy.")
DEALIAS_OPTION = typer.Option(None, "--dealias", help="2/3-rule dealiasing: on or off.")
MOLLIFY_OPTION = typer.Option(None, "--mollify", help="Mollifier width (variant mollified).")
VARIANT_OPTION = typer.Option(None, "--variant", help="Right-hand side: general, bbm or mollified.")
SNAPSHOTS_OPTION = typer.Option(None, "--snapshots", help="Number of profile snapshots.")
LABEL_OPTION = typer.Option(None, "--label", help="Run label.")


def _overrides(**flags: Any) -> dict[str, Any]:
    """Map flag values to config keys."""
    return {key: value for key, value in flags.items() if value is not None}


def _stop_line(record: RunRecord) -> str:
    stop = record.stop
    line = f"stop: {stop.tag} at t={stop.t_stop:.6g} after {record.wall_time:.2f}s"
    if record.error:
        line += f" ({record.error})"
    return line


# ═══════════════════════════════════════════════════════════════════════════
# run
# ═══════════════════════════════════════════════════════════════════════════


@app.command("run")
def run_command(
    ctx: typer.Context,
    preset: str | None = PRESET_OPTION,
    nu: float | None = NU_OPTION,
    eps: float | None = EPS_OPTION,
    kappa: float | None = KAPPA_OPTION,
    beta: float | None = BETA_OPTION,
    amp: float | None = AMP_OPTION,
    n: int | None = N_OPTION,
    t_final: float | None = T_FINAL_OPTION,
    rtol: float | None = RTOL_OPTION,
    atol: float | None = ATOL_OPTION,
    dt_min: float | None = DT_MIN_OPTION,
    max_steps: int | None = MAX_STEPS_OPTION,
    sample_dt: float | None = SAMPLE_DT_OPTION,
    s_index: float | None = S_INDEX_OPTION,
    dealias: str | None = DEALIAS_OPTION,
    mollify: float | None = MOLLIFY_OPTION,
    variant: str | None = VARIANT_OPTION,
    snapshots: int | None = SNAPSHOTS_OPTION,
    label: str | None = LABEL_OPTION,
    out: Path | None = typer.Option(None, "--out", help="Output directory (default: ./<label>)."),
) -> None:
    """Integrate one experiment and write its diagnostics, snapshots and manifest."""
    spec = _load_spec(
        ctx,
        preset,
        _overrides(
            nu=nu, eps=eps, kappa=kappa, beta=beta, amp=amp, n=n, t_final=t_final, rtol=rtol,
            atol=atol, dt_min=dt_min, max_steps=max_steps, sample_dt=sample_dt, s_index=s_index,
            dealias=dealias, mollify=mollify, variant=variant, snapshots=snapshots, label=label,
        ),
    )
    out_dir = out if out is not None else Path(spec.label)
    started = _now()
    record = run_experiment(spec)
    try:
        manifest = write_outputs(record, out_dir, started=started, finished=_now())
    except OSError as exc:
        raise ArteriaCLIError(
            f"Unable to write outputs: {exc}", code=IO_WRITE_FAILED, exit_code=EXIT_FATAL
        ) from exc

    payload = {
        "out_dir": str(out_dir),
        "stop": record.stop.to_dict(),
        "rows": len(record.rows),
        "wall_time": record.wall_time,
        "summary": None if record.summary is None else record.summary.to_dict(),
        "output_files": manifest.output_files,
    }
    human = f"{spec.label}: {len(record.rows)} samples written to {out_dir}\n{_stop_line(record)}"
    emit_payload(ctx, payload, human=human, result_type="run_summary")
    if not record.stop.completed:
        raise ArteriaCLIError(
            f"run stopped early: {record.stop.tag} at t={record.stop.t_stop:.6g}",
            code=EARLY_TERMINATION,
            exit_code=EXIT_EARLY_STOP,
        )


# ═══════════════════════════════════════════════════════════════════════════
# sweep
# ═══════════════════════════════════════════════════════════════════════════


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ArteriaCLIError(
            f"--values must be a comma-separated list of numbers: {text!r}",
            code=USAGE_ERROR,
            exit_code=EXIT_CONFIG,
        ) from exc
    if not values:
        raise ArteriaCLIError("--values must not be empty", code=USAGE_ERROR, exit_code=EXIT_CONFIG)
    return values


@app.command("sweep")
def sweep_command(
    ctx: typer.Context,
    axis: str = typer.Option(..., "--axis", help=f"Swept parameter: {', '.join(SWEEP_AXES)}."),
    values: str | None = typer.Option(
        None, "--values", help="Comma-separated values (default: the standard matrix for the axis)."
    ),
    preset: str | None = PRESET_OPTION,
    nu: float | None = NU_OPTION,
    eps: float | None = EPS_OPTION,
    kappa: float | None = KAPPA_OPTION,
    beta: float | None = BETA_OPTION,
    amp: float | None = AMP_OPTION,
    n: int | None = N_OPTION,
    t_final: float | None = T_FINAL_OPTION,
    rtol: float | None = RTOL_OPTION,
    atol: float | None = ATOL_OPTION,
    dt_min: float | None = DT_MIN_OPTION,
    max_steps: int | None = MAX_STEPS_OPTION,
    sample_dt: float | None = SAMPLE_DT_OPTION,
    s_index: float | None = S_INDEX_OPTION,
    dealias: str | None = DEALIAS_OPTION,
    mollify: float | None = MOLLIFY_OPTION,
    variant: str | None = VARIANT_OPTION,
    snapshots: int | None = SNAPSHOTS_OPTION,
    label: str | None = LABEL_OPTION,
    out: Path | None = typer.Option(None, "--out", help="Output directory (default: ./<label>)."),
) -> None:
    """Run one experiment per value of a parameter and summarize them in sweep.json."""
    if axis not in SWEEP_AXES:
        raise ArteriaCLIError(
            f"--axis must be one of {', '.join(SWEEP_AXES)}", code=USAGE_ERROR, exit_code=EXIT_CONFIG
        )
    fixed: dict[str, Any] = {}
    if values is None:
        sweep_values, settings = DEFAULT_SWEEPS[axis]  # type: ignore[index]
        fixed = {("amp" if key == "amplitude" else key): value for key, value in settings.items()}
    else:
        sweep_values = _parse_values(values)
    base = _load_spec(
        ctx,
        preset,
        _overrides(
            nu=nu, eps=eps, kappa=kappa, beta=beta, amp=amp, n=n, t_final=t_final, rtol=rtol,
            atol=atol, dt_min=dt_min, max_steps=max_steps, sample_dt=sample_dt, s_index=s_index,
            dealias=dealias, mollify=mollify, variant=variant, snapshots=snapshots, label=label,
        ),
        defaults=fixed,
    )
    try:
        spec = replace(base, sweep=SweepSpec(axis, sweep_values))  # type: ignore[arg-type]
        records = run_sweep(spec)
    except ParameterError as exc:
        raise _config_error(exc) from exc

    out_dir = out if out is not None else Path(spec.label)
    entries = sweep_summary(spec, records)
    try:
        for record, entry in zip(records, entries):
            manifest = write_outputs(record, out_dir / record.spec.label)
            entry["out_dir"] = str(out_dir / record.spec.label)
            entry["output_files"] = manifest.output_files
        write_sweep_summary(spec, entries, out_dir)
    except OSError as exc:
        raise ArteriaCLIError(
            f"Unable to write outputs: {exc}", code=IO_WRITE_FAILED, exit_code=EXIT_FATAL
        ) from exc

    lines = [f"sweep over {axis}: {len(records)} run(s) in {out_dir}"]
    lines += [f"  {value:g}: {_stop_line(record)}" for value, record in zip(sweep_values, records)]
    emit_payload(
        ctx, {"axis": axis, "out_dir": str(out_dir), "entries": entries},
        human="\n".join(lines), result_type="sweep_summary",
    )
    failed = [record.spec.label for record in records if record.stop.tag == "failed"]
    if failed:
        raise ArteriaCLIError(
            f"sweep entries failed: {', '.join(failed)}", code=SWEEP_ENTRY_FAILED, exit_code=EXIT_FATAL
        )
    early = [record.spec.label for record in records if not record.stop.completed]
    if early:
        raise ArteriaCLIError(
            f"sweep entries stopped early: {', '.join(early)}",
            code=EARLY_TERMINATION,
            exit_code=EXIT_EARLY_STOP,
        )


# ═══════════════════════════════════════════════════════════════════════════
# selftest / plot-script / version
# ═══════════════════════════════════════════════════════════════════════════


@app.command("selftest")
def selftest_command(
    ctx: typer.Context,
    nu: float = typer.Option(1.0, "--nu", help="Viscoelastic coefficient of the checks."),
    kappa: float = typer.Option(1.0, "--kappa", help="Friction coefficient of the checks."),
    n: int = typer.Option(64, "--n", help="Grid size of the operator checks."),
) -> None:
    """Check operator identities, oracle agreement, mean conservation and BBM decay."""
    try:
        report = run_selftest(nu=nu, kappa=kappa, n=n)
    except ValueError as exc:
        code = getattr(exc, "code", USAGE_ERROR)
        raise ArteriaCLIError(str(exc), code=code, exit_code=EXIT_CONFIG) from exc
    emit_payload(ctx, report.to_dict(), human=report.render(), result_type="selftest")
    if not report.passed:
        raise ArteriaCLIError(
            f"selftest failed: {', '.join(report.failures)}",
            code=SELFTEST_FAILED,
            exit_code=EXIT_SELFTEST_FAILED,
        )


@app.command("plot-script")
def plot_script_command(
    ctx: typer.Context,
    run_dir: Path = typer.Argument(..., help="Run directory written by `arteria run`."),
    output: Path | None = typer.Option(None, "-o", "--output", help="Write the script here."),
) -> None:
    """Emit a gnuplot script that plots the CSV files of a run directory."""
    try:
        script = plot_script(run_dir)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ArteriaCLIError(
            f"Unable to read run directory {run_dir}: {exc}",
            code=IO_READ_FAILED,
            exit_code=EXIT_FATAL,
        ) from exc
    if output is not None:
        try:
            output.write_text(script, encoding="utf-8")
        except OSError as exc:
            raise ArteriaCLIError(
                f"Unable to write {output}: {exc}", code=IO_WRITE_FAILED, exit_code=EXIT_FATAL
            ) from exc
        emit_payload(ctx, {"path": str(output)}, human=f"Wrote {output}", result_type="plot_script")
    else:
        emit_payload(ctx, {"script": script}, human=script, result_type="plot_script")


@app.command("version")
def version_command(ctx: typer.Context) -> None:
    """Print the arteria version."""
    emit_payload(
        ctx,
        {"version": arteria.__version__},
        result_type="version",
        human=f"arteria {arteria.__version__}",
    )


# ═══════════════════════════════════════════════════════════════════════════
# config
# ═══════════════════════════════════════════════════════════════════════════


def _config_target(ctx: typer.Context) -> tuple[Path, str]:
    """Return the root-resolved config path and source."""
    state = cli_state_from_context(ctx)
    if state.config_path is not None:
        return state.config_path, state.config_source
    return resolve_config_path()


def _config_result(path: Path, source: str, **values: Any) -> dict[str, Any]:
    return {"path": str(path), "source": source, **values}


@config_app.command("path")
def config_path_command(ctx: typer.Context) -> None:
    """Print the effective configuration path without creating it."""
    path, source = _config_target(ctx)
    emit_payload(
        ctx, _config_result(path, source, exists=path.exists()), result_type="config_path",
        human=str(path),
    )


@config_app.command("init")
def config_init_command(
    ctx: typer.Context,
    force: bool = typer.Option(False, "--force", help="Replace an existing config."),
) -> None:
    """Write the default settings to the config path atomically."""
    path, source = _config_target(ctx)
    if path.exists() and not force:
        raise ArteriaCLIError(
            f"Config already exists: {path}", code="config.exists", exit_code=EXIT_CONFIG
        )
    try:
        atomic_save_config(path, starter_config())
    except ConfigError as exc:
        raise ArteriaCLIError(str(exc), code=exc.code, exit_code=EXIT_FATAL) from exc
    emit_payload(
        ctx, _config_result(path, source, created=True), result_type="config_init",
        human=f"Created {path}",
    )


@config_app.command("show")
def config_show_command(
    ctx: typer.Context,
    effective: bool = typer.Option(False, "--effective", help="Merge in defaults and validate."),
) -> None:
    """Show the config file as written, or the effective settings."""
    path, source = _config_target(ctx)
    try:
        if effective:
            values = spec_to_mapping(parse_config(path, required=source != "default"))
        else:
            values = load_raw_config(path)
    except ConfigError as exc:
        raise _config_error(exc) from exc
    emit_payload(
        ctx, _config_result(path, source, exists=path.exists(), config=values),
        result_type="config", human=render_json(values),
    )


# ═══════════════════════════════════════════════════════════════════════════
# CLI entry points
# ═══════════════════════════════════════════════════════════════════════════


def cli_main(argv: list[str] | None = None) -> None:
    """Main CLI entry point with error handling.

    Typed errors map to their exit codes, Click usage errors to ``1`` and
    anything unexpected to ``4``; under ``--json`` each becomes an error
    envelope on stdout.
    """
    args = sys.argv[1:] if argv is None else argv
    json_requested = "--json" in args
    debug = "--debug" in args

    def report(error: ArteriaCLIError) -> None:
        emit_error(error, json_output=json_requested)

    try:
        result = app(standalone_mode=False, args=argv)
        if result is not None and result != 0:
            raise SystemExit(result)
    except ArteriaCLIError as exc:
        if exc.code in _REPORTED_CODES:
            if not json_requested:
                print(f"arteria: {exc}", file=sys.stderr)
        else:
            report(exc)
        raise SystemExit(exc.exit_code) from exc
    except (ConfigError, ParameterError) as exc:
        report(_config_error(exc))
        raise SystemExit(EXIT_CONFIG) from exc
    except _USAGE_ERRORS as exc:
        if json_requested:
            report(ArteriaCLIError(str(exc), code=USAGE_ERROR, exit_code=EXIT_CONFIG))
        else:
            exc.show()
        raise SystemExit(EXIT_CONFIG) from exc
    except _ABORTS as exc:
        raise SystemExit(EXIT_FATAL) from exc
    except Exception as exc:
        if debug:
            logger.exception("unhandled error")
        report(ArteriaCLIError(str(exc), code=INTERNAL_ERROR, exit_code=EXIT_FATAL))
        raise SystemExit(EXIT_FATAL) from exc


def main(argv: list[str] | None = None) -> int:
    """Compatibility wrapper that returns an integer exit code."""
    try:
        cli_main(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
