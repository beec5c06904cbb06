"""Shared CLI state, JSON rendering, and error handling for the arteria CLI.

With ``--json`` at the root level every command writes exactly one envelope
to stdout: ``{"ok": true, "command", "result", ...}`` on success or
``{"ok": false, "command", "error": {...}}`` on failure.
"""

from __future__ import annotations

import json
import math
import sys
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np
import typer

# ═══════════════════════════════════════════════════════════════════════════
# Exit codes (must match the documented CLI contract)
# ═══════════════════════════════════════════════════════════════════════════

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SELFTEST_FAILED = 2
EXIT_EARLY_STOP = 3
EXIT_FATAL = 4

# ═══════════════════════════════════════════════════════════════════════════
# Error codes
# ═══════════════════════════════════════════════════════════════════════════

USAGE_ERROR = "USAGE_ERROR"
CONFIG_INVALID = "CONFIG_INVALID"
SELFTEST_FAILED = "SELFTEST_FAILED"
EARLY_TERMINATION = "EARLY_TERMINATION"
SWEEP_ENTRY_FAILED = "SWEEP_ENTRY_FAILED"
IO_READ_FAILED = "IO_READ_FAILED"
IO_WRITE_FAILED = "IO_WRITE_FAILED"
INTERNAL_ERROR = "INTERNAL_ERROR"


# ═══════════════════════════════════════════════════════════════════════════
# CLI State
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(slots=True)
class CLIState:
    """Mutable CLI state stored in the Typer context."""

    json_output: bool = False
    debug: bool = False
    config_path: Path | None = None
    config_source: str = "default"


def cli_state_from_context(ctx: typer.Context) -> CLIState:
    """Retrieve or create CLIState from a Typer context."""
    state = ctx.obj
    if state is None:
        state = CLIState()
        ctx.obj = state
    return state


# ═══════════════════════════════════════════════════════════════════════════
# Deterministic JSON
# ═══════════════════════════════════════════════════════════════════════════


def _default_serializer(obj: Any) -> Any:
    """Serialize dataclasses, numpy scalars and arrays, and paths."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return asdict(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def _finite(value: Any) -> Any:
    """Replace non-finite floats by ``None``, written as JSON ``null``."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Mapping):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def render_json(payload: Any) -> str:
    """Render *payload* as a deterministic JSON string.

    Keys are sorted, UTF-8 characters are preserved, and the result ends
    with exactly one newline.
    """
    return (
        json.dumps(
            _finite(payload),
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
            allow_nan=False,
            default=_default_serializer,
        )
        + "\n"
    )


# ═══════════════════════════════════════════════════════════════════════════
# Command name derivation
# ═══════════════════════════════════════════════════════════════════════════


def command_name_from_context(ctx: typer.Context) -> str:
    """Derive a stable command name (``run``, ``config show``) from the context."""
    names: list[str] = []
    current: Any = ctx
    while current is not None:
        if current.parent is not None and current.info_name:
            names.append(current.info_name)
        current = current.parent
    return " ".join(reversed(names)) or "arteria"


# ═══════════════════════════════════════════════════════════════════════════
# Success envelope
# ═══════════════════════════════════════════════════════════════════════════


def emit_payload(
    ctx: typer.Context,
    payload: Any,
    *,
    human: str | None = None,
    result_type: str | None = None,
    warnings: Sequence[str] | None = None,
) -> None:
    """Emit a success envelope in JSON mode or human text otherwise."""
    state = cli_state_from_context(ctx)
    if state.json_output:
        envelope: dict[str, Any] = {
            "ok": True,
            "command": command_name_from_context(ctx),
            "result": payload,
        }
        if result_type is not None:
            envelope["result_type"] = result_type
        if warnings:
            envelope["warnings"] = list(warnings)
        sys.stdout.write(render_json(envelope))
    elif human is not None:
        sys.stdout.write(human)
        if human and not human.endswith("\n"):
            sys.stdout.write("\n")


# ═══════════════════════════════════════════════════════════════════════════
# Arteria CLI Error
# ═══════════════════════════════════════════════════════════════════════════


class ArteriaCLIError(Exception):
    """A typed CLI error with a stable code and exit code."""

    def __init__(
        self,
        message: str,
        *,
        code: str,
        exit_code: int,
        details: Mapping[str, object] | None = None,
        remediation: Sequence[str] | None = None,
    ) -> None:
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code
        self.details = dict(details) if details else {}
        self.remediation = list(remediation) if remediation else []

    def to_dict(self, command: str) -> dict[str, Any]:
        """Convert to the error envelope structure."""
        return {
            "ok": False,
            "command": command,
            "error": {
                "code": self.code,
                "message": str(self),
                "details": self.details,
                "remediation": self.remediation,
                "exit_code": self.exit_code,
            },
        }


def emit_error(error: ArteriaCLIError, *, json_output: bool, command: str = "arteria") -> None:
    """Emit an error envelope in JSON mode or a one-line message on stderr."""
    if json_output:
        sys.stdout.write(render_json(error.to_dict(command)))
    else:
        print(f"arteria: error: {error}", file=sys.stderr)


__all__ = [
    "CONFIG_INVALID",
    "EARLY_TERMINATION",
    "EXIT_CONFIG",
    "EXIT_EARLY_STOP",
    "EXIT_FATAL",
    "EXIT_OK",
    "EXIT_SELFTEST_FAILED",
    "INTERNAL_ERROR",
    "IO_READ_FAILED",
    "IO_WRITE_FAILED",
    "SELFTEST_FAILED",
    "SWEEP_ENTRY_FAILED",
    "USAGE_ERROR",
    "ArteriaCLIError",
    "CLIState",
    "cli_state_from_context",
    "command_name_from_context",
    "emit_error",
    "emit_payload",
    "render_json",
]
