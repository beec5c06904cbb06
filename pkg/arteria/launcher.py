"""Console entry point for ``arteria``.

The solver needs numpy for every transform and typer for the command
surface.  Both are imported here before ``arteria.cli`` so a missing or
broken install ends with exit code 4 (the CLI's fatal code) and, under
``--json``, a single ``INTERNAL_ERROR`` envelope on stdout instead of a
traceback.
"""

from __future__ import annotations

import json
import sys
from importlib import import_module

# mirrors arteria.cli_common.EXIT_FATAL, which cannot be imported without typer
EXIT_FATAL = 4
REQUIRED_MODULES = ("numpy", "typer")


def _load_failure(exc: Exception) -> dict[str, object]:
    return {
        "ok": False,
        "command": "arteria",
        "error": {
            "code": "INTERNAL_ERROR",
            "message": f"could not load the CLI: {exc}",
            "details": {"missing": getattr(exc, "name", None)},
            "remediation": "reinstall arteria with its dependencies: pip install arteria",
            "exit_code": EXIT_FATAL,
        },
    }


def main(argv: list[str] | None = None) -> None:
    """Run the CLI, turning a failed import of its stack into exit code 4."""
    args = sys.argv[1:] if argv is None else argv
    try:
        for name in REQUIRED_MODULES:
            import_module(name)
        from arteria.cli import cli_main
    except Exception as exc:
        if "--json" in args:
            sys.stdout.write(json.dumps(_load_failure(exc), indent=2, sort_keys=True) + "\n")
        else:
            print(f"arteria: fatal: could not load the CLI: {exc}", file=sys.stderr)
        if "--debug" in args:
            import traceback

            traceback.print_exc(file=sys.stderr)
        raise SystemExit(EXIT_FATAL) from exc

    cli_main(argv)


if __name__ == "__main__":
    main()
