"""Tests for the arteria command-line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest

from arteria.cli import main
from arteria import launcher
from arteria.cli_common import EXIT_FATAL, render_json
from arteria.selftest import CheckResult, SelftestReport

FAST = ["--n", "32", "--t-final", "0.2", "--sample-dt", "0.05"]


def run(argv: list[str]) -> int:
    return main(argv)


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch, tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("", encoding="utf-8")
    monkeypatch.setenv("ARTERIA_CONFIG", str(path))
    monkeypatch.setenv("ARTERIA_THREADS", "1")
    return path


# ── version ──────────────────────────────────────────────────────────────


def test_version_subcommand(capsys):
    assert run(["version"]) == 0
    assert "arteria " in capsys.readouterr().out


def test_version_flag_exits_zero(capsys):
    assert run(["--version"]) == 0
    assert "arteria " in capsys.readouterr().out


def test_python_m_arteria_version():
    """`python -m arteria --version` works via the __main__ entry."""
    result = subprocess.run(
        [sys.executable, "-m", "arteria", "--version"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0
    assert "arteria " in result.stdout


# ── run ──────────────────────────────────────────────────────────────────


def test_run_writes_a_run_directory(tmp_path, capsys):
    out = tmp_path / "run"
    assert run(["run", *FAST, "--out", str(out)]) == 0
    assert "stop: reached_t_final at t=0.2" in capsys.readouterr().out
    assert (out / "diagnostics.csv").exists()
    assert (out / "manifest.json").exists()


def test_run_json_envelope(tmp_path, capsys):
    code = run(["--json", "run", *FAST, "--amp", "1", "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["command"] == "run"
    assert payload["result_type"] == "run_summary"
    assert payload["result"]["stop"] == {"tag": "reached_t_final", "t_stop": 0.2}
    assert payload["result"]["rows"] == 5


def test_run_early_stop_exits_three(tmp_path, capsys):
    code = run(["--json", "run", *FAST, "--max-steps", "2", "--out", str(tmp_path)])
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["result"]["stop"]["tag"] == "step_budget"


def test_run_config_error_exits_one(tmp_path, capsys):
    code = run(["--json", "run", "--kappa", "0", "--out", str(tmp_path)])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False
    assert payload["error"]["code"] == "config.kappa_unsupported"
    assert payload["error"]["exit_code"] == 1


def test_run_reads_the_config_file(isolated_config, tmp_path, capsys):
    isolated_config.write_text("label: from-file\nn: 32\nt_final: 0.1\n", encoding="utf-8")
    assert run(["--json", "run", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["spec"]["label"] == "from-file"


def test_missing_explicit_config_is_an_error(tmp_path, capsys):
    code = run(["--config", str(tmp_path / "nope.yaml"), "run", *FAST])
    assert code == 1
    assert "Config file not found" in capsys.readouterr().err


def test_unknown_option_is_a_usage_error(capsys):
    assert run(["run", "--frobnicate"]) == 1


def test_unknown_option_reports_a_usage_envelope(capsys):
    assert run(["--json", "run", "--frobnicate"]) == 1
    error = json.loads(capsys.readouterr().out)["error"]
    assert error["code"] == "USAGE_ERROR"
    assert error["exit_code"] == 1
    assert "--frobnicate" in error["message"]


def test_unwritable_output_exits_four(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    code = run(["--json", "run", *FAST, "--out", str(blocker / "run")])
    assert code == 4
    assert json.loads(capsys.readouterr().out)["error"]["code"] == "IO_WRITE_FAILED"


def test_internal_error_exits_four(monkeypatch, tmp_path, capsys):
    def explode(spec):
        raise RuntimeError("kaboom")

    monkeypatch.setattr("arteria.cli.run_experiment", explode)
    code = run(["--json", "run", *FAST, "--out", str(tmp_path)])
    assert code == 4
    error = json.loads(capsys.readouterr().out)["error"]
    assert error["code"] == "INTERNAL_ERROR"
    assert "kaboom" in error["message"]


# ── sweep ────────────────────────────────────────────────────────────────


def test_sweep_writes_one_directory_per_value(tmp_path, capsys):
    code = run(
        ["sweep", "--axis", "amplitude", "--values", "0.1,0.2", *FAST, "--label", "amp",
         "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "amp-amplitude-0.1" / "manifest.json").exists()
    assert (tmp_path / "amp-amplitude-0.2" / "diagnostics.csv").exists()
    summary = json.loads((tmp_path / "sweep.json").read_text(encoding="utf-8"))
    assert [entry["value"] for entry in summary["entries"]] == [0.1, 0.2]


def test_sweep_failed_entry_exits_four(tmp_path, capsys):
    code = run(
        ["--json", "sweep", "--axis", "nu", "--values", "0,0.5", "--variant", "bbm", "--nu", "0",
         *FAST, "--out", str(tmp_path)]
    )
    assert code == 4
    payload = json.loads(capsys.readouterr().out)
    tags = [entry["stop"]["tag"] for entry in payload["result"]["entries"]]
    assert tags == ["reached_t_final", "failed"]


def test_sweep_rejects_bad_axis_and_values(capsys):
    assert run(["sweep", "--axis", "eps"]) == 1
    assert run(["sweep", "--axis", "nu", "--values", "a,b"]) == 1


# ── selftest ─────────────────────────────────────────────────────────────


def test_selftest_failure_exits_two(monkeypatch, capsys):
    report = SelftestReport([CheckResult("helmholtz_identity", "fail", "max residual 1e-3")])
    monkeypatch.setattr("arteria.cli.run_selftest", lambda **kwargs: report)
    assert run(["selftest"]) == 2
    captured = capsys.readouterr()
    assert "FAILED: helmholtz_identity" in captured.out
    assert "selftest failed" in captured.err


def test_selftest_json(monkeypatch, capsys):
    report = SelftestReport([CheckResult("s_symbol_modulus", "pass", "max gap 0")])
    monkeypatch.setattr("arteria.cli.run_selftest", lambda **kwargs: report)
    assert run(["--json", "selftest", "--nu", "0.5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["result_type"] == "selftest"
    assert payload["result"]["passed"] is True


# ── plot-script ──────────────────────────────────────────────────────────


def test_plot_script_for_a_run(tmp_path, capsys):
    out = tmp_path / "run"
    assert run(["run", *FAST, "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["plot-script", str(out)]) == 0
    assert "set multiplot" in capsys.readouterr().out
    target = tmp_path / "plot.gp"
    assert run(["plot-script", str(out), "-o", str(target)]) == 0
    assert target.read_text(encoding="utf-8").startswith("# run:")


def test_plot_script_missing_run_exits_four(tmp_path, capsys):
    assert run(["plot-script", str(tmp_path / "missing")]) == 4


# ── config ───────────────────────────────────────────────────────────────


def test_config_path_init_and_show(tmp_path, capsys):
    path = tmp_path / "fresh" / "config.yaml"
    assert run(["--json", "--config", str(path), "config", "path"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["exists"] is False

    assert run(["--config", str(path), "config", "init"]) == 0
    assert path.exists()
    capsys.readouterr()
    assert run(["--config", str(path), "config", "init"]) == 1
    assert run(["--config", str(path), "config", "init", "--force"]) == 0
    capsys.readouterr()

    assert run(["--json", "--config", str(path), "config", "show", "--effective"]) == 0
    shown = json.loads(capsys.readouterr().out)["result"]["config"]
    assert shown["n"] == 1024
    assert shown["variant"] == "general"


def test_non_finite_values_render_as_null():
    text = render_json({"l2": float("nan"), "rows": [1.0, float("inf")], "nested": {"lip": -np.inf}})
    assert json.loads(text) == {"l2": None, "nested": {"lip": None}, "rows": [1.0, None]}
    assert text.endswith("}\n")


def test_launcher_reports_a_missing_dependency(monkeypatch, capsys):
    def missing(name):
        raise ModuleNotFoundError(f"No module named '{name}'", name=name)

    monkeypatch.setattr(launcher, "import_module", missing)
    with pytest.raises(SystemExit) as exc:
        launcher.main(["--json", "selftest"])
    assert exc.value.code == launcher.EXIT_FATAL == EXIT_FATAL
    error = json.loads(capsys.readouterr().out)["error"]
    assert error["code"] == "INTERNAL_ERROR"
    assert error["details"] == {"missing": "numpy"}

    with pytest.raises(SystemExit):
        launcher.main(["selftest"])
    assert "could not load the CLI" in capsys.readouterr().err
