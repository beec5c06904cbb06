"""Release gate: operator identities, oracle agreement and conservation checks."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from arteria.diagnostics import mean_drift, nonincreasing
from arteria.experiments import run_experiment
from arteria.grid import SpectralField, make_grid, to_spectral
from arteria.integrator import integrate
from arteria.model import evaluate, make_rhs, rhs_general
from arteria.multipliers import MultiplierTable, build_table, check_helmholtz_identity
from arteria.oracle import linear_rate, real_rate_closed_form, rhs_convolution
from arteria.types import ExperimentSpec, ModelParams, RhsVariant, SolverConfig

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "skip"]
TableHook = Callable[[MultiplierTable], MultiplierTable]

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: Status
    detail: str


@dataclass
class SelftestReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status != "fail" for check in self.checks)

    @property
    def failures(self) -> list[str]:
        return [check.name for check in self.checks if check.status == "fail"]

    def render(self) -> str:
        """Plain-text table, one check per line."""
        width = max((len(check.name) for check in self.checks), default=4)
        lines = [f"{'check':<{width}}  status  detail"]
        lines += [f"{c.name:<{width}}  {c.status:<6}  {c.detail}" for c in self.checks]
        lines.append("selftest " + ("passed" if self.passed else "FAILED: " + ", ".join(self.failures)))
        return "\n".join(lines)

    def to_dict(self) -> dict[str, object]:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in self.checks],
        }


def _result(name: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


def random_band_limited(grid_n: int, k_max: int, rng: np.random.Generator, scale: float = 0.1) -> SpectralField:
    """Mean-zero random field with modes ``1..k_max``."""
    grid = make_grid(grid_n)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[1 : k_max + 1] = scale * (rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max))
    return SpectralField(grid, coeffs)


# ═══════════════════════════════════════════════════════════════════════════
# Checks
# ═══════════════════════════════════════════════════════════════════════════


def check_helmholtz(params: ModelParams, n: int, hook: TableHook | None, rng: np.random.Generator) -> CheckResult:
    name = "helmholtz_identity"
    if params.elastic:
        return CheckResult(name, "skip", "nu = 0: P is a multiple of the identity")
    grid = make_grid(n)
    table = build_table(params, grid)
    if hook is not None:
        table = hook(table)
    worst = max(
        check_helmholtz_identity(table, to_spectral(rng.standard_normal(n), grid))
        for _ in range(100)
    )
    return _result(name, worst <= 1e-12, f"max residual {worst:.2e}")


def check_s_modulus(params: ModelParams, n: int) -> CheckResult:
    table = build_table(params, make_grid(n))
    k, a = table.k, table.a
    gap = float(np.max(np.abs(np.abs(table.s) ** 2 - 4 * k**2 / (a**2 + 4 * k**2))))
    return _result("s_symbol_modulus", gap <= 1e-13, f"max gap {gap:.2e}")


def check_linear_rate_forms() -> CheckResult:
    worst = 0.0
    for kappa in (0.1, 1.0, 3.0):
        for nu in (0.1, 1.0, 3.0):
            for beta in (-1.0, 0.0, 1.0, 2.0):
                params = ModelParams(nu=nu, kappa=kappa, beta=beta)
                for k in range(65):
                    gap = abs(linear_rate(params, k).real - real_rate_closed_form(params, k))
                    worst = max(worst, gap)
    return _result("linear_rate_forms", worst <= 1e-13, f"max gap {worst:.2e}")


def check_convolution_oracle(params: ModelParams, rng: np.random.Generator) -> CheckResult:
    grid = make_grid(32)
    table = build_table(params, grid)
    worst = 0.0
    for _ in range(50):
        f = random_band_limited(32, 5, rng)
        gap = np.abs(rhs_general(params, table, f).coeffs - rhs_convolution(params, f).coeffs)
        worst = max(worst, float(np.max(gap[:11])))
    return _result("convolution_oracle", worst <= 1e-12, f"max gap {worst:.2e}")


def check_nyquist_decay(params: ModelParams, n: int) -> CheckResult:
    grid = make_grid(n)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[-1] = 1e-6
    f = SpectralField(grid, coeffs)
    variants = [(params, RhsVariant.general()), (params, RhsVariant.mollified(1e-3))]
    elastic = ModelParams(nu=0.0, kappa=params.kappa)
    variants.append((elastic, RhsVariant.bbm_local()))
    worst = -np.inf
    for variant_params, variant in variants:
        out = evaluate(variant, variant_params, build_table(variant_params, grid), f)
        worst = max(worst, float(out.coeffs[-1].real / coeffs[-1].real))
    return _result("nyquist_decay", worst <= 0.0, f"largest rate {worst:.3e}")


def check_linear_oracle() -> CheckResult:
    params = ModelParams()
    grid = make_grid(32)
    table = build_table(params, grid)
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[1] = 0.5e-8
    f0 = SpectralField(grid, coeffs)
    final, stop = integrate(make_rhs(RhsVariant.general(), params, table), f0, SolverConfig(t_final=1.0))
    exact = np.exp(linear_rate(params, 1)) * coeffs[1]
    error = abs(final.coeffs[1] - exact) / abs(exact)
    return _result("linear_oracle", stop.completed and error <= 1e-6, f"relative error {error:.2e}")


def check_mean_conservation(params: ModelParams, n: int) -> CheckResult:
    spec = ExperimentSpec(params=params, grid_n=n, solver=SolverConfig(t_final=0.5))
    record = run_experiment(spec)
    drift = mean_drift(record.rows)
    return _result(
        "mean_conservation", record.stop.completed and drift <= 1e-10, f"drift {drift:.2e}"
    )


def check_bbm_decay(kappa: float, n: int) -> CheckResult:
    params = ModelParams(nu=0.0, kappa=kappa, beta=1.0)
    spec = ExperimentSpec(params=params, amplitude=0.01, grid_n=n, solver=SolverConfig(t_final=2.0))
    record = run_experiment(spec)
    energy = record.column("e1") + record.column("e2")
    ok = record.stop.completed and nonincreasing(energy, 10 * spec.solver.rtol * energy[0])
    return _result("bbm_decay", ok, f"F {energy[0]:.3e} -> {energy[-1]:.3e}")


def run_selftest(
    nu: float = 1.0, kappa: float = 1.0, n: int = 64, *, table_hook: TableHook | None = None
) -> SelftestReport:
    """Run every check; *table_hook* may alter the table of the Helmholtz check."""
    params = ModelParams(nu=nu, kappa=kappa)
    rng = np.random.default_rng(SEED)
    report = SelftestReport()
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_helmholtz(params, n, table_hook, rng),
        lambda: check_s_modulus(params, n),
        check_linear_rate_forms,
        lambda: check_convolution_oracle(params, rng),
        lambda: check_nyquist_decay(params, n),
        check_linear_oracle,
        lambda: check_mean_conservation(params, n),
        lambda: check_bbm_decay(kappa, n),
    ]
    for check in checks:
        result = check()
        logger.info("selftest %s: %s (%s)", result.name, result.status, result.detail)
        report.checks.append(result)
    return report


__all__ = [
    "CheckResult",
    "SelftestReport",
    "random_band_limited",
    "run_selftest",
]
