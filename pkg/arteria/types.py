"""Data types for arteria.

This module defines the value objects shared by the numerical layers and the
command-line front end: physical parameters, solver settings, stop reasons,
experiment descriptions, diagnostic rows, and run records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

VariantTag = Literal["general", "mollified", "bbm_local"]
VARIANT_TAGS: tuple[VariantTag, ...] = ("general", "mollified", "bbm_local")

StopTag = Literal["reached_t_final", "step_underflow", "non_finite", "step_budget", "failed"]
STOP_TAGS: tuple[StopTag, ...] = (
    "reached_t_final",
    "step_underflow",
    "non_finite",
    "step_budget",
    "failed",
)

SweepAxis = Literal["nu", "amplitude", "beta"]
SWEEP_AXES: tuple[SweepAxis, ...] = ("nu", "amplitude", "beta")

DEFAULT_SOBOLEV_INDEX = 3.0
DEFAULT_SAMPLES = 400
DEFAULT_SNAPSHOTS = 8


class ParameterError(ValueError):
    """An invalid physical or numerical parameter."""

    def __init__(self, message: str, *, code: str = "params.invalid", key: str | None = None):
        super().__init__(message)
        self.code = code
        self.key = key


def _require_finite(value: float, key: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise ParameterError(f"{key} must be a number", code="params.not_numeric", key=key)
    if not math.isfinite(value):
        raise ParameterError(f"{key} must be finite", code="params.not_finite", key=key)


# ═══════════════════════════════════════════════════════════════════════════
# Model parameters
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class ModelParams:
    """Constants of the unidirectional model.

    Attributes:
        nu: viscoelastic coefficient (``nu = 0`` is the purely elastic BBM regime)
        eps: asymptotic small-amplitude/long-wave parameter
        kappa: friction coefficient
        beta: elasticity coefficient
    """

    nu: float = 1.0
    eps: float = 1.0
    kappa: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        for key in ("nu", "eps", "kappa", "beta"):
            _require_finite(getattr(self, key), key)
        if self.kappa <= 0:
            raise ParameterError(
                "kappa must be positive; the frictionless limit kappa = 0 is an idealized "
                "case that is not supported",
                code="params.kappa_unsupported",
                key="kappa",
            )
        if self.nu < 0:
            raise ParameterError("nu must be non-negative", code="params.nu_negative", key="nu")
        if self.eps <= 0:
            raise ParameterError("eps must be positive", code="params.eps_invalid", key="eps")

    @property
    def elastic(self) -> bool:
        """True in the purely elastic (BBM) regime ``nu = 0``."""
        return self.nu == 0

    @property
    def linearly_stable(self) -> bool:
        """True when every non-mean linear mode decays (``beta > -2``)."""
        return self.beta > -2


# ═══════════════════════════════════════════════════════════════════════════
# Right-hand side variants
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class RhsVariant:
    """Which formulation of the time derivative to evaluate."""

    tag: VariantTag = "general"
    mollify: float = 0.0

    def __post_init__(self) -> None:
        if self.tag not in VARIANT_TAGS:
            raise ParameterError(
                f"variant must be one of {', '.join(VARIANT_TAGS)}",
                code="params.variant_unknown",
                key="variant",
            )
        _require_finite(self.mollify, "mollify")
        if self.tag == "mollified" and self.mollify <= 0:
            raise ParameterError(
                "the mollified variant needs a positive mollifier width",
                code="params.mollify_invalid",
                key="mollify",
            )
        if self.tag != "mollified" and self.mollify != 0:
            raise ParameterError(
                "a mollifier width is only meaningful for the mollified variant",
                code="params.mollify_unused",
                key="mollify",
            )

    @classmethod
    def general(cls) -> RhsVariant:
        return cls("general")

    @classmethod
    def mollified(cls, width: float) -> RhsVariant:
        return cls("mollified", width)

    @classmethod
    def bbm_local(cls) -> RhsVariant:
        return cls("bbm_local")

    def check_params(self, params: ModelParams) -> None:
        """Reject combinations the formulation cannot represent."""
        if self.tag == "bbm_local" and not params.elastic:
            raise ParameterError(
                "the local BBM form requires nu = 0", code="params.variant_needs_elastic", key="nu"
            )


# ═══════════════════════════════════════════════════════════════════════════
# Solver settings and stop reasons
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class SolverConfig:
    """Adaptive integration settings.

    ``dt_min`` defaults to ``1e-12 * t_final`` and ``sample_dt`` to
    ``t_final / 400`` when left unset.
    """

    rtol: float = 1e-8
    atol: float = 1e-8
    t_final: float = 10.0
    dt_init: float | None = None
    dt_min: float | None = None
    max_steps: int = 200_000
    sample_dt: float | None = None

    def __post_init__(self) -> None:
        for key in ("rtol", "atol", "t_final"):
            value = getattr(self, key)
            _require_finite(value, key)
            if value <= 0:
                raise ParameterError(f"{key} must be positive", code="params.solver_invalid", key=key)
        for key in ("dt_init", "dt_min", "sample_dt"):
            value = getattr(self, key)
            if value is None:
                continue
            _require_finite(value, key)
            if value <= 0:
                raise ParameterError(f"{key} must be positive", code="params.solver_invalid", key=key)
        if isinstance(self.max_steps, bool) or not isinstance(self.max_steps, int):
            raise ParameterError(
                "max_steps must be an integer", code="params.solver_invalid", key="max_steps"
            )
        if self.max_steps < 1:
            raise ParameterError(
                "max_steps must be at least 1", code="params.solver_invalid", key="max_steps"
            )

    @property
    def effective_dt_min(self) -> float:
        return self.dt_min if self.dt_min is not None else 1e-12 * self.t_final

    @property
    def effective_sample_dt(self) -> float:
        if self.sample_dt is not None:
            return min(self.sample_dt, self.t_final)
        return self.t_final / DEFAULT_SAMPLES

    def sample_times(self) -> np.ndarray:
        """Sampling instants ``0, dt, 2dt, ...`` ending exactly at ``t_final``."""
        dt = self.effective_sample_dt
        count = math.ceil(self.t_final / dt - 1e-9)
        times = dt * np.arange(count + 1, dtype=float)
        times[-1] = self.t_final
        return times


@dataclass(frozen=True)
class StopReason:
    """Why an integration ended, and when."""

    tag: StopTag
    t_stop: float

    @property
    def completed(self) -> bool:
        return self.tag == "reached_t_final"

    def to_dict(self) -> dict[str, object]:
        return {"tag": self.tag, "t_stop": self.t_stop}


# ═══════════════════════════════════════════════════════════════════════════
# Experiments
# ═══════════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class SweepSpec:
    """One parameter axis and the values it takes."""

    axis: SweepAxis
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ParameterError(
                f"sweep axis must be one of {', '.join(SWEEP_AXES)}",
                code="params.sweep_axis_unknown",
                key="axis",
            )
        if not self.values:
            raise ParameterError(
                "sweep values must not be empty", code="params.sweep_empty", key="values"
            )
        for value in self.values:
            _require_finite(value, "values")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one run (or one sweep)."""

    params: ModelParams = field(default_factory=ModelParams)
    amplitude: float = 0.1
    grid_n: int = 1024
    solver: SolverConfig = field(default_factory=SolverConfig)
    variant: RhsVariant = field(default_factory=RhsVariant)
    sweep: SweepSpec | None = None
    label: str = "run"
    sobolev_index: float = DEFAULT_SOBOLEV_INDEX
    dealias: bool = True
    snapshots: int = DEFAULT_SNAPSHOTS

    def __post_init__(self) -> None:
        _require_finite(self.amplitude, "amp")
        _require_finite(self.sobolev_index, "s_index")
        if self.sobolev_index <= 0:
            raise ParameterError(
                "s_index must be positive", code="params.s_index_invalid", key="s_index"
            )
        if self.snapshots < 2:
            raise ParameterError(
                "at least two snapshots are required", code="params.snapshots_invalid",
                key="snapshots",
            )
        self.variant.check_params(self.params)


@dataclass(frozen=True)
class DiagnosticsRow:
    """Monitored quantities at one sampled instant."""

    t: float
    mean: float
    l2: float
    hs_energy: float
    lip: float
    inv_lip: float
    cum_integral: float
    e1: float
    e2: float
    d1: float
    d2: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in DIAGNOSTIC_COLUMNS)


DIAGNOSTIC_COLUMNS: tuple[str, ...] = (
    "t",
    "mean",
    "l2",
    "hs_energy",
    "lip",
    "inv_lip",
    "cum_integral",
    "e1",
    "e2",
    "d1",
    "d2",
)


@dataclass(frozen=True)
class TerminationSummary:
    """The continuation-criterion view of how a run ended."""

    last_time: float
    last_lip: float
    inv_lip_decreasing: bool
    integral_accelerating: bool
    window: int

    def to_dict(self) -> dict[str, object]:
        return {
            "last_time": self.last_time,
            "last_lip": self.last_lip,
            "inv_lip_decreasing": self.inv_lip_decreasing,
            "integral_accelerating": self.integral_accelerating,
            "window": self.window,
        }


@dataclass
class RunRecord:
    """Result of one integration: sampled diagnostics, snapshots, and stop."""

    spec: ExperimentSpec
    rows: list[DiagnosticsRow] = field(default_factory=list)
    snapshots: list[tuple[float, np.ndarray]] = field(default_factory=list)
    stop: StopReason = field(default_factory=lambda: StopReason("failed", 0.0))
    wall_time: float = 0.0
    summary: TerminationSummary | None = None
    error: str | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([row.t for row in self.rows])

    def column(self, name: str) -> np.ndarray:
        """One diagnostic column as an array, in sample order."""
        if name not in DIAGNOSTIC_COLUMNS:
            raise KeyError(name)
        return np.array([getattr(row, name) for row in self.rows])


__all__ = [
    "DEFAULT_SAMPLES",
    "DEFAULT_SNAPSHOTS",
    "DEFAULT_SOBOLEV_INDEX",
    "DIAGNOSTIC_COLUMNS",
    "STOP_TAGS",
    "SWEEP_AXES",
    "VARIANT_TAGS",
    "DiagnosticsRow",
    "ExperimentSpec",
    "ModelParams",
    "ParameterError",
    "RhsVariant",
    "RunRecord",
    "SolverConfig",
    "StopReason",
    "StopTag",
    "SweepAxis",
    "SweepSpec",
    "TerminationSummary",
    "VariantTag",
]
