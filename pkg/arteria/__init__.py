"""arteria - pseudospectral simulation of a viscoelastic blood-flow model.

The package integrates a nonlocal, unidirectional model of pressure waves in
a viscoelastic artery on the periodic interval ``[0, 2π)``.  Spatial terms are
evaluated with FFTs, time is advanced with an adaptive Dormand–Prince 5(4)
scheme, and every sampled state is reduced to the diagnostics that track a
possible blow-up (the inverse Lipschitz norm and its time integral).

Example:
    Basic usage::

        import arteria

        spec = arteria.ExperimentSpec(params=arteria.ModelParams(nu=0.5), amplitude=5.0)
        record = arteria.run_experiment(spec)
        print(record.stop.tag, record.column("inv_lip")[-1])

        arteria.write_outputs(record, "runs/nu-0.5")

    Sweeping one parameter over the standard matrix::

        base = arteria.ExperimentSpec()
        records = arteria.run_sweep(arteria.default_sweep("amplitude", base))
"""

from arteria.config import ConfigError, parse_config
from arteria.diagnostics import (
    DiagnosticsTracker,
    energies,
    lipschitz_diag,
    sobolev_norm,
    termination_summary,
)
from arteria.experiments import (
    build_initial_data,
    default_sweep,
    run_experiment,
    run_sweep,
)
from arteria.grid import (
    GridSpec,
    SpectralField,
    dealias,
    differentiate,
    make_grid,
    to_physical,
    to_spectral,
)
from arteria.integrator import estimate_initial_step, integrate
from arteria.model import evaluate, make_rhs, rhs_bbm_local, rhs_general, rhs_mollified
from arteria.multipliers import MultiplierTable, build_table
from arteria.oracle import evolve_linear, linear_rate, rhs_convolution
from arteria.output import write_outputs
from arteria.selftest import run_selftest
from arteria.types import (
    ExperimentSpec,
    ModelParams,
    ParameterError,
    RhsVariant,
    RunRecord,
    SolverConfig,
    StopReason,
    SweepSpec,
)

try:
    from arteria._version import version as __version__
except ImportError:
    __version__ = "unknown"


__all__ = [
    # Types
    "ExperimentSpec",
    "ModelParams",
    "RhsVariant",
    "RunRecord",
    "SolverConfig",
    "StopReason",
    "SweepSpec",
    "ParameterError",
    "ConfigError",
    # Spectral grid
    "GridSpec",
    "SpectralField",
    "make_grid",
    "to_spectral",
    "to_physical",
    "differentiate",
    "dealias",
    # Model
    "MultiplierTable",
    "build_table",
    "evaluate",
    "make_rhs",
    "rhs_general",
    "rhs_mollified",
    "rhs_bbm_local",
    # Time stepping
    "integrate",
    "estimate_initial_step",
    # Diagnostics
    "DiagnosticsTracker",
    "energies",
    "lipschitz_diag",
    "sobolev_norm",
    "termination_summary",
    # Oracles
    "evolve_linear",
    "linear_rate",
    "rhs_convolution",
    # Experiments
    "build_initial_data",
    "default_sweep",
    "run_experiment",
    "run_sweep",
    "parse_config",
    "write_outputs",
    "run_selftest",
    "__version__",
]
