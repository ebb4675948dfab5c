"""Counterdiabatic driving for pseudo- and antipseudo-Hermitian systems.

The package builds biorthogonal eigensystems of non-Hermitian matrices,
assembles counterdiabatic (transitionless) driving Hamiltonians from them,
integrates the driven Schrodinger dynamics, and reproduces the three-level
population-transfer experiments at desk scale. See the README for the
layout; the natural entry points are :func:`build_model`,
:func:`cd_pseudo` / :func:`cd_antipseudo`, :func:`integrate`, and the
``nhcd`` command line.
"""

from .adiabatic import (
    PhaseLedger,
    Schedule,
    accumulate_phases,
    adiabatic_metric,
    adiabatic_reference,
    berry_connection,
    metric_profile,
    schedule_from_hamiltonian,
)
from .cd import (
    CDBundle,
    ResidualReport,
    cd_antipseudo,
    cd_generic,
    cd_hermitian,
    cd_only_pseudo,
    cd_pseudo,
    verify_cd,
)
from .dynamics import (
    Trajectory,
    integrate,
    observables,
    project_phase_decomposition,
)
from .errors import (
    AmbiguousMatching,
    BadSymmetryMatrix,
    ConfigError,
    DegenerateSpectrum,
    DimensionMismatch,
    EPCrossing,
    GridMismatch,
    NhcdError,
    NonFinite,
    NotAnEigenvector,
    NotBinormalized,
    NotOrthonormal,
    SchemaError,
    SelfOrthogonal,
    StepTooLarge,
    SymmetryViolation,
    UnpairableSpectrum,
    WindowExceeded,
    ZeroNorm,
)
from .experiments import (
    ExperimentConfig,
    RunReport,
    RunResult,
    SweepResult,
    emit_plots,
    load_config,
    load_sweep_config,
    run_experiment,
    spectrum_sweep,
)
from .linalg import (
    EigenSystem,
    binormalize,
    decompose,
    eig,
    full_eigensystem,
    left_eigensystem,
    match_to_previous,
)
from .models import (
    CASES,
    ModelBundle,
    StirapParams,
    antipseudo_instance,
    antipseudo_symmetry_matrix,
    build_model,
    pseudo_instance,
    pseudo_symmetry_matrix,
    reference_schedules,
    stirap_hamiltonian,
)
from .symmetry import (
    SymmetrySpec,
    check_antipseudo,
    check_pseudo,
    check_self_normalized,
    hermitian_split,
    left_from_right,
    pair_spectrum,
)

__version__ = "1.0.0"

__all__ = [
    "AmbiguousMatching",
    "BadSymmetryMatrix",
    "CASES",
    "CDBundle",
    "ConfigError",
    "DegenerateSpectrum",
    "DimensionMismatch",
    "EPCrossing",
    "EigenSystem",
    "ExperimentConfig",
    "GridMismatch",
    "ModelBundle",
    "NhcdError",
    "NonFinite",
    "NotAnEigenvector",
    "NotBinormalized",
    "NotOrthonormal",
    "PhaseLedger",
    "ResidualReport",
    "RunReport",
    "RunResult",
    "Schedule",
    "SchemaError",
    "SelfOrthogonal",
    "StepTooLarge",
    "StirapParams",
    "SweepResult",
    "SymmetrySpec",
    "SymmetryViolation",
    "Trajectory",
    "UnpairableSpectrum",
    "WindowExceeded",
    "ZeroNorm",
    "accumulate_phases",
    "adiabatic_metric",
    "adiabatic_reference",
    "antipseudo_instance",
    "antipseudo_symmetry_matrix",
    "berry_connection",
    "binormalize",
    "build_model",
    "cd_antipseudo",
    "cd_generic",
    "cd_hermitian",
    "cd_only_pseudo",
    "cd_pseudo",
    "check_antipseudo",
    "check_pseudo",
    "check_self_normalized",
    "decompose",
    "eig",
    "emit_plots",
    "full_eigensystem",
    "hermitian_split",
    "integrate",
    "left_eigensystem",
    "left_from_right",
    "load_config",
    "load_sweep_config",
    "match_to_previous",
    "metric_profile",
    "observables",
    "pair_spectrum",
    "project_phase_decomposition",
    "pseudo_instance",
    "pseudo_symmetry_matrix",
    "reference_schedules",
    "run_experiment",
    "schedule_from_hamiltonian",
    "spectrum_sweep",
    "stirap_hamiltonian",
    "verify_cd",
]
