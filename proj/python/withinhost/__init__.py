"""Within-host malaria dynamics: stage-chain and age-structured models.

Thin re-export of the native module. Parameter validation errors raise
ValueError; integration failures raise RuntimeError.
"""

from ._core import (  # noqa: F401
    AgeMesh,
    DensityUnit,
    FitProblem,
    FitResult,
    ModelKind,
    ModelParams,
    ObjectiveScale,
    OdeState,
    PatientSeries,
    PdeState,
    R0Breakdown,
    RbcEquilibrium,
    RegressionFit,
    RuptureFunction,
    SimConfig,
    Trajectory,
    adaptive_response,
    chain_survival,
    clinical,
    clinical_gametocytes,
    days_to_hours,
    default_ode_init,
    default_params,
    default_pde_init,
    equilibrium,
    fit,
    fit_two_regime,
    generate_synthetic,
    hours_to_days,
    innate_response,
    load_patient_csv,
    objective,
    parasitemia,
    pde_survival,
    r0_breakdown_ode,
    r0_breakdown_pde,
    r0_ode,
    r0_pde,
    read_trajectory_csv,
    rupture_rate,
    simulate_ode,
    simulate_pde,
    urbc_derivatives,
    validate,
    write_patient_csv,
    write_trajectory_csv,
)

__version__ = "0.1.0"
