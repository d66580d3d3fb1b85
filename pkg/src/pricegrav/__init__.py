"""Calibration of differentiation rates that steer market prices to
production prices in input-output economies."""

from .calibrate import (
    Diagnosis,
    DiagnosisStatus,
    FailureReason,
    ShootingResult,
    ShootOptions,
    diagnose_existence_scalar,
    is_viable,
    sensitivity_report,
    shoot,
)
from .dynamics import (
    AugmentedState,
    Forcing,
    Trajectory,
    default_steps,
    integrate_rk4,
    rhs_model_g,
    rhs_model_w,
    spectral_abscissa,
    system_matrix,
)
from .errors import (
    InvalidParams,
    NegativeEntry,
    NoConvergence,
    NonFiniteState,
    NonpositivePrices,
    NonpositivePricesWarning,
    NotIrreducible,
    PriceGravError,
    SingularMatrix,
    ZeroSpectralRadius,
)
from .linalg import affine_steady_solution, gauss_solve, mat_exp
from .model import (
    EconomyModel,
    SteadyState,
    ValidationReport,
    Variant,
    solve_production_prices_g,
    solve_production_prices_w,
    solve_steady_state,
    validate,
)
from .spectral import SpectralResult, is_irreducible, max_profit_rate, perron_eigenpair

__version__ = "0.1.0"
