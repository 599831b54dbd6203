"""Strang splitting and thresholding for the matrix-valued Allen-Cahn equation."""
from .dynamics import g_scalar, g_trace, nonlinear_flow, nonlinear_flow_rescaled, ode_oracle_rk4, project_orthogonal
from .energy import (
    EnergyBreakdown,
    e1_energy,
    e2_energy,
    e2_frechet_derivative,
    gl_energy_physical,
    gl_energy_rescaled,
    modified_energy,
)
from .errors import InvariantViolation, MacError, NumericalFailure, UsageError
from .config import RunConfig, build_config, load_config, write_timeline_csv
from .field import (
    Grid,
    MatrixField,
    det_sign_image,
    l2_difference,
    max_abs_det,
    max_frobenius,
    read_pgm,
    read_snapshot,
    write_pgm,
    write_snapshot,
)
from .initial import ic_admissible, ic_random, ic_rotation, ic_structured
from .sim import (
    DiagnosticsRecord,
    SchemeParams,
    Timeline,
    compare_methods,
    convergence_study,
    run,
    strang_step,
    threshold_step,
)
from .spectral import SpectralPlan, h1_seminorm_sq, heat_propagate, linear_energy_form

__version__ = "0.1.0"
