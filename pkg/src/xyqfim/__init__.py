"""Quantum Fisher information matrices via density-matrix vectorization, with
thermal Heisenberg XY models and multiparameter Cramér–Rao analysis."""

from .errors import (
    DimensionMismatchError,
    DomainError,
    InvalidStateError,
    NegativeEigenvalueError,
    NotHermitianError,
    NumericalError,
    StepUnderflowError,
    UnknownNameError,
    XYQFIMError,
)
from .linalg import HermitianSpectrum, SupportSolve, eig_hermitian, kron, solve_on_support, unvec, vec
from .qfim import (
    ParametricStateFamily,
    QFIMatrix,
    SaturationReport,
    SLDSet,
    build_lambda,
    fd_derivatives,
    qfim_spectral,
    qfim_vectorized,
    saturation_report,
    sld_spectral,
    sld_vectorized,
)
from .models import (
    AnisotropicXYParams,
    IsotropicFieldParams,
    gibbs_aniso,
    gibbs_iso_field,
    optimal_basis,
)
from .closed_forms import closed_form_eval
from .estimation import CRBReport, compute_point, crb_individual, crb_report, crb_simultaneous, find_optima, gamma_ratio, scan

__version__ = "0.1.0"
