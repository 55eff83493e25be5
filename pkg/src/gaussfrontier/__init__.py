"""Secure source-coding rate/key frontiers and Wyner common information for Gaussian models."""
from .errors import (
    DegenerateModelError,
    GaussFrontierError,
    ModelError,
    NotPSDError,
    NumericalError,
)
from .matgauss import (
    RANK_TOL,
    EigenDecomp,
    SvdDecomp,
    eig_sym,
    gaussian_mi_det,
    pseudo_inv_sqrt,
    pseudo_sqrt,
    schur_conditional,
    svd,
)
from .region import (
    Case,
    FrontierPoint,
    a_lambda_case2,
    a_lambda_case3,
    frontier_point,
    frontier_sweep,
    objective_value,
    wyner_ci,
)
from .spectrum import (
    CorrelationSpectrum,
    DisclosureChannel,
    GaussianModel,
    conditional_spectra,
    correlation_spectrum,
    mmse_estimate,
)
from .verify import (
    AuxConstruction,
    VerificationReport,
    build_construction,
    check_lemma1,
    maximize_f_lambda,
    mi_crosscheck,
    minimize_case2_objective,
    monte_carlo_check,
    verify_model,
)

__version__ = "0.1.0"
