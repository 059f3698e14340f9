"""Analytic toolkit for continuous-time vector ARMA models under
high-frequency sampling: model validation, exact and series spectral
densities of the sampled process, the moving-average structure of the
filtered process, its small-step asymptotics, and an exact Gaussian
simulator with a statistical verification harness.
"""

from .errors import (
    BadCovariance,
    BadOrders,
    BudgetExceeded,
    DegreeReductionFailed,
    LyapunovIllConditioned,
    McarmaError,
    NoConvergence,
    NotPD,
    NotPSD,
    OmegaZero,
    PoleEvaluation,
    RootClusterAmbiguous,
    RootOnCircle,
    SeriesDomain,
    Unstable,
    UnitModulusEta,
)
from .eulerian import (
    EulerianTable,
    IntPolynomial,
    XiEta,
    c_tilde,
    chebyshev_t,
    d_tilde,
    eta,
    eulerian_table,
    qr_polys,
    xi_roots,
)
from .filter_ma import (
    AsymptoticMa,
    Filter,
    MaRepresentation,
    TrigMatrixPolynomial,
    asymptotic_ma,
    closed_form_filtered_spectrum,
    filtered_acov,
    filtered_spectrum,
    innovations_factorization,
    power_transfer,
    sampling_filter,
    scalar_factorization,
)
from .model import (
    MatrixPolynomial,
    McarmaModel,
    RootSet,
    ScalarPolynomial,
    StateSpace,
    adjugate_q,
    char_roots,
    det_poly,
    load_model,
    model_to_dict,
    s_tilde,
    state_space,
    validate_model,
)
from .simulate import (
    SimulationPath,
    StationaryCov,
    VerificationReport,
    apply_filter,
    discretize,
    sample_acov,
    simulate_path,
    simulate_paths,
    stationary_state_cov,
    verify_model,
)
from .spectral import (
    PartialFraction,
    PartialFractionTerm,
    RationalSpectrum,
    ThetaSeries,
    autocovariance,
    f_sampled_exact,
    f_sampled_reference,
    f_sampled_taylor,
    f_y,
    partial_fractions,
    r_eval,
    theta_series,
)

__version__ = "0.1.0"

__all__ = [
    "McarmaError", "BadOrders", "BadCovariance", "Unstable",
    "RootClusterAmbiguous", "PoleEvaluation", "OmegaZero", "SeriesDomain",
    "BudgetExceeded", "DegreeReductionFailed", "NotPD", "NoConvergence",
    "RootOnCircle", "UnitModulusEta", "LyapunovIllConditioned", "NotPSD",
    "McarmaModel", "StateSpace", "ScalarPolynomial", "MatrixPolynomial",
    "RootSet", "validate_model", "load_model", "model_to_dict", "state_space",
    "det_poly", "char_roots", "adjugate_q", "s_tilde",
    "RationalSpectrum", "ThetaSeries", "PartialFraction", "PartialFractionTerm",
    "r_eval", "f_y", "theta_series", "partial_fractions", "autocovariance",
    "f_sampled_taylor", "f_sampled_exact", "f_sampled_reference",
    "EulerianTable", "IntPolynomial", "XiEta", "eulerian_table", "c_tilde",
    "d_tilde", "qr_polys", "xi_roots", "eta", "chebyshev_t",
    "Filter", "TrigMatrixPolynomial", "MaRepresentation", "AsymptoticMa",
    "sampling_filter", "power_transfer", "filtered_spectrum", "filtered_acov",
    "innovations_factorization", "scalar_factorization", "asymptotic_ma",
    "closed_form_filtered_spectrum",
    "StationaryCov", "SimulationPath", "VerificationReport",
    "stationary_state_cov", "discretize", "simulate_path", "simulate_paths",
    "sample_acov", "apply_filter", "verify_model",
]
