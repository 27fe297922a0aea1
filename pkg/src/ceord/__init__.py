"""Rate-distortion frontier of robust distributed compression of
symmetrically correlated Gaussian sources."""

from .spectra import (
    DomainError,
    ModelError,
    SourceModel,
    SpectralView,
    SymmetricSpec,
    basis,
    d_min,
    dense,
    eigenvalues,
    validate,
)
from .rdcore import (
    ConditionReport,
    RDPoint,
    RegimeReport,
    check_conditions,
    classify_regime,
    degenerate_rate_s1zero,
    degenerate_rate_s2zero,
    distortion_profile,
    mu_nu,
    rate_bar,
    solve_lambda_q,
)
from .bergertung import (
    RegionCheck,
    TestChannel,
    achievable_point,
    check_symmetric_rate,
    subset_mutual_info,
)
from .converse import (
    CASE_P,
    CASE_PHAT,
    FeasiblePoint,
    KKTCertificate,
    Multipliers,
    candidate_minimizer,
    delta_bound,
    dj_lower_bound,
    kkt_multipliers,
    objective_eta,
    objective_eta_hat,
    select_case,
    sigma_identity,
    solve_numeric,
    verify_kkt,
)
from .mcsim import (
    DecompositionReport,
    EmpiricalRD,
    SampleBatch,
    decomposition_check,
    empirical_distortion,
    sample,
)

__version__ = "0.1.0"
