"""Distribution of the arrival-time difference of two inverse Gaussian first-hitting times."""

__version__ = "0.1.0"

from .diff import (
    TailFloor,
    asymptotic_tail,
    conv_cdf,
    conv_pdf,
    conv_tail,
    log_asymptotic_tail,
    log_conv_pdf,
    log_conv_tail,
    soa_tail,
    tail_floor,
)
from .ig import (
    IGParams,
    PhysicalChannel,
    ig_cdf,
    ig_cumulants,
    ig_mgf,
    ig_pdf,
    ig_sample,
    ig_tail,
    log_ig_tail,
    physical_to_ig,
)
from .metrics import crossover_probability, kl_divergence, kl_exact_vs_nig, ks_distance
from .nig import (
    CumulantSet,
    InfeasibleMomentsError,
    MomentSet,
    NIGParams,
    approx_diff,
    diff_cumulants,
    fit_from_moments,
    moments_of_diff,
    nig_moments,
    nig_pdf,
    nig_sample,
    nig_tail,
    usecase1_params,
    usecase2_params,
)
from .quadrature import AccuracyError, QuadratureSpec
from .special import Accuracy
