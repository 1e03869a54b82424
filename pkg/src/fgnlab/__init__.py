"""fgnlab: fractional Gaussian noise, conditional local limits and occupation times."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CholeskyFailure,
    EmbeddingNotPSD,
    FgnLabError,
    IllConditioned,
    MaxTermsExceeded,
    MissingDn,
    NoConvergence,
    NoStabilization,
    NotContractive,
    NumericalFailure,
    ValidationError,
)
from .fgn_model import (  # noqa: E402
    HurstParam,
    autocovariance,
    b_vector,
    covariance_seq,
    partial_sum_variance,
    spectral_density,
    spectral_minimum,
    spectral_params,
)
from .sampler import FgnPath, RngSeed, partial_sums, sample_cholesky, sample_circulant  # noqa: E402
from .toeplitz import (  # noqa: E402
    NeumannConfig,
    SymmetricToeplitz,
    eigen_extremes,
    levinson_solve,
    neumann_quadratic_form,
)
from .conditional import (  # noqa: E402
    ConditionalLaw,
    DnTable,
    build_dn_table,
    cllt_check,
    conditional_mean_vanishing,
    conditional_params,
    estimate_dn,
    quadratic_form_decay,
)
from .mittag_leffler import MlfIndex, ks_distance, moment, reference_cdf  # noqa: E402
from .occupation import (  # noqa: E402
    OccupationConfig,
    compare_to_mlf,
    occupation_time,
    return_sequence,
    smoothed_functional,
)
