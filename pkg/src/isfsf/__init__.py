"""Index set Fourier series features for multi-dimensional periodic kernels."""

from .baselines import (
    halton_sequence,
    inverse_normal_cdf,
    periodic_se_kernel,
    qmc_features,
    qmc_map,
    rff_features,
    rff_map,
    warp,
)
from .blr import BlrModel, FitError, PredictiveDistribution, fit, mnll, predict, rmse
from .coefficients import (
    CoefficientTable,
    PeriodicSeHyperparams,
    bessel_i_scaled,
    periodic_se_coefficients,
    truncation_error,
)
from .features import (
    IsfsfFeatureMap,
    build_isfsf,
    build_sign_matrix,
    evaluate,
    expand_full,
    expand_sparse,
)
from .index_sets import (
    EnhcWeightParams,
    Family,
    IndexSet,
    cardinality,
    enhc_weight,
    generate_index_set,
)

__version__ = "0.1.0"
