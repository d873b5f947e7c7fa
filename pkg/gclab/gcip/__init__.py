from gclab.gcip.conditions import (
    GcipMode,
    VarianceEstimate,
    Which,
    inside_normalized_variance,
    monte_carlo_variance,
    s1_indicator,
    s2_indicator,
    s_functional,
)
from gclab.gcip.scan import (
    Boundedness,
    GcipParams,
    GcipReport,
    gcip_scan,
    implication_check,
    s1_mixing_bound,
)
from gclab.gcip.sources import (
    CovarianceSequence,
    gaussian_indicator_covariance,
    indicator_autocovariances,
    partial_sum_variances,
)

__all__ = [
    "Boundedness",
    "CovarianceSequence",
    "GcipMode",
    "GcipParams",
    "GcipReport",
    "VarianceEstimate",
    "Which",
    "gaussian_indicator_covariance",
    "gcip_scan",
    "implication_check",
    "indicator_autocovariances",
    "inside_normalized_variance",
    "monte_carlo_variance",
    "partial_sum_variances",
    "s1_indicator",
    "s1_mixing_bound",
    "s2_indicator",
    "s_functional",
]
