from gclab.mixing.coefficients import (
    alpha_markov_exact,
    alpha_modulus_estimate,
    alpha_modulus_exact,
    beta_markov_exact,
    beta_modulus_estimate,
    beta_modulus_exact,
    indicator_covariance_exact,
    joint_law,
    modulus_stderr,
    transition_power,
)
from gclab.mixing.profile import (
    DecayFit,
    MixingKind,
    MixingProfile,
    Provenance,
    RateThreshold,
    ThresholdCheck,
    estimated_profile,
    exact_profile,
    fit_decay,
    threshold_check,
)

__all__ = [
    "DecayFit",
    "MixingKind",
    "MixingProfile",
    "Provenance",
    "RateThreshold",
    "ThresholdCheck",
    "alpha_markov_exact",
    "alpha_modulus_estimate",
    "alpha_modulus_exact",
    "beta_markov_exact",
    "beta_modulus_estimate",
    "beta_modulus_exact",
    "estimated_profile",
    "exact_profile",
    "fit_decay",
    "indicator_covariance_exact",
    "joint_law",
    "modulus_stderr",
    "threshold_check",
    "transition_power",
]
