from gclab.covcheck.inequalities import (
    BoundCertificate,
    HolderTriple,
    InequalityId,
    check_alpha_holder,
    check_alpha_sup,
    check_beta_sup,
    cov_exact,
    norm_p,
    on_states,
)
from gclab.covcheck.sweep import SweepSummary, random_triple, sweep

__all__ = [
    "BoundCertificate",
    "HolderTriple",
    "InequalityId",
    "SweepSummary",
    "check_alpha_holder",
    "check_alpha_sup",
    "check_beta_sup",
    "cov_exact",
    "norm_p",
    "on_states",
    "random_triple",
    "sweep",
]
