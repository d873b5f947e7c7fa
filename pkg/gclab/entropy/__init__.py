from gclab.entropy.brackets import (
    Bracket,
    BracketCover,
    CoverVerification,
    HalfLineBound,
    bracket_halflines,
    verify_cover,
)
from gclab.entropy.vc import (
    SetClass,
    ShatterResult,
    VcReport,
    closed_intervals,
    halflines,
    power_set,
    shatter_check,
    vc_index,
    verify_vc_report,
)
from gclab.entropy.verdict import GcVerdict, gc_verdict, vc_entropy_bound

__all__ = [
    "Bracket",
    "BracketCover",
    "CoverVerification",
    "GcVerdict",
    "HalfLineBound",
    "SetClass",
    "ShatterResult",
    "VcReport",
    "bracket_halflines",
    "closed_intervals",
    "gc_verdict",
    "halflines",
    "power_set",
    "shatter_check",
    "vc_entropy_bound",
    "vc_index",
    "verify_cover",
    "verify_vc_report",
]
