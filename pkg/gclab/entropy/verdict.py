"""Sufficient-condition checklist for the GC property of a class under dependence."""

import logging
import math
from collections.abc import Sequence
from typing import Literal

from gclab.entropy.brackets import BracketCover, verify_cover
from gclab.entropy.vc import VcReport
from gclab.errors import InvalidInputError
from gclab.gcip.scan import GcipReport
from gclab.procgen.laws import ContinuousLaw, DiscreteLaw
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

SCOPE_NOTE = "finite-scale check of sufficient (not necessary) conditions"


def check_bound_constants(K: float, r: float) -> None:
    if not K > 0.0:
        raise InvalidInputError(f"K must be positive, got {K}")
    if not r > 1.0:
        raise InvalidInputError(f"r must exceed 1, got {r}")


def vc_entropy_bound(index: int, epsilon: float, K: float, r: float) -> float:
    """K I (4e)^I (1/epsilon)^(r (I - 1)) for a VC class of index I.

    K and r are caller-supplied constants.
    """
    if index < 1:
        raise InvalidInputError(f"VC index must be at least 1, got {index}")
    if not 0.0 < epsilon <= 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1], got {epsilon}")
    check_bound_constants(K, r)
    return K * index * (4.0 * math.e) ** index * (1.0 / epsilon) ** (r * (index - 1))


class ConditionCheck(LabModel):
    passed: bool
    evidence: str


class GcVerdict(LabModel):
    class_id: str
    source: str
    verdict: Literal["SUFFICIENT_CONDITIONS_VERIFIED", "NOT_VERIFIED"]
    failing: tuple[str, ...] = ()
    checklist: dict[str, ConditionCheck]
    epsilons: tuple[float, ...]
    notes: tuple[str, ...] = (SCOPE_NOTE,)


def _covers_finite(covers: Sequence[BracketCover], metric: str, law: ContinuousLaw | DiscreteLaw | None) -> tuple[bool, str]:
    """A supplied cover is finite by construction; with a law each one is also re-verified."""
    chosen = [c for c in covers if c.metric_id == metric]
    if not chosen:
        return False, f"no {metric} bracket covers supplied"
    counts = ", ".join(f"eps={c.epsilon}: {c.count}" for c in chosen)
    if law is None:
        return True, f"{metric} bracket counts {counts} (supplied, not re-verified)"
    failed = [c.epsilon for c in chosen if not verify_cover(c, law).passed]
    if failed:
        return False, f"{metric} bracket counts {counts}; re-verification failed for eps={failed}"
    return True, f"{metric} bracket counts {counts}, re-verified"


def gc_verdict(
    covers: Sequence[BracketCover],
    gcip_report: GcipReport,
    vc_report: VcReport | None = None,
    K: float = 1.0,
    r: float = 2.0,
    law: ContinuousLaw | DiscreteLaw | None = None,
) -> GcVerdict:
    """Combines bracket covers, an optional VC report and a GCIP scan.

    Part (a) needs finite |.|-brackets or a finite VC index, plus the variance
    conditions for the class indicators; part (b) needs finite L2(P)
    brackets plus the same variance conditions. When `law` is given every
    cover is re-verified against it before it counts.
    """
    if not covers:
        raise InvalidInputError("gc_verdict needs at least one bracket cover")
    class_id = gcip_report.class_id
    mismatched = {c.class_id for c in covers if c.class_id != class_id}
    if vc_report is not None and vc_report.class_id != class_id:
        mismatched.add(vc_report.class_id)
    if mismatched:
        raise InvalidInputError(f"class mismatch: scan is for {class_id}, got {sorted(mismatched)}")

    variance_ok = gcip_report.conditions_hold
    variance = ConditionCheck(
        passed=variance_ok,
        evidence=f"s1 {gcip_report.bounded_verdict}, s2 {gcip_report.s2_verdict} (delta={gcip_report.params.delta})",
    )
    abs_ok, abs_evidence = _covers_finite(covers, "ABS", law)
    if not abs_ok and vc_report is not None and vc_report.found:
        bounds = ", ".join(f"{vc_entropy_bound(vc_report.index, min(c.epsilon, 1.0), K, r):.4g}" for c in covers)
        abs_ok, abs_evidence = True, f"VC index {vc_report.index}; entropy bounds {bounds}"
    l2_ok, l2_evidence = _covers_finite(covers, "L2_P", law)
    checklist = {
        "a1": ConditionCheck(passed=abs_ok, evidence=abs_evidence),
        "a2": variance,
        "b1": ConditionCheck(passed=l2_ok, evidence=l2_evidence),
        "b2": variance,
    }
    failing = []
    if not variance_ok:
        failing.append("gcip")
    if not (abs_ok or l2_ok):
        failing.append("entropy")
    verdict = "NOT_VERIFIED" if failing else "SUFFICIENT_CONDITIONS_VERIFIED"
    log.info(f"gc verdict for {class_id} under {gcip_report.source}: {verdict} {failing or ''}")
    return GcVerdict(
        class_id=class_id,
        source=gcip_report.source,
        verdict=verdict,
        failing=tuple(failing),
        checklist=checklist,
        epsilons=tuple(c.epsilon for c in covers),
    )
