"""Brute-force shattering and VC index over finite universes.

A point set is encoded as a tuple and its subsets as bitmasks over that
tuple. Classes over the real line are represented by finitely many members
whose traces on the declared universe are the same as those of the full class.
"""

import itertools
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from pydantic import model_validator

from gclab.errors import FeasibilityError, InvalidInputError
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

MAX_SHATTER_POINTS = 22
MAX_VC_N = 12
GRID_NOTE = "shattering over the real line is approximated by shattering over the declared universe"


@dataclass(frozen=True)
class SetClass:
    """A family of sets given by labelled membership predicates.

    When `members` is None every subset of the points is a member.
    """

    class_id: str
    universe: tuple[float, ...]
    members: tuple[tuple[str, Callable[[float], bool]], ...] | None

    def trace_map(self, points: Sequence[float]) -> dict[int, str]:
        """Picked-out subsets of `points` (as bitmasks), each with one member that picks it."""
        if self.members is None:
            return {mask: f"subset{mask}" for mask in range(1 << len(points))}
        traces: dict[int, str] = {}
        for label, contains in self.members:
            mask = 0
            for bit, point in enumerate(points):
                if contains(point):
                    mask |= 1 << bit
            traces.setdefault(mask, label)
        return traces

    def member(self, label: str, points: Sequence[float]) -> Callable[[float], bool]:
        if self.members is None:
            mask = int(label.removeprefix("subset"))
            chosen = {p for bit, p in enumerate(points) if mask >> bit & 1}
            return lambda x: x in chosen
        return dict(self.members)[label]


def _universe(points: Sequence[float]) -> tuple[float, ...]:
    universe = tuple(sorted(float(p) for p in points))
    if len(set(universe)) != len(universe):
        raise InvalidInputError("universe points must be distinct")
    return universe


def halflines(universe: Sequence[float]) -> SetClass:
    """{(-inf, c]}, with cuts at -inf and at every universe point."""
    universe = _universe(universe)
    cuts = (-math.inf, *universe)
    members = tuple((f"(-inf,{c}]", lambda x, c=c: x <= c) for c in cuts)
    return SetClass(class_id="halflines", universe=universe, members=members)


def closed_intervals(universe: Sequence[float]) -> SetClass:
    """{[a, b]} with endpoints in the universe, plus the empty set."""
    universe = _universe(universe)
    members = [("empty", lambda x: False)]
    for a, b in itertools.combinations_with_replacement(universe, 2):
        members.append((f"[{a},{b}]", lambda x, a=a, b=b: a <= x <= b))
    return SetClass(class_id="intervals", universe=universe, members=tuple(members))


def power_set(universe: Sequence[float]) -> SetClass:
    return SetClass(class_id="powerset", universe=_universe(universe), members=None)


class ShatterResult(LabModel):
    points: tuple[float, ...]
    shattered: bool
    missing_subset: tuple[float, ...] | None = None
    picked: int


class PickCertificate(LabModel):
    subset: tuple[float, ...]
    member: str


class ShatterWitness(LabModel):
    points: tuple[float, ...]
    certificates: tuple[PickCertificate, ...]


class VcReport(LabModel):
    class_id: str
    universe: tuple[float, ...]
    index: int | None = None
    not_found_up_to: int | None = None
    witnesses: tuple[ShatterWitness, ...] = ()
    sets_checked_at_index: int = 0
    notes: tuple[str, ...] = (GRID_NOTE,)

    @model_validator(mode="after")
    def _one_outcome(self) -> "VcReport":
        if (self.index is None) == (self.not_found_up_to is None):
            raise ValueError("a report has either an index or a NOT_FOUND bound")
        return self

    @property
    def found(self) -> bool:
        return self.index is not None


def _subset(points: Sequence[float], mask: int) -> tuple[float, ...]:
    return tuple(p for bit, p in enumerate(points) if mask >> bit & 1)


def _masks_by_size(size: int):
    """Bitmasks of all subsets, smallest cardinality first."""
    for k in range(size + 1):
        for combo in itertools.combinations(range(size), k):
            yield sum(1 << bit for bit in combo)


def _check_points(points: Sequence[float]) -> tuple[float, ...]:
    points = tuple(float(p) for p in points)
    if len(points) > MAX_SHATTER_POINTS:
        raise FeasibilityError(f"shatter check enumerates 2^{len(points)} subsets; at most {MAX_SHATTER_POINTS} points allowed")
    if len(set(points)) != len(points):
        raise InvalidInputError("points must be distinct")
    return points


def shatter_check(set_class: SetClass, points: Sequence[float]) -> ShatterResult:
    """Whether every subset of `points` is picked out by some member.

    When it is not, the smallest missing subset is returned as witness.
    """
    points = _check_points(points)
    traces = set_class.trace_map(points)
    if len(traces) == 1 << len(points):
        return ShatterResult(points=points, shattered=True, picked=len(traces))
    missing = next(mask for mask in _masks_by_size(len(points)) if mask not in traces)
    return ShatterResult(points=points, shattered=False, missing_subset=_subset(points, missing), picked=len(traces))


def _witness(set_class: SetClass, points: tuple[float, ...]) -> ShatterWitness:
    traces = set_class.trace_map(points)
    return ShatterWitness(
        points=points,
        certificates=tuple(
            PickCertificate(subset=_subset(points, mask), member=traces[mask]) for mask in _masks_by_size(len(points))
        ),
    )


def check_max_n(max_n: int) -> None:
    if max_n > MAX_VC_N:
        raise FeasibilityError(f"max_n={max_n} exceeds the enumeration cap {MAX_VC_N}")
    if max_n < 1:
        raise InvalidInputError(f"max_n must be positive, got {max_n}")


def vc_index(set_class: SetClass, max_n: int, universe: Sequence[float] | None = None) -> VcReport:
    """Smallest n <= max_n such that no n-subset of the universe is shattered.

    Half-lines get index 2 and closed intervals index 3 under this convention.
    """
    check_max_n(max_n)
    universe = _universe(universe) if universe is not None else set_class.universe
    witnesses = [ShatterWitness(points=(), certificates=(PickCertificate(subset=(), member="any"),))]
    top = min(max_n, len(universe))
    for n in range(1, top + 1):
        checked = 0
        shattered = None
        for points in itertools.combinations(universe, n):
            checked += 1
            if len(set_class.trace_map(points)) == 1 << n:
                shattered = points
                break
        if shattered is None:
            log.info(f"{set_class.class_id}: no {n}-set shattered among {checked} candidates; index {n}")
            return VcReport(
                class_id=set_class.class_id,
                universe=universe,
                index=n,
                witnesses=tuple(witnesses),
                sets_checked_at_index=checked,
            )
        witnesses.append(_witness(set_class, shattered))
    log.info(f"{set_class.class_id}: every cardinality up to {top} is shattered")
    return VcReport(class_id=set_class.class_id, universe=universe, not_found_up_to=top, witnesses=tuple(witnesses))


def verify_vc_report(report: VcReport, set_class: SetClass) -> bool:
    """Re-checks the witnesses member by member and repeats the exhaustive search at the index."""
    if report.class_id != set_class.class_id:
        raise InvalidInputError(f"report is for {report.class_id}, class is {set_class.class_id}")
    needed = report.index - 1 if report.found else report.not_found_up_to
    by_size = {len(w.points): w for w in report.witnesses}
    for size in range(1, needed + 1):
        witness = by_size.get(size)
        if witness is None or len({c.subset for c in witness.certificates}) != 1 << size:
            return False
        for certificate in witness.certificates:
            contains = set_class.member(certificate.member, witness.points)
            picked = tuple(p for p in witness.points if contains(p))
            if picked != certificate.subset:
                return False
    if report.found:
        for points in itertools.combinations(report.universe, report.index):
            picked = set()
            for _, contains in set_class.members or ():
                picked.add(frozenset(p for p in points if contains(p)))
            if set_class.members is None or len(picked) == 1 << report.index:
                return False
    return True
