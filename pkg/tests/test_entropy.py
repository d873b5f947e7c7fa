import math

import numpy as np
import pytest

from gclab.entropy import (
    bracket_halflines,
    closed_intervals,
    gc_verdict,
    halflines,
    power_set,
    shatter_check,
    vc_entropy_bound,
    vc_index,
    verify_cover,
    verify_vc_report,
)
from gclab.errors import FeasibilityError, InvalidInputError
from gclab.gcip import CovarianceSequence, GcipParams, gcip_scan
from gclab.procgen import ProcessSpec, marginal_law, stream_rng
from gclab.procgen.laws import DiscreteLaw

DECILES = tuple(round(0.1 * i, 1) for i in range(1, 10))


@pytest.fixture
def uniform_law():
    return marginal_law(ProcessSpec.iid("uniform"))


def test_uniform_cover_at_one_half(uniform_law) -> None:
    cover = bracket_halflines(uniform_law, 0.5)
    assert cover.count == 4
    assert all(b.size == pytest.approx(0.5, abs=1e-12) for b in cover.brackets)
    assert cover.flag == "CONSTRUCTIVE_UPPER_BOUND"
    assert verify_cover(cover, uniform_law).passed


def test_large_epsilon_needs_one_bracket(uniform_law) -> None:
    cover = bracket_halflines(uniform_law, 1.5)
    assert cover.count == 1
    assert cover.brackets[0].size == pytest.approx(1.0, abs=1e-12)


def test_two_atom_cover() -> None:
    law = DiscreteLaw(atoms=(0.0, 1.0), masses=(0.4, 0.6))
    cover = bracket_halflines(law, 0.5)
    assert cover.count <= 3
    assert verify_cover(cover, law).passed


@pytest.mark.parametrize("epsilon", [0.2, 0.1])
@pytest.mark.parametrize("family", ["normal", "exponential"])
def test_covers_pass_reverification(family, epsilon) -> None:
    law = marginal_law(ProcessSpec.iid(family))
    cover = bracket_halflines(law, epsilon)
    assert cover.count == round(1.0 / epsilon**2)
    verification = verify_cover(cover, law)
    assert verification.passed, verification


def test_abs_metric_uses_linear_gaps(uniform_law) -> None:
    cover = bracket_halflines(uniform_law, 0.25, metric="ABS")
    assert cover.count == 4
    assert verify_cover(cover, uniform_law).passed


def test_epsilon_must_be_positive(uniform_law) -> None:
    with pytest.raises(InvalidInputError):
        bracket_halflines(uniform_law, 0.0)


def test_halflines_cannot_pick_the_right_point() -> None:
    result = shatter_check(halflines((1.0, 2.0)), (1.0, 2.0))
    assert not result.shattered
    assert result.missing_subset == (2.0,)
    assert shatter_check(halflines((1.0,)), (1.0,)).shattered


def test_intervals_cannot_skip_the_middle() -> None:
    result = shatter_check(closed_intervals((1.0, 2.0, 3.0)), (1.0, 2.0, 3.0))
    assert not result.shattered
    assert result.missing_subset == (1.0, 3.0)


def test_shattering_is_monotone() -> None:
    universe = tuple(float(i) for i in range(10))
    set_class = closed_intervals(universe)
    rng = stream_rng(6)
    for _ in range(50):
        chosen = rng.permutation(universe)
        size = int(rng.integers(1, 6))
        small, large = chosen[:size], chosen[: size + int(rng.integers(1, 4))]
        if not shatter_check(set_class, small).shattered:
            assert not shatter_check(set_class, large).shattered


def test_shatter_check_caps_points() -> None:
    points = tuple(float(i) for i in range(23))
    with pytest.raises(FeasibilityError):
        shatter_check(halflines(points), points)


def test_vc_indices() -> None:
    grid = tuple(float(i) for i in range(20))
    halfline_report = vc_index(halflines(grid), max_n=6)
    assert halfline_report.index == 2
    assert verify_vc_report(halfline_report, halflines(grid))
    interval_report = vc_index(closed_intervals(grid[:8]), max_n=6)
    assert interval_report.index == 3
    assert verify_vc_report(interval_report, closed_intervals(grid[:8]))
    everything = vc_index(power_set(grid[:6]), max_n=6)
    assert not everything.found
    assert everything.not_found_up_to == 6
    assert verify_vc_report(everything, power_set(grid[:6]))


def test_vc_index_caps_cardinality() -> None:
    with pytest.raises(FeasibilityError):
        vc_index(halflines((0.0, 1.0)), max_n=13)


def test_vc_entropy_bound() -> None:
    assert vc_entropy_bound(1, 0.01, 1.5, 2.0) == pytest.approx(1.5 * 4.0 * math.e, rel=1e-12)
    assert vc_entropy_bound(2, 0.5, 1.0, 2.0) == pytest.approx(2.0 * (4.0 * math.e) ** 2 * 4.0, rel=1e-12)
    assert vc_entropy_bound(2, 0.5, 1.0, 2.0) == pytest.approx(945.7, abs=0.1)
    values = [vc_entropy_bound(3, eps, 1.0, 1.5) for eps in np.linspace(0.05, 1.0, 20)]
    assert all(b <= a for a, b in zip(values, values[1:]))
    with pytest.raises(InvalidInputError):
        vc_entropy_bound(2, 0.5, 1.0, 1.0)


def test_verdict_for_iid_and_long_memory(uniform_law, uniform_spec) -> None:
    covers = [bracket_halflines(uniform_law, eps) for eps in (0.5, 0.1)]
    bounded = gcip_scan(uniform_spec, GcipParams(q_max=64, x_grid=DECILES))
    verdict = gc_verdict(covers, bounded)
    assert verdict.verdict == "SUFFICIENT_CONDITIONS_VERIFIED"
    assert verdict.checklist["b1"].passed
    assert "sufficient" in verdict.notes[0]
    growing = gcip_scan(CovarianceSequence(), GcipParams(q_max=128, x_grid=(0.0,)))
    failed = gc_verdict(covers, growing)
    assert failed.verdict == "NOT_VERIFIED"
    assert failed.failing == ("gcip",)


def test_verdict_reverifies_covers_against_the_law(uniform_law, uniform_spec) -> None:
    covers = [bracket_halflines(uniform_law, 0.5)]
    report = gcip_scan(uniform_spec, GcipParams(q_max=16, x_grid=(0.5,)))
    unchecked = gc_verdict(covers, report)
    assert "not re-verified" in unchecked.checklist["b1"].evidence
    checked = gc_verdict(covers, report, law=uniform_law)
    assert checked.checklist["b1"].passed
    assert checked.checklist["b1"].evidence.endswith("re-verified")
    wrong_law = gc_verdict(covers, report, law=marginal_law(ProcessSpec.iid("normal")))
    assert not wrong_law.checklist["b1"].passed
    assert wrong_law.verdict == "NOT_VERIFIED"
    assert wrong_law.failing == ("entropy",)


def test_verdict_uses_vc_index_for_the_sup_norm_part(uniform_law, two_state) -> None:
    covers = [bracket_halflines(uniform_law, 0.5)]
    report = gcip_scan(two_state, GcipParams(q_max=128, x_grid=(0.5,)))
    vc = vc_index(halflines(tuple(float(i) for i in range(10))), max_n=4)
    verdict = gc_verdict(covers, report, vc_report=vc)
    assert verdict.verdict == "SUFFICIENT_CONDITIONS_VERIFIED"
    assert verdict.checklist["a1"].passed
    assert "VC index 2" in verdict.checklist["a1"].evidence


def test_verdict_rejects_bad_inputs(uniform_law, uniform_spec) -> None:
    report = gcip_scan(uniform_spec, GcipParams(q_max=8, x_grid=(0.5,)))
    with pytest.raises(InvalidInputError):
        gc_verdict([], report)
    cover = bracket_halflines(uniform_law, 0.5).model_copy(update={"class_id": "intervals"})
    with pytest.raises(InvalidInputError):
        gc_verdict([cover], report)
