import math

import numpy as np
import pytest

from gclab.errors import InvalidInputError
from gclab.gcip import (
    Boundedness,
    CovarianceSequence,
    GcipParams,
    gaussian_indicator_covariance,
    gcip_scan,
    implication_check,
    indicator_autocovariances,
    inside_normalized_variance,
    monte_carlo_variance,
    partial_sum_variances,
    s1_indicator,
    s1_mixing_bound,
    s2_indicator,
    s_functional,
)
from gclab.mixing import exact_profile
from gclab.procgen import ProcessSpec, generate, stream_rng

DECILES = tuple(round(0.1 * i, 1) for i in range(1, 10))


def test_iid_first_condition_is_constant(uniform_spec) -> None:
    for q in range(1, 129):
        assert s1_indicator(uniform_spec, 0.5, q, delta=1.0) == 0.25


def test_iid_second_condition(uniform_spec) -> None:
    assert s2_indicator(uniform_spec, 0.5, 3, delta=1.0) == pytest.approx(7.0 / 36.0, abs=1e-12)
    for q in (1, 5, 40):
        assert s2_indicator(uniform_spec, 0.5, q) == pytest.approx((2 * q + 1) / (4.0 * q * q), abs=1e-12)


def test_point_below_support_gives_zero(uniform_spec, two_state) -> None:
    assert s1_indicator(uniform_spec, -1.0, 10) == 0.0
    assert s1_indicator(two_state, -0.5, 10) == 0.0
    assert s2_indicator(two_state, 1.5, 10) == 0.0


def test_two_state_chain_values(two_state) -> None:
    assert s1_indicator(two_state, 0.5, 2, delta=1.0) == pytest.approx(0.36, abs=1e-12)
    assert s2_indicator(two_state, 0.5, 1, delta=1.0) == pytest.approx(1.32, abs=1e-12)


def test_two_state_chain_closed_form(two_state) -> None:
    # Var(S_q) = 0.72 q - 0.96 + 0.96 * 0.5^q for this chain.
    for q in (3, 10, 50):
        assert s1_indicator(two_state, 0.5, q) == pytest.approx(0.72 - 0.96 / q + 0.96 * 0.5**q / q, abs=1e-12)


def test_parameters_are_validated(two_state) -> None:
    with pytest.raises(InvalidInputError):
        s1_indicator(two_state, 0.5, 0)
    with pytest.raises(InvalidInputError):
        s1_indicator(two_state, 0.5, 4, delta=3.0)
    with pytest.raises(InvalidInputError):
        s2_indicator(two_state, 0.5, 4, delta=0.0)


def test_functional_matches_indicator(two_state) -> None:
    for q in (1, 4, 9):
        expected = s1_indicator(two_state, 0.5, q)
        assert s_functional(two_state, lambda s: float(s <= 0.5), q) == pytest.approx(expected, abs=1e-12)
        assert s_functional(two_state, lambda s: s, q) == pytest.approx(expected, abs=1e-12)
    assert s_functional(two_state, lambda s: 1.0, 6, which="S2") == pytest.approx(0.0, abs=1e-15)


def test_functional_of_iid_source(uniform_spec) -> None:
    # Var(U) = 1/12 for a standard uniform.
    assert s_functional(uniform_spec, lambda u: u, 4, delta=1.0) == pytest.approx(1.0 / 12.0, abs=1e-9)


def test_monte_carlo_functional_needs_envelope(two_state_spec) -> None:
    with pytest.raises(InvalidInputError):
        s_functional(two_state_spec, lambda s: s, 4, mode="MONTE_CARLO", reps=100)
    value = s_functional(two_state_spec, lambda s: s, 4, mode="MONTE_CARLO", envelope=1.0, reps=500, seed=2)
    assert value == pytest.approx(s1_indicator(two_state_spec, 0.5, 4), abs=0.15)


def test_monte_carlo_on_a_finite_chain(two_state) -> None:
    exact = s1_indicator(two_state, 0.5, 2)
    assert exact == pytest.approx(0.36, abs=1e-12)
    assert s1_indicator(two_state, 0.5, 2, mode="MONTE_CARLO", reps=2_000, seed=4) == pytest.approx(exact, abs=0.06)
    report = gcip_scan(two_state, GcipParams(q_max=8, x_grid=(0.5,), mode="MONTE_CARLO", reps=200))
    assert report.params.mode == "MONTE_CARLO"
    assert report.s1_stderr is not None


def test_functionals_of_gaussian_specs_fall_back_to_monte_carlo() -> None:
    ar1 = ProcessSpec.ar1(0.5)
    value = s_functional(ar1, np.tanh, 4, envelope=1.0, reps=500, seed=1)
    assert math.isfinite(value) and value > 0.0
    with pytest.raises(InvalidInputError):
        s_functional(ar1, np.tanh, 4, reps=500)
    with pytest.raises(InvalidInputError):
        s_functional(ar1, np.tanh, 4, mode="EXACT_MARKOV", envelope=1.0)
    family_report = gcip_scan(ar1, GcipParams(q_max=4, x_grid=(0.0,), reps=200), family={"tanh": np.tanh})
    assert family_report.params.mode == "MONTE_CARLO"
    assert gcip_scan(ar1, GcipParams(q_max=4, x_grid=(0.0,))).params.mode == "EXACT_MARKOV"


def test_sample_path_needs_monte_carlo(uniform_spec) -> None:
    path = generate(uniform_spec, 1_000, 1)
    with pytest.raises(InvalidInputError):
        s1_indicator(path, 0.5, 4, mode="EXACT_MARKOV")
    assert s1_indicator(path, 0.5, 4) == pytest.approx(0.25, abs=0.1)


def test_inside_normalization_identity() -> None:
    sums = stream_rng(5).normal(size=400)
    for q, delta in ((7, 1.0), (30, 0.4), (2, 2.5)):
        expected = np.var(sums, ddof=1) / q ** ((3.0 - delta) / 2.0)
        assert inside_normalized_variance(sums, q, delta) == pytest.approx(expected, rel=1e-12)


def test_gaussian_indicator_covariance() -> None:
    for rho in (-0.8, -0.2, 0.3, 0.9):
        assert gaussian_indicator_covariance(0.0, rho) == pytest.approx(math.asin(rho) / (2.0 * math.pi), abs=1e-12)
    assert gaussian_indicator_covariance(1.0, 0.0) == 0.0
    assert gaussian_indicator_covariance(0.0, 1.0) == pytest.approx(0.25, abs=1e-15)


def test_ar1_without_correlation_behaves_like_iid() -> None:
    spec = ProcessSpec.ar1(0.0)
    assert s1_indicator(spec, 0.0, 12) == pytest.approx(0.25, abs=1e-12)


def test_m_dependent_gaussian_covariances_vanish_beyond_m() -> None:
    gammas = indicator_autocovariances(ProcessSpec.m_dependent(2, "normal"), 0.3, 6)
    assert np.all(gammas[1:3] > 0.0)
    assert np.all(gammas[3:] == 0.0)


def test_two_state_monte_carlo_agrees_with_exact(two_state, two_state_spec) -> None:
    exact = partial_sum_variances(indicator_autocovariances(two_state, 0.5, 8), 8)
    indicator = lambda values: (values <= 0.5).astype(float)
    for q in (1, 4):
        estimate = monte_carlo_variance(two_state_spec, indicator, q, reps=2_000, seed=13)
        assert abs(estimate.value - exact[q - 1]) <= 5.0 * estimate.stderr


@pytest.mark.slow
@pytest.mark.parametrize("q", [1, 2, 4, 8, 16])
def test_monte_carlo_within_four_standard_errors(two_state, two_state_spec, q) -> None:
    exact = s1_indicator(two_state, 0.5, q)
    indicator = lambda values: (values <= 0.5).astype(float)
    estimate = monte_carlo_variance(two_state_spec, indicator, q, reps=10_000, seed=21)
    assert abs(estimate.value / q - exact) <= 4.0 * estimate.stderr / q


def test_iid_scan_is_bounded(uniform_spec) -> None:
    report = gcip_scan(uniform_spec, GcipParams(delta=1.0, q_max=64, x_grid=DECILES))
    assert report.bounded_verdict is Boundedness.BOUNDED
    assert report.s2_verdict is Boundedness.BOUNDED
    assert report.c1_hat == pytest.approx(0.25, rel=1e-12)
    assert report.c2_hat == pytest.approx(0.75, rel=1e-12)
    assert report.conditions_hold
    assert len(report.csv_rows()) == len(DECILES) * 64
    assert implication_check(report)


def test_two_state_scan_is_bounded(two_state) -> None:
    report = gcip_scan(two_state, GcipParams(delta=1.0, q_max=128, x_grid=(-0.5, 0.5, 1.5)))
    assert report.bounded_verdict is Boundedness.BOUNDED
    assert abs(report.s1_slope) <= 0.05
    assert report.c1_hat < 0.72
    assert report.row_verdicts == (Boundedness.BOUNDED,) * 3
    assert implication_check(report)


def test_long_memory_scan_grows() -> None:
    source = CovarianceSequence()
    report = gcip_scan(source, GcipParams(delta=1.0, q_max=128, x_grid=(0.0,)))
    assert report.synthetic
    assert report.bounded_verdict is Boundedness.GROWING
    assert report.s1_slope >= 0.6
    assert report.s2_verdict is Boundedness.BOUNDED
    assert not report.conditions_hold
    assert implication_check(report)


def test_scan_does_not_depend_on_workers(two_state) -> None:
    params = GcipParams(delta=0.5, q_max=32, x_grid=(0.5, 1.5))
    assert gcip_scan(two_state, params) == gcip_scan(two_state, params, workers=4)


def test_partial_blocks_dominate_plain_blocks(two_state) -> None:
    plain = gcip_scan(two_state, GcipParams(q_max=16, x_grid=(0.5,)))
    partial = gcip_scan(two_state, GcipParams(q_max=16, x_grid=(0.5,), partial_blocks=True))
    assert all(b >= a - 1e-15 for a, b in zip(plain.s2[0], partial.s2[0]))
    assert partial.s1 == plain.s1


def test_scan_over_function_family(two_state) -> None:
    family = {"identity": lambda s: s, "square": lambda s: s * s}
    report = gcip_scan(two_state, GcipParams(q_max=16, x_grid=(0.0,)), family=family)
    assert report.rows == ("identity", "square")
    with pytest.raises(InvalidInputError):
        gcip_scan(two_state, GcipParams(q_max=16, x_grid=(0.0,)), family={})


def test_monte_carlo_scan_reports_standard_errors(uniform_spec) -> None:
    params = GcipParams(q_max=4, x_grid=(0.5,), mode="MONTE_CARLO", reps=400, seed=3)
    report = gcip_scan(uniform_spec, params)
    assert report.s1_stderr is not None
    assert report.s1[0][0] == pytest.approx(0.25, abs=0.05)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"x_grid": ()},
        {"x_grid": (0.5, 0.1)},
        {"x_grid": (0.5,), "delta": 3.0},
        {"x_grid": (0.5,), "q_max": 1},
        {"x_grid": (0.5,), "slope_tol": 0.3},
    ],
)
def test_scan_parameters_are_validated(kwargs) -> None:
    with pytest.raises(ValueError):
        GcipParams(**kwargs)


@pytest.mark.parametrize("q", [2, 5, 10])
def test_mixing_bound_dominates_exact_value(two_state, q) -> None:
    exact = s1_indicator(two_state, 0.5, q)
    for kind in ("ALPHA", "BETA"):
        profile = exact_profile(two_state, range(1, q), kind)
        assert s1_mixing_bound(profile, q, 1.0, variance=0.24) >= exact - 1e-12


def test_mixing_bound_needs_every_lag(two_state) -> None:
    profile = exact_profile(two_state, (1, 2), "ALPHA")
    with pytest.raises(InvalidInputError):
        s1_mixing_bound(profile, 5, 1.0, variance=0.24)
