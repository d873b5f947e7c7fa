import itertools
import math

import numpy as np
import pytest

from gclab.errors import FeasibilityError, FitUndefinedError, InsufficientDataError, InvalidInputError
from gclab.mixing import (
    MixingKind,
    MixingProfile,
    Provenance,
    RateThreshold,
    alpha_markov_exact,
    alpha_modulus_estimate,
    alpha_modulus_exact,
    beta_markov_exact,
    beta_modulus_exact,
    estimated_profile,
    exact_profile,
    fit_decay,
    modulus_stderr,
    threshold_check,
)
from gclab.procgen import ProcessSpec, SamplePath, TransitionModel, generate, random_transition_model, stream_rng


def _brute_force_alpha(model: TransitionModel, n: int) -> float:
    pi = model.stationary
    deviation = pi[:, None] * np.linalg.matrix_power(model.P, n) - np.outer(pi, pi)
    states = range(model.k)
    subsets = [s for size in range(model.k + 1) for s in itertools.combinations(states, size)]
    return max(abs(deviation[np.ix_(a, b)].sum()) if a and b else 0.0 for a in subsets for b in subsets)


def _profile(values, kind=MixingKind.ALPHA) -> MixingProfile:
    return MixingProfile(
        kind=kind,
        lags=tuple(range(1, len(values) + 1)),
        values=tuple(values),
        provenance=Provenance(source="EXACT"),
    )


def test_two_state_chain_values(two_state) -> None:
    assert alpha_markov_exact(two_state, 1) == pytest.approx(0.12, abs=1e-12)
    assert alpha_markov_exact(two_state, 3) == pytest.approx(0.03, abs=1e-12)
    assert beta_markov_exact(two_state, 1) == pytest.approx(0.24, abs=1e-12)
    assert beta_markov_exact(two_state, 4) == pytest.approx(0.03, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 11))
def test_two_state_chain_closed_forms(two_state, n) -> None:
    assert alpha_markov_exact(two_state, n) == pytest.approx(0.24 * 0.5**n, abs=1e-10)
    assert beta_markov_exact(two_state, n) == pytest.approx(0.48 * 0.5**n, abs=1e-10)
    assert alpha_markov_exact(two_state, n) == pytest.approx(_brute_force_alpha(two_state, n), abs=1e-12)


def test_independent_chain_has_no_dependence(independent_chain) -> None:
    for n in (1, 2, 7):
        assert alpha_markov_exact(independent_chain, n) == pytest.approx(0.0, abs=1e-15)
        assert beta_markov_exact(independent_chain, n) == pytest.approx(0.0, abs=1e-15)


def test_lag_must_be_positive(two_state) -> None:
    with pytest.raises(InvalidInputError):
        alpha_markov_exact(two_state, 0)
    with pytest.raises(InvalidInputError):
        beta_markov_exact(two_state, -1)


def test_exact_alpha_refuses_large_state_spaces() -> None:
    k = 21
    model = TransitionModel.from_matrix(range(k), np.full((k, k), 1.0 / k))
    with pytest.raises(FeasibilityError):
        alpha_markov_exact(model, 1)
    assert beta_markov_exact(model, 1) == pytest.approx(0.0, abs=1e-12)


def test_random_chains_respect_ranges_and_ordering() -> None:
    rng = stream_rng(20240601)
    for index in range(1000):
        model = random_transition_model(rng, int(rng.integers(2, 7)))
        x = float(rng.integers(0, model.k))
        for n in (1, 2, 3):
            alpha = alpha_markov_exact(model, n)
            beta = beta_markov_exact(model, n)
            assert 0.0 <= alpha <= 0.25
            assert 0.0 <= beta <= 1.0
            assert alpha <= beta + 1e-12
            assert alpha_modulus_exact(model, x, n) <= alpha + 1e-12
            assert beta_modulus_exact(model, x, n) <= beta + 1e-12
        if index % 50 == 0 and model.k <= 4:
            assert alpha_markov_exact(model, 2) == pytest.approx(_brute_force_alpha(model, 2), abs=1e-12)


@pytest.mark.parametrize("p, q", [(0.3, 0.2), (0.9, 0.8), (0.05, 0.6), (0.5, 0.1)])
def test_two_state_coefficients_decay_monotonically(p, q) -> None:
    model = TransitionModel.from_matrix((0.0, 1.0), ((1 - p, p), (q, 1 - q)))
    alphas = [alpha_markov_exact(model, n) for n in range(1, 15)]
    betas = [beta_markov_exact(model, n) for n in range(1, 15)]
    assert all(b <= a + 1e-15 for a, b in zip(alphas, alphas[1:]))
    assert all(b <= a + 1e-15 for a, b in zip(betas, betas[1:]))


def test_indicator_moduli_of_two_state_chain(two_state) -> None:
    assert alpha_modulus_exact(two_state, 0.5, 1) == pytest.approx(0.12, abs=1e-12)
    assert beta_modulus_exact(two_state, 0.5, 1) == pytest.approx(0.24, abs=1e-12)
    assert alpha_modulus_exact(two_state, 2.0, 1) == pytest.approx(0.0, abs=1e-15)


def test_alpha_estimate_on_iid_path(uniform_spec) -> None:
    path = generate(uniform_spec, 200_000, 3)
    assert alpha_modulus_estimate(path, 0.5, 1) < 0.005


def test_alpha_estimate_on_two_state_chain(two_state_spec) -> None:
    path = generate(two_state_spec, 100_000, 8)
    assert alpha_modulus_estimate(path, 0.5, 1) == pytest.approx(0.12, abs=0.01)


@pytest.mark.slow
def test_alpha_estimate_within_three_standard_errors(two_state_spec) -> None:
    path = generate(two_state_spec, 1_000_000, 8)
    estimate = alpha_modulus_estimate(path, 0.5, 1)
    assert abs(estimate - 0.12) <= 3.0 * modulus_stderr(path, 0.5, 1)


def test_alpha_estimate_on_constant_path() -> None:
    path = SamplePath(values=(2.0,) * 100, spec_label="constant", seed=0, n=100)
    assert alpha_modulus_estimate(path, 2.0, 1) == 0.0
    assert alpha_modulus_estimate(path, 1.0, 3) == 0.0


def test_alpha_estimate_needs_enough_data(uniform_spec) -> None:
    path = generate(uniform_spec, 40, 1)
    with pytest.raises(InsufficientDataError):
        alpha_modulus_estimate(path, 0.5, 10)


@pytest.mark.parametrize("kind, C", [(MixingKind.BETA, 0.7), (MixingKind.ALPHA, 0.2)])
def test_fit_recovers_power_law(kind, C) -> None:
    values = [C * n**-1.5 for n in range(1, 11)]
    fit = fit_decay(_profile(values, kind))
    assert fit.flag == "polynomial"
    assert fit.a == pytest.approx(1.5, abs=1e-9)
    assert fit.C == pytest.approx(C, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_flags_geometric_decay() -> None:
    fit = fit_decay(_profile([0.48 * 0.5**n for n in range(1, 11)], MixingKind.BETA))
    assert fit.flag == "super-polynomial"
    assert fit.geometric_rate == pytest.approx(0.5, rel=1e-9)
    assert math.isinf(fit.effective_exponent)


def test_fit_needs_positive_values() -> None:
    with pytest.raises(FitUndefinedError):
        fit_decay(_profile([0.0] * 10))
    with pytest.raises(FitUndefinedError):
        fit_decay(_profile([0.1, 0.05, 0.0, 0.0]))


def test_fit_drops_zero_values() -> None:
    fit = fit_decay(_profile([0.2, 0.0, 0.2 / 27, 0.2 / 64, 0.2 / 125]))
    assert fit.excluded_lags == (2,)
    assert fit.a == pytest.approx(3.0, abs=1e-9)


def test_threshold_exponents() -> None:
    assert RateThreshold(delta=0.5).exponent == pytest.approx(3.0, abs=1e-12)
    assert RateThreshold(delta=0.01).exponent == pytest.approx(1.01 / 0.99, abs=1e-12)
    exponents = [RateThreshold(delta=d).exponent for d in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert exponents == sorted(exponents)


@pytest.mark.parametrize("delta", [0.01, 0.25, 0.5, 0.75, 0.99])
def test_geometric_chains_satisfy_every_threshold(two_state, delta) -> None:
    profile = exact_profile(two_state, range(1, 11), MixingKind.BETA)
    check = threshold_check(profile, delta)
    assert check.verdict == "SATISFIED"
    assert math.isinf(check.fitted_exponent)


def test_power_law_against_thresholds() -> None:
    profile = _profile([0.2 * n**-2.0 for n in range(1, 11)], MixingKind.BETA)
    assert threshold_check(profile, 0.5).verdict == "VIOLATED"
    assert threshold_check(profile, 1.0 / 3.0).verdict == "SATISFIED"
    assert threshold_check(profile, 0.5).beta_summable is True


def test_vanishing_profile_is_satisfied() -> None:
    check = threshold_check(_profile([0.1, 0.05, 0.0, 0.0, 0.0]), 0.9)
    assert check.verdict == "SATISFIED"
    assert check.flag == "vanishing"


def test_threshold_check_rejects_bad_input() -> None:
    profile = _profile([0.2 * n**-2.0 for n in range(1, 6)])
    for delta in (0.0, 1.0, -0.2):
        with pytest.raises(InvalidInputError):
            threshold_check(profile, delta)
    with pytest.raises(InvalidInputError):
        threshold_check(_profile([]), 0.5)


def test_noisy_fit_is_inconclusive() -> None:
    values = [0.2 * n**-2.0 * (3.0 if n % 2 else 0.3) for n in range(1, 11)]
    assert threshold_check(_profile(values, MixingKind.BETA), 0.5).verdict == "INCONCLUSIVE"


def test_profile_range_is_enforced() -> None:
    with pytest.raises(ValueError):
        _profile([0.3])
    with pytest.raises(ValueError):
        MixingProfile(kind=MixingKind.ALPHA, lags=(2, 1), values=(0.1, 0.1), provenance=Provenance(source="EXACT"))


def test_exact_beta_profile_carries_event_form(two_state) -> None:
    profile = exact_profile(two_state, (1, 2, 3), "BETA")
    assert profile.provenance.source == "EXACT"
    assert profile.metadata["sup_event_form"] == pytest.approx([0.12, 0.06, 0.03], abs=1e-12)


def test_estimated_profile_for_iid_source(uniform_spec) -> None:
    profile = estimated_profile(uniform_spec, 0.5, (1, 2, 3), reps=8, path_length=5_000, seed=4)
    assert profile.provenance.source == "ESTIMATED"
    assert profile.provenance.reps == 8
    assert max(profile.values) < 0.02


def test_estimated_profile_is_worker_independent(two_state_spec) -> None:
    serial = estimated_profile(two_state_spec, 0.5, (1, 2), reps=6, path_length=2_000, seed=9)
    parallel = estimated_profile(two_state_spec, 0.5, (1, 2), reps=6, path_length=2_000, seed=9, workers=3)
    assert serial == parallel
