import json
import math

import numpy as np
import pytest

from gclab.covcheck import (
    HolderTriple,
    InequalityId,
    check_alpha_holder,
    check_alpha_sup,
    check_beta_sup,
    cov_exact,
    norm_p,
    sweep,
)
from gclab.errors import InvalidInputError
from gclab.procgen import random_transition_model, stream_rng
from gclab.utils.tracing import JsonLinesSink


def indicator_of_zero(s: float) -> float:
    return float(s == 0.0)


def test_constant_function_has_zero_covariance(two_state) -> None:
    assert cov_exact(two_state, lambda s: 3.0, lambda s: s, 2) == pytest.approx(0.0, abs=1e-15)


def test_two_state_indicator_covariance(two_state) -> None:
    assert cov_exact(two_state, indicator_of_zero, indicator_of_zero, 1) == pytest.approx(0.12, abs=1e-12)
    assert cov_exact(two_state, indicator_of_zero, indicator_of_zero, 0) == pytest.approx(0.24, abs=1e-12)


def test_independent_chain_covariance(independent_chain) -> None:
    assert cov_exact(independent_chain, lambda s: s, lambda s: s**2 - 1.0, 3) == pytest.approx(0.0, abs=1e-15)


def test_covariance_is_symmetric_for_reversible_chains(two_state) -> None:
    f = (1.5, -2.0)
    g = (0.3, 4.0)
    for lag in (1, 2, 5):
        assert cov_exact(two_state, f, g, lag) == pytest.approx(cov_exact(two_state, g, f, lag), abs=1e-14)


def test_norms(two_state) -> None:
    assert norm_p(two_state, indicator_of_zero, 2.0) == pytest.approx(math.sqrt(0.4), abs=1e-15)
    assert norm_p(two_state, lambda s: -3.0, 3.0) == pytest.approx(3.0, abs=1e-12)
    assert norm_p(two_state, (1.0, -2.0), 1.0) == pytest.approx(0.4 + 1.2, abs=1e-14)
    assert norm_p(two_state, (1.0, -2.0), math.inf) == 2.0
    with pytest.raises(InvalidInputError):
        norm_p(two_state, (1.0, -2.0), 0.5)
    with pytest.raises(InvalidInputError):
        norm_p(two_state, (1.0, 2.0, 3.0), 2.0)


def test_norm_of_large_order_stays_below_sup_norm(two_state) -> None:
    value = norm_p(two_state, (5.0, 2.0), 2000.0)
    assert math.isfinite(value)
    assert value == pytest.approx(5.0 * 0.4 ** (1.0 / 2000.0), rel=1e-10)
    assert value <= 5.0
    orders = (1.0, 10.0, 1e3, 1e6)
    norms = [norm_p(two_state, (5.0, 2.0), p) for p in orders]
    assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


def test_holder_triples() -> None:
    HolderTriple(p=4.0, q=4.0, r=2.0)
    HolderTriple(p=math.inf, q=1.0, r=math.inf)
    with pytest.raises(ValueError):
        HolderTriple(p=2.0, q=2.0, r=2.0)
    with pytest.raises(ValueError):
        HolderTriple(p=0.5, q=-1.0, r=math.inf)


def test_alpha_holder_certificate(two_state) -> None:
    certificate = check_alpha_holder(two_state, indicator_of_zero, indicator_of_zero, 1, HolderTriple(p=4.0, q=4.0, r=2.0))
    assert certificate.lhs == pytest.approx(0.12, abs=1e-12)
    assert certificate.rhs == pytest.approx(8.0 * math.sqrt(0.12) * math.sqrt(0.4), rel=1e-12)
    assert certificate.rhs == pytest.approx(1.7527, abs=1e-4)
    assert certificate.passed
    assert certificate.inequality_id is InequalityId.ALPHA_8


def test_sup_norm_certificates(two_state) -> None:
    alpha = check_alpha_sup(two_state, indicator_of_zero, indicator_of_zero, 1)
    beta = check_beta_sup(two_state, indicator_of_zero, indicator_of_zero, 1)
    assert alpha.rhs == pytest.approx(0.48, abs=1e-12)
    assert beta.rhs == pytest.approx(0.48, abs=1e-12)
    assert alpha.passed and beta.passed


def test_independent_chain_certificates_are_tight(independent_chain) -> None:
    certificate = check_beta_sup(independent_chain, (1.0, -1.0), (2.0, 0.5), 1)
    assert certificate.lhs == pytest.approx(0.0, abs=1e-15)
    assert certificate.rhs == pytest.approx(0.0, abs=1e-15)
    assert certificate.passed


def test_certificate_digest_depends_on_inputs(two_state) -> None:
    first = check_alpha_sup(two_state, (1.0, 0.0), (1.0, 0.0), 1)
    same = check_alpha_sup(two_state, indicator_of_zero, indicator_of_zero, 1)
    other = check_alpha_sup(two_state, (1.0, 0.0), (1.0, 0.0), 2)
    assert first.inputs_digest == same.inputs_digest
    assert first.inputs_digest != other.inputs_digest


def test_random_chains_with_indicators_satisfy_all_bounds() -> None:
    rng = stream_rng(77)
    for _ in range(200):
        model = random_transition_model(rng, int(rng.integers(2, 6)))
        f = (model.values <= rng.integers(0, model.k)).astype(float)
        g = rng.normal(size=model.k)
        for lag in (1, 3):
            assert check_alpha_sup(model, f, g, lag).passed
            assert check_beta_sup(model, f, g, lag).passed
            assert check_alpha_holder(model, f, g, lag, HolderTriple(p=2.0, q=2.0, r=math.inf)).passed


def test_small_sweep_writes_evidence(tmp_path) -> None:
    target = tmp_path / "certificates.jsonl"
    with JsonLinesSink(target, label="covcheck") as sink:
        summary = sweep(50, seed=3, lags=(1, 2), sink=sink)
    assert summary.passed
    assert summary.models == 50
    assert summary.certificates == 50 * 2 * 3
    lines = target.read_text().splitlines()
    assert len(lines) == summary.certificates
    record = json.loads(lines[0])
    assert record["log_type"] == "certificate"
    assert record["payload"]["passed"] is True
    assert sink.failures == 0


def test_sweep_is_reproducible() -> None:
    assert sweep(20, seed=11) == sweep(20, seed=11)


@pytest.mark.slow
def test_thousand_model_sweep_has_no_failures() -> None:
    summary = sweep(1000, seed=2024)
    assert summary.certificates == 1000 * 5 * 3
    assert summary.passed
    assert all(slack >= -1e-10 for slack in summary.min_slack.values())


def test_sweep_rejects_empty_runs() -> None:
    with pytest.raises(InvalidInputError):
        sweep(0, seed=1)
    with pytest.raises(InvalidInputError):
        sweep(5, seed=1, lags=())


def test_lag_zero_bound_is_not_certified(two_state) -> None:
    with pytest.raises(InvalidInputError):
        check_alpha_sup(two_state, np.ones(2), np.ones(2), 0)
