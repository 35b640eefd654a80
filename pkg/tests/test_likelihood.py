import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from altseq import (
    Dataset,
    DomainError,
    EstimationError,
    InsufficientDataError,
    ModelParams,
    Observation,
    ParamBounds,
    fit_mle,
    log_likelihood,
)
from altseq.fatigue import mu
from altseq.harness import simulate_lifetime

from conftest import SIGMA_ULT


def _scipy_loglik(params, data, cfg):
    # independent per-observation recomputation
    total = 0.0
    for obs in data:
        m = mu(obs.x, params, cfg)
        z = (math.log(obs.t) - m) / params.nu
        if obs.delta:
            if cfg.family.value == "normal":
                total += stats.norm.logsf(z)
            else:
                total += -math.exp(z)
        else:
            if cfg.family.value == "normal":
                total += stats.norm.logpdf(z) - math.log(params.nu) \
                    - math.log(obs.t)
            else:
                total += z - math.exp(z) - math.log(params.nu) \
                    - math.log(obs.t)
    return total


def _toy_data(cfg, theta, n=20, seed=3):
    rng = np.random.default_rng(seed)
    data = Dataset()
    for _ in range(n):
        q = float(rng.uniform(0.35, 0.75))
        data.append(simulate_lifetime(theta, q * SIGMA_ULT, cfg, rng))
    return data


def test_observation_validation():
    Observation(x=100.0, t=5.0, delta=0)
    for kw in (dict(x=0.0, t=5.0), dict(x=100.0, t=0.0),
               dict(x=100.0, t=5.0, delta=2), dict(x=math.inf, t=5.0)):
        with pytest.raises(DomainError):
            Observation(**kw)


def test_dataset_accounting(cfg, theta):
    data = _toy_data(cfg, theta, n=25)
    assert data.n == 25
    assert data.n_failures == sum(1 - o.delta for o in data)
    assert len(data.stresses()) == 25


def test_distinct_stress_counting():
    data = Dataset()
    data.append(Observation(x=500.0, t=10.0))
    data.append(Observation(x=500.0 * (1 + 1e-12), t=20.0))  # same level
    data.append(Observation(x=600.0, t=30.0))
    assert data.n_distinct_stresses() == 2


def test_loglik_matches_scipy(cfg, sev_cfg, theta):
    for c in (cfg, sev_cfg):
        data = _toy_data(c, theta, n=30, seed=9)
        ours = log_likelihood(theta, data, c)
        ref = _scipy_loglik(theta, data, c)
        assert ours == pytest.approx(ref, rel=1e-10)


def test_loglik_is_sum_of_parts(cfg, theta):
    data = _toy_data(cfg, theta, n=12, seed=5)
    total = log_likelihood(theta, data, cfg)
    parts = 0.0
    for obs in data:
        single = Dataset()
        single.append(obs)
        parts += log_likelihood(theta, single, cfg)
    assert total == pytest.approx(parts, rel=1e-12)


def test_loglik_permutation_invariant(cfg, theta):
    data = _toy_data(cfg, theta, n=15, seed=21)
    shuffled = Dataset()
    order = np.random.default_rng(1).permutation(data.n)
    obs = list(data)
    for i in order:
        shuffled.append(obs[int(i)])
    assert log_likelihood(theta, data, cfg) == pytest.approx(
        log_likelihood(theta, shuffled, cfg), rel=1e-12)


def test_loglik_empty_and_degenerate(cfg, theta):
    assert log_likelihood(theta, Dataset(), cfg) == 0.0
    flat = ModelParams(A=theta.A, B=theta.B, nu=0.0)
    with pytest.raises(DomainError):
        log_likelihood(flat, _toy_data(cfg, theta, 5), cfg)


def test_fit_recovers_truth_large_n(cfg, theta):
    # large uncensored sample across a wide stress range
    rng = np.random.default_rng(77)
    big = dataclasses.replace(cfg, censor_time=1e300)
    data = Dataset()
    for q in (0.2, 0.35, 0.5, 0.65, 0.8):
        for _ in range(100):
            data.append(simulate_lifetime(theta, q * SIGMA_ULT, big, rng))
    report = fit_mle(data, big)
    assert report.converged
    assert report.params.A == pytest.approx(theta.A, rel=0.15)
    assert report.params.B == pytest.approx(theta.B, rel=0.15)
    assert report.params.nu == pytest.approx(theta.nu, rel=0.15)
    # and the optimum beats the generating parameters
    assert report.log_lik >= log_likelihood(theta, data, big) - 1e-6


def test_fit_requires_information(cfg, theta):
    small = Dataset()
    small.append(Observation(x=500.0, t=1e4))
    small.append(Observation(x=500.0, t=2e4))
    with pytest.raises(InsufficientDataError):
        fit_mle(small, cfg)  # too few observations
    one_level = _toy_data(cfg, theta, n=0)
    for t in (1e4, 2e4, 3e4, 4e4):
        one_level.append(Observation(x=600.0, t=t))
    with pytest.raises(InsufficientDataError):
        fit_mle(one_level, cfg)  # one distinct stress


def test_fit_all_censored_rejected(cfg):
    data = Dataset()
    for x in (500.0, 600.0, 700.0):
        data.append(Observation(x=x, t=cfg.censor_time, delta=1))
    with pytest.raises(EstimationError):
        fit_mle(data, cfg)


def test_fit_respects_bounds(cfg, theta):
    data = _toy_data(cfg, theta, n=40, seed=13)
    box = ParamBounds(A=(1e-4, 1e-2), B=(0.05, 1.5), nu=(0.05, 5.0))
    report = fit_mle(data, cfg, bounds=box)
    assert box.A[0] <= report.params.A <= box.A[1]
    assert box.B[0] <= report.params.B <= box.B[1]
    assert box.nu[0] <= report.params.nu <= box.nu[1]


def test_fit_deterministic(cfg, theta):
    data = _toy_data(cfg, theta, n=25, seed=2)
    r1 = fit_mle(data, cfg)
    r2 = fit_mle(data, cfg)
    assert r1.params == r2.params
    assert r1.log_lik == r2.log_lik


def test_fit_report_str(cfg, theta):
    data = _toy_data(cfg, theta, n=30, seed=4)
    text = str(fit_mle(data, cfg))
    assert "loglik" in text and "converged" in text and "nu" in text
