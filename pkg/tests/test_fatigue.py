import dataclasses
import math

import numpy as np
import pytest

from altseq import DomainError, ModelParams, TestConfig
from altseq.fatigue import (
    log_quantile_life,
    mu,
    mu_grad,
    psi_of_r,
    stress_factor,
)

from conftest import SIGMA_ULT


def test_psi_of_r():
    assert psi_of_r(0.1) == pytest.approx(0.1)
    assert psi_of_r(-2.0) == pytest.approx(-2.0)
    assert psi_of_r(4.0) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        psi_of_r(1.0)


def test_gamma_depends_on_alpha(cfg):
    assert cfg.gamma == pytest.approx(1.6)  # alpha = 0
    tilted = dataclasses.replace(cfg, alpha=math.pi / 2)
    assert tilted.gamma == pytest.approx(1.6 - 0.1)


def test_mu_reference_values(cfg, theta):
    # 30-digit quadrature-grade references at the bench constants
    assert mu(0.5 * SIGMA_ULT, theta, cfg) == pytest.approx(
        19.200524391835648, rel=1e-13)
    assert mu(0.35 * SIGMA_ULT, theta, cfg) == pytest.approx(
        21.809690229483375, rel=1e-13)
    assert mu(0.45 * SIGMA_ULT, theta, cfg) == pytest.approx(
        20.026677278808559, rel=1e-13)
    assert mu(0.75 * SIGMA_ULT, theta, cfg) == pytest.approx(
        15.010737390554074, rel=1e-13)


def test_mu_decreases_with_stress(cfg, theta):
    xs = np.linspace(0.05, 0.95, 60) * SIGMA_ULT
    vals = [mu(float(x), theta, cfg) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_mu_matches_direct_formula(cfg, theta):
    # independent recomputation, no log1p shortcut
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = float(rng.uniform(0.05, 0.95))
        x = q * SIGMA_ULT
        f = (1.0 / q - 1.0) * (1.0 / q) ** (cfg.gamma - 1.0) \
            * (1.0 - cfg.psi) ** (-cfg.gamma)
        S = (theta.B / theta.A) * cfg.h ** theta.B * f
        direct = math.log(S + 1.0) / theta.B
        assert mu(x, theta, cfg) == pytest.approx(direct, rel=1e-12)


def test_stress_factor_domain(cfg):
    with pytest.raises(DomainError):
        stress_factor(0.0, cfg)
    with pytest.raises(DomainError):
        stress_factor(SIGMA_ULT, cfg)
    with pytest.raises(DomainError):
        stress_factor(-5.0, cfg)
    assert stress_factor(0.5 * SIGMA_ULT, cfg) > 0


def test_mu_grad_finite_difference(cfg, theta):
    rng = np.random.default_rng(17)
    for _ in range(60):
        q = float(rng.uniform(0.1, 0.9))
        x = q * SIGMA_ULT
        dA, dB = mu_grad(x, theta, cfg)
        hA = theta.A * 1e-6
        hB = theta.B * 1e-6
        up = mu(x, dataclasses.replace(theta, A=theta.A + hA), cfg)
        dn = mu(x, dataclasses.replace(theta, A=theta.A - hA), cfg)
        assert dA == pytest.approx((up - dn) / (2 * hA), rel=2e-6)
        up = mu(x, dataclasses.replace(theta, B=theta.B + hB), cfg)
        dn = mu(x, dataclasses.replace(theta, B=theta.B - hB), cfg)
        assert dB == pytest.approx((up - dn) / (2 * hB), rel=2e-6)


def test_mu_grad_signs(cfg, theta):
    # more severe environment (larger A) shortens life at any stress
    dA, _ = mu_grad(0.3 * SIGMA_ULT, theta, cfg)
    assert dA < 0


def test_log_quantile_life(cfg, theta):
    x = 0.2 * SIGMA_ULT
    z05 = -1.6448536269514722
    expect = mu(x, theta, cfg) + z05 * theta.nu
    assert log_quantile_life(x, theta, cfg) == pytest.approx(expect, rel=1e-12)
    # median shortcut
    assert log_quantile_life(x, theta, cfg, p=0.5) == pytest.approx(
        mu(x, theta, cfg), rel=1e-12)


def test_config_validation():
    good = dict(h=2.0, R=0.1, alpha=0.0, sigma_ult=SIGMA_ULT, censor_time=1e7)
    TestConfig(**good)
    for field, bad in [("h", 0.0), ("R", 1.0), ("sigma_ult", -1.0),
                       ("censor_time", 0.0), ("p", 0.0), ("p", 1.0)]:
        kw = dict(good)
        kw[field] = bad
        with pytest.raises(DomainError):
            TestConfig(**kw)


def test_params_validation():
    ModelParams(A=1e-3, B=0.3, nu=0.7)
    ModelParams(A=1e-3, B=0.3, nu=0.0)  # degenerate scale is representable
    for kw in (dict(A=0.0, B=0.3, nu=0.7), dict(A=1e-3, B=0.0, nu=0.7),
               dict(A=1e-3, B=0.3, nu=-0.1)):
        with pytest.raises(DomainError):
            ModelParams(**kw)
