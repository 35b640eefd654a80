"""Cycles-to-failure stress-life model for constant-amplitude fatigue tests.

The location parameter of log life at stress amplitude x is

    mu(x) = (1/B) * log(1 + S(x))
    S(x)  = (B/A) * h**B * f(x)
    f(x)  = (sigma_ult/x - 1) * (sigma_ult/x)**(gamma-1) * (1-psi)**(-gamma)

with psi a folded stress ratio (R below 1 is used as-is, R above 1 is
inverted) and gamma = 1.6 - psi*|sin(alpha)| an empirical exponent in the
load-frequency term.  A and B are the material parameters being estimated;
h (cycle rate), R, alpha and sigma_ult are known test conditions.  mu
diverges as x approaches the fatigue limit at x -> 0 is not physical either,
so stress is validated to the open interval (0, sigma_ult).

Lifetimes are modeled as log-location-scale: log T = mu(x) + nu * Z with Z
standardized (normal or SEV), so the p-quantile of log life at stress x is
mu(x) + z_p * nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import DistributionFamily, std_quantile
from .errors import DomainError, ValidationError


def psi_of_r(R: float) -> float:
    """Fold the stress ratio: R for R < 1 (reversed loading included), 1/R above."""
    R = float(R)
    if not math.isfinite(R):
        raise DomainError(f"stress ratio must be finite, got {R!r}")
    if R == 1.0:
        raise DomainError("stress ratio R = 1 leaves the model undefined")
    return R if R < 1.0 else 1.0 / R


@dataclass(frozen=True)
class TestConfig:
    """Fixed test conditions shared by every unit in a campaign.

    Parameters
    ----------
    h : float
        Cycle rate (cycles per unit time), > 0.
    R : float
        Stress ratio of the fatigue loading, >= 0 and != 1.
    alpha : float
        Fiber angle in radians.
    sigma_ult : float
        Ultimate strength; stresses live strictly below it.
    censor_time : float
        Type-I censoring horizon in cycles, > 0.
    family : DistributionFamily
        Lifetime distribution family.
    p : float
        Quantile level of interest for life estimates, in (0, 1).
    """

    h: float
    R: float
    alpha: float
    sigma_ult: float
    censor_time: float
    family: DistributionFamily = DistributionFamily.LOGNORMAL
    p: float = 0.05

    def __post_init__(self) -> None:
        if not self.h > 0.0:
            raise DomainError(f"cycle rate h must be > 0, got {self.h!r}")
        psi_of_r(self.R)  # validates R
        if not self.sigma_ult > 0.0:
            raise DomainError(f"sigma_ult must be > 0, got {self.sigma_ult!r}")
        if not self.censor_time > 0.0:
            raise DomainError(f"censor_time must be > 0, got {self.censor_time!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"quantile level p must be in (0, 1), got {self.p!r}")
        if not isinstance(self.family, DistributionFamily):
            raise ValidationError(f"family must be a DistributionFamily, got {self.family!r}")

    @property
    def psi(self) -> float:
        return psi_of_r(self.R)

    @property
    def gamma(self) -> float:
        return 1.6 - self.psi * abs(math.sin(self.alpha))


@dataclass(frozen=True)
class ModelParams:
    """Material parameters (A, B) plus the log-life scale nu.

    nu = 0 is allowed so the deterministic curve can be evaluated on its own;
    likelihood and information computations require nu > 0 and say so.
    """

    A: float
    B: float
    nu: float

    def __post_init__(self) -> None:
        if not self.A > 0.0:
            raise DomainError(f"A must be > 0, got {self.A!r}")
        if not self.B > 0.0:
            raise DomainError(f"B must be > 0, got {self.B!r}")
        if not self.nu >= 0.0:
            raise DomainError(f"nu must be >= 0, got {self.nu!r}")


def _check_stress(x: float, cfg: TestConfig) -> float:
    x = float(x)
    if math.isnan(x) or not 0.0 < x < cfg.sigma_ult:
        raise DomainError(
            f"stress must satisfy 0 < x < sigma_ult = {cfg.sigma_ult}, got {x!r}")
    return x


def stress_factor(x: float, cfg: TestConfig) -> float:
    """The parameter-free stress/geometry part f(x) of the life curve.

    Separated out because every likelihood and design evaluation reuses it:
    mu depends on (A, B) only through S = (B/A) * h**B * f(x).
    """
    x = _check_stress(x, cfg)
    r = cfg.sigma_ult / x
    g = cfg.gamma
    return (r - 1.0) * r ** (g - 1.0) * (1.0 - cfg.psi) ** (-g)


def mu(x: float, params: ModelParams, cfg: TestConfig) -> float:
    """Location parameter of log cycles-to-failure at stress x."""
    S = (params.B / params.A) * cfg.h ** params.B * stress_factor(x, cfg)
    return math.log1p(S) / params.B


def mu_grad(x: float, params: ModelParams, cfg: TestConfig) -> tuple[float, float]:
    """Partial derivatives (d mu/dA, d mu/dB) at stress x.

    Closed forms, with the shared ratio S/(1+S) factored out:
        d mu/dA = -S / (A * B * (1+S))
        d mu/dB = -mu/B + S * (1/B + log h) / (B * (1+S))
    """
    A, B = params.A, params.B
    S = (B / A) * cfg.h ** B * stress_factor(x, cfg)
    ratio = S / (1.0 + S)
    m = math.log1p(S) / B
    d_a = -ratio / (A * B)
    d_b = -m / B + ratio * (1.0 / B + math.log(cfg.h)) / B
    return d_a, d_b


def log_quantile_life(x: float, params: ModelParams, cfg: TestConfig,
                      p: float | None = None) -> float:
    """log of the p-quantile of cycles-to-failure at stress x.

    p defaults to the quantile level carried by the config.
    """
    z = std_quantile(cfg.p if p is None else p, cfg.family)
    return mu(x, params, cfg) + z * params.nu
