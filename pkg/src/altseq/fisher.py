"""Expected Fisher information for Type-I censored log-location-scale lives.

For one unit at stress x with standardized censor point
zeta = (log t_c - mu(x)) / nu, the (mu, nu) information factors as a
standardized 2x2 matrix F(zeta) divided by nu^2.  The chain rule then maps
it into (A, B, nu) space through the gradient of mu:

    I_1(x) = J(x)' [F(zeta)/nu^2] J(x),   J = [[dmu/dA, dmu/dB, 0],
                                               [0,       0,      1]]

F(zeta) is computed here by adaptive quadrature of the expected negative
Hessian (failure part) plus closed-form censoring-mass terms, and memoized
on zeta quantized to 1e-6 -- this module is the accuracy reference, while
the kernels package evaluates the same quantities with fixed-node rules for
speed.  On the quantization grid the two agree to ~1e-12 (tested); off-grid
the reference rounds zeta, so it can differ from an exact evaluation by up
to ~|F'| * 5e-7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .distributions import DistributionFamily, std_logpdf, std_logsf, std_quantile
from .errors import DomainError, SingularMatrixError, ValidationError
from .fatigue import ModelParams, TestConfig, mu, mu_grad

# Ridge policy: trigger on eigenvalue ratio, inflate the diagonal by a fixed
# fraction of the mean diagonal.  Same constants as the kernels backends.
RIDGE_EIG_RATIO = 1e-10
RIDGE_TRACE_FRAC = 1e-8

_QUANT = 1e6  # zeta values are cached on a 1e-6 grid


@dataclass(frozen=True)
class UseProfile:
    """Weighted stress levels at which quantile life is to be estimated."""

    levels: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.levels) == 0 or len(self.levels) != len(self.weights):
            raise ValidationError("profile needs matching, nonempty levels and weights")
        if any(not (math.isfinite(v) and v > 0.0) for v in self.levels):
            raise ValidationError("profile levels must be finite and > 0")
        if any(not (math.isfinite(w) and w >= 0.0) for w in self.weights):
            raise ValidationError("profile weights must be finite and >= 0")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"profile weights must sum to 1, got {total!r}")

    @classmethod
    def uniform(cls, levels) -> "UseProfile":
        levels = tuple(float(v) for v in levels)
        w = 1.0 / len(levels)
        return cls(levels=levels, weights=(w,) * len(levels))


def _hazard(z: float, family: DistributionFamily) -> float:
    return math.exp(std_logpdf(z, family) - std_logsf(z, family))


def _neg_hessian_rows(z: float, family: DistributionFamily) -> tuple[float, float, float]:
    """Integrand rows (h11, h12, h22) of the failure part of F."""
    if family is DistributionFamily.LOGNORMAL:
        return 1.0, 2.0 * z, 3.0 * z * z - 1.0
    u = math.exp(min(z, 700.0))
    return u, u * z + u - 1.0, u * z * z + 2.0 * u * z - 2.0 * z - 1.0


@lru_cache(maxsize=262144)
def _std_unit_info_cached(code: int, key: int | None) -> tuple[float, float, float]:
    family = DistributionFamily.LOGNORMAL if code == 0 else DistributionFamily.WEIBULL
    zeta = math.inf if key is None else key / _QUANT

    def integrand(idx):
        def f(z):
            h = _neg_hessian_rows(z, family)[idx]
            return h * math.exp(std_logpdf(z, family))
        return f

    # both integrands vanish below -45 to double precision; the finite lower
    # bound plus interior breakpoints keep quad from missing the mass when the
    # upper limit sits far from it
    upper = min(zeta, 40.0)
    pts = [p for p in (-20.0, -8.0, -3.0, 0.0, 3.0, 8.0) if -45.0 < p < upper]
    entries = []
    for idx in range(3):
        val, _ = quad(integrand(idx), -45.0, upper, points=pts or None,
                      epsabs=1e-12, epsrel=1e-12, limit=200)
        entries.append(val)

    if math.isfinite(zeta) and zeta < 40.0:
        fz = math.exp(std_logpdf(zeta, family))
        if family is DistributionFamily.LOGNORMAL:
            fprime = -zeta * fz
        else:
            fprime = fz * (1.0 - math.exp(min(zeta, 700.0)))
        c11 = fprime + fz * _hazard(zeta, family)
        entries[0] += c11
        entries[1] += fz + zeta * c11
        entries[2] += 2.0 * zeta * fz + zeta * zeta * c11
    return entries[0], entries[1], entries[2]


def std_unit_info(zeta: float, family: DistributionFamily) -> np.ndarray:
    """Standardized 2x2 censored information F(zeta); caller scales by 1/nu^2.

    zeta = +inf means no censoring.  Values are memoized on a 1e-6 grid in
    zeta, so repeated design evaluations do not re-integrate.
    """
    zeta = float(zeta)
    if math.isnan(zeta):
        raise DomainError("zeta must not be NaN")
    if math.isinf(zeta) and zeta < 0:
        # everything censored before any information accrues
        return np.zeros((2, 2))
    key = None if math.isinf(zeta) else round(zeta * _QUANT)
    f11, f12, f22 = _std_unit_info_cached(family.code, key)
    return np.array([[f11, f12], [f12, f22]])


def unit_info(x: float, params: ModelParams, cfg: TestConfig) -> np.ndarray:
    """Expected information of a single unit at stress x, 3x3 in (A, B, nu)."""
    if not params.nu > 0.0:
        raise DomainError("information requires nu > 0")
    zeta = (math.log(cfg.censor_time) - mu(x, params, cfg)) / params.nu
    F = std_unit_info(zeta, cfg.family)
    d_a, d_b = mu_grad(x, params, cfg)
    inv_nu2 = 1.0 / (params.nu * params.nu)
    f11, f12, f22 = F[0, 0] * inv_nu2, F[0, 1] * inv_nu2, F[1, 1] * inv_nu2
    return np.array([
        [f11 * d_a * d_a, f11 * d_a * d_b, f12 * d_a],
        [f11 * d_a * d_b, f11 * d_b * d_b, f12 * d_b],
        [f12 * d_a, f12 * d_b, f22],
    ])


def info_matrix(stresses, params: ModelParams, cfg: TestConfig) -> np.ndarray:
    """Expected information of a design: sum of unit_info over its stresses."""
    total = np.zeros((3, 3))
    for x in stresses:
        total += unit_info(float(x), params, cfg)
    return total


def update_info(info: np.ndarray, x: float, params: ModelParams,
                cfg: TestConfig) -> np.ndarray:
    """info plus the single-unit information of one more unit at stress x."""
    return np.asarray(info, dtype=np.float64) + unit_info(x, params, cfg)


def invert_info(info: np.ndarray) -> tuple[np.ndarray, float]:
    """Covariance approximation inv(info) under the documented ridge policy.

    Returns (covariance, ridge) where ridge is the diagonal inflation that
    was applied (0.0 when none was needed).  A ridge is added whenever the
    smallest eigenvalue drops below RIDGE_EIG_RATIO times the largest; an
    identically-zero matrix is not repairable and raises instead.
    """
    info = np.asarray(info, dtype=np.float64)
    if info.shape != (3, 3):
        raise ValidationError(f"expected a 3x3 matrix, got shape {info.shape}")
    if not np.all(np.isfinite(info)):
        raise ValidationError("information matrix has non-finite entries")
    info = 0.5 * (info + info.T)
    if not np.any(info):
        raise SingularMatrixError("information matrix is identically zero")
    eigs = np.linalg.eigvalsh(info)
    lmin, lmax = float(eigs[0]), float(eigs[-1])
    if lmax <= 0.0:
        raise SingularMatrixError("information matrix has no positive eigenvalue")
    ridge = 0.0
    if lmin < RIDGE_EIG_RATIO * lmax:
        ridge = RIDGE_TRACE_FRAC * float(np.trace(info)) / 3.0
        info = info + ridge * np.eye(3)
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"information matrix not invertible: {exc}") from exc
    return 0.5 * (cov + cov.T), ridge


def c_vector(x: float, params: ModelParams, cfg: TestConfig) -> np.ndarray:
    """Gradient of the log p-quantile life at stress x w.r.t. (A, B, nu)."""
    d_a, d_b = mu_grad(x, params, cfg)
    return np.array([d_a, d_b, std_quantile(cfg.p, cfg.family)])


def weighted_avar(params: ModelParams, stresses, profile: UseProfile,
                  cfg: TestConfig) -> tuple[float, float]:
    """Profile-weighted asymptotic variance of the log quantile-life estimate.

    sum_k w_k c(x_k)' Sigma c(x_k) with Sigma = invert_info(design info).
    Returns (value, ridge) so callers can flag repaired inversions.
    """
    cov, ridge = invert_info(info_matrix(stresses, params, cfg))
    total = 0.0
    for level, w in zip(profile.levels, profile.weights):
        c = c_vector(level, params, cfg)
        total += w * float(c @ cov @ c)
    return total, ridge
