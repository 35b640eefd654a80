"""Censored lifetime observations and maximum likelihood estimation.

An observation is (stress, time, delta) with delta = 1 meaning the unit was
still running when the test ended (Type-I censoring), delta = 0 a failure.
The log-likelihood of log-location-scale lifetimes is, with
z_i = (log t_i - mu(x_i)) / nu,

    sum_i (1 - d_i) * [log f(z_i) - log nu - log t_i] + d_i * log S(z_i)

where f and S are the standardized density and survival function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_ndtr
from scipy.stats import qmc

from .distributions import DistributionFamily
from .errors import (DomainError, EstimationError, InsufficientDataError,
                     ValidationError)
from .fatigue import ModelParams, TestConfig, stress_factor

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Seed of the low-discrepancy start scrambling; fixed so fits are repeatable.
_FIT_SEED = 190733


@dataclass(frozen=True)
class Observation:
    """One test unit: stress level, cycles observed, censoring indicator."""

    x: float
    t: float
    delta: int = 0
    off_recommendation: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and self.x > 0.0):
            raise DomainError(f"stress must be finite and > 0, got {self.x!r}")
        if not (math.isfinite(self.t) and self.t > 0.0):
            raise DomainError(f"lifetime must be finite and > 0, got {self.t!r}")
        if self.delta not in (0, 1):
            raise DomainError(f"delta must be 0 or 1, got {self.delta!r}")


class Dataset:
    """Ordered collection of observations."""

    def __init__(self, observations=()):
        self.observations: list[Observation] = []
        for obs in observations:
            self.append(obs)

    def append(self, obs: Observation) -> None:
        if not isinstance(obs, Observation):
            raise ValidationError(f"expected an Observation, got {type(obs).__name__}")
        self.observations.append(obs)

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def n_failures(self) -> int:
        return sum(1 for o in self.observations if o.delta == 0)

    def stresses(self) -> np.ndarray:
        return np.array([o.x for o in self.observations], dtype=np.float64)

    def times(self) -> np.ndarray:
        return np.array([o.t for o in self.observations], dtype=np.float64)

    def deltas(self) -> np.ndarray:
        return np.array([o.delta for o in self.observations], dtype=np.float64)

    def n_distinct_stresses(self, rel_tol: float = 1e-9) -> int:
        xs = sorted(o.x for o in self.observations)
        if not xs:
            return 0
        count = 1
        for a, b in zip(xs, xs[1:]):
            if b - a > rel_tol * max(abs(a), abs(b)):
                count += 1
        return count

    def __iter__(self):
        return iter(self.observations)

    def __len__(self) -> int:
        return len(self.observations)


def _loglik_core(A: float, B: float, nu: float, fx: np.ndarray,
                 logt: np.ndarray, fail: np.ndarray, family: DistributionFamily,
                 log_h: float, sum_logt_fail: float) -> float:
    S = (B / A) * math.exp(B * log_h) * fx
    mu = np.log1p(S) / B
    z = (logt - mu) / nu
    zf = z[fail]
    zc = z[~fail]
    n_fail = zf.size
    if family is DistributionFamily.LOGNORMAL:
        lf = -0.5 * float(zf @ zf) - n_fail * _LOG_SQRT_2PI
        lc = float(np.sum(log_ndtr(-zc))) if zc.size else 0.0
    else:
        lf = float(np.sum(zf - np.exp(np.minimum(zf, 700.0))))
        lc = -float(np.sum(np.exp(np.minimum(zc, 700.0))))
    total = lf - n_fail * math.log(nu) - sum_logt_fail + lc
    return total if math.isfinite(total) else -math.inf


def log_likelihood(params: ModelParams, data: Dataset, cfg: TestConfig) -> float:
    """Censored log-likelihood of the dataset at the given parameters."""
    if not params.nu > 0.0:
        raise DomainError("log-likelihood requires nu > 0")
    if data.n == 0:
        return 0.0
    fx = np.array([stress_factor(o.x, cfg) for o in data], dtype=np.float64)
    logt = np.log(data.times())
    fail = data.deltas() == 0.0
    sum_logt_fail = float(np.sum(logt[fail]))
    return _loglik_core(params.A, params.B, params.nu, fx, logt, fail,
                        cfg.family, math.log(cfg.h), sum_logt_fail)


@dataclass(frozen=True)
class ParamBounds:
    """Box constraints for estimation, one (low, high) pair per parameter."""

    A: tuple[float, float] = (1e-6, 1.0)
    B: tuple[float, float] = (0.01, 5.0)
    nu: tuple[float, float] = (1e-3, 10.0)

    def __post_init__(self) -> None:
        for name in ("A", "B", "nu"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo < hi):
                raise ValidationError(
                    f"bounds for {name} must satisfy 0 < low < high, got ({lo!r}, {hi!r})")

    def contains(self, params: ModelParams) -> bool:
        return (self.A[0] <= params.A <= self.A[1]
                and self.B[0] <= params.B <= self.B[1]
                and self.nu[0] <= params.nu <= self.nu[1])


DEFAULT_BOUNDS = ParamBounds()


@dataclass(frozen=True)
class FitReport:
    """Outcome of a maximum likelihood fit."""

    params: ModelParams
    log_lik: float
    converged: bool
    n_starts: int
    best_start: int
    boundary: tuple[str, ...] = ()
    nfev: int = 0

    def __str__(self) -> str:
        p = self.params
        lines = [
            f"A      = {p.A:.6g}",
            f"B      = {p.B:.6g}",
            f"nu     = {p.nu:.6g}",
            f"loglik = {self.log_lik:.6f}",
            f"converged = {self.converged} (best start {self.best_start}, nfev {self.nfev})",
        ]
        if self.boundary:
            lines.append("at bounds: " + ", ".join(self.boundary))
        return "\n".join(lines)


def fit_mle(data: Dataset, cfg: TestConfig,
            bounds: ParamBounds | None = None, n_starts: int = 10) -> FitReport:
    """Maximize the censored log-likelihood over (A, B, nu) inside a box.

    Nelder-Mead in log-parameter space from ``n_starts`` scrambled
    low-discrepancy starting points; the best finite optimum wins, ties go
    to the earliest start.  The returned parameters never leave the box.

    Raises
    ------
    InsufficientDataError
        Fewer than 3 observations or fewer than 2 distinct stress levels.
    EstimationError
        Every observation censored, or no start produced a finite optimum.
    """
    if bounds is None:
        bounds = DEFAULT_BOUNDS
    if data.n < 3:
        raise InsufficientDataError(
            f"need at least 3 observations to fit 3 parameters, have {data.n}")
    if data.n_distinct_stresses() < 2:
        raise InsufficientDataError(
            "need observations at 2 or more distinct stress levels")
    if data.n_failures == 0:
        raise EstimationError("all observations censored; likelihood has no maximum")

    fx = np.array([stress_factor(o.x, cfg) for o in data], dtype=np.float64)
    logt = np.log(data.times())
    fail = data.deltas() == 0.0
    sum_logt_fail = float(np.sum(logt[fail]))
    log_h = math.log(cfg.h)
    family = cfg.family

    lo = np.log([bounds.A[0], bounds.B[0], bounds.nu[0]])
    hi = np.log([bounds.A[1], bounds.B[1], bounds.nu[1]])

    def objective(y: np.ndarray) -> float:
        A, B, nu = np.exp(y)
        val = _loglik_core(A, B, nu, fx, logt, fail, family, log_h, sum_logt_fail)
        return -val

    starts = lo + qmc.Halton(d=3, scramble=True, seed=_FIT_SEED).random(n_starts) * (hi - lo)
    best = None
    best_idx = -1
    nfev = 0
    any_success = False
    for idx, y0 in enumerate(starts):
        res = minimize(objective, y0, method="Nelder-Mead",
                       bounds=list(zip(lo, hi)),
                       options={"xatol": 1e-8, "fatol": 1e-8,
                                "maxiter": 2000, "maxfev": 4000})
        nfev += res.nfev
        if not math.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
            best_idx = idx
            any_success = bool(res.success)
        elif res.fun == best.fun and not any_success:
            any_success = bool(res.success)
    if best is None:
        raise EstimationError("no start point reached a finite likelihood")

    y = np.clip(best.x, lo, hi)
    params = ModelParams(A=float(np.exp(y[0])), B=float(np.exp(y[1])),
                         nu=float(np.exp(y[2])))
    edge = 1e-6 * (hi - lo)
    names = ("A", "B", "nu")
    boundary = tuple(names[i] for i in range(3)
                     if y[i] - lo[i] < edge[i] or hi[i] - y[i] < edge[i])
    return FitReport(params=params, log_lik=-float(best.fun),
                     converged=bool(best.success), n_starts=n_starts,
                     best_start=best_idx, boundary=boundary, nfev=nfev)
