"""Prior specification and posterior sampling.

The prior is independent across parameters: A and B uniform on given
ranges, nu^2 inverse-gamma (shape kappa, scale gamma), which puts a density
2 nu * IG(nu^2) on nu itself.  Sampling is componentwise random-walk
Metropolis on (A, B, log nu); proposal scales adapt during burn-in toward
an acceptance rate in [0.2, 0.45] and are frozen afterwards.  The walk in
log nu carries the usual e^u Jacobian in its target so the chain samples
the stated prior, and proposals falling outside the uniform supports are
rejected, not reflected.

The sweep loop itself lives in the kernels package; this module prepares
inputs (including all random numbers, pre-drawn from one Generator so runs
are reproducible) and validates the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SamplerError, ValidationError
from .fatigue import ModelParams, TestConfig, stress_factor
from .likelihood import Dataset, ParamBounds

_POSITIVE_FIELDS = {"nu2_shape", "nu2_scale"}


@dataclass(frozen=True)
class PriorSpec:
    """Independent prior: A, B uniform; nu^2 inverse-gamma."""

    A_range: tuple[float, float]
    B_range: tuple[float, float]
    nu2_shape: float
    nu2_scale: float

    def __post_init__(self) -> None:
        for name in ("A_range", "B_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo < hi):
                raise ValidationError(
                    f"{name} must satisfy 0 < low < high, got ({lo!r}, {hi!r})")
        for name in _POSITIVE_FIELDS:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be finite and > 0, got {v!r}")

    # closed-form prior moments (used by diagnostics and tests)
    @property
    def mean_A(self) -> float:
        return 0.5 * (self.A_range[0] + self.A_range[1])

    @property
    def var_A(self) -> float:
        return (self.A_range[1] - self.A_range[0]) ** 2 / 12.0

    @property
    def mean_B(self) -> float:
        return 0.5 * (self.B_range[0] + self.B_range[1])

    @property
    def var_B(self) -> float:
        return (self.B_range[1] - self.B_range[0]) ** 2 / 12.0

    @property
    def mean_nu2(self) -> float:
        if self.nu2_shape <= 1.0:
            raise ValidationError("mean of nu^2 needs shape > 1")
        return self.nu2_scale / (self.nu2_shape - 1.0)

    @property
    def var_nu2(self) -> float:
        if self.nu2_shape <= 2.0:
            raise ValidationError("variance of nu^2 needs shape > 2")
        return self.nu2_scale ** 2 / ((self.nu2_shape - 1.0) ** 2 * (self.nu2_shape - 2.0))

    def contains(self, params: ModelParams) -> bool:
        return (self.A_range[0] < params.A < self.A_range[1]
                and self.B_range[0] < params.B < self.B_range[1]
                and params.nu > 0.0)

    def log_density(self, params: ModelParams) -> float:
        """Normalized log prior density in (A, B, nu)."""
        if not self.contains(params):
            return -math.inf
        k, g = self.nu2_shape, self.nu2_scale
        nu2 = params.nu * params.nu
        return (-math.log(self.A_range[1] - self.A_range[0])
                - math.log(self.B_range[1] - self.B_range[0])
                + k * math.log(g) - math.lgamma(k)
                - (k + 1.0) * math.log(nu2) - g / nu2
                + math.log(2.0 * params.nu))


@dataclass(frozen=True)
class McmcSettings:
    """Chain length bookkeeping: total sweeps, burn-in, thinning stride."""

    n_sweeps: int = 11000
    n_burn: int = 1000
    thin: int = 10
    adapt_every: int = 50

    def __post_init__(self) -> None:
        if not 0 < self.n_burn < self.n_sweeps:
            raise ValidationError("need 0 < n_burn < n_sweeps")
        if self.thin < 1 or self.adapt_every < 1:
            raise ValidationError("thin and adapt_every must be >= 1")
        if self.n_sweeps - self.n_burn < self.thin:
            raise ValidationError("post-burn-in segment shorter than one thinning stride")

    @property
    def n_retained(self) -> int:
        return (self.n_sweeps - self.n_burn) // self.thin


@dataclass(frozen=True)
class PosteriorDraws:
    """Thinned posterior sample plus sampler diagnostics."""

    A: np.ndarray
    B: np.ndarray
    nu: np.ndarray
    accept_rates: tuple[float, float, float]
    scales: tuple[float, float, float]

    def __post_init__(self) -> None:
        n = len(self.A)
        if n == 0 or len(self.B) != n or len(self.nu) != n:
            raise ValidationError("draws must be nonempty arrays of equal length")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.B))
                and np.all(np.isfinite(self.nu)) and np.all(self.nu > 0)):
            raise ValidationError("draws must be finite with nu > 0")

    def __len__(self) -> int:
        return len(self.A)

    def theta(self) -> np.ndarray:
        return np.stack([self.A, self.B, self.nu], axis=1)

    def mean(self) -> ModelParams:
        return ModelParams(A=float(np.mean(self.A)), B=float(np.mean(self.B)),
                           nu=float(np.mean(self.nu)))


def bounds_from_prior(prior: PriorSpec,
                      nu_bounds: tuple[float, float] = (1e-3, 10.0)) -> ParamBounds:
    """Estimation box matching the prior supports; nu gets a wide default
    box since the inverse-gamma support is unbounded."""
    return ParamBounds(A=prior.A_range, B=prior.B_range, nu=nu_bounds)


def _resolve_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_posterior(data: Dataset, prior: PriorSpec, cfg: TestConfig,
                     settings: McmcSettings | None = None,
                     seed=None) -> PosteriorDraws:
    """Draw a thinned posterior sample for the dataset under the prior.

    ``seed`` may be an int, a numpy SeedSequence, a Generator, or None.
    An empty dataset is valid and recovers the prior.

    Raises
    ------
    SamplerError
        If the post-adaptation acceptance rate collapses below 1%.
    """
    if settings is None:
        settings = McmcSettings()
    rng = _resolve_rng(seed)

    fx = np.array([stress_factor(o.x, cfg) for o in data], dtype=np.float64)
    logt = np.log(data.times()) if data.n else np.empty(0)
    delta = data.deltas() if data.n else np.empty(0)

    a1, a2 = prior.A_range
    b1, b2 = prior.B_range
    # deterministic start: box centers, nu at the prior mode of nu^2
    init = np.array([0.5 * (a1 + a2), 0.5 * (b1 + b2),
                     0.5 * math.log(prior.nu2_scale / (prior.nu2_shape + 1.0))])
    scales = np.array([0.1 * (a2 - a1), 0.1 * (b2 - b1), 0.25])

    normals = rng.standard_normal((settings.n_sweeps, 3))
    unifs = rng.random((settings.n_sweeps, 3))

    chain, accepted, final_scales = kernels.mh_chain(
        fx, logt, delta, cfg.family.code, math.log(cfg.h),
        a1, a2, b1, b2, prior.nu2_shape, prior.nu2_scale,
        init, scales, settings.n_sweeps, settings.n_burn,
        settings.adapt_every, normals, unifs)

    n_post = settings.n_sweeps - settings.n_burn
    overall = float(np.sum(accepted)) / (3.0 * n_post)
    if overall < 0.01:
        raise SamplerError(
            f"acceptance rate {overall:.4f} after adaptation; posterior is "
            "effectively frozen (data and prior may be in conflict)")

    retained = chain[settings.n_burn:][settings.thin - 1::settings.thin]
    draws = PosteriorDraws(
        A=retained[:, 0].copy(), B=retained[:, 1].copy(), nu=retained[:, 2].copy(),
        accept_rates=tuple(float(a) / n_post for a in accepted),
        scales=tuple(float(s) for s in final_scales))
    if not (np.all(draws.A > a1) and np.all(draws.A < a2)
            and np.all(draws.B > b1) and np.all(draws.B < b2)):
        raise SamplerError("retained draws left the prior support")
    return draws
