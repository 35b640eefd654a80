"""Simulation harness: replay whole campaigns against a known truth.

A study pits allocation strategies (how many D-runs before switching to C)
against each other: for each strategy and each trial, an initial handful of
units is simulated at the truth, then the sequential planner picks one
stress at a time, a lifetime is simulated there, the parameters are
re-estimated, and the plug-in weighted asymptotic variance is recorded.
Across trials this yields, per strategy: the AVar trajectory over runs, the
M-measure of estimation quality (mean squared relative error summed over
parameters), and how the recommendations distributed over the candidate
stresses.

Every random stream derives from one study seed through SeedSequence spawn
keys (strategy, trial, run, role), so studies are reproducible run-for-run
and identical bytes land in the output CSVs.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .design import (CandidateSet, Criterion, DesignSession, Schedule,
                     SchemaError, _as_float, _as_int, _expect_keys,
                     candidates_from_dict, cfg_from_dict, cfg_to_dict,
                     mcmc_from_dict, mcmc_to_dict, next_point,
                     prior_from_dict, prior_to_dict, profile_from_dict,
                     profile_to_dict, record_observation)
from .distributions import DistributionFamily
from .errors import (DomainError, EstimationError, InsufficientDataError,
                     SingularMatrixError, ValidationError)
from .fatigue import ModelParams, TestConfig, mu
from .fisher import UseProfile, weighted_avar
from .likelihood import Dataset, Observation, fit_mle
from .posterior import (McmcSettings, PriorSpec, bounds_from_prior,
                        sample_posterior)

_ROLE_INIT, _ROLE_MCMC, _ROLE_LIFE = 0, 1, 2


@dataclass(frozen=True)
class TruthSpec:
    """The generating parameters and the pre-planning design of a study."""

    params: ModelParams
    initial_design: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if not self.params.nu > 0.0:
            raise ValidationError("truth must have nu > 0 to simulate lifetimes")
        if len(self.initial_design) == 0:
            raise ValidationError("initial design must not be empty")
        for q, count in self.initial_design:
            if not 0.0 < q < 1.0:
                raise ValidationError(f"initial design fraction {q!r} outside (0, 1)")
            if count < 1:
                raise ValidationError(f"initial design count must be >= 1, got {count!r}")

    @property
    def n_initial(self) -> int:
        return sum(count for _, count in self.initial_design)


@dataclass(frozen=True)
class StrategySpec:
    """A labeled run schedule (n_total runs, first n_d of them D-runs)."""

    label: str
    schedule: Schedule

    def __post_init__(self) -> None:
        if not self.label:
            raise ValidationError("strategy label must be nonempty")


@dataclass(frozen=True)
class StudyConfig:
    cfg: TestConfig
    prior: PriorSpec
    profile: UseProfile
    candidates: CandidateSet
    truth: TruthSpec
    strategies: tuple[StrategySpec, ...]
    n_trials: int
    seed: int
    mcmc: McmcSettings = field(default_factory=McmcSettings)

    def __post_init__(self) -> None:
        if len(self.strategies) == 0:
            raise ValidationError("study needs at least one strategy")
        labels = [s.label for s in self.strategies]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"strategy labels must be unique, got {labels}")
        if self.n_trials < 1:
            raise ValidationError(f"n_trials must be >= 1, got {self.n_trials!r}")


def default_study() -> StudyConfig:
    """The shipped desk-scale benchmark study.

    Twelve sequential runs on glass-fiber-like constants, five strategies
    sweeping the D-to-C switch point, 20 trials.  The censoring horizon is
    a calibrated default: long enough that mid-band candidates usually
    fail (so the estimation-oriented strategies are pulled toward the low
    end of the band) while the lowest levels still censor often enough to
    stay informative about extrapolation.
    """
    sigma_ult = 1339.67
    cfg = TestConfig(h=2.0, R=0.1, alpha=0.0, sigma_ult=sigma_ult,
                     censor_time=2.5e9, family=DistributionFamily.LOGNORMAL,
                     p=0.05)
    prior = PriorSpec(A_range=(1e-4, 1e-2), B_range=(0.05, 1.5),
                      nu2_shape=3.0, nu2_scale=1.0)
    use_q = [round(0.05 + 0.01 * i, 10) for i in range(21)]
    profile = UseProfile.uniform([q * sigma_ult for q in use_q])
    candidates = CandidateSet(tuple(round(0.35 + 0.05 * i, 10) for i in range(9)))
    truth = TruthSpec(params=ModelParams(A=0.00157, B=0.3188, nu=0.7259),
                      initial_design=((0.45, 1), (0.55, 1), (0.65, 1)))
    strategies = tuple(StrategySpec(label, Schedule(n_total=12, n_d=n_d))
                       for label, n_d in (("a", 0), ("b", 12), ("c", 6),
                                          ("d", 4), ("e", 2)))
    return StudyConfig(cfg=cfg, prior=prior, profile=profile,
                       candidates=candidates, truth=truth,
                       strategies=strategies, n_trials=20, seed=201)


def simulate_lifetime(params: ModelParams, x: float, cfg: TestConfig,
                      rng: np.random.Generator) -> Observation:
    """Draw one unit's outcome at stress x under Type-I censoring."""
    if not params.nu > 0.0:
        raise DomainError("simulation requires nu > 0")
    if cfg.family is DistributionFamily.LOGNORMAL:
        z = rng.standard_normal()
    else:
        z = math.log(-math.log1p(-rng.random()))
    logt = mu(x, params, cfg) + params.nu * z
    t = math.exp(max(logt, -700.0))
    if t >= cfg.censor_time:
        return Observation(x=x, t=cfg.censor_time, delta=1)
    return Observation(x=x, t=t, delta=0)


def m_measure(estimates: np.ndarray, truth: ModelParams) -> float:
    """Sum over parameters of the mean squared relative estimation error."""
    est = np.asarray(estimates, dtype=np.float64)
    if est.ndim != 2 or est.shape[1] != 3:
        raise ValidationError(f"estimates must be (n, 3), got shape {est.shape}")
    ref = np.array([truth.A, truth.B, truth.nu])
    if np.any(ref == 0.0):
        raise DomainError("relative errors undefined at a zero true parameter")
    rel = (est - ref) / ref
    return float(np.sum(np.mean(rel * rel, axis=0)))


@dataclass(frozen=True)
class TrialRow:
    """Everything recorded about one sequential run inside one trial."""

    strategy: str
    trial: int
    run: int
    criterion: Criterion
    q: float
    t: float
    delta: int
    A_hat: float
    B_hat: float
    nu_hat: float
    avar: float
    flags: tuple[str, ...]


def _spawned(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=key)


def run_trial(study: StudyConfig, strategy: StrategySpec,
              strategy_idx: int, trial_idx: int) -> list[TrialRow]:
    """Play one full campaign for one strategy; returns one row per run."""
    cfg, prior = study.cfg, study.prior
    truth = study.truth
    fractions = study.candidates.fractions
    cand_stresses = study.candidates.stresses(cfg)

    rng_init = np.random.default_rng(
        _spawned(study.seed, strategy_idx, trial_idx, 0, _ROLE_INIT))
    initial = Dataset()
    for q, count in truth.initial_design:
        for _ in range(count):
            initial.append(simulate_lifetime(truth.params, q * cfg.sigma_ult,
                                             cfg, rng_init))

    session = DesignSession(cfg=cfg, prior=prior, profile=study.profile,
                            candidates=study.candidates,
                            schedule=strategy.schedule,
                            observations=initial, seed=study.seed,
                            mcmc=study.mcmc)
    bounds = bounds_from_prior(prior)
    rows: list[TrialRow] = []
    for run in range(1, strategy.schedule.n_total + 1):
        draws = sample_posterior(
            session.observations, prior, cfg, study.mcmc,
            _spawned(study.seed, strategy_idx, trial_idx, run, _ROLE_MCMC))
        rec = next_point(session, draws)
        rng_life = np.random.default_rng(
            _spawned(study.seed, strategy_idx, trial_idx, run, _ROLE_LIFE))
        obs = simulate_lifetime(truth.params, rec.stress, cfg, rng_life)
        record_observation(session, obs)

        flags: list[str] = []
        try:
            fit = fit_mle(session.observations, cfg, bounds)
            theta = fit.params
        except (InsufficientDataError, EstimationError):
            # plug in the posterior mean so the trajectory stays defined
            theta = draws.mean()
            flags.append("mle_failed")
        try:
            avar, ridge = weighted_avar(theta, session.observations.stresses(),
                                        study.profile, cfg)
            if ridge > 0.0:
                flags.append("ridged")
        except SingularMatrixError:
            avar = math.nan
            flags.append("singular")

        # snap the recommendation back to its candidate fraction so q values
        # in the outputs are bit-identical to the configured grid
        q_idx = min(range(len(cand_stresses)),
                    key=lambda i: abs(cand_stresses[i] - rec.stress))
        rows.append(TrialRow(
            strategy=strategy.label, trial=trial_idx, run=run,
            criterion=rec.criterion, q=fractions[q_idx], t=obs.t,
            delta=obs.delta, A_hat=theta.A, B_hat=theta.B, nu_hat=theta.nu,
            avar=avar, flags=tuple(flags)))
    return rows


@dataclass(frozen=True)
class StudyResult:
    study: StudyConfig
    trial_rows: tuple[TrialRow, ...]
    avar_rows: tuple[tuple[str, int, float, float], ...]
    m_rows: tuple[tuple[str, int, float], ...]
    alloc_rows: tuple[tuple[str, float, float], ...]
    per_run_rows: tuple[tuple[str, int, float, float], ...]


def run_study(study: StudyConfig, progress=None) -> StudyResult:
    """Run every strategy x trial campaign and aggregate.

    ``progress`` may be a callable taking (strategy_label, trial_idx); it is
    invoked before each trial (the CLI uses it for status lines).
    """
    all_rows: list[TrialRow] = []
    for s_idx, strategy in enumerate(study.strategies):
        for t_idx in range(study.n_trials):
            if progress is not None:
                progress(strategy.label, t_idx)
            all_rows.extend(run_trial(study, strategy, s_idx, t_idx))

    avar_rows = []
    m_rows = []
    alloc_rows = []
    per_run_rows = []
    K = study.n_trials
    for strategy in study.strategies:
        n_total = strategy.schedule.n_total
        srows = [r for r in all_rows if r.strategy == strategy.label]
        for run in range(1, n_total + 1):
            rrows = sorted((r for r in srows if r.run == run), key=lambda r: r.trial)
            avars = np.array([r.avar for r in rrows])
            mean = float(np.mean(avars))
            se = float(np.std(avars, ddof=1) / math.sqrt(K)) if K > 1 else 0.0
            avar_rows.append((strategy.label, run, mean, se))
            est = np.array([[r.A_hat, r.B_hat, r.nu_hat] for r in rrows])
            m_rows.append((strategy.label, run, m_measure(est, study.truth.params)))
            for q in study.candidates.fractions:
                frac = sum(1 for r in rrows if r.q == q) / K
                per_run_rows.append((strategy.label, run, q, frac))
        for q in study.candidates.fractions:
            frac = sum(1 for r in srows if r.q == q) / (K * n_total)
            alloc_rows.append((strategy.label, q, frac))

    return StudyResult(study=study, trial_rows=tuple(all_rows),
                       avar_rows=tuple(avar_rows), m_rows=tuple(m_rows),
                       alloc_rows=tuple(alloc_rows),
                       per_run_rows=tuple(per_run_rows))


# --- output files ---------------------------------------------------------

def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_study_csvs(result: StudyResult, outdir) -> list[str]:
    """Write the five study CSVs into outdir; returns the paths written."""
    outdir = os.fspath(outdir)
    os.makedirs(outdir, exist_ok=True)
    paths = []

    def out(name):
        path = os.path.join(outdir, name)
        paths.append(path)
        return open(path, "w", encoding="utf-8", newline="")

    with out("avar_trajectory.csv") as fh:
        w = _writer(fh)
        w.writerow(["strategy", "run", "mean_avar", "se"])
        for label, run, mean, se in result.avar_rows:
            w.writerow([label, run, repr(mean), repr(se)])

    with out("m_measure.csv") as fh:
        w = _writer(fh)
        w.writerow(["strategy", "run", "M"])
        for label, run, m in result.m_rows:
            w.writerow([label, run, repr(m)])

    with out("allocation.csv") as fh:
        w = _writer(fh)
        w.writerow(["strategy", "q", "fraction"])
        for label, q, frac in result.alloc_rows:
            w.writerow([label, repr(q), repr(frac)])

    with out("per_run_allocation.csv") as fh:
        w = _writer(fh)
        w.writerow(["strategy", "run", "q", "fraction"])
        for label, run, q, frac in result.per_run_rows:
            w.writerow([label, run, repr(q), repr(frac)])

    with out("trials.csv") as fh:
        w = _writer(fh)
        w.writerow(["strategy", "trial", "run", "criterion", "q", "t", "delta",
                    "A_hat", "B_hat", "nu_hat", "avar", "flags"])
        for r in result.trial_rows:
            w.writerow([r.strategy, r.trial, r.run, r.criterion.value,
                        repr(r.q), repr(r.t), r.delta, repr(r.A_hat),
                        repr(r.B_hat), repr(r.nu_hat), repr(r.avar),
                        ";".join(r.flags)])
    return paths


# --- study file schema ----------------------------------------------------

def truth_to_dict(truth: TruthSpec) -> dict:
    return {"A": truth.params.A, "B": truth.params.B, "nu": truth.params.nu,
            "initial_design": [[q, count] for q, count in truth.initial_design]}


def truth_from_dict(d: dict) -> TruthSpec:
    _expect_keys(d, ["A", "B", "nu", "initial_design"], [], "truth")
    if not isinstance(d["initial_design"], list):
        raise SchemaError("truth.initial_design must be an array of [q, count] pairs")
    design = []
    for i, pair in enumerate(d["initial_design"]):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"truth.initial_design[{i}] must be a [q, count] pair")
        design.append((_as_float(pair[0], f"truth.initial_design[{i}].q"),
                       _as_int(pair[1], f"truth.initial_design[{i}].count")))
    try:
        return TruthSpec(params=ModelParams(A=_as_float(d["A"], "truth.A"),
                                            B=_as_float(d["B"], "truth.B"),
                                            nu=_as_float(d["nu"], "truth.nu")),
                         initial_design=tuple(design))
    except ValidationError as exc:
        raise SchemaError(f"truth: {exc}") from exc


def study_to_dict(study: StudyConfig) -> dict:
    return {
        "format_version": 1,
        "cfg": cfg_to_dict(study.cfg),
        "prior": prior_to_dict(study.prior),
        "profile": profile_to_dict(study.profile),
        "candidates": {"fractions": list(study.candidates.fractions)},
        "truth": truth_to_dict(study.truth),
        "strategies": [{"label": s.label, "n_total": s.schedule.n_total,
                        "n_d": s.schedule.n_d} for s in study.strategies],
        "n_trials": study.n_trials,
        "seed": study.seed,
        "mcmc": mcmc_to_dict(study.mcmc),
    }


def study_from_dict(doc: dict) -> StudyConfig:
    _expect_keys(doc, ["format_version", "cfg", "prior", "profile", "candidates",
                       "truth", "strategies", "n_trials", "seed"], ["mcmc"], "study")
    if doc["format_version"] != 1:
        raise SchemaError(f"unsupported format_version {doc['format_version']!r}")
    if not isinstance(doc["strategies"], list) or not doc["strategies"]:
        raise SchemaError("strategies must be a nonempty array")
    strategies = []
    for i, sd in enumerate(doc["strategies"]):
        where = f"strategies[{i}]"
        _expect_keys(sd, ["label", "n_total", "n_d"], [], where)
        if not isinstance(sd["label"], str):
            raise SchemaError(f"{where}.label must be a string")
        try:
            strategies.append(StrategySpec(
                label=sd["label"],
                schedule=Schedule(n_total=_as_int(sd["n_total"], f"{where}.n_total"),
                                  n_d=_as_int(sd["n_d"], f"{where}.n_d"))))
        except ValidationError as exc:
            raise SchemaError(f"{where}: {exc}") from exc
    mcmc = mcmc_from_dict(doc["mcmc"]) if "mcmc" in doc else McmcSettings()
    try:
        return StudyConfig(cfg=cfg_from_dict(doc["cfg"]),
                           prior=prior_from_dict(doc["prior"]),
                           profile=profile_from_dict(doc["profile"]),
                           candidates=candidates_from_dict(doc["candidates"]),
                           truth=truth_from_dict(doc["truth"]),
                           strategies=tuple(strategies),
                           n_trials=_as_int(doc["n_trials"], "study.n_trials"),
                           seed=_as_int(doc["seed"], "study.seed"),
                           mcmc=mcmc)
    except ValidationError as exc:
        raise SchemaError(f"study: {exc}") from exc
