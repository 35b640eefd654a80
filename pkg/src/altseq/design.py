"""Sequential design: criterion evaluation, planning state, session files.

A campaign alternates between two posterior-averaged criteria on a fixed
candidate grid of stress levels (fractions of ultimate strength):

* D: expected log-determinant of the updated information matrix, maximized.
  Good early, when the parameters themselves are still loose.
* C: expected profile-weighted asymptotic variance of the log quantile-life
  estimate, minimized.  The end goal, once there is something to refine.

A Schedule assigns criterion D to the first ``n_d`` runs and C to the rest.
The DesignSession carries everything needed to continue a campaign across
process boundaries and serializes to a strict, versioned JSON document:
unknown fields are rejected rather than ignored, and writes are atomic
(temp file then rename) so a crash never leaves a half-written session.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kernels
from .distributions import DistributionFamily, std_quantile
from .errors import (CampaignCompleteError, CriterionError, PlanningError,
                     SchemaError, ValidationError)
from .fatigue import TestConfig, stress_factor
from .fisher import UseProfile
from .likelihood import Dataset, Observation
from .posterior import McmcSettings, PosteriorDraws, PriorSpec, sample_posterior

# A candidate whose criterion evaluation failed at more than this fraction
# of the posterior draws is flagged unreliable in the table.
MAX_SKIP_FRACTION = 0.1

_FAMILY_NAMES = {"lognormal": DistributionFamily.LOGNORMAL,
                 "weibull": DistributionFamily.WEIBULL}
_NAMES_BY_FAMILY = {v: k for k, v in _FAMILY_NAMES.items()}

FORMAT_VERSION = 1


class Criterion(Enum):
    C = "C"
    D = "D"


@dataclass(frozen=True)
class CandidateSet:
    """Allowed test stresses, as increasing fractions of ultimate strength."""

    fractions: tuple[float, ...]

    def __post_init__(self) -> None:
        q = self.fractions
        if len(q) == 0:
            raise ValidationError("candidate set must not be empty")
        if any(not (0.0 < v < 1.0) for v in q):
            raise ValidationError("candidate fractions must lie in (0, 1)")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise ValidationError("candidate fractions must be strictly increasing")

    def stresses(self, cfg: TestConfig) -> tuple[float, ...]:
        return tuple(v * cfg.sigma_ult for v in self.fractions)


@dataclass(frozen=True)
class Schedule:
    """n_total sequential runs; the first n_d are D-runs, the rest C-runs."""

    n_total: int
    n_d: int

    def __post_init__(self) -> None:
        if self.n_total < 1:
            raise ValidationError(f"n_total must be >= 1, got {self.n_total!r}")
        if not 0 <= self.n_d <= self.n_total:
            raise ValidationError(
                f"n_d must lie in [0, n_total], got {self.n_d!r} of {self.n_total!r}")

    def criterion_for_run(self, run: int) -> Criterion:
        if not 1 <= run <= self.n_total:
            raise ValidationError(f"run index {run!r} outside 1..{self.n_total}")
        return Criterion.D if run <= self.n_d else Criterion.C


@dataclass(frozen=True)
class RunRecord:
    """One planned run: index, criterion used, recommendation, its value."""

    run: int
    criterion: Criterion
    stress: float
    value: float


@dataclass(frozen=True)
class CandidateRow:
    stress: float
    value: float
    n_draws: int
    n_skipped: int
    unreliable: bool


@dataclass(frozen=True)
class CandidateTable:
    """Criterion values over the whole candidate grid, plus the pick."""

    criterion: Criterion
    rows: tuple[CandidateRow, ...]
    chosen_index: int

    def best(self) -> CandidateRow:
        return self.rows[self.chosen_index]


class DesignSession:
    """Mutable campaign state; see the module docstring.

    ``n_initial`` counts the observations present before sequential planning
    started.  The session enforces strict alternation: ``next_point`` only
    with no recommendation pending, ``record_observation`` only with one.
    """

    def __init__(self, cfg: TestConfig, prior: PriorSpec, profile: UseProfile,
                 candidates: CandidateSet, schedule: Schedule,
                 observations: Dataset | None = None,
                 history: list[RunRecord] | None = None,
                 seed: int = 0, mcmc: McmcSettings | None = None,
                 n_initial: int | None = None):
        self.cfg = cfg
        self.prior = prior
        self.profile = profile
        self.candidates = candidates
        self.schedule = schedule
        self.observations = observations if observations is not None else Dataset()
        self.history = list(history) if history is not None else []
        self.seed = int(seed)
        self.mcmc = mcmc
        self.n_initial = len(self.observations) if n_initial is None else int(n_initial)
        self.warnings: list[str] = []
        self._validate()

    def _validate(self) -> None:
        for obs in self.observations:
            if not obs.x < self.cfg.sigma_ult:
                raise ValidationError(
                    f"observation stress {obs.x!r} not below sigma_ult {self.cfg.sigma_ult!r}")
        if not 0 <= self.n_initial <= len(self.observations):
            raise ValidationError("n_initial inconsistent with observation count")
        completed = len(self.observations) - self.n_initial
        if len(self.history) not in (completed, completed + 1):
            raise ValidationError(
                f"history length {len(self.history)} inconsistent with "
                f"{completed} completed sequential runs")
        if len(self.history) > self.schedule.n_total:
            raise ValidationError("history longer than the schedule")
        for i, rec in enumerate(self.history, start=1):
            if rec.run != i:
                raise ValidationError(f"history run indices must be 1..n, got {rec.run} at {i}")

    @property
    def pending(self) -> bool:
        """True when a recommendation awaits its observation."""
        return len(self.history) == len(self.observations) - self.n_initial + 1

    @property
    def runs_done(self) -> int:
        return len(self.observations) - self.n_initial


def _criterion_inputs(session: DesignSession):
    cfg = session.cfg
    fx_obs = np.array([stress_factor(o.x, cfg) for o in session.observations])
    fx_cand = np.array([stress_factor(x, cfg)
                        for x in session.candidates.stresses(cfg)])
    fx_use = np.array([stress_factor(x, cfg) for x in session.profile.levels])
    w_use = np.array(session.profile.weights)
    return fx_obs, fx_cand, fx_use, w_use


def evaluate_candidates(session: DesignSession, draws: PosteriorDraws,
                        criterion: Criterion) -> CandidateTable:
    """Score every candidate stress under the given criterion.

    Draws at which a candidate's evaluation is singular or non-finite are
    skipped and counted; a candidate with no surviving draw gets value NaN
    and can never be chosen.  If that happens to every candidate the
    campaign cannot proceed and PlanningError is raised.
    """
    cfg = session.cfg
    fx_obs, fx_cand, fx_use, w_use = _criterion_inputs(session)
    values, kept = kernels.criterion_table(
        draws.A, draws.B, draws.nu, fx_obs, fx_cand, fx_use, w_use,
        math.log(cfg.h), std_quantile(cfg.p, cfg.family),
        math.log(cfg.censor_time), cfg.family.code,
        0 if criterion is Criterion.C else 1)

    m = len(draws)
    stresses = session.candidates.stresses(cfg)
    rows = []
    for i, x in enumerate(stresses):
        n_skipped = m - int(kept[i])
        rows.append(CandidateRow(
            stress=x, value=float(values[i]), n_draws=m, n_skipped=n_skipped,
            unreliable=n_skipped > MAX_SKIP_FRACTION * m))

    chosen = -1
    for i, row in enumerate(rows):
        if math.isnan(row.value):
            continue
        if chosen < 0:
            chosen = i
        elif criterion is Criterion.C and row.value < rows[chosen].value:
            chosen = i
        elif criterion is Criterion.D and row.value > rows[chosen].value:
            chosen = i
    if chosen < 0:
        raise PlanningError("criterion evaluation failed at every candidate stress")
    return CandidateTable(criterion=criterion, rows=tuple(rows), chosen_index=chosen)


def _single_candidate(draws: PosteriorDraws, data_stresses, x_cand: float,
                      profile: UseProfile | None, cfg: TestConfig,
                      kind: int) -> tuple[float, int]:
    fx_obs = np.array([stress_factor(float(x), cfg) for x in data_stresses])
    fx_cand = np.array([stress_factor(float(x_cand), cfg)])
    if profile is not None:
        fx_use = np.array([stress_factor(x, cfg) for x in profile.levels])
        w_use = np.array(profile.weights)
    else:
        fx_use = np.empty(0)
        w_use = np.empty(0)
    values, kept = kernels.criterion_table(
        draws.A, draws.B, draws.nu, fx_obs, fx_cand, fx_use, w_use,
        math.log(cfg.h), std_quantile(cfg.p, cfg.family),
        math.log(cfg.censor_time), cfg.family.code, kind)
    if int(kept[0]) == 0:
        raise CriterionError(
            f"criterion undefined at candidate stress {x_cand!r}: "
            "all posterior draws produced singular or non-finite evaluations")
    return float(values[0]), len(draws) - int(kept[0])


def bayes_c_criterion(draws: PosteriorDraws, data_stresses, x_cand: float,
                      profile: UseProfile, cfg: TestConfig) -> tuple[float, int]:
    """Posterior-averaged weighted asymptotic variance after adding one unit
    at x_cand to the given design.  Returns (value, n_skipped_draws)."""
    return _single_candidate(draws, data_stresses, x_cand, profile, cfg, 0)


def bayes_d_criterion(draws: PosteriorDraws, data_stresses, x_cand: float,
                      cfg: TestConfig) -> tuple[float, int]:
    """Posterior-averaged log-determinant of the information after adding
    one unit at x_cand.  Returns (value, n_skipped_draws)."""
    return _single_candidate(draws, data_stresses, x_cand, None, cfg, 1)


def _choose(session: DesignSession, draws: PosteriorDraws):
    if session.pending:
        raise ValidationError(
            "a recommendation is already pending; record its observation first")
    run = len(session.history) + 1
    if run > session.schedule.n_total:
        raise CampaignCompleteError(
            f"all {session.schedule.n_total} sequential runs already planned")
    criterion = session.schedule.criterion_for_run(run)
    table = evaluate_candidates(session, draws, criterion)
    best = table.best()
    record = RunRecord(run=run, criterion=criterion,
                       stress=best.stress, value=best.value)
    session.history.append(record)
    return record, table


def next_point(session: DesignSession, draws: PosteriorDraws) -> RunRecord:
    """Pick the next stress level and append it to the session history."""
    record, _ = _choose(session, draws)
    return record


def plan_next(session: DesignSession, settings: McmcSettings | None = None,
              seed_entropy: int | None = None):
    """Sample the posterior and plan the next run, reproducibly.

    The chain seed derives from (session seed, run index), so re-running a
    lost process yields the identical recommendation; ``seed_entropy``
    substitutes for the session seed when given.  Returns
    (record, table, draws).
    """
    if session.pending:
        raise ValidationError(
            "a recommendation is already pending; record its observation first")
    run = len(session.history) + 1
    if run > session.schedule.n_total:
        raise CampaignCompleteError(
            f"all {session.schedule.n_total} sequential runs already planned")
    if settings is None:
        settings = session.mcmc if session.mcmc is not None else McmcSettings()
    entropy = session.seed if seed_entropy is None else seed_entropy
    seed = np.random.SeedSequence(entropy=entropy, spawn_key=(run,))
    draws = sample_posterior(session.observations, session.prior, session.cfg,
                             settings, seed)
    record, table = _choose(session, draws)
    return record, table, draws


def record_observation(session: DesignSession, obs: Observation) -> Observation:
    """Attach the observation for the pending recommendation.

    If its stress does not match the recommended level (relative tolerance
    1e-9) the observation is stored flagged ``off_recommendation`` and a
    warning is appended to ``session.warnings``.
    """
    if not session.pending:
        raise ValidationError("no recommendation pending; call next_point first")
    if not obs.x < session.cfg.sigma_ult:
        raise ValidationError(
            f"observation stress {obs.x!r} not below sigma_ult {session.cfg.sigma_ult!r}")
    wanted = session.history[-1].stress
    if not math.isclose(obs.x, wanted, rel_tol=1e-9, abs_tol=0.0):
        obs = replace(obs, off_recommendation=True)
        session.warnings.append(
            f"run {session.history[-1].run}: observation at stress {obs.x!r} "
            f"differs from recommended {wanted!r}")
    session.observations.append(obs)
    return obs


# --- serialization --------------------------------------------------------

def _expect_keys(obj, required, optional, where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise SchemaError(f"{where}: unknown fields {unknown}")
    missing = sorted(set(required) - set(obj))
    if missing:
        raise SchemaError(f"{where}: missing fields {missing}")


def _as_float(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _as_int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: expected an integer, got {v!r}")
    return v


def _float_list(v, where: str) -> list[float]:
    if not isinstance(v, list):
        raise SchemaError(f"{where}: expected an array, got {v!r}")
    return [_as_float(x, where) for x in v]


def cfg_to_dict(cfg: TestConfig) -> dict:
    return {"h": cfg.h, "R": cfg.R, "alpha": cfg.alpha,
            "sigma_ult": cfg.sigma_ult, "censor_time": cfg.censor_time,
            "family": _NAMES_BY_FAMILY[cfg.family], "p": cfg.p}


def cfg_from_dict(d: dict) -> TestConfig:
    _expect_keys(d, ["h", "R", "alpha", "sigma_ult", "censor_time"],
                 ["family", "p"], "cfg")
    fam = d.get("family", "lognormal")
    if fam not in _FAMILY_NAMES:
        raise SchemaError(f"cfg.family: expected one of {sorted(_FAMILY_NAMES)}, got {fam!r}")
    try:
        return TestConfig(h=_as_float(d["h"], "cfg.h"),
                          R=_as_float(d["R"], "cfg.R"),
                          alpha=_as_float(d["alpha"], "cfg.alpha"),
                          sigma_ult=_as_float(d["sigma_ult"], "cfg.sigma_ult"),
                          censor_time=_as_float(d["censor_time"], "cfg.censor_time"),
                          family=_FAMILY_NAMES[fam],
                          p=_as_float(d.get("p", 0.05), "cfg.p"))
    except ValidationError as exc:
        raise SchemaError(f"cfg: {exc}") from exc


def prior_to_dict(prior: PriorSpec) -> dict:
    return {"A_range": list(prior.A_range), "B_range": list(prior.B_range),
            "nu2_shape": prior.nu2_shape, "nu2_scale": prior.nu2_scale}


def prior_from_dict(d: dict) -> PriorSpec:
    _expect_keys(d, ["A_range", "B_range", "nu2_shape", "nu2_scale"], [], "prior")
    a = _float_list(d["A_range"], "prior.A_range")
    b = _float_list(d["B_range"], "prior.B_range")
    if len(a) != 2 or len(b) != 2:
        raise SchemaError("prior ranges must be [low, high] pairs")
    try:
        return PriorSpec(A_range=(a[0], a[1]), B_range=(b[0], b[1]),
                         nu2_shape=_as_float(d["nu2_shape"], "prior.nu2_shape"),
                         nu2_scale=_as_float(d["nu2_scale"], "prior.nu2_scale"))
    except ValidationError as exc:
        raise SchemaError(f"prior: {exc}") from exc


def profile_to_dict(profile: UseProfile) -> dict:
    return {"levels": list(profile.levels), "weights": list(profile.weights)}


def profile_from_dict(d: dict) -> UseProfile:
    _expect_keys(d, ["levels", "weights"], [], "profile")
    try:
        return UseProfile(levels=tuple(_float_list(d["levels"], "profile.levels")),
                          weights=tuple(_float_list(d["weights"], "profile.weights")))
    except ValidationError as exc:
        raise SchemaError(f"profile: {exc}") from exc


def candidates_from_dict(d: dict) -> CandidateSet:
    _expect_keys(d, ["fractions"], [], "candidates")
    try:
        return CandidateSet(fractions=tuple(_float_list(d["fractions"],
                                                        "candidates.fractions")))
    except ValidationError as exc:
        raise SchemaError(f"candidates: {exc}") from exc


def schedule_from_dict(d: dict) -> Schedule:
    _expect_keys(d, ["n_total", "n_d"], [], "schedule")
    try:
        return Schedule(n_total=_as_int(d["n_total"], "schedule.n_total"),
                        n_d=_as_int(d["n_d"], "schedule.n_d"))
    except ValidationError as exc:
        raise SchemaError(f"schedule: {exc}") from exc


def mcmc_to_dict(m: McmcSettings) -> dict:
    return {"n_sweeps": m.n_sweeps, "n_burn": m.n_burn,
            "thin": m.thin, "adapt_every": m.adapt_every}


def mcmc_from_dict(d: dict) -> McmcSettings:
    _expect_keys(d, [], ["n_sweeps", "n_burn", "thin", "adapt_every"], "mcmc")
    base = McmcSettings()
    try:
        return McmcSettings(
            n_sweeps=_as_int(d.get("n_sweeps", base.n_sweeps), "mcmc.n_sweeps"),
            n_burn=_as_int(d.get("n_burn", base.n_burn), "mcmc.n_burn"),
            thin=_as_int(d.get("thin", base.thin), "mcmc.thin"),
            adapt_every=_as_int(d.get("adapt_every", base.adapt_every), "mcmc.adapt_every"))
    except ValidationError as exc:
        raise SchemaError(f"mcmc: {exc}") from exc


def _obs_to_dict(o: Observation) -> dict:
    return {"x": o.x, "t": o.t, "delta": o.delta,
            "off_recommendation": o.off_recommendation}


def _obs_from_dict(d: dict, where: str) -> Observation:
    _expect_keys(d, ["x", "t", "delta"], ["off_recommendation"], where)
    flag = d.get("off_recommendation", False)
    if not isinstance(flag, bool):
        raise SchemaError(f"{where}.off_recommendation: expected a boolean")
    try:
        return Observation(x=_as_float(d["x"], f"{where}.x"),
                           t=_as_float(d["t"], f"{where}.t"),
                           delta=_as_int(d["delta"], f"{where}.delta"),
                           off_recommendation=flag)
    except ValidationError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _record_to_dict(r: RunRecord) -> dict:
    return {"run": r.run, "criterion": r.criterion.value,
            "stress": r.stress, "value": r.value}


def _record_from_dict(d: dict, where: str) -> RunRecord:
    _expect_keys(d, ["run", "criterion", "stress", "value"], [], where)
    crit = d["criterion"]
    if crit not in ("C", "D"):
        raise SchemaError(f"{where}.criterion: expected 'C' or 'D', got {crit!r}")
    return RunRecord(run=_as_int(d["run"], f"{where}.run"),
                     criterion=Criterion(crit),
                     stress=_as_float(d["stress"], f"{where}.stress"),
                     value=_as_float(d["value"], f"{where}.value"))


def session_to_dict(session: DesignSession) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "cfg": cfg_to_dict(session.cfg),
        "prior": prior_to_dict(session.prior),
        "profile": profile_to_dict(session.profile),
        "candidates": {"fractions": list(session.candidates.fractions)},
        "schedule": {"n_total": session.schedule.n_total, "n_d": session.schedule.n_d},
        "n_initial": session.n_initial,
        "observations": [_obs_to_dict(o) for o in session.observations],
        "history": [_record_to_dict(r) for r in session.history],
        "seed": session.seed,
    }
    if session.mcmc is not None:
        doc["mcmc"] = mcmc_to_dict(session.mcmc)
    return doc


def session_from_dict(doc: dict) -> DesignSession:
    _expect_keys(doc, ["format_version", "cfg", "prior", "profile", "candidates",
                       "schedule", "n_initial", "observations", "history", "seed"],
                 ["mcmc"], "session")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version!r}; this build reads {FORMAT_VERSION}")
    if not isinstance(doc["observations"], list) or not isinstance(doc["history"], list):
        raise SchemaError("observations and history must be arrays")
    observations = Dataset(_obs_from_dict(d, f"observations[{i}]")
                           for i, d in enumerate(doc["observations"]))
    history = [_record_from_dict(d, f"history[{i}]")
               for i, d in enumerate(doc["history"])]
    mcmc = mcmc_from_dict(doc["mcmc"]) if "mcmc" in doc else None
    try:
        return DesignSession(
            cfg=cfg_from_dict(doc["cfg"]),
            prior=prior_from_dict(doc["prior"]),
            profile=profile_from_dict(doc["profile"]),
            candidates=candidates_from_dict(doc["candidates"]),
            schedule=schedule_from_dict(doc["schedule"]),
            observations=observations, history=history,
            seed=_as_int(doc["seed"], "session.seed"),
            mcmc=mcmc, n_initial=_as_int(doc["n_initial"], "session.n_initial"))
    except ValidationError as exc:
        raise SchemaError(f"session: {exc}") from exc


def save_session(session: DesignSession, path) -> None:
    """Serialize atomically: write a sibling temp file, then rename over."""
    path = os.fspath(path)
    payload = json.dumps(session_to_dict(session), indent=2) + "\n"
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def load_session(path) -> DesignSession:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return session_from_dict(doc)
