"""Acceptance gate: seven criteria, one printed verdict line each.

Run with ``python3 -m pytest tests/test_acceptance.py``; the verdict lines
appear in the "acceptance criteria" section after the summary.
"""

import collections
import dataclasses
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import conftest
from altseq import Dataset, DistributionFamily, ModelParams, ParamBounds, fit_mle
from altseq.fatigue import log_quantile_life, mu, mu_grad
from altseq.fisher import c_vector, info_matrix, unit_info
from altseq.harness import default_study, run_study, simulate_lifetime
from altseq.likelihood import log_likelihood
from altseq.posterior import McmcSettings, sample_posterior


def _report(tag: str, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_LINES.append(
        f"{tag}: {'PASS' if ok else 'FAIL'} — {detail}")


@pytest.fixture(scope="module")
def study_result():
    study = default_study()
    t0 = time.time()
    result = run_study(study)
    return study, result, time.time() - t0


def test_p1_information_monotonicity():
    t0 = time.time()
    cfg = default_study().cfg
    sev = dataclasses.replace(cfg, family=DistributionFamily.WEIBULL)
    rng = np.random.default_rng(2718)
    worst_det, worst_quad = 0.0, -math.inf
    n_done = n_degenerate = 0
    while n_done < 200:
        params = ModelParams(A=float(rng.uniform(1e-3, 3e-3)),
                             B=float(rng.uniform(0.2, 0.5)),
                             nu=float(rng.uniform(0.4, 1.0)))
        trial_cfg = cfg if rng.random() < 0.5 else sev
        design = rng.uniform(0.35, 0.85, size=rng.integers(3, 6)) * cfg.sigma_ult
        x_new = float(rng.uniform(0.35, 0.85)) * cfg.sigma_ult
        x_use = float(rng.uniform(0.05, 0.25)) * cfg.sigma_ult

        info_n = info_matrix(design, params, trial_cfg)
        s_n, ld_n = np.linalg.slogdet(info_n)
        if s_n != 1.0:
            # everything censored at this (theta, design): the base design
            # carries no information, so the inequalities are undefined
            n_degenerate += 1
            assert n_degenerate < 1000
            continue
        n_done += 1
        info_n1 = info_n + unit_info(x_new, params, trial_cfg)
        s_n1, ld_n1 = np.linalg.slogdet(info_n1)
        assert s_n1 == 1.0
        worst_det = min(worst_det, ld_n1 - ld_n)

        c = c_vector(x_use, params, trial_cfg)
        quad_n = float(c @ np.linalg.solve(info_n, c))
        quad_n1 = float(c @ np.linalg.solve(info_n1, c))
        worst_quad = max(worst_quad, quad_n1 - quad_n)
    dt = time.time() - t0
    ok = worst_det >= 0.0 and worst_quad <= 1e-9 and dt < 10.0
    _report("P1", ok,
            f"200 triples ({n_degenerate} degenerate redrawn): min logdet "
            f"gain {worst_det:.3e} (>= 0), max avar gain {worst_quad:.3e} "
            f"(<= 1e-9), {dt:.1f}s (< 10s)")
    assert ok


def test_p2_fisher_matches_monte_carlo_oracle():
    t0 = time.time()
    study = default_study()
    cfg, theta = study.cfg, study.truth.params
    x = 0.5 * cfg.sigma_ult

    rng = np.random.default_rng(424242)
    n = 100_000
    data = Dataset()
    for _ in range(n):
        data.append(simulate_lifetime(theta, x, cfg, rng))

    th = np.array([theta.A, theta.B, theta.nu])

    def ell(u):
        return log_likelihood(ModelParams(*(th * (1.0 + u))), data, cfg)

    h = 1e-3
    H = np.zeros((3, 3))
    base = ell(np.zeros(3))
    for i in range(3):
        for j in range(i, 3):
            if i == j:
                e = np.zeros(3)
                e[i] = h
                H[i, i] = (ell(e) - 2.0 * base + ell(-e)) / h ** 2
            else:
                ei, ej = np.zeros(3), np.zeros(3)
                ei[i], ej[j] = h, h
                H[i, j] = H[j, i] = (ell(ei + ej) - ell(ei - ej)
                                     - ell(-ei + ej) + ell(-ei - ej)) / (4 * h ** 2)
    observed = -H / (n * np.outer(th, th))
    expected = unit_info(x, theta, cfg)
    rel = np.max(np.abs(observed - expected)) / np.trace(expected)
    dt = time.time() - t0
    ok = rel < 0.02 and dt < 120.0
    _report("P2", ok,
            f"unit_info vs {n} simulated units: max entry diff "
            f"{rel:.2e} of trace (< 2e-2), {dt:.1f}s (< 120s)")
    assert ok


def test_p3_prior_recovery():
    t0 = time.time()
    study = default_study()
    draws = sample_posterior(Dataset(), study.prior, study.cfg,
                             McmcSettings(), seed=314159)

    def mcse(x, nb=25):
        x = np.asarray(x)
        m = (len(x) // nb) * nb
        bm = x[:m].reshape(nb, -1).mean(axis=1)
        return float(np.std(bm, ddof=1) / math.sqrt(nb))

    checks = []
    for name, series, target in (("A", draws.A, study.prior.mean_A),
                                 ("B", draws.B, study.prior.mean_B),
                                 ("nu2", draws.nu ** 2, study.prior.mean_nu2)):
        z = abs(float(np.mean(series)) - target) / mcse(series)
        checks.append((name, z))
    dt = time.time() - t0
    ok = all(z < 3.0 for _, z in checks) and dt < 30.0
    _report("P3", ok,
            "empty-data chain vs prior means: "
            + ", ".join(f"{n} at {z:.2f} mcse" for n, z in checks)
            + f" (all < 3), {dt:.1f}s (< 30s)")
    assert ok


def test_p4_gradients_match_finite_differences():
    t0 = time.time()
    cfg0 = default_study().cfg
    rng = np.random.default_rng(1618)
    worst = 0.0

    def central(f, th, idx):
        h = 1e-6 * th[idx]
        lo, hi = th.copy(), th.copy()
        lo[idx] -= h
        hi[idx] += h
        return (f(hi) - f(lo)) / (2.0 * h)

    for _ in range(100):
        params = ModelParams(A=float(rng.uniform(5e-4, 5e-3)),
                             B=float(rng.uniform(0.1, 0.6)),
                             nu=float(rng.uniform(0.3, 1.2)))
        cfg = dataclasses.replace(cfg0, p=float(rng.uniform(0.01, 0.45)))
        x = float(rng.uniform(0.1, 0.9)) * cfg.sigma_ult
        th = np.array([params.A, params.B, params.nu])

        f_mu = lambda t: mu(x, ModelParams(*t), cfg)
        f_ql = lambda t: log_quantile_life(x, ModelParams(*t), cfg)
        fd = np.array([central(f_mu, th, 0), central(f_mu, th, 1),
                       central(f_ql, th, 0), central(f_ql, th, 1),
                       central(f_ql, th, 2)])
        analytic = np.concatenate([mu_grad(x, params, cfg),
                                   c_vector(x, params, cfg)])
        rel = np.abs(fd - analytic) / np.maximum(np.abs(analytic), 1e-3)
        worst = max(worst, float(np.max(rel)))
    dt = time.time() - t0
    ok = worst < 1e-5 and dt < 5.0
    _report("P4", ok,
            f"100 points: worst gradient rel err {worst:.2e} (< 1e-5), "
            f"{dt:.1f}s (< 5s)")
    assert ok


def test_p5_study_reproduces_reference_orderings(study_result):
    study, result, dt = study_result
    labels = [s.label for s in study.strategies]

    final = {r[0]: r[2] for r in result.avar_rows if r[1] == 12}
    p5a = min(final, key=final.get) == "a"

    m_by_run = {}
    p5b = True
    for run in range(8, 13):
        m = {r[0]: r[2] for r in result.m_rows if r[1] == run}
        m_by_run[run] = min(m, key=m.get)
        if m_by_run[run] != "b":
            p5b = False

    alloc = collections.defaultdict(dict)
    for lab, q, frac in result.alloc_rows:
        alloc[lab][q] = frac
    fa = alloc["a"][0.35]
    fb = alloc["b"][0.75]
    p5c = (abs(fa - 2.0 / 3.0) <= 0.15 and abs(fb - 0.60) <= 0.15
           and fa == max(alloc["a"].values())
           and fb == max(alloc["b"].values()))

    mids = {lab: math.fsum(f for q, f in row.items() if 0.44 < q < 0.66)
            for lab, row in alloc.items()}
    p5d = all(f < 0.10 for f in mids.values())

    ok = p5a and p5b and p5c and p5d and dt < 1800.0
    _report("P5", ok,
            f"(a) {'PASS' if p5a else 'FAIL'} avar@12 "
            + " ".join(f"{k}={final[k]:.3f}" for k in labels)
            + f"; (b) {'PASS' if p5b else 'FAIL'} best-M@8..12 "
            + "".join(m_by_run[r] for r in range(8, 13))
            + f"; (c) {'PASS' if p5c else 'FAIL'} a@0.35={fa:.2f} b@0.75={fb:.2f}"
            + f"; (d) {'PASS' if p5d else 'FAIL'} max mid "
            + f"{max(mids.values()):.2f}; {dt:.0f}s (< 1800s)")
    assert ok


def test_p6_simulate_is_byte_deterministic(tmp_path):
    t0 = time.time()
    outs = []
    for name in ("first", "second"):
        outdir = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "altseq.cli", "--seed", "7",
             "--out", str(outdir), "simulate", "--trials", "2", "--quiet"],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(sorted(outdir.iterdir()))
    assert [p.name for p in outs[0]] == [p.name for p in outs[1]]
    same = all(a.read_bytes() == b.read_bytes() for a, b in zip(*outs))
    dt = time.time() - t0
    ok = same and len(outs[0]) == 5
    _report("P6", ok,
            f"two seeded simulate runs: {len(outs[0])} CSVs byte-identical: "
            f"{same}, {dt:.0f}s")
    assert ok


def test_p7_mle_recovery_50_seeds():
    t0 = time.time()
    study = default_study()
    cfg = dataclasses.replace(study.cfg, censor_time=1e300)
    theta = study.truth.params
    th = np.array([theta.A, theta.B, theta.nu])
    bounds = ParamBounds(A=(1e-5, 0.1), B=(0.01, 3.0), nu=(0.01, 5.0))

    n_ok = 0
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        data = Dataset()
        for q in (0.2, 0.35, 0.5, 0.65, 0.8):
            for _ in range(100):
                data.append(simulate_lifetime(theta, q * cfg.sigma_ult, cfg, rng))
        fit = fit_mle(data, cfg, bounds)
        est = np.array([fit.params.A, fit.params.B, fit.params.nu])
        if np.all(np.abs(est - th) / th <= 0.10):
            n_ok += 1
    dt = time.time() - t0
    ok = n_ok >= 48 and dt < 300.0  # >= 95% of 50
    _report("P7", ok,
            f"n=500 uncensored fits: {n_ok}/50 seeds within 10% per "
            f"parameter (need >= 48), {dt:.0f}s (< 300s)")
    assert ok
