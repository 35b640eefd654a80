"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot operations on study-sized workloads:

* ``std_info``        -- standardized censored information rows
* ``mh_chain``        -- one full Metropolis chain (the per-run sampler cost)
* ``criterion_table`` -- posterior-averaged criterion over the candidate grid

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sweeps 11000] [--draws 1000]
"""

import argparse
import math
import timeit

import numpy as np

from altseq.fatigue import stress_factor
from altseq.harness import default_study

from altseq.kernels import pykern

try:
    from altseq.kernels import _ckern
except ImportError:
    _ckern = None


def build_workloads(sweeps: int, draws: int):
    study = default_study()
    cfg = study.cfg
    truth = study.truth.params
    rng = np.random.default_rng(2024)

    # a mid-campaign dataset: the 3 seed units plus 12 sequential picks
    qs = [0.45, 0.55, 0.65] + [0.35] * 8 + [0.75] * 4
    fx_obs = np.array([stress_factor(q * cfg.sigma_ult, cfg) for q in qs])
    mu0 = 21.0
    logt = rng.normal(mu0, truth.nu, size=len(qs))
    delta = (logt > math.log(cfg.censor_time)).astype(np.float64)
    logt = np.minimum(logt, math.log(cfg.censor_time))

    a1, a2 = study.prior.A_range
    b1, b2 = study.prior.B_range
    init = np.array([0.5 * (a1 + a2), 0.5 * (b1 + b2), math.log(0.7)])
    scales = np.array([0.1 * (a2 - a1), 0.1 * (b2 - b1), 0.25])
    normals = rng.standard_normal((sweeps, 3))
    unifs = rng.random((sweeps, 3))

    mh_args = (fx_obs, logt, delta, cfg.family.code, math.log(cfg.h),
               a1, a2, b1, b2, study.prior.nu2_shape, study.prior.nu2_scale,
               init, scales, sweeps, sweeps // 11, 50, normals, unifs)

    A = rng.uniform(1e-3, 3e-3, draws)
    B = rng.uniform(0.25, 0.45, draws)
    nu = rng.uniform(0.5, 1.0, draws)
    fx_cand = np.array([stress_factor(q * cfg.sigma_ult, cfg)
                        for q in study.candidates.fractions])
    fx_use = np.array([stress_factor(x, cfg) for x in study.profile.levels])
    w_use = np.array(study.profile.weights)
    crit_args = (A, B, nu, fx_obs, fx_cand, fx_use, w_use,
                 math.log(cfg.h), -1.6448536269514722,
                 math.log(cfg.censor_time), cfg.family.code, 0)

    zetas = rng.uniform(-12.0, 6.0, 100_000)
    info_args = (zetas, cfg.family.code)
    return mh_args, crit_args, info_args


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions; the best is reported")
    parser.add_argument("--sweeps", type=int, default=11000,
                        help="Metropolis sweeps per chain")
    parser.add_argument("--draws", type=int, default=1000,
                        help="posterior draws scored by criterion_table")
    args = parser.parse_args()

    mh_args, crit_args, info_args = build_workloads(args.sweeps, args.draws)
    cases = [
        ("std_info (100k zetas)", info_args, "std_info"),
        (f"mh_chain ({args.sweeps} sweeps, 15 obs)", mh_args, "mh_chain"),
        (f"criterion_table ({args.draws} draws, 9 cand)", crit_args,
         "criterion_table"),
    ]

    backends = [("python", pykern)]
    if _ckern is not None:
        backends.append(("cython", _ckern))
    else:
        print("compiled extension not importable; timing the fallback only\n")

    width = max(len(name) for name, _, _ in cases)
    header = f"{'operation':<{width}}  " + "".join(
        f"{name + ' (s)':>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args, attr in cases:
        times = []
        for _, mod in backends:
            fn = getattr(mod, attr)
            times.append(best_of(lambda: fn(*call_args), args.repeat))
        line = f"{name:<{width}}  " + "".join(f"{t:>14.4f}" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
