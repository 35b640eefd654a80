"""Pure numpy implementation of the hot kernels.

Mirror image of the compiled extension in ``_ckern.pyx``: same formulas, same
branch points, same ridge policy, same proposal bookkeeping.  The backends
agree to floating-point tolerance but not bit-for-bit (summation order and
libm vs. SIMD elementary functions differ); each backend on its own is fully
deterministic given the same inputs.

Kernel surface (shared with the extension):

``std_info(zeta, family)``
    Standardized per-unit expected information entries (F_mm, F_mv, F_vv)
    under Type-I censoring at standardized log-time zeta, for the
    location-scale pair; the caller scales by 1/nu^2.
``mh_chain(...)``
    Componentwise random-walk Metropolis over (A, B, log nu) with burn-in
    scale adaptation, driven entirely by pre-drawn normals/uniforms.
``criterion_table(...)``
    Posterior-averaged design criterion values for every candidate stress.
"""

import math

import numpy as np
from scipy.special import erfc as _erfc

from .quadrature import (BREAKS, GL_NODES, GL_WEIGHTS, NORMAL_EMPTY,
                         NORMAL_FULL, SEV_LOWER, SEV_UPPER)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)

# Ridge policy for near-singular information totals, shared verbatim with the
# compiled backend: trigger on eigenvalue ratio, inflate the diagonal by a
# fixed fraction of the mean diagonal.
RIDGE_EIG_RATIO = 1e-10
RIDGE_TRACE_FRAC = 1e-8

# Acceptance-rate band targeted by burn-in scale adaptation.
ADAPT_LO = 0.2
ADAPT_HI = 0.45
ADAPT_SHRINK = 0.7
ADAPT_GROW = 1.4
SCALE_FLOOR = 1e-12


def _logsf_normal(z):
    """log of the standard normal survival function, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    near = z <= 36.0
    out[near] = np.log(0.5 * _erfc(z[near] / _SQRT2))
    if not np.all(near):
        zz = z[~near] ** 2
        series = 1.0 - 1.0 / zz + 3.0 / zz**2 - 15.0 / zz**3 + 105.0 / zz**4
        out[~near] = -0.5 * zz - np.log(z[~near]) - _LOG_SQRT_2PI + np.log(series)
    return out


# --- sev panel integrals -------------------------------------------------

def _sev_hpoly(z):
    """Integrand rows (f*h11, f*h12, f*h22) of the SEV information integrals."""
    u = np.exp(z)
    f = np.exp(z - u)
    h11 = u
    h12 = u * z + u - 1.0
    h22 = u * z * z + 2.0 * u * z - 2.0 * z - 1.0
    return f * h11, f * h12, f * h22


def _sev_prefix():
    """Cumulative full-panel integrals at every breakpoint."""
    pref = np.zeros((len(BREAKS), 3))
    for j in range(len(BREAKS) - 1):
        a, b = BREAKS[j], BREAKS[j + 1]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        g11, g12, g22 = _sev_hpoly(mid + half * GL_NODES)
        w = half * GL_WEIGHTS
        pref[j + 1] = pref[j] + (w @ g11, w @ g12, w @ g22)
    return pref

_SEV_PREFIX = _sev_prefix()


def _sev_info(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros(z.shape + (3,))
    live = z > SEV_LOWER
    if np.any(live):
        zl = np.minimum(z[live], SEV_UPPER)
        j = np.searchsorted(BREAKS, zl, side="right") - 1
        j = np.minimum(j, len(BREAKS) - 2)
        a = BREAKS[j]
        mid, half = 0.5 * (a + zl), 0.5 * (zl - a)
        nodes = mid[:, None] + half[:, None] * GL_NODES[None, :]
        g11, g12, g22 = _sev_hpoly(nodes)
        w = half[:, None] * GL_WEIGHTS[None, :]
        fail = _SEV_PREFIX[j] + np.stack(
            [(w * g11).sum(axis=1), (w * g12).sum(axis=1), (w * g22).sum(axis=1)],
            axis=1)
        zc = z[live]
        uc = np.exp(np.minimum(zc, 700.0))
        c11 = uc * np.exp(-uc)
        cens = np.stack([c11, c11 * (1.0 + zc), c11 * (2.0 * zc + zc * zc)], axis=1)
        out[live] = fail + cens
    return out


def _normal_info(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros(z.shape + (3,))
    full = z >= NORMAL_FULL
    out[full] = (1.0, 0.0, 2.0)
    mid = (~full) & (z > NORMAL_EMPTY)
    if np.any(mid):
        zm = z[mid]
        phi = np.exp(-0.5 * zm * zm) / math.sqrt(2.0 * math.pi)
        big_phi = 0.5 * _erfc(-zm / _SQRT2)
        logpdf = -0.5 * zm * zm - _LOG_SQRT_2PI
        hz = np.exp(logpdf - _logsf_normal(zm))
        ph = phi * hz
        out[mid, 0] = big_phi - zm * phi + ph
        out[mid, 1] = -(1.0 + zm * zm) * phi + zm * ph
        out[mid, 2] = 2.0 * big_phi - (zm + zm**3) * phi + zm * zm * ph
    return out


def std_info(zeta, family):
    """Standardized censored information entries, shape ``zeta.shape + (3,)``."""
    if family == 0:
        return _normal_info(zeta)
    return _sev_info(zeta)


# --- metropolis chain ----------------------------------------------------

def _chain_loglik(A, B, u, fx, logt, delta, family, log_h,
                  a1, a2, b1, b2, kappa, ig_scale, sum_logt_fail, n_fail):
    """Chain log-target: censored log-likelihood plus log prior in u = log nu.

    Constant terms independent of (A, B, u) are kept only where the
    likelihood examples pin them (the -log t of each failure); normalization
    constants of the prior are dropped.
    """
    if not (a1 < A < a2 and b1 < B < b2):
        return -math.inf
    nu = math.exp(u)
    S = (B / A) * math.exp(B * log_h) * fx
    mu = np.log1p(S) / B
    z = (logt - mu) / nu
    zf = z[delta == 0]
    zc = z[delta == 1]
    if family == 0:
        ll_f = -0.5 * float(zf @ zf) - zf.size * _LOG_SQRT_2PI
        ll_c = float(np.sum(_logsf_normal(zc))) if zc.size else 0.0
    else:
        ll_f = float(np.sum(zf - np.exp(np.minimum(zf, 700.0))))
        ll_c = -float(np.sum(np.exp(np.minimum(zc, 700.0))))
    ll = ll_f - n_fail * u - sum_logt_fail + ll_c
    lp = -2.0 * kappa * u - ig_scale * math.exp(-2.0 * u)
    total = ll + lp
    return total if math.isfinite(total) else -math.inf


def mh_chain(fx, logt, delta, family, log_h, a1, a2, b1, b2, kappa, ig_scale,
             init, scales, n_sweeps, n_burn, adapt_every, normals, unifs):
    """Run the componentwise random-walk chain; see module docstring.

    Returns (chain, accepted, final_scales): chain rows are (A, B, nu),
    accepted counts proposals accepted per coordinate after burn-in.
    """
    fx = np.asarray(fx, dtype=np.float64)
    logt = np.asarray(logt, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    mask_f = delta == 0
    sum_logt_fail = float(np.sum(logt[mask_f]))
    n_fail = int(np.sum(mask_f))

    state = [float(init[0]), float(init[1]), float(init[2])]
    scales = [float(scales[0]), float(scales[1]), float(scales[2])]
    widths = (a2 - a1, b2 - b1, 10.0)
    chain = np.empty((n_sweeps, 3))
    win = [0, 0, 0]
    accepted = np.zeros(3, dtype=np.int64)

    def logtarget(s):
        return _chain_loglik(s[0], s[1], s[2], fx, logt, delta, family, log_h,
                             a1, a2, b1, b2, kappa, ig_scale,
                             sum_logt_fail, n_fail)

    lp = logtarget(state)
    for s in range(n_sweeps):
        for j in range(3):
            prop = list(state)
            prop[j] += scales[j] * normals[s, j]
            lp_new = logtarget(prop)
            if math.log(unifs[s, j]) < lp_new - lp:
                state = prop
                lp = lp_new
                win[j] += 1
                if s >= n_burn:
                    accepted[j] += 1
        if s < n_burn and (s + 1) % adapt_every == 0:
            for j in range(3):
                rate = win[j] / adapt_every
                if rate < ADAPT_LO:
                    scales[j] *= ADAPT_SHRINK
                elif rate > ADAPT_HI:
                    scales[j] *= ADAPT_GROW
                scales[j] = min(max(scales[j], SCALE_FLOOR), widths[j])
                win[j] = 0
        chain[s, 0] = state[0]
        chain[s, 1] = state[1]
        chain[s, 2] = math.exp(state[2])
    return chain, accepted, np.asarray(scales)


# --- design criterion tables ---------------------------------------------

def _curve(A, B, fx, log_h):
    """mu and its (A, B) gradient at every draw x stress pair."""
    S = (B / A)[:, None] * np.exp(B * log_h)[:, None] * fx[None, :]
    mu = np.log1p(S) / B[:, None]
    ratio = S / (1.0 + S)
    d_a = -ratio / (A * B)[:, None]
    d_b = -mu / B[:, None] + ratio * (1.0 / B + log_h)[:, None] / B[:, None]
    return mu, d_a, d_b


def _sym3_eigvals(t):
    """Eigenvalues of symmetric 3x3 matrices given as (..., 6) packed rows.

    Packing order (t00, t01, t02, t11, t12, t22).  Closed-form trigonometric
    method; identical arithmetic to the compiled backend.
    """
    t00, t01, t02, t11, t12, t22 = (t[..., k] for k in range(6))
    q = (t00 + t11 + t22) / 3.0
    p1 = t01 * t01 + t02 * t02 + t12 * t12
    p2 = (t00 - q) ** 2 + (t11 - q) ** 2 + (t22 - q) ** 2 + 2.0 * p1
    p = np.sqrt(np.maximum(p2, 0.0) / 6.0)
    safe = p > 0.0
    ps = np.where(safe, p, 1.0)
    b00, b11, b22 = (t00 - q) / ps, (t11 - q) / ps, (t22 - q) / ps
    b01, b02, b12 = t01 / ps, t02 / ps, t12 / ps
    detb = (b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02))
    r = np.clip(detb / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    e1 = q + 2.0 * ps * np.cos(phi)
    e3 = q + 2.0 * ps * np.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    eigs = np.stack([e1, e2, e3], axis=-1)
    diag = np.stack([t00, t11, t22], axis=-1)
    return np.where(safe[..., None], eigs, diag)


def _det3(t):
    t00, t01, t02, t11, t12, t22 = (t[..., k] for k in range(6))
    return (t00 * (t11 * t22 - t12 * t12)
            - t01 * (t01 * t22 - t12 * t02)
            + t02 * (t01 * t12 - t11 * t02))


def _unit_info6(fr, d_a, d_b, inv_nu2):
    """Pack J' F J / nu^2 into (t00, t01, t02, t11, t12, t22) rows."""
    f11 = fr[..., 0] * inv_nu2
    f12 = fr[..., 1] * inv_nu2
    f22 = fr[..., 2] * inv_nu2
    return np.stack([f11 * d_a * d_a, f11 * d_a * d_b, f12 * d_a,
                     f11 * d_b * d_b, f12 * d_b, f22], axis=-1)


def criterion_table(A, B, nu, fx_obs, fx_cand, fx_use, w_use,
                    log_h, z_p, log_censor, family, kind):
    """Posterior-averaged criterion value per candidate stress.

    kind 0: weighted asymptotic variance of the log quantile-life estimate
    (to be minimized); kind 1: log-determinant of the updated information
    (to be maximized).  Draws where the evaluation is singular or
    non-finite are skipped and counted; ``values`` holds the mean over kept
    draws (nan when none survive) and ``kept`` the per-candidate counts.
    """
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    nu = np.asarray(nu, float)
    inv_nu2 = 1.0 / (nu * nu)

    mu_o, da_o, db_o = _curve(A, B, np.asarray(fx_obs, float), log_h)
    zeta_o = (log_censor - mu_o) / nu[:, None]
    info_o = _unit_info6(std_info(zeta_o, family), da_o, db_o, inv_nu2[:, None])
    i_base = info_o.sum(axis=1)  # (M, 6)

    mu_c, da_c, db_c = _curve(A, B, np.asarray(fx_cand, float), log_h)
    zeta_c = (log_censor - mu_c) / nu[:, None]
    i_one = _unit_info6(std_info(zeta_c, family), da_c, db_c, inv_nu2[:, None])

    total = i_base[:, None, :] + i_one  # (M, C, 6)
    finite = np.all(np.isfinite(total), axis=-1)

    if kind == 1:
        det = _det3(total)
        ok = finite & np.isfinite(det) & (det > 0.0)
        vals = np.where(ok, np.log(np.where(ok, det, 1.0)), 0.0)
    else:
        # weighted use-level moment matrix of c = (dmu/dA, dmu/dB, z_p)
        _, da_u, db_u = _curve(A, B, np.asarray(fx_use, float), log_h)
        w = np.asarray(w_use, float)[None, :]
        w00 = np.sum(w * da_u * da_u, axis=1)
        w01 = np.sum(w * da_u * db_u, axis=1)
        w02 = z_p * np.sum(w * da_u, axis=1)
        w11 = np.sum(w * db_u * db_u, axis=1)
        w12 = z_p * np.sum(w * db_u, axis=1)
        w22 = z_p * z_p * np.sum(w, axis=1)

        eigs = _sym3_eigvals(total)
        lmin = eigs.min(axis=-1)
        lmax = eigs.max(axis=-1)
        ok = finite & np.all(np.isfinite(eigs), axis=-1) & (lmax > 0.0)
        tr = total[..., 0] + total[..., 3] + total[..., 5]
        need = ok & (lmin < RIDGE_EIG_RATIO * lmax)
        ridge = np.where(need, RIDGE_TRACE_FRAC * tr / 3.0, 0.0)
        t = total.copy()
        for d in (0, 3, 5):
            t[..., d] += ridge
        det = _det3(t)
        ok &= np.isfinite(det) & (det > 0.0)
        dets = np.where(ok, det, 1.0)
        t00, t01, t02, t11, t12, t22 = (t[..., k] for k in range(6))
        i00 = (t11 * t22 - t12 * t12) / dets
        i01 = (t02 * t12 - t01 * t22) / dets
        i02 = (t01 * t12 - t02 * t11) / dets
        i11 = (t00 * t22 - t02 * t02) / dets
        i12 = (t01 * t02 - t00 * t12) / dets
        i22 = (t00 * t11 - t01 * t01) / dets
        vals = (i00 * w00[:, None] + i11 * w11[:, None] + i22 * w22[:, None]
                + 2.0 * (i01 * w01[:, None] + i02 * w02[:, None]
                         + i12 * w12[:, None]))
        ok &= np.isfinite(vals)
        vals = np.where(ok, vals, 0.0)

    kept = ok.sum(axis=0).astype(np.int64)
    sums = np.where(ok, vals, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore"):
        values = np.where(kept > 0, sums / np.maximum(kept, 1), np.nan)
    return values, kept
