# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled implementation of the hot kernels.

`pykern.py` is the reference: this file implements the same formulas with
the same branch points, ridge policy and proposal bookkeeping, just as
scalar C loops.  Agreement is to floating-point tolerance, not bit-for-bit.
"""

import numpy as np

from libc.math cimport (INFINITY, M_PI, acos, cos, erfc, exp, fmax, fmin,
                        isfinite, log, log1p, sqrt)

from altseq.kernels.quadrature import (BREAKS as _PYBREAKS,
                                       GL_NODES as _PYGLX,
                                       GL_WEIGHTS as _PYGLW)

cdef double LOG_SQRT_2PI = 0.5 * log(2.0 * M_PI)
cdef double SQRT2 = sqrt(2.0)

cdef double RIDGE_EIG_RATIO = 1e-10
cdef double RIDGE_TRACE_FRAC = 1e-8
cdef double ADAPT_LO = 0.2
cdef double ADAPT_HI = 0.45
cdef double ADAPT_SHRINK = 0.7
cdef double ADAPT_GROW = 1.4
cdef double SCALE_FLOOR = 1e-12

DEF NBREAK = 14
DEF GLORD = 30

cdef double[NBREAK] BREAKS
cdef double[GLORD] GLX
cdef double[GLORD] GLW
cdef double[NBREAK][3] SEV_PREF

cdef int _k, _i
for _k in range(NBREAK):
    BREAKS[_k] = _PYBREAKS[_k]
for _i in range(GLORD):
    GLX[_i] = _PYGLX[_i]
    GLW[_i] = _PYGLW[_i]


cdef inline void _sev_hpoly1(double z, double* g) noexcept nogil:
    cdef double u = exp(z)
    cdef double f = exp(z - u)
    g[0] = f * u
    g[1] = f * (u * z + u - 1.0)
    g[2] = f * (u * z * z + 2.0 * u * z - 2.0 * z - 1.0)


# cumulative full-panel integrals at every breakpoint, filled at import
cdef int _j
cdef double _a, _b, _mid, _half
cdef double[3] _g
SEV_PREF[0][0] = SEV_PREF[0][1] = SEV_PREF[0][2] = 0.0
for _j in range(NBREAK - 1):
    _a = BREAKS[_j]; _b = BREAKS[_j + 1]
    _mid = 0.5 * (_a + _b); _half = 0.5 * (_b - _a)
    SEV_PREF[_j + 1][0] = SEV_PREF[_j][0]
    SEV_PREF[_j + 1][1] = SEV_PREF[_j][1]
    SEV_PREF[_j + 1][2] = SEV_PREF[_j][2]
    for _i in range(GLORD):
        _sev_hpoly1(_mid + _half * GLX[_i], _g)
        SEV_PREF[_j + 1][0] += _half * GLW[_i] * _g[0]
        SEV_PREF[_j + 1][1] += _half * GLW[_i] * _g[1]
        SEV_PREF[_j + 1][2] += _half * GLW[_i] * _g[2]


cdef inline double _logsf_normal1(double z) noexcept nogil:
    cdef double zz, series
    if z <= 36.0:
        return log(0.5 * erfc(z / SQRT2))
    zz = z * z
    series = 1.0 - 1.0 / zz + 3.0 / (zz * zz) - 15.0 / (zz * zz * zz) \
        + 105.0 / (zz * zz * zz * zz)
    return -0.5 * zz - log(z) - LOG_SQRT_2PI + log(series)


cdef inline void _normal_info1(double z, double* out) noexcept nogil:
    cdef double phi, big_phi, hz, ph
    if z >= 12.0:
        out[0] = 1.0; out[1] = 0.0; out[2] = 2.0
        return
    if z <= -38.0:
        out[0] = 0.0; out[1] = 0.0; out[2] = 0.0
        return
    phi = exp(-0.5 * z * z) / sqrt(2.0 * M_PI)
    big_phi = 0.5 * erfc(-z / SQRT2)
    hz = exp(-0.5 * z * z - LOG_SQRT_2PI - _logsf_normal1(z))
    ph = phi * hz
    out[0] = big_phi - z * phi + ph
    out[1] = -(1.0 + z * z) * phi + z * ph
    out[2] = 2.0 * big_phi - (z + z * z * z) * phi + z * z * ph


cdef inline void _sev_info1(double z, double* out) noexcept nogil:
    cdef double zl, mid, half, zn, uc, e, c11
    cdef double[3] g
    cdef int j, k, i
    if z <= BREAKS[0]:
        out[0] = 0.0; out[1] = 0.0; out[2] = 0.0
        return
    zl = fmin(z, BREAKS[NBREAK - 1])
    j = NBREAK - 2
    for k in range(NBREAK - 1):
        if BREAKS[k + 1] > zl:
            j = k
            break
    out[0] = SEV_PREF[j][0]
    out[1] = SEV_PREF[j][1]
    out[2] = SEV_PREF[j][2]
    mid = 0.5 * (BREAKS[j] + zl); half = 0.5 * (zl - BREAKS[j])
    for i in range(GLORD):
        zn = mid + half * GLX[i]
        _sev_hpoly1(zn, g)
        out[0] += half * GLW[i] * g[0]
        out[1] += half * GLW[i] * g[1]
        out[2] += half * GLW[i] * g[2]
    uc = exp(fmin(z, 700.0))
    e = exp(-uc)
    c11 = uc * e
    out[0] += c11
    out[1] += c11 * (1.0 + z)
    out[2] += c11 * (2.0 * z + z * z)


cdef inline void _std_info1(double z, int family, double* out) noexcept nogil:
    if family == 0:
        _normal_info1(z, out)
    else:
        _sev_info1(z, out)


def std_info(zeta, int family):
    """Standardized censored information entries for a 1-D zeta array."""
    cdef double[::1] z = np.ascontiguousarray(zeta, dtype=np.float64)
    cdef Py_ssize_t L = z.shape[0], i
    out_arr = np.empty((L, 3))
    cdef double[:, ::1] out = out_arr
    cdef double[3] f
    for i in range(L):
        _std_info1(z[i], family, f)
        out[i, 0] = f[0]; out[i, 1] = f[1]; out[i, 2] = f[2]
    return out_arr


# --- metropolis chain ----------------------------------------------------

cdef double _chain_lt(double A, double B, double u,
                      double[::1] fx, double[::1] logt, double[::1] delta,
                      int family, double log_h,
                      double a1, double a2, double b1, double b2,
                      double kappa, double ig_scale,
                      double sum_logt_fail, double n_fail) noexcept nogil:
    cdef double nu, coef, S, m, z, ll
    cdef Py_ssize_t i
    if not (a1 < A < a2 and b1 < B < b2):
        return -INFINITY
    nu = exp(u)
    coef = (B / A) * exp(B * log_h)
    ll = 0.0
    for i in range(fx.shape[0]):
        S = coef * fx[i]
        m = log1p(S) / B
        z = (logt[i] - m) / nu
        if delta[i] == 0.0:
            if family == 0:
                ll += -0.5 * z * z - LOG_SQRT_2PI
            else:
                ll += z - exp(fmin(z, 700.0))
        else:
            if family == 0:
                ll += _logsf_normal1(z)
            else:
                ll += -exp(fmin(z, 700.0))
    ll += -n_fail * u - sum_logt_fail
    ll += -2.0 * kappa * u - ig_scale * exp(-2.0 * u)
    if not isfinite(ll):
        return -INFINITY
    return ll


def mh_chain(fx, logt, delta, int family, double log_h,
             double a1, double a2, double b1, double b2,
             double kappa, double ig_scale,
             init, scales, Py_ssize_t n_sweeps, Py_ssize_t n_burn,
             Py_ssize_t adapt_every, normals, unifs):
    """Componentwise random-walk Metropolis; see pykern.mh_chain."""
    cdef double[::1] fxv = np.ascontiguousarray(fx, dtype=np.float64)
    cdef double[::1] ltv = np.ascontiguousarray(logt, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    cdef double[:, ::1] norm = np.ascontiguousarray(normals, dtype=np.float64)
    cdef double[:, ::1] unif = np.ascontiguousarray(unifs, dtype=np.float64)

    cdef double sum_logt_fail = 0.0
    cdef double n_fail = 0.0
    cdef Py_ssize_t i
    for i in range(dv.shape[0]):
        if dv[i] == 0.0:
            sum_logt_fail += ltv[i]
            n_fail += 1.0

    cdef double[3] state, sc, widths, prop
    for i in range(3):
        state[i] = init[i]
        sc[i] = scales[i]
    widths[0] = a2 - a1; widths[1] = b2 - b1; widths[2] = 10.0

    chain_arr = np.empty((n_sweeps, 3))
    cdef double[:, ::1] chain = chain_arr
    acc_arr = np.zeros(3, dtype=np.int64)
    cdef long long[::1] accepted = acc_arr
    cdef long long[3] win
    win[0] = win[1] = win[2] = 0

    cdef double lp, lp_new, rate
    cdef Py_ssize_t s, j
    lp = _chain_lt(state[0], state[1], state[2], fxv, ltv, dv, family, log_h,
                   a1, a2, b1, b2, kappa, ig_scale, sum_logt_fail, n_fail)
    for s in range(n_sweeps):
        for j in range(3):
            prop[0] = state[0]; prop[1] = state[1]; prop[2] = state[2]
            prop[j] += sc[j] * norm[s, j]
            lp_new = _chain_lt(prop[0], prop[1], prop[2], fxv, ltv, dv,
                               family, log_h, a1, a2, b1, b2,
                               kappa, ig_scale, sum_logt_fail, n_fail)
            if log(unif[s, j]) < lp_new - lp:
                state[0] = prop[0]; state[1] = prop[1]; state[2] = prop[2]
                lp = lp_new
                win[j] += 1
                if s >= n_burn:
                    accepted[j] += 1
        if s < n_burn and (s + 1) % adapt_every == 0:
            for j in range(3):
                rate = win[j] / (<double> adapt_every)
                if rate < ADAPT_LO:
                    sc[j] *= ADAPT_SHRINK
                elif rate > ADAPT_HI:
                    sc[j] *= ADAPT_GROW
                sc[j] = fmin(fmax(sc[j], SCALE_FLOOR), widths[j])
                win[j] = 0
        chain[s, 0] = state[0]
        chain[s, 1] = state[1]
        chain[s, 2] = exp(state[2])
    return chain_arr, acc_arr, np.array([sc[0], sc[1], sc[2]])


# --- design criterion tables ---------------------------------------------

cdef inline void _curve1(double A, double B, double fx, double log_h,
                         double* mu, double* da, double* db) noexcept nogil:
    cdef double S = (B / A) * exp(B * log_h) * fx
    cdef double m = log1p(S) / B
    cdef double ratio = S / (1.0 + S)
    mu[0] = m
    da[0] = -ratio / (A * B)
    db[0] = -m / B + ratio * (1.0 / B + log_h) / B


cdef inline void _sym3_eigvals1(double* t, double* e) noexcept nogil:
    cdef double q, p1, p2, p, b00, b11, b22, b01, b02, b12, detb, r, phi
    q = (t[0] + t[3] + t[5]) / 3.0
    p1 = t[1] * t[1] + t[2] * t[2] + t[4] * t[4]
    p2 = (t[0] - q) ** 2 + (t[3] - q) ** 2 + (t[5] - q) ** 2 + 2.0 * p1
    p = sqrt(fmax(p2, 0.0) / 6.0)
    if not p > 0.0:
        e[0] = t[0]; e[1] = t[3]; e[2] = t[5]
        return
    b00 = (t[0] - q) / p; b11 = (t[3] - q) / p; b22 = (t[5] - q) / p
    b01 = t[1] / p; b02 = t[2] / p; b12 = t[4] / p
    detb = (b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02))
    r = detb / 2.0
    if r < -1.0:
        r = -1.0
    elif r > 1.0:
        r = 1.0
    phi = acos(r) / 3.0
    e[0] = q + 2.0 * p * cos(phi)
    e[2] = q + 2.0 * p * cos(phi + 2.0 * M_PI / 3.0)
    e[1] = 3.0 * q - e[0] - e[2]


cdef inline double _det3(double* t) noexcept nogil:
    return (t[0] * (t[3] * t[5] - t[4] * t[4])
            - t[1] * (t[1] * t[5] - t[4] * t[2])
            + t[2] * (t[1] * t[4] - t[3] * t[2]))


def criterion_table(A, B, nu, fx_obs, fx_cand, fx_use, w_use,
                    double log_h, double z_p, double log_censor,
                    int family, int kind):
    """Posterior-averaged criterion per candidate; see pykern.criterion_table."""
    cdef double[::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double[::1] nuv = np.ascontiguousarray(nu, dtype=np.float64)
    cdef double[::1] fo = np.ascontiguousarray(fx_obs, dtype=np.float64)
    cdef double[::1] fc = np.ascontiguousarray(fx_cand, dtype=np.float64)
    cdef double[::1] fu = np.ascontiguousarray(fx_use, dtype=np.float64)
    cdef double[::1] wu = np.ascontiguousarray(w_use, dtype=np.float64)

    cdef Py_ssize_t M = Av.shape[0], n = fo.shape[0]
    cdef Py_ssize_t C = fc.shape[0], K = fu.shape[0]
    sums_arr = np.zeros(C)
    kept_arr = np.zeros(C, dtype=np.int64)
    cdef double[::1] sums = sums_arr
    cdef long long[::1] kept = kept_arr

    cdef double[6] base, t
    cdef double[3] f, eigs
    cdef double a_m, b_m, nu_m, inv_nu2, mu1, da1, db1, zeta
    cdef double w00, w01, w02, w11, w12, w22
    cdef double lmin, lmax, tr, ridge, det, val
    cdef double i00, i01, i02, i11, i12, i22
    cdef Py_ssize_t m, i, c, k
    cdef bint ok

    for m in range(M):
        a_m = Av[m]; b_m = Bv[m]; nu_m = nuv[m]
        inv_nu2 = 1.0 / (nu_m * nu_m)

        for k in range(6):
            base[k] = 0.0
        for i in range(n):
            _curve1(a_m, b_m, fo[i], log_h, &mu1, &da1, &db1)
            zeta = (log_censor - mu1) / nu_m
            _std_info1(zeta, family, f)
            base[0] += f[0] * inv_nu2 * da1 * da1
            base[1] += f[0] * inv_nu2 * da1 * db1
            base[2] += f[1] * inv_nu2 * da1
            base[3] += f[0] * inv_nu2 * db1 * db1
            base[4] += f[1] * inv_nu2 * db1
            base[5] += f[2] * inv_nu2

        if kind == 0:
            w00 = w01 = w02 = w11 = w12 = w22 = 0.0
            for k in range(K):
                _curve1(a_m, b_m, fu[k], log_h, &mu1, &da1, &db1)
                w00 += wu[k] * da1 * da1
                w01 += wu[k] * da1 * db1
                w02 += wu[k] * da1
                w11 += wu[k] * db1 * db1
                w12 += wu[k] * db1
                w22 += wu[k]
            w02 *= z_p
            w12 *= z_p
            w22 *= z_p * z_p

        for c in range(C):
            _curve1(a_m, b_m, fc[c], log_h, &mu1, &da1, &db1)
            zeta = (log_censor - mu1) / nu_m
            _std_info1(zeta, family, f)
            t[0] = base[0] + f[0] * inv_nu2 * da1 * da1
            t[1] = base[1] + f[0] * inv_nu2 * da1 * db1
            t[2] = base[2] + f[1] * inv_nu2 * da1
            t[3] = base[3] + f[0] * inv_nu2 * db1 * db1
            t[4] = base[4] + f[1] * inv_nu2 * db1
            t[5] = base[5] + f[2] * inv_nu2
            ok = True
            for k in range(6):
                if not isfinite(t[k]):
                    ok = False
                    break
            if not ok:
                continue
            if kind == 1:
                det = _det3(t)
                if isfinite(det) and det > 0.0:
                    sums[c] += log(det)
                    kept[c] += 1
                continue
            _sym3_eigvals1(t, eigs)
            lmin = fmin(fmin(eigs[0], eigs[1]), eigs[2])
            lmax = fmax(fmax(eigs[0], eigs[1]), eigs[2])
            if not (isfinite(lmin) and isfinite(lmax)) or not lmax > 0.0:
                continue
            if lmin < RIDGE_EIG_RATIO * lmax:
                tr = t[0] + t[3] + t[5]
                ridge = RIDGE_TRACE_FRAC * tr / 3.0
                t[0] += ridge; t[3] += ridge; t[5] += ridge
            det = _det3(t)
            if not isfinite(det) or not det > 0.0:
                continue
            i00 = (t[3] * t[5] - t[4] * t[4]) / det
            i01 = (t[2] * t[4] - t[1] * t[5]) / det
            i02 = (t[1] * t[4] - t[2] * t[3]) / det
            i11 = (t[0] * t[5] - t[2] * t[2]) / det
            i12 = (t[1] * t[2] - t[0] * t[4]) / det
            i22 = (t[0] * t[3] - t[1] * t[1]) / det
            val = (i00 * w00 + i11 * w11 + i22 * w22
                   + 2.0 * (i01 * w01 + i02 * w02 + i12 * w12))
            if isfinite(val):
                sums[c] += val
                kept[c] += 1

    values = np.full(C, np.nan)
    for c in range(C):
        if kept[c] > 0:
            values[c] = sums[c] / kept[c]
    return values, kept_arr
