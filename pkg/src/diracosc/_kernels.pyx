# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: sector-space time series and grid wavefunction sums.

Same call signatures as :mod:`diracosc._kernels_py`.
"""

import numpy as np
from scipy import sparse

from libc.math cimport cos, sin, sqrt, exp, log, lgamma, M_PI


DEF _RESEED = 32


cdef inline double complex _cplx(double re, double im) noexcept nogil:
    cdef double complex z
    z.real = re
    z.imag = im
    return z


def sector_series(times, omega, x, s, sgn, u0, v0, ops, fw=False):
    cdef double[::1] t_ = np.ascontiguousarray(times, dtype=float)
    cdef double[::1] om = np.ascontiguousarray(omega, dtype=float)
    cdef double[::1] xx = np.ascontiguousarray(x, dtype=float)
    cdef double[::1] ss = np.ascontiguousarray(s, dtype=float)
    cdef double complex[::1] sg = np.ascontiguousarray(sgn, dtype=complex)
    cdef double complex[::1] a0 = np.ascontiguousarray(u0, dtype=complex)
    cdef double complex[::1] b0 = np.ascontiguousarray(v0, dtype=complex)
    cdef Py_ssize_t ns = om.shape[0], nt = t_.shape[0], dim = 2 * om.shape[0]
    cdef Py_ssize_t nops = len(ops)

    csr = [sparse.csr_matrix(o) for o in ops]
    ptr_np = np.zeros((max(nops, 1), dim + 1), dtype=np.int64)
    idx_parts, dat_parts, base = [], [], 0
    for kk, o in enumerate(csr):
        o.sort_indices()
        ptr_np[kk] = o.indptr.astype(np.int64) + base
        idx_parts.append(o.indices.astype(np.int64))
        dat_parts.append(o.data.astype(complex))
        base += o.nnz
    cdef long long[:, ::1] ptr = ptr_np
    cdef long long[::1] ind = np.concatenate(idx_parts) if idx_parts else np.zeros(1, dtype=np.int64)
    cdef double complex[::1] dat = np.concatenate(dat_parts) if dat_parts else np.zeros(1, dtype=complex)

    vals_np = np.empty((nops, nt))
    ovl_np = np.empty(nt, dtype=complex)
    nrm_np = np.empty(nt)
    cdef double[:, ::1] vals = vals_np
    cdef double complex[::1] ovl = ovl_np
    cdef double[::1] nrm = nrm_np
    cdef double complex[::1] w = np.zeros(dim, dtype=complex)
    cdef bint is_fw = fw

    cdef Py_ssize_t i, j, k, row
    cdef long long q
    cdef double ph, c, sn, acc_r, nn, tc
    cdef double complex A, B, acc, tmp, ov, wu, wv

    # on a uniform grid phases advance by a fixed rotation, re-seeded exactly
    # every _RESEED steps so rounding cannot accumulate
    tt = np.asarray(t_)
    cdef bint uniform = False
    if nt > 2:
        d = np.diff(tt)
        uniform = bool(np.all(np.abs(d - d[0]) <= 1e-12 * max(abs(d[0]), 1e-300)))
    cdef double dt = (tt[1] - tt[0]) if nt > 1 else 0.0
    cdef double[::1] rc = np.cos(np.asarray(om) * dt)
    cdef double[::1] rs = np.sin(np.asarray(om) * dt)
    cdef double[::1] cc = np.zeros(ns)
    cdef double[::1] sc = np.zeros(ns)
    cdef Py_ssize_t reseed = _RESEED

    with nogil:
        for i in range(nt):
            ov = 0
            nn = 0
            for j in range(ns):
                if uniform and i % reseed != 0:
                    c = cc[j] * rc[j] - sc[j] * rs[j]
                    sn = sc[j] * rc[j] + cc[j] * rs[j]
                else:
                    ph = t_[i] * om[j]
                    c = cos(ph)
                    sn = sin(ph)
                cc[j] = c
                sc[j] = sn
                if is_fw:
                    wu = _cplx(c, -sn) * a0[j]
                    wv = 0
                else:
                    A = _cplx(c, -xx[j] * sn)
                    B = _cplx(0.0, -ss[j] * sn) * sg[j]
                    wu = A * a0[j] - B.conjugate() * b0[j]
                    wv = B * a0[j] + A.conjugate() * b0[j]
                w[j] = wu
                w[ns + j] = wv
                ov = ov + a0[j].conjugate() * wu + b0[j].conjugate() * wv
                nn = nn + wu.real * wu.real + wu.imag * wu.imag + wv.real * wv.real + wv.imag * wv.imag
            ovl[i] = ov
            nrm[i] = nn
            for k in range(nops):
                acc_r = 0.0
                for row in range(dim):
                    if ptr[k, row] == ptr[k, row + 1]:
                        continue
                    tmp = 0
                    for q in range(ptr[k, row], ptr[k, row + 1]):
                        tmp = tmp + dat[q] * w[ind[q]]
                    acc = w[row].conjugate() * tmp
                    acc_r = acc_r + acc.real
                vals[k, i] = acc_r
    return vals_np, ovl_np, nrm_np


def grid_amplitudes(rho, theta, phi, terms):
    rho_np = np.ascontiguousarray(np.asarray(rho, dtype=float).ravel())
    th_np = np.ascontiguousarray(np.asarray(theta, dtype=float).ravel())
    ph_np = np.ascontiguousarray(np.asarray(phi, dtype=float).ravel())
    cdef Py_ssize_t npts = rho_np.shape[0]
    out_np = np.zeros((4, npts), dtype=complex)
    flat = [(c, N, l, m, amp) for c, ts in enumerate(terms) for (N, l, m, amp) in ts]
    if not flat:
        return out_np

    cdef int lmax = max(f[2] for f in flat)
    cdef int mmax = max(abs(f[3]) for f in flat)
    cdef Py_ssize_t mdim = mmax + 1
    nbl = [-1] * (lmax + 1)
    lm_top = [-1] * (mmax + 1)
    for f in flat:
        nbl[f[2]] = max(nbl[f[2]], (f[1] - f[2]) // 2)
        lm_top[abs(f[3])] = max(lm_top[abs(f[3])], f[2])
    off_np = np.zeros(lmax + 2, dtype=np.int64)
    for ll in range(lmax + 1):
        off_np[ll + 1] = off_np[ll] + max(nbl[ll] + 1, 0)
    cdef long long[::1] off = off_np
    cdef long long[::1] nmax_l = np.array(nbl, dtype=np.int64)
    cdef long long[::1] ltop = np.array(lm_top, dtype=np.int64)

    # radial recurrence coefficients, indexed like R
    nrad = int(off_np[lmax + 1]) + 1
    c_lin_np = np.zeros(nrad)
    c_prev_np = np.zeros(nrad)
    c_den_np = np.zeros(nrad)
    p0_np = np.zeros(lmax + 1)
    for ll in range(lmax + 1):
        a_ = ll + 0.5
        p0_np[ll] = np.exp(-0.5 * lgamma(a_ + 1.0))
        for kk in range(max(nbl[ll], 0)):
            q_ = off_np[ll] + kk
            c_lin_np[q_] = 2 * kk + 1 + a_
            c_prev_np[q_] = np.sqrt(kk * (kk + a_))
            c_den_np[q_] = 1.0 / np.sqrt((kk + 1) * (kk + 1 + a_))
    cdef double[::1] c_lin = c_lin_np
    cdef double[::1] c_prev = c_prev_np
    cdef double[::1] c_den = c_den_np
    cdef double[::1] p0l = p0_np

    # associated Legendre recurrence coefficients
    la_np = np.zeros((lmax + 1) * mdim)
    lb_np = np.zeros((lmax + 1) * mdim)
    for mm in range(mdim):
        for ll in range(mm + 2, lmax + 1):
            la_np[ll * mdim + mm] = np.sqrt((4.0 * ll * ll - 1) / (ll * ll - mm * mm))
            lb_np[ll * mdim + mm] = np.sqrt(((ll - 1.0) ** 2 - mm * mm) / (4.0 * (ll - 1) ** 2 - 1))
    cdef double[::1] la = la_np
    cdef double[::1] lb = lb_np
    cdef double[::1] dg = np.array([0.0] + [-np.sqrt((2 * mm + 1) / (2.0 * mm)) for mm in range(1, mdim)])
    cdef double[::1] d1 = np.array([np.sqrt(2 * mm + 3.0) for mm in range(mdim)])

    cdef Py_ssize_t nterm = len(flat)
    cdef long long[::1] t_comp = np.array([f[0] for f in flat], dtype=np.int64)
    cdef long long[::1] t_rad = np.array([off_np[f[2]] + (f[1] - f[2]) // 2 for f in flat], dtype=np.int64)
    cdef long long[::1] t_l = np.array([f[2] for f in flat], dtype=np.int64)
    cdef long long[::1] t_m = np.array([f[3] for f in flat], dtype=np.int64)
    cdef double complex[::1] t_amp = np.array([f[4] for f in flat], dtype=complex)

    cdef double[::1] rr = rho_np
    cdef double[::1] th = th_np
    cdef double[::1] ph = ph_np
    cdef double complex[:, ::1] out = out_np
    cdef double[::1] R = np.zeros(nrad)
    cdef double[::1] P = np.zeros((lmax + 1) * mdim)
    cdef double complex[::1] E = np.zeros(mdim, dtype=complex)

    cdef Py_ssize_t p, l, k, m, q, base
    cdef double x, env, pk, pprev, pnext, ct, st, pmm, p0, p1, p2, sgnm, lr
    cdef double inv4pi = 1.0 / sqrt(4.0 * M_PI)
    cdef double sqrt2 = sqrt(2.0)
    cdef double c1, s1, cm, sm, tmpc
    cdef double complex Y

    with nogil:
        for p in range(npts):
            x = rr[p] * rr[p]
            lr = log(rr[p]) if rr[p] > 0 else 0.0
            for l in range(lmax + 1):
                if nmax_l[l] < 0:
                    continue
                if l == 0:
                    env = exp(-0.5 * x)
                elif rr[p] > 0:
                    env = exp(l * lr - 0.5 * x)
                else:
                    env = 0.0
                env = env * sqrt2
                base = off[l]
                pprev = 0.0
                pk = p0l[l]
                R[base] = env * pk
                for k in range(nmax_l[l]):
                    pnext = ((c_lin[base + k] - x) * pk - c_prev[base + k] * pprev) * c_den[base + k]
                    pprev = pk
                    pk = pnext
                    R[base + k + 1] = env * pk

            ct = cos(th[p])
            st = sin(th[p])
            pmm = inv4pi
            for m in range(mdim):
                if m > 0:
                    pmm = dg[m] * st * pmm
                if ltop[m] < 0:
                    continue
                P[m * mdim + m] = pmm
                if ltop[m] == m:
                    continue
                p0 = pmm
                p1 = d1[m] * ct * pmm
                P[(m + 1) * mdim + m] = p1
                for l in range(m + 2, ltop[m] + 1):
                    p2 = la[l * mdim + m] * (ct * p1 - lb[l * mdim + m] * p0)
                    p0 = p1
                    p1 = p2
                    P[l * mdim + m] = p1
            # e^{i m phi} by repeated rotation
            c1 = cos(ph[p])
            s1 = sin(ph[p])
            cm = 1.0
            sm = 0.0
            for m in range(mdim):
                E[m] = _cplx(cm, sm)
                tmpc = cm * c1 - sm * s1
                sm = sm * c1 + cm * s1
                cm = tmpc

            for q in range(nterm):
                m = t_m[q]
                if m >= 0:
                    Y = P[t_l[q] * mdim + m] * E[m]
                else:
                    sgnm = -1.0 if (-m) % 2 else 1.0
                    Y = sgnm * P[t_l[q] * mdim - m] * E[-m].conjugate()
                out[t_comp[q], p] = out[t_comp[q], p] + t_amp[q] * R[t_rad[q]] * Y
    return out_np
