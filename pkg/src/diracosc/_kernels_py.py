"""Pure numpy implementations of the hot loops (fallback for the Cython core)."""

from __future__ import annotations

from math import lgamma

import numpy as np
from scipy import sparse

_CHUNK = 1024


def sector_series(times, omega, x, s, sgn, u0, v0, ops, fw=False):
    """Expectation values of Hermitian operators along a trajectory.

    Each sector evolves as [[A, -B*], [B, A*]] with A = cos - i x sin and
    B = -i sgn s sin (FW: A = exp(-i w t), B = 0).  ``ops`` are CSR matrices
    over the stacked vector ``[u; v]``.  Returns ``(values, overlap, norm)``
    where ``values[k, i] = <w(t_i)|ops[k]|w(t_i)>`` (real part) and
    ``overlap[i] = <w(0)|w(t_i)>``.
    """
    times = np.asarray(times, dtype=float)
    nt = times.size
    ops = [sparse.csr_matrix(o) for o in ops]
    vals = np.empty((len(ops), nt))
    ovl = np.empty(nt, dtype=complex)
    nrm = np.empty(nt)
    w0 = np.concatenate([u0, v0])
    for s0 in range(0, nt, _CHUNK):
        sl = slice(s0, min(nt, s0 + _CHUNK))
        ph = np.multiply.outer(times[sl], omega)
        if fw:
            u = np.exp(-1j * ph) * u0
            v = np.zeros_like(u)
        else:
            c, sn = np.cos(ph), np.sin(ph)
            A = c - 1j * x * sn
            B = (-1j * sgn) * s * sn
            u = A * u0 - np.conj(B) * v0
            v = B * u0 + np.conj(A) * v0
        w = np.concatenate([u, v], axis=1)
        wc = np.conj(w)
        for k, op in enumerate(ops):
            vals[k, sl] = np.sum(wc * (op @ w.T).T, axis=1).real
        ovl[sl] = w @ np.conj(w0)
        nrm[sl] = np.sum((w * wc).real, axis=1)
    return vals, ovl, nrm


def radial_table(rho, n_by_l):
    """Normalised radial functions R_{N l}(rho) for every requested (l, n_r).

    ``n_by_l[l]`` is the largest radial quantum number needed for that l.
    Returns ``{(N, l): array}``.  Orthonormal Laguerre recurrence, so no
    factorials are ever formed.
    """
    rho = np.asarray(rho, dtype=float)
    x = rho * rho
    out = {}
    with np.errstate(divide="ignore"):
        logr = np.log(rho)
    for l, nmax in enumerate(n_by_l):
        if nmax < 0:
            continue
        a = l + 0.5
        if l == 0:
            env = np.exp(-0.5 * x)
        else:
            env = np.where(rho > 0, np.exp(l * logr - 0.5 * x), 0.0)
        env = env * np.sqrt(2.0)
        p_prev = np.zeros_like(x)
        p = np.full_like(x, np.exp(-0.5 * lgamma(a + 1.0)))
        out[(l, l)] = env * p
        for k in range(nmax):
            p_next = ((2 * k + 1 + a - x) * p - np.sqrt(k * (k + a)) * p_prev) / np.sqrt(
                (k + 1) * (k + 1 + a)
            )
            p_prev, p = p, p_next
            out[(l + 2 * (k + 1), l)] = env * p
    return out


def legendre_table(theta, lmax, mmax):
    """Normalised associated Legendre factors P[(l, m)] with Y_lm = P e^{i m phi}, m >= 0.

    Condon-Shortley phase is included.
    """
    ct, st = np.cos(theta), np.sin(theta)
    out = {}
    pmm = np.full_like(ct, 1.0 / np.sqrt(4 * np.pi))
    for m in range(0, min(lmax, mmax) + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1) / (2.0 * m)) * st * pmm
        out[(m, m)] = pmm
        if m == lmax:
            break
        p1 = np.sqrt(2 * m + 3.0) * ct * pmm
        out[(m + 1, m)] = p1
        p0 = pmm
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1) ** 2 - 1))
            p0, p1 = p1, a * (ct * p1 - b * p0)
            out[(l, m)] = p1
    return out


def grid_amplitudes(rho, theta, phi, terms):
    """Component wavefunctions at points.

    ``terms[c]`` is a list of ``(N, l, m, amp)`` for component c (0..3).
    Returns a complex array of shape (4, npts).
    """
    rho = np.asarray(rho, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    out = np.zeros((4, rho.size), dtype=complex)
    all_terms = [t for ts in terms for t in ts]
    if not all_terms:
        return out
    lmax = max(t[1] for t in all_terms)
    mmax = max(abs(t[2]) for t in all_terms)
    n_by_l = [-1] * (lmax + 1)
    for N, l, _, _ in all_terms:
        n_by_l[l] = max(n_by_l[l], (N - l) // 2)
    # bound the (l, m) tables to a few hundred MB
    step = max(256, int(2e7 // max(1, (lmax + 1) * (mmax + 1) + len(all_terms))))
    for s0 in range(0, rho.size, step):
        sl = slice(s0, s0 + step)
        R = radial_table(rho[sl], n_by_l)
        P = legendre_table(theta[sl], lmax, mmax)
        ph = phi[sl]
        eph = {m: np.exp(1j * m * ph) for m in range(-mmax, mmax + 1)}
        for c, ts in enumerate(terms):
            # group by (l, m) so each angular factor is applied once
            radial_sum = {}
            for N, l, m, amp in ts:
                key = (l, m)
                radial_sum[key] = radial_sum.get(key, 0) + amp * R[(N, l)]
            acc = out[c, sl]
            for (l, m), rs in radial_sum.items():
                if m >= 0:
                    Y = P[(l, m)] * eph[m]
                else:
                    Y = (-1) ** m * P[(l, -m)] * eph[m]
                acc += rs * Y
    return out
