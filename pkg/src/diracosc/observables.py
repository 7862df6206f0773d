"""Spin, orbital and total angular momentum, and the autocorrelation function.

The generic engine works on decoupled amplitude arrays ``C[..., comp, k]``
(see :mod:`diracosc.basis`) and is the reference for everything else.  The
closed-form series for linear packets (states |N l 0>) are kept as
independent validators.  All expectation values are raw (not divided by the
norm), matching the closed forms which carry sum |lambda|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .basis import Basis
from .evolution import Propagator, _ab_arrays
from .model import ModelParams, omega_from_a
from .packets import BispinorExpansion, Rep


class SpinVector(NamedTuple):
    sx: float
    sy: float
    sz: float


# -- generic engine ---------------------------------------------------------


def norm_of(C):
    return np.sum(np.abs(C) ** 2, axis=(-2, -1))


def spin_of(C):
    """(<Sigma_x>, <Sigma_y>, <Sigma_z>) from amplitude arrays."""
    sp = np.sum(np.conj(C[..., 0, :]) * C[..., 1, :] + np.conj(C[..., 2, :]) * C[..., 3, :], axis=-1)
    w = np.abs(C) ** 2
    sz = np.sum(w[..., 0, :] - w[..., 1, :] + w[..., 2, :] - w[..., 3, :], axis=-1)
    return 2 * sp.real, 2 * sp.imag, sz


def orbital_of(C, basis: Basis):
    """(<L_x>, <L_y>, <L_z>) from amplitude arrays."""
    lp = np.sum(
        np.conj(C[..., :, basis.lp_dst]) * basis.lp_w * C[..., :, basis.lp_src], axis=(-2, -1)
    )
    lz = np.sum(np.abs(C) ** 2 * basis.m, axis=(-2, -1))
    return lp.real, lp.imag, lz


def _vec(state: BispinorExpansion):
    basis = Basis.of(state)
    return basis, basis.vector(state)


def spin_avg(state: BispinorExpansion) -> SpinVector:
    _, C = _vec(state)
    return SpinVector(*(float(v) for v in spin_of(C)))


def orbital_avg(state: BispinorExpansion) -> tuple[float, float, float]:
    basis, C = _vec(state)
    return tuple(float(v) for v in orbital_of(C, basis))


def total_j(state: BispinorExpansion) -> tuple[float, float, float]:
    s = spin_avg(state)
    lx, ly, lz = orbital_avg(state)
    return (lx + s.sx / 2, ly + s.sy / 2, lz + s.sz / 2)


def tilt_angle(l: int, alpha: float, beta: float) -> float:
    """Inclination to Oz of the constant part of the single-state spin vector, in [0, pi)."""
    num = 2 * alpha * beta * ((l + 1) ** 2 + l**2)
    den = alpha**2 - beta**2
    if den == 0:
        return math.pi / 2
    th = math.atan(num / den)
    return th + math.pi if th < 0 else th


def autocorr(state0: BispinorExpansion, t, params: ModelParams):
    """A(t) = <Psi(0)|Psi(t)> by direct overlap of coefficient vectors."""
    prop = Propagator(state0, params)
    C0 = prop.initial_vector()
    C = prop.amplitudes(np.atleast_1d(t))
    out = np.sum(np.conj(C0) * C, axis=(-2, -1))
    return out if np.ndim(t) else complex(out[0])


@dataclass
class TimeSeries:
    """Observable records on a time grid; ``times`` are in units of T."""

    times: np.ndarray
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __getitem__(self, name):
        return self.columns[name]


SERIES_COLUMNS = ("sx", "sy", "sz", "Lx", "Ly", "Lz", "Jx", "Jy", "Jz", "A2", "norm")


def time_series(state0: BispinorExpansion, params: ModelParams, times_T) -> TimeSeries:
    """Evaluate all observables on a grid of times given in units of T.

    Besides SERIES_COLUMNS the result holds the complex autocorrelation
    under ``"A"``.
    """
    times_T = np.asarray(times_T, dtype=float)
    prop = Propagator(state0, params)
    names = ("sx", "sy", "sz", "Lx", "Ly", "Lz")
    dec = prop.basis.operators()
    ops = [prop.project(dec[n]) for n in names]
    t = times_T * params.period
    args = prop.kernel_args()
    fw = prop.rep is Rep.FW
    parts = kernels.chunked_map(lambda sl: kernels.sector_series(t[sl], *args, ops, fw=fw), t.size, 4096)
    vals = np.concatenate([p[0] for p in parts], axis=1) if parts else np.empty((len(ops), 0))
    ovl = np.concatenate([p[1] for p in parts]) if parts else np.empty(0, dtype=complex)
    nrm = np.concatenate([p[2] for p in parts]) if parts else np.empty(0)
    cols = dict(zip(names, vals))
    for a in "xyz":
        cols["J" + a] = cols["L" + a] + cols["s" + a] / 2
    cols["A"] = ovl
    cols["A2"] = np.abs(ovl) ** 2
    cols["norm"] = nrm
    return TimeSeries(times_T, cols)


def upper_autocorr(state0: BispinorExpansion, params: ModelParams, t):
    """Overlap of the upper (large) components only: <Psi_up(0)|Psi_up(t)>."""
    prop = Propagator(state0, params)
    C0 = prop.initial_vector()
    C = prop.amplitudes(np.atleast_1d(t))
    return np.sum(np.conj(C0[:2]) * C[:, :2], axis=(-2, -1))


def spin_projection(series: TimeSeries, direction) -> np.ndarray:
    """<sigma_n>: spin vector projected on a unit direction (e.g. the initial one)."""
    nx, ny, nz = direction
    return nx * series["sx"] + ny * series["sy"] + nz * series["sz"]


# -- closed forms for linear packets ----------------------------------------


def _split(coeffs):
    keys = sorted(coeffs)
    N = np.array([k[0] for k in keys], dtype=np.int64)
    l = np.array([k[1] for k in keys], dtype=np.int64)
    lam = np.array([coeffs[k] for k in keys], dtype=complex)
    return N, l, lam


def _branch_freqs(N, l, r):
    w_up = omega_from_a(2 * (N - l), r)
    # j = l - 1/2 does not exist for l = 0; its weight l/(2l+1) vanishes anyway
    w_dn = omega_from_a(2 * (N + l) + 2, r)
    return w_up, w_dn


def closed_fw_spin(coeffs, alpha, beta, params: ModelParams, t):
    """Weighted sum of the single-state FW spin averages over |N l 0> states."""
    N, l, lam = _split(coeffs)
    w2 = np.abs(lam) ** 2
    w_up, w_dn = _branch_freqs(N, l, params.r)
    d2 = (2 * l + 1.0) ** 2
    cosd = np.cos(np.multiply.outer(np.asarray(t, dtype=float), w_up - w_dn))
    sx = 2 * alpha * beta * np.sum(w2 * (((l + 1) ** 2 + l**2) / d2 + 2 * l * (l + 1) / d2 * cosd), axis=-1)
    sz = (alpha**2 - beta**2) * np.sum(w2 * (1 / d2 + 4 * l * (l + 1) / d2 * cosd), axis=-1)
    return SpinVector(sx, np.zeros_like(sx), sz)


def closed_fw_single(N, l, alpha, beta, params: ModelParams, t):
    """Spin and orbital averages of a single FW |N l 0> (alpha, beta) state.

    Returns ``(SpinVector, (Lx, Ly, Lz))``.
    """
    spin = closed_fw_spin({(N, l): 1.0}, alpha, beta, params, t)
    w_up, w_dn = _branch_freqs(np.array([N]), np.array([l]), params.r)
    c = np.cos(np.asarray(t, dtype=float) * (w_up - w_dn)[0])
    f = 2 * l * (l + 1) / (2 * l + 1) ** 2 * (1 - c)
    return spin, (alpha * beta * f, np.zeros_like(f), (alpha**2 - beta**2) * f)


def closed_autocorr(coeffs, params: ModelParams, t, rep: Rep | str):
    """Autocorrelation of a linear packet from the per-branch sums."""
    N, l, lam = _split(coeffs)
    w2 = np.abs(lam) ** 2
    w_up, w_dn = _branch_freqs(N, l, params.r)
    t = np.asarray(t, dtype=float)
    pu, pd = np.multiply.outer(t, w_up), np.multiply.outer(t, w_dn)
    if Rep(rep) is Rep.FW:
        fu, fd = np.exp(-1j * pu), np.exp(-1j * pd)
    else:
        w0 = params.omega0
        fu = np.cos(pu) - 1j * (w0 / w_up) * np.sin(pu)
        fd = np.cos(pd) - 1j * (w0 / w_dn) * np.sin(pd)
    d = 2 * l + 1.0
    return np.sum(w2 * ((l + 1) / d * fu + l / d * fd), axis=-1)


def closed_dirac_spin(coeffs, alpha, beta, params: ModelParams, t, variant: str = "corrected"):
    """Dirac-frame spin averages of a linear packet as explicit series.

    ``variant="literal"`` evaluates the series exactly as printed in the
    source (prefactors ``alpha*beta`` and ``alpha^2 + beta^2``, the
    ``Im``-type cross term in sigma_x).  ``variant="corrected"`` is the series
    re-derived from the same bispinor components; it agrees with the generic
    engine.  ``variant="secular"`` keeps only the constant and slow
    difference-frequency terms of the corrected series (the trembling terms
    at 2*omega and omega_> + omega_< averaged out).  Cross terms pair
    lambda_{N,l} with lambda_{N,l+2}.
    """
    N, l, lam = _split(coeffs)
    r = params.r
    t = np.asarray(t, dtype=float)
    w0 = params.omega0
    w_up, w_dn = _branch_freqs(N, l, r)
    lf = l.astype(float)
    w2 = np.abs(lam) ** 2

    index = {(int(n), int(ll)): i for i, (n, ll) in enumerate(zip(N, l))}
    pairs = [(i, index[(int(N[i]), int(l[i]) + 2)]) for i in range(len(N)) if (int(N[i]), int(l[i]) + 2) in index]
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    lc = lf[pi]
    ccoef = (lc + 1) * (lc + 2) / ((2 * lc + 3) * np.sqrt((2 * lc + 1) * (2 * lc + 5)))

    if variant == "literal":
        xu2 = (w0 / w_up) ** 2
        xd2 = (w0 / w_dn) ** 2
        xud = w0**2 / (w_up * w_dn)
        cu2 = np.cos(2 * np.multiply.outer(t, w_up))
        cd2 = np.cos(2 * np.multiply.outer(t, w_dn))
        cdif = np.cos(np.multiply.outer(t, w_up - w_dn))
        csum = np.cos(np.multiply.outer(t, w_up + w_dn))
        d = 2 * lf + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            low_dn = np.where(lf > 0, lf**2 / (d * (2 * lf - 1)), 0.0)
        bx = (
            0.5 * ((lf + 1) / d) ** 2 * (1 + xu2 + (1 - xu2) * cu2)
            + 0.5 * (lf / d) ** 2 * (1 + xd2 + (1 - xd2) * cd2)
            + lf * (lf + 1) / d**2 * ((1 + xud) * cdif + (1 - xud) * csum)
            - (lf + 1) ** 2 / (d * (2 * lf + 3)) * (1 - xu2) * (1 - cu2)
            - low_dn * (1 - xd2) * (1 - cd2)
        )
        bz = (
            (lf + 1) / (2 * d**2) * (1 + xu2 + (1 - xu2) * cu2)
            - lf / (2 * d**2) * (1 + xd2 + (1 - xd2) * cd2)
            + 2 * lf * (lf + 1) / d**2 * ((1 + xud) * cdif + (1 - xud) * csum)
            - lf / (2 * d * (2 * lf + 3)) * (1 - xu2) * (1 - cu2)
            + 1 / (2 * d * (2 * lf + 3)) * (1 - xd2) * (1 - cd2)
        )
        wu_i, wd_j = w_up[pi], w_dn[pj]
        rad = np.sqrt((wu_i**2 - w0**2) * (wd_j**2 - w0**2)) / (wu_i * wd_j)
        ss = np.sin(np.multiply.outer(t, wu_i)) * np.sin(np.multiply.outer(t, wd_j))
        prod = np.conj(lam[pi]) * lam[pj]
        sx = alpha * beta * (np.sum(w2 * bx, axis=-1) - np.sum(prod.imag * ccoef * rad * ss, axis=-1))
        sz = (alpha**2 + beta**2) * (
            np.sum(w2 * bz, axis=-1) + np.sum(prod.real * 4 * ccoef * rad * ss, axis=-1)
        )
        return SpinVector(sx, np.zeros_like(sx), sz)

    if variant == "secular":
        return _secular_dirac_spin(N, l, lam, pi, pj, ccoef, alpha, beta, params, t)
    if variant != "corrected":
        raise ValueError(f"unknown variant {variant!r}")

    n = len(N)
    a_up = 2 * (N - l)
    a_dn = 2 * (N + l) + 2
    Au, Bu = _ab_arrays(a_up, np.full(n, -1j), r, t, params.paper_literal)
    Ad, Bd = _ab_arrays(a_dn, np.full(n, 1j), r, t, params.paper_literal)
    d = 2 * lf + 1
    a_D = (lf + 1) / d * Au + lf / d * Ad
    b2 = lf * (lf + 1) / d**2 * np.abs(Au - Ad) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        kx_dn = np.where(lf > 0, lf**2 / (d * (2 * lf - 1)), 0.0)
        kz_dn = np.where(lf > 0, lf / (d * (2 * lf - 1)), 0.0)
    Bu2, Bd2 = np.abs(Bu) ** 2, np.abs(Bd) ** 2
    up_x = np.abs(a_D) ** 2
    up_z = np.abs(a_D) ** 2 - b2
    low_x = (lf + 1) ** 2 / (d * (2 * lf + 3)) * Bu2 + kx_dn * Bd2
    low_z = -(lf + 1) / (d * (2 * lf + 3)) * Bu2 + kz_dn * Bd2
    # lower |N-1, l+1, 0> is fed by (N, l, >) and (N, l+2, <)
    cross = np.conj(lam[pi] * Bu[..., pi]) * (lam[pj] * Bd[..., pj])
    sx = 2 * alpha * beta * (
        np.sum(w2 * (up_x - low_x), axis=-1) - 2 * np.sum(ccoef * cross.real, axis=-1)
    )
    sz = (alpha**2 - beta**2) * (
        np.sum(w2 * (up_z + low_z), axis=-1) + 4 * np.sum(ccoef * cross.real, axis=-1)
    )
    sy = np.zeros_like(sx)
    return SpinVector(sx, sy, sz)


def _secular_dirac_spin(N, l, lam, pi, pj, ccoef, alpha, beta, params, t):
    r = params.r
    w_up, w_dn = _branch_freqs(N, l, r)
    xu, xd = params.omega0 / w_up, params.omega0 / w_dn
    su, sd = np.sqrt(1 - xu**2), np.sqrt(1 - xd**2)
    if params.paper_literal:
        su, sd = su / math.sqrt(2), sd / math.sqrt(2)
    lf = l.astype(float)
    d = 2 * lf + 1
    w2 = np.abs(lam) ** 2
    cd = np.cos(np.multiply.outer(t, w_up - w_dn))
    au2, ad2, aud = 0.5 * (1 + xu**2), 0.5 * (1 + xd**2), 0.5 * (1 + xu * xd) * cd
    a2 = ((lf + 1) / d) ** 2 * au2 + (lf / d) ** 2 * ad2 + 2 * lf * (lf + 1) / d**2 * aud
    b2 = lf * (lf + 1) / d**2 * (au2 + ad2 - 2 * aud)
    bu2, bd2 = 0.5 * su**2, 0.5 * sd**2
    with np.errstate(divide="ignore", invalid="ignore"):
        kx_dn = np.where(lf > 0, lf**2 / (d * (2 * lf - 1)), 0.0)
        kz_dn = np.where(lf > 0, lf / (d * (2 * lf - 1)), 0.0)
    low_x = (lf + 1) ** 2 / (d * (2 * lf + 3)) * bu2 + kx_dn * bd2
    low_z = -(lf + 1) / (d * (2 * lf + 3)) * bu2 + kz_dn * bd2
    # conj(B_>) B_< = -s_> s_< sin sin, whose slow part is -s_> s_< cos(difference)/2
    cslow = np.cos(np.multiply.outer(t, w_up[pi] - w_dn[pj]))
    cross = (np.conj(lam[pi]) * lam[pj]).real * (-0.5 * su[pi] * sd[pj]) * cslow
    sx = 2 * alpha * beta * (np.sum(w2 * (a2 - low_x), axis=-1) - 2 * np.sum(ccoef * cross, axis=-1))
    sz = (alpha**2 - beta**2) * (np.sum(w2 * (a2 - b2 + low_z), axis=-1) + 4 * np.sum(ccoef * cross, axis=-1))
    return SpinVector(sx, np.zeros_like(sx), sz)


def dirac_spin_discrepancy(coeffs, alpha, beta, params: ModelParams, times, state0=None):
    """Max |closed - engine| for each spin component, literal and corrected series."""
    if state0 is None:
        up = {}
        for (N, l), lam in coeffs.items():
            if alpha:
                up[(N, l, 0, 1)] = lam * alpha
            if beta:
                up[(N, l, 0, -1)] = lam * beta
        state0 = BispinorExpansion(up, {}, Rep.DIRAC)
    ts = time_series(state0, params, np.asarray(times) / params.period)
    report = {}
    for variant in ("literal", "corrected"):
        cf = closed_dirac_spin(coeffs, alpha, beta, params, times, variant)
        report[variant] = {
            "sx": float(np.max(np.abs(cf.sx - ts["sx"]))),
            "sy": float(np.max(np.abs(cf.sy - ts["sy"]))),
            "sz": float(np.max(np.abs(cf.sz - ts["sz"]))),
        }
    return report


# -- trembling-motion diagnostics --------------------------------------------


def _spectrum(times_T, signal):
    """One-sided power spectrum of the detrended, Hann-windowed signal.

    Returns angular frequencies (units of omega) and powers.
    """
    t = np.asarray(times_T, dtype=float)
    y = np.asarray(signal, dtype=float)
    dt = (t[-1] - t[0]) / (t.size - 1)
    coef = np.polyfit(t - t[0], y, 1)
    y = (y - np.polyval(coef, t - t[0])) * np.hanning(t.size)
    power = np.abs(np.fft.rfft(y)) ** 2
    # times are in units of T = 2 pi, so cycles per T equal angular frequency
    freq = np.fft.rfftfreq(t.size, d=dt)
    return freq, power


def band_power(times_T, signal, omega_min: float) -> tuple[float, float]:
    """(power at angular frequencies >= omega_min, total power) of a uniform series."""
    freq, power = _spectrum(times_T, signal)
    return float(np.sum(power[freq >= omega_min])), float(np.sum(power))


def highpass(times_T, signal, omega_cut: float) -> np.ndarray:
    """Signal with all components below ``omega_cut`` removed (FFT mask)."""
    t = np.asarray(times_T, dtype=float)
    dt = (t[-1] - t[0]) / (t.size - 1)
    spec = np.fft.rfft(np.asarray(signal, dtype=float))
    spec[np.fft.rfftfreq(t.size, d=dt) < omega_cut] = 0
    return np.fft.irfft(spec, n=t.size)


def trembling_amplitude(times_T, signal, params: ModelParams, frac: float = 0.5) -> float:
    """Peak-to-peak of the part of ``signal`` above ``frac * omega0``."""
    return float(np.ptp(highpass(times_T, signal, frac * params.omega0)))
