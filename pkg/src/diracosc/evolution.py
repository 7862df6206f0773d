"""Exact spectral time evolution in the Dirac and Foldy-Wouthuysen frames.

The Dirac oscillator couples each upper state |N l j m_j> only to the lower
state |N-1 l' j m_j>, so the evolution operator is a 2x2 block per sector:

    U = [[A, -conj(B)],
         [B,  conj(A)]]

with ``A = cos(wt) - i (w0/w) sin(wt)`` and
``B = -i sgn sqrt(1 - w0^2/w^2) sin(wt)``.  In the FW frame only the positive
energy branch is populated and each coupled state picks up ``exp(-i w t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .angular import couple, coupled_components
from .basis import Basis
from .model import ModelParams, SectorKey, ValidationError, a_index, omega_branch
from .packets import BispinorExpansion, Rep


@dataclass(frozen=True)
class PropagatorPair:
    A: complex
    B: complex
    sector: SectorKey
    time: float


def _ab_arrays(a_idx, sgn, r, t, literal=False):
    """A and B for arrays of sectors (last axis) at times ``t`` (leading axis)."""
    a_idx = np.asarray(a_idx, dtype=float)
    ra = r * a_idx
    w = np.sqrt(1.0 + ra) / r
    x = 1.0 / np.sqrt(1.0 + ra)
    # sqrt(1 - x^2) written without cancellation for tiny r*A
    s = np.sqrt(ra / (1.0 + ra))
    if literal:
        s = s / math.sqrt(2.0)
    ph = np.multiply.outer(np.asarray(t, dtype=float), w)
    c, sn = np.cos(ph), np.sin(ph)
    A = c - 1j * x * sn
    B = (-1j * np.asarray(sgn)) * s * sn
    return A, B


def ab_from_index(a: float, sgn: complex, params: ModelParams, t):
    """A and B for a bare spectral index ``a`` (no sector validation).

    Useful for probing the propagator at indices that no physical sector
    carries, e.g. ``a = 2``.
    """
    A, B = _ab_arrays(np.atleast_1d(a), np.atleast_1d(sgn), params.r, t, params.paper_literal)
    return A[..., 0], B[..., 0]


def dirac_AB(key: SectorKey, params: ModelParams, t: float) -> PropagatorPair:
    """Survival amplitude A and small-component amplitude B of one sector."""
    A, B = _ab_arrays([a_index(key)], [key.sgn], params.r, t, params.paper_literal)
    return PropagatorPair(complex(A[0]), complex(B[0]), key, float(t))


def fw_ab(N: int, l: int, params: ModelParams, t):
    """FW amplitudes of |N l 0> on itself (a) and on the spin-flipped |N l +-1> (b)."""
    if l > N or (N - l) % 2 or l < 0:
        raise ValidationError(f"invalid (N, l) = ({N}, {l})")
    t = np.asarray(t, dtype=float)
    e_up = np.exp(-1j * omega_branch(N, l, True, params) * t)
    if l == 0:
        return e_up, np.zeros_like(e_up)
    e_dn = np.exp(-1j * omega_branch(N, l, False, params) * t)
    d = 2 * l + 1
    a = (l + 1) / d * e_up + l / d * e_dn
    b = math.sqrt(l * (l + 1)) / d * (e_up - e_dn)
    return a, b


class Propagator:
    """Evolution of a fixed initial state, evaluable at any set of times.

    The state is coupled once; each sector carries its initial upper/lower
    amplitudes ``u0, v0`` and a sparse map back onto the decoupled basis.
    """

    def __init__(self, state0: BispinorExpansion, params: ModelParams):
        self.params = params
        self.rep = state0.rep
        if self.rep is Rep.FW and state0.lower:
            raise ValidationError("FW states have no lower components")
        cu = couple(state0.upper)
        cl = couple(state0.lower)

        sectors: dict[tuple, int] = {}
        u0, v0 = [], []

        def slot(key):
            i = sectors.get(key)
            if i is None:
                i = sectors[key] = len(u0)
                u0.append(0j)
                v0.append(0j)
            return i

        for key, c in cu.items():
            u0[slot(key)] += c
        for (M, lp, j2, mj2), c in cl.items():
            l = lp + 1 if j2 == 2 * lp + 1 else lp - 1
            v0[slot((M + 1, l, j2, mj2))] += c

        self.sectors = [SectorKey(*k) for k in sectors]
        self.u0 = np.array(u0, dtype=complex)
        self.v0 = np.array(v0, dtype=complex)
        self.a_idx = np.array([a_index(k) for k in self.sectors], dtype=np.int64)
        self.sgn = np.array([k.sgn for k in self.sectors], dtype=complex)
        self.omega = np.sqrt(1.0 + params.r * self.a_idx) / params.r

        keys = []
        for k in self.sectors:
            for m, _, _ in coupled_components(k.l, k.j2, k.mj2):
                keys.append((k.N, k.l, m))
            if k.has_partner:
                Np, lp, j2, mj2 = k.partner
                for m, _, _ in coupled_components(lp, j2, mj2):
                    keys.append((Np, lp, m))
        self.basis = Basis(keys)
        nb = len(self.basis)

        rows_u, cols_u, vals_u = [], [], []
        rows_l, cols_l, vals_l = [], [], []
        for s, k in enumerate(self.sectors):
            for m, ms2, cg in coupled_components(k.l, k.j2, k.mj2):
                rows_u.append((0 if ms2 == 1 else 1) * nb + self.basis.index[(k.N, k.l, m)])
                cols_u.append(s)
                vals_u.append(cg)
            if k.has_partner:
                Np, lp, j2, mj2 = k.partner
                for m, ms2, cg in coupled_components(lp, j2, mj2):
                    rows_l.append((2 if ms2 == 1 else 3) * nb + self.basis.index[(Np, lp, m)])
                    cols_l.append(s)
                    vals_l.append(cg)
        ns = len(self.sectors)
        self._Du = sparse.csr_matrix((vals_u, (rows_u, cols_u)), shape=(4 * nb, ns))
        self._Dl = sparse.csr_matrix((vals_l, (rows_l, cols_l)), shape=(4 * nb, ns))
        self._D = sparse.hstack([self._Du, self._Dl]).tocsr()

    def kernel_args(self):
        """Per-sector arrays in the layout expected by ``kernels.sector_series``."""
        r = self.params.r
        ra = r * self.a_idx
        x = 1.0 / np.sqrt(1.0 + ra)
        s = np.sqrt(ra / (1.0 + ra))
        if self.params.paper_literal:
            s = s / math.sqrt(2.0)
        return self.omega, x, s, self.sgn, self.u0, self.v0

    def project(self, op):
        """Operator on the decoupled (comp, k) space expressed on stacked [u; v]."""
        return (self._D.conj().T @ op @ self._D).tocsr()

    def negative_energy_weight(self) -> float:
        """Weight of the initial state on negative-energy eigenvectors, <P_->."""
        if self.rep is Rep.FW:
            return 0.0
        omega, x, s, sgn, u, v = self.kernel_args()
        # P_- = (1 - H/Omega)/2 with H = [[d, conj(kappa)], [kappa, -d]], kappa = sgn |kappa|
        n = np.abs(u) ** 2 + np.abs(v) ** 2
        h = x * (np.abs(u) ** 2 - np.abs(v) ** 2) + 2 * s * np.real(np.conj(u) * np.conj(sgn) * v)
        return float(np.sum(0.5 * (n - h)))

    def sector_amplitudes(self, times):
        """Coupled upper/lower amplitudes, each of shape (len(times), n_sectors)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.rep is Rep.FW:
            u = np.exp(-1j * np.multiply.outer(times, self.omega)) * self.u0
            return u, np.zeros_like(u)
        A, B = _ab_arrays(self.a_idx, self.sgn, self.params.r, times, self.params.paper_literal)
        u = A * self.u0 - np.conj(B) * self.v0
        v = B * self.u0 + np.conj(A) * self.v0
        return u, v

    def amplitudes(self, times) -> np.ndarray:
        """Decoupled amplitudes ``C[t, comp, k]``."""
        u, v = self.sector_amplitudes(times)
        flat = (self._Du @ u.T + self._Dl @ v.T).T
        return flat.reshape(len(u), 4, len(self.basis))

    def initial_vector(self) -> np.ndarray:
        return self.amplitudes([0.0])[0]

    def state(self, t: float) -> BispinorExpansion:
        return self.basis.expansion(self.amplitudes([t])[0], self.rep)


def evolve(state0: BispinorExpansion, t: float, params: ModelParams, rep: Rep | str | None = None):
    """State at time ``t`` (units of 1/omega)."""
    if rep is not None and Rep(rep) is not state0.rep:
        raise ValidationError(f"state is tagged {state0.rep.value}, requested {Rep(rep).value}")
    return Propagator(state0, params).state(t)
