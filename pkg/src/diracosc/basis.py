"""Dense indexing of decoupled states for vectorised evaluation.

A state is stored as an array ``C[..., comp, k]`` where ``k`` indexes the
spatial state ``(N, l, m)`` and ``comp`` runs over (upper up, upper down,
lower up, lower down).
"""

from __future__ import annotations

import numpy as np

from scipy import sparse

from .packets import BispinorExpansion, Rep

COMP = {("u", 1): 0, ("u", -1): 1, ("l", 1): 2, ("l", -1): 3}


class Basis:
    def __init__(self, keys):
        self.keys = sorted(set(keys))
        self.index = {k: i for i, k in enumerate(self.keys)}
        arr = np.array(self.keys, dtype=np.int64).reshape(-1, 3)
        self.N, self.l, self.m = arr[:, 0], arr[:, 1], arr[:, 2]
        # L+ |l m> = sqrt(l(l+1) - m(m+1)) |l m+1>
        src, dst, w = [], [], []
        for i, (N, l, m) in enumerate(self.keys):
            j = self.index.get((N, l, m + 1))
            if j is not None:
                src.append(i)
                dst.append(j)
                w.append(np.sqrt(l * (l + 1) - m * (m + 1)))
        self.lp_src = np.array(src, dtype=np.int64)
        self.lp_dst = np.array(dst, dtype=np.int64)
        self.lp_w = np.array(w, dtype=float)

    def __len__(self):
        return len(self.keys)

    @classmethod
    def of(cls, *states: BispinorExpansion) -> "Basis":
        keys = []
        for s in states:
            keys.extend(k[:3] for k in s.upper)
            keys.extend(k[:3] for k in s.lower)
        return cls(keys)

    def vector(self, state: BispinorExpansion) -> np.ndarray:
        C = np.zeros((4, len(self)), dtype=complex)
        for (N, l, m, ms2), c in state.upper.items():
            C[0 if ms2 == 1 else 1, self.index[(N, l, m)]] += c
        for (N, l, m, ms2), c in state.lower.items():
            C[2 if ms2 == 1 else 3, self.index[(N, l, m)]] += c
        return C

    def expansion(self, C: np.ndarray, rep: Rep, drop_zeros: bool = True) -> BispinorExpansion:
        up, lo = {}, {}
        for k, (N, l, m) in enumerate(self.keys):
            for comp, target, ms2 in ((0, up, 1), (1, up, -1), (2, lo, 1), (3, lo, -1)):
                c = complex(C[comp, k])
                if c != 0 or not drop_zeros:
                    target[(N, l, m, ms2)] = c
        if Rep(rep) is Rep.FW:
            lo = {}
        return BispinorExpansion(up, lo, rep)

    def operators(self) -> dict:
        """Sparse Sigma_{x,y,z} and L_{x,y,z} on the flattened (comp, k) space."""
        nb = len(self)
        k = np.arange(nb)
        idx = lambda c: c * nb + k  # noqa: E731
        dim = 4 * nb
        ops = {}
        rows = np.concatenate([idx(0), idx(1), idx(2), idx(3)])
        cols = np.concatenate([idx(1), idx(0), idx(3), idx(2)])
        ones = np.ones(nb)
        ops["sx"] = sparse.csr_matrix((np.concatenate([ones] * 4), (rows, cols)), shape=(dim, dim))
        # <up|sigma_y|down> = -i
        sy = np.concatenate([-1j * ones, 1j * ones, -1j * ones, 1j * ones])
        ops["sy"] = sparse.csr_matrix((sy, (rows, cols)), shape=(dim, dim))
        sz = np.concatenate([ones, -ones, ones, -ones])
        diag = np.arange(dim)
        ops["sz"] = sparse.csr_matrix((sz, (diag, diag)), shape=(dim, dim))
        lr = np.concatenate([c * nb + self.lp_dst for c in range(4)])
        lc = np.concatenate([c * nb + self.lp_src for c in range(4)])
        lw = np.tile(self.lp_w, 4)
        lplus = sparse.csr_matrix((lw, (lr, lc)), shape=(dim, dim))
        lminus = lplus.T.tocsr()
        ops["Lx"] = ((lplus + lminus) * 0.5).tocsr()
        ops["Ly"] = ((lplus - lminus) * (-0.5j)).tocsr()
        ops["Lz"] = sparse.csr_matrix((np.tile(self.m.astype(float), 4), (diag, diag)), shape=(dim, dim))
        return ops
