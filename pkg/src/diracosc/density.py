"""Position-space probability density Psi^dagger Psi on spheres and planes.

Basis functions are the isotropic oscillator states
``R_Nl(rho) Y_lm(theta, phi)`` with lengths in sigma.  Radial functions come
from the orthonormal Laguerre recurrence in rho^2 (see :mod:`diracosc.kernels`),
spherical harmonics from the normalised associated-Legendre recurrence with
the Condon-Shortley phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite, roots_legendre

from . import kernels
from .model import ValidationError
from .packets import BispinorExpansion

SURFACES = ("sphere", "xz", "perp")
_AXES = {"sphere": ("theta", "phi"), "xz": ("x", "z"), "perp": ("x", "y")}
_CHUNK = 8192


def radial_R(N: int, l: int, rho):
    """Normalised radial function with (N - l)/2 nodes; int R^2 rho^2 drho = 1."""
    if l < 0 or N < l or (N - l) % 2:
        raise ValidationError(f"invalid (N, l) = ({N}, {l})")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValidationError("rho must be non-negative")
    n_by_l = [-1] * l + [(N - l) // 2]
    out = kernels.radial_table(rho.ravel(), n_by_l)[(N, l)]
    return out.reshape(rho.shape) if rho.ndim else float(out[0])


def ylm(l: int, m: int, theta, phi):
    """Spherical harmonic Y_lm with the Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise ValidationError(f"invalid (l, m) = ({l}, {m})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    P = kernels.legendre_table(theta, l, abs(m))[(l, abs(m))]
    y = P * np.exp(1j * abs(m) * phi)
    if m < 0:
        y = (-1) ** m * np.conj(y)
    return y


def _terms(state: BispinorExpansion):
    terms = [[], [], [], []]
    for (N, l, m, ms2), c in state.upper.items():
        if c != 0:
            terms[0 if ms2 == 1 else 1].append((N, l, m, complex(c)))
    for (N, l, m, ms2), c in state.lower.items():
        if c != 0:
            terms[2 if ms2 == 1 else 3].append((N, l, m, complex(c)))
    for ts in terms:
        ts.sort(key=lambda t: t[:3])
    return terms


def _to_spherical(x, y, z):
    rho = np.sqrt(x * x + y * y + z * z)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.where(rho > 0, np.arccos(np.clip(z / np.where(rho > 0, rho, 1), -1, 1)), 0.0)
    phi = np.arctan2(y, x)
    return rho, theta, phi


def amplitudes_spherical(state: BispinorExpansion, rho, theta, phi) -> np.ndarray:
    """The four bispinor components at points, shape (4, npts)."""
    terms = _terms(state)
    rho, theta, phi = (np.asarray(a, dtype=float).ravel() for a in (rho, theta, phi))
    parts = kernels.chunked_map(
        lambda sl: kernels.grid_amplitudes(rho[sl], theta[sl], phi[sl], terms), rho.size, _CHUNK
    )
    if not parts:
        return np.zeros((4, 0), dtype=complex)
    return np.concatenate(parts, axis=1)


def density_spherical(state, rho, theta, phi) -> np.ndarray:
    C = amplitudes_spherical(state, rho, theta, phi)
    return np.sum(C.real**2 + C.imag**2, axis=0)


def density_xyz(state, x, y, z) -> np.ndarray:
    x, y, z = (np.asarray(a, dtype=float) for a in np.broadcast_arrays(x, y, z))
    rho, theta, phi = _to_spherical(x, y, z)
    return density_spherical(state, rho, theta, phi).reshape(x.shape)


def _max_n(state):
    keys = list(state.upper) + list(state.lower)
    return max((k[0] for k in keys), default=0)


def default_extent(state) -> float:
    return math.sqrt(2 * _max_n(state) + 3) + 3.0


@dataclass
class DensityGrid:
    surface: str
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray  # shape (len(axis1), len(axis2))
    t: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def axis_names(self):
        return _AXES[self.surface]

    def write_csv(self, path, comment: str | None = None):
        a1, a2 = self.axis_names
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{a1},{a2},density\n")
            if comment is not None:
                fh.write(f"# {comment}\n")
            for i, u in enumerate(self.axis1):
                for j, v in enumerate(self.axis2):
                    fh.write(f"{u:.17g},{v:.17g},{self.values[i, j]:.17g}\n")

    def write_raw(self, path):
        """One text header line, then little-endian float64 values in row-major order."""
        n1, n2 = self.values.shape
        head = f"surface={self.surface} n1={n1} n2={n2} t={self.t:.17g}\n"
        with open(path, "wb") as fh:
            fh.write(head.encode("ascii"))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())


def read_raw(path) -> DensityGrid:
    with open(path, "rb") as fh:
        head = fh.readline().decode("ascii").split()
        kv = dict(item.split("=", 1) for item in head)
        n1, n2 = int(kv["n1"]), int(kv["n2"])
        vals = np.frombuffer(fh.read(), dtype="<f8").reshape(n1, n2)
    return DensityGrid(kv["surface"], np.arange(n1), np.arange(n2), vals.copy(), float(kv["t"]))


def density_grid(
    state: BispinorExpansion,
    surface: str,
    n1: int = 101,
    n2: int = 101,
    radius: float | None = None,
    offset: float = 0.0,
    extent: float | None = None,
    t: float = 0.0,
) -> DensityGrid:
    """Sample Psi^dagger Psi on a sphere (theta, phi), the xOz plane or the plane z = offset.

    ``t`` is stored as metadata only; pass an already evolved state.
    """
    if surface not in SURFACES:
        raise ValidationError(f"surface must be one of {SURFACES}, got {surface!r}")
    if n1 < 2 or n2 < 2:
        raise ValidationError("grid resolution must be at least 2 per axis")
    if surface == "sphere":
        if radius is None or radius <= 0:
            raise ValidationError("sphere surface needs a positive radius")
        a1 = np.linspace(0.0, math.pi, n1)
        a2 = np.linspace(0.0, 2 * math.pi, n2, endpoint=False)
        th, ph = np.meshgrid(a1, a2, indexing="ij")
        vals = density_spherical(state, np.full(th.size, float(radius)), th.ravel(), ph.ravel())
    else:
        e = default_extent(state) if extent is None else float(extent)
        if e <= 0:
            raise ValidationError("extent must be positive")
        a1 = np.linspace(-e, e, n1)
        a2 = np.linspace(-e, e, n2)
        u, v = np.meshgrid(a1, a2, indexing="ij")
        if surface == "xz":
            vals = density_xyz(state, u, 0.0, v)
        else:
            vals = density_xyz(state, u, v, float(offset))
    meta = {"radius": radius, "offset": offset, "extent": extent}
    return DensityGrid(surface, a1, a2, np.asarray(vals).reshape(n1, n2), float(t), meta)


# -- 3D quadrature ----------------------------------------------------------


@dataclass
class Quadrature3D:
    rho: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    weight: np.ndarray


def product_quadrature(n_rad: int, n_theta: int, n_phi: int) -> Quadrature3D:
    """Radius x sphere product rule.

    Radial: positive half of a 2*n_rad point Gauss-Hermite rule, exact for
    e^{-rho^2} times even polynomials (which is what survives the exact
    angular sum).  Polar: Gauss-Legendre in cos(theta).  Azimuth: uniform.
    """
    xh, wh = roots_hermite(2 * n_rad)
    keep = xh > 0
    rr = xh[keep]
    wr = wh[keep] * np.exp(rr * rr) * rr * rr
    ct, wt = roots_legendre(n_theta)
    ph = np.arange(n_phi) * (2 * math.pi / n_phi)
    wp = np.full(n_phi, 2 * math.pi / n_phi)
    R, TH, PH = np.meshgrid(rr, np.arccos(ct), ph, indexing="ij")
    W = wr[:, None, None] * wt[None, :, None] * wp[None, None, :]
    return Quadrature3D(R.ravel(), TH.ravel(), PH.ravel(), W.ravel())


def quadrature_for(*states: BispinorExpansion, extra: int = 8) -> Quadrature3D:
    """Product rule sized so that the norm integral of ``states`` is exact."""
    keys = [k for s in states for k in list(s.upper) + list(s.lower)]
    nmax = max((k[0] for k in keys), default=0)
    lmax = max((k[1] for k in keys), default=0)
    mmax = max((abs(k[2]) for k in keys), default=0)
    return product_quadrature(nmax // 2 + extra, lmax + extra, 2 * mmax + 2 * extra)


def norm_quadrature(state: BispinorExpansion, quad: Quadrature3D | None = None) -> float:
    quad = quad or quadrature_for(state)
    return float(np.dot(quad.weight, density_spherical(state, quad.rho, quad.theta, quad.phi)))


def positive_difference_weight(state_a, state_b, quad: Quadrature3D | None = None) -> float:
    """Integral of max(rho_a - rho_b, 0) over all space."""
    quad = quad or quadrature_for(state_a, state_b, extra=24)
    da = density_spherical(state_a, quad.rho, quad.theta, quad.phi)
    db = density_spherical(state_b, quad.rho, quad.theta, quad.phi)
    return float(np.dot(quad.weight, np.maximum(da - db, 0.0)))


def phi_variation(state: BispinorExpansion, radii, n_theta: int = 33, n_phi: int = 64) -> float:
    """Largest relative spread over phi of the density on circles (rho, theta) fixed."""
    worst = 0.0
    th = np.linspace(0.05, math.pi - 0.05, n_theta)
    ph = np.arange(n_phi) * (2 * math.pi / n_phi)
    for r in np.atleast_1d(radii):
        T, P = np.meshgrid(th, ph, indexing="ij")
        d = density_spherical(state, np.full(T.size, float(r)), T.ravel(), P.ravel()).reshape(T.shape)
        peak = float(np.max(d))
        if peak == 0:
            continue
        worst = max(worst, float(np.max(np.ptp(d, axis=1)) / peak))
    return worst


def window_fraction(grid: DensityGrid, axis: int, halfwidth: float) -> float:
    """Share of the planar grid weight with |coordinate| < halfwidth along one axis."""
    coord = grid.axis1 if axis == 0 else grid.axis2
    mask = np.abs(coord) < halfwidth
    total = float(np.sum(grid.values))
    if total == 0:
        return 0.0
    inside = grid.values[mask, :] if axis == 0 else grid.values[:, mask]
    return float(np.sum(inside)) / total


__all__ = [
    "DensityGrid",
    "Quadrature3D",
    "SURFACES",
    "amplitudes_spherical",
    "default_extent",
    "density_grid",
    "density_spherical",
    "density_xyz",
    "norm_quadrature",
    "phi_variation",
    "positive_difference_weight",
    "product_quadrature",
    "quadrature_for",
    "radial_R",
    "read_raw",
    "window_fraction",
    "ylm",
]
