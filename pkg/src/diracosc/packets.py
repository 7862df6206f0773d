"""Initial coherent wavepackets expanded in the oscillator basis |N l m>.

Two families are supported: the circular packet (orbit in the xOy plane,
states |l l l> with Poisson weights) and the linear packet (orbit along Oz,
states |N l 0>).  The spinor is ``alpha|up> + beta|down>`` with real
``alpha, beta``, usually parametrised by the polar angle ``theta`` of the
spin direction in the xOz plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from scipy.special import pdtrc

from .model import ValidationError

DEFAULT_TAIL_EPS = 1e-12


class Rep(str, Enum):
    DIRAC = "dirac"
    FW = "fw"


@dataclass(frozen=True)
class PacketSpec:
    kind: str
    nbar: float = 0.0
    z0: float = 0.0
    p0: float = 0.0
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("circular", "linear"):
            raise ValidationError(f"packet kind must be 'circular' or 'linear', got {self.kind!r}")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-12:
            raise ValidationError("spinor must satisfy alpha^2 + beta^2 = 1")
        if self.nbar < 0 or not math.isfinite(self.nbar):
            raise ValidationError(f"nbar must be >= 0, got {self.nbar}")
        if not (math.isfinite(self.z0) and math.isfinite(self.p0)):
            raise ValidationError("z0 and p0 must be finite")

    @classmethod
    def circular(cls, nbar: float, theta: float = 0.0) -> "PacketSpec":
        return cls("circular", nbar=nbar, alpha=math.cos(theta / 2), beta=math.sin(theta / 2))

    @classmethod
    def linear(cls, z0: float, p0: float = 0.0, theta: float = 0.0) -> "PacketSpec":
        return cls("linear", z0=z0, p0=p0, alpha=math.cos(theta / 2), beta=math.sin(theta / 2))

    @property
    def spin_direction(self) -> tuple[float, float, float]:
        a, b = self.alpha, self.beta
        return (2 * a * b, 0.0, a * a - b * b)


@dataclass
class BispinorExpansion:
    """Four-component state over the decoupled basis.

    ``upper``/``lower`` map ``(N, l, m, ms2)`` to complex amplitudes of the
    large and small bispinor pairs.  FW states never carry a lower part.
    """

    upper: dict = field(default_factory=dict)
    lower: dict = field(default_factory=dict)
    rep: Rep = Rep.DIRAC

    def __post_init__(self):
        self.rep = Rep(self.rep)
        if self.rep is Rep.FW and any(c != 0 for c in self.lower.values()):
            raise ValidationError("FW states have no lower components")
        for key in list(self.upper) + list(self.lower):
            N, l, m, ms2 = key
            if not (0 <= l <= N and (N - l) % 2 == 0 and abs(m) <= l and ms2 in (1, -1)):
                raise ValidationError(f"invalid basis key (N, l, m, ms2) = {key}")

    def norm(self) -> float:
        return sum(abs(c) ** 2 for c in self.upper.values()) + sum(
            abs(c) ** 2 for c in self.lower.values()
        )

    def lower_weight(self) -> float:
        return sum(abs(c) ** 2 for c in self.lower.values())

    def scaled(self, s: complex) -> "BispinorExpansion":
        return BispinorExpansion(
            {k: s * c for k, c in self.upper.items()},
            {k: s * c for k, c in self.lower.items()},
            self.rep,
        )

    def __add__(self, other: "BispinorExpansion") -> "BispinorExpansion":
        if other.rep is not self.rep:
            raise ValidationError("cannot add states in different representations")
        up = dict(self.upper)
        for k, c in other.upper.items():
            up[k] = up.get(k, 0) + c
        lo = dict(self.lower)
        for k, c in other.lower.items():
            lo[k] = lo.get(k, 0) + c
        return BispinorExpansion(up, lo, self.rep)


def zeta(z0: float, p0: float) -> complex:
    """Coherent-state label ``(z0 + i p0)/sqrt(2)``; |zeta|^2 is the mean N."""
    return complex(z0, p0) / math.sqrt(2.0)


def _check_eps(tail_eps):
    if not (0.0 < tail_eps < 1.0):
        raise ValidationError(f"tail_eps must lie in (0, 1), got {tail_eps}")


def _poisson_cutoff(mean: float, tail_eps: float) -> int:
    # smallest L with P(X > L) <= tail_eps
    if mean == 0:
        return 0
    L = int(mean)
    while pdtrc(L, mean) > tail_eps:
        L += max(1, int(math.sqrt(mean)) // 4)
    while L > 0 and pdtrc(L - 1, mean) <= tail_eps:
        L -= 1
    return L


def circular_coeffs(nbar: float, tail_eps: float = DEFAULT_TAIL_EPS) -> list[tuple[int, float]]:
    """Poisson-weighted amplitudes of |l l l>: (-1)^l e^{-nbar/2} nbar^{l/2} / sqrt(l!)."""
    _check_eps(tail_eps)
    if nbar < 0:
        raise ValidationError(f"nbar must be >= 0, got {nbar}")
    L = _poisson_cutoff(nbar, tail_eps)
    out = []
    for l in range(L + 1):
        if nbar == 0:
            mag = 1.0 if l == 0 else 0.0
        else:
            mag = math.exp(-nbar / 2 + 0.5 * l * math.log(nbar) - 0.5 * math.lgamma(l + 1))
        out.append((l, -mag if l % 2 else mag))
    return out


def log_double_factorial_odd(k: int) -> float:
    """log((2k+1)!!) for k >= -1."""
    if k == -1:
        return 0.0
    return math.lgamma(2 * k + 2) - k * math.log(2.0) - math.lgamma(k + 1)


def linear_radical_log(N: int, l: int) -> float:
    """log of the squared radical multiplying exp(-|zeta|^2/2) zeta^N."""
    j = (N - l) // 2
    return (
        math.lgamma(l + 1)
        + log_double_factorial_odd(l)
        + (l - j) * math.log(2.0)
        - math.lgamma(2 * l + 1)
        - math.lgamma(j + 1)
        - log_double_factorial_odd((N + l) // 2)
    )


def linear_coeffs(z: complex, tail_eps: float = DEFAULT_TAIL_EPS) -> dict[tuple[int, int], complex]:
    """Amplitudes lambda_Nl of the z-axis coherent state on |N l 0>."""
    _check_eps(tail_eps)
    z = complex(z)
    mean = abs(z) ** 2
    if mean == 0:
        return {(0, 0): 1.0 + 0j}
    Nmax = _poisson_cutoff(mean, tail_eps)
    log_abs = math.log(abs(z))
    phase = z / abs(z)
    out = {}
    for N in range(Nmax + 1):
        base = -mean / 2 + N * log_abs
        ph = phase**N
        for l in range(N % 2, N + 1, 2):
            j = (N - l) // 2
            mag = math.exp(base + 0.5 * linear_radical_log(N, l))
            out[(N, l)] = (-1) ** j * mag * ph
    return out


def initial_state(
    spec: PacketSpec, rep: Rep | str = Rep.DIRAC, tail_eps: float = DEFAULT_TAIL_EPS
) -> BispinorExpansion:
    """Gaussian packet times the spinor (alpha, beta, 0, 0)."""
    a, b = spec.alpha, spec.beta
    up = {}
    if spec.kind == "circular":
        for l, lam in circular_coeffs(spec.nbar, tail_eps):
            if a:
                up[(l, l, l, 1)] = complex(lam * a)
            if b:
                up[(l, l, l, -1)] = complex(lam * b)
    else:
        for (N, l), lam in linear_coeffs(zeta(spec.z0, spec.p0), tail_eps).items():
            if a:
                up[(N, l, 0, 1)] = lam * a
            if b:
                up[(N, l, 0, -1)] = lam * b
    return BispinorExpansion(up, {}, Rep(rep))


def packet_coefficients(spec: PacketSpec, tail_eps: float = DEFAULT_TAIL_EPS):
    """Rows ``(N, l, lambda)`` for either family (circular rows have N = l)."""
    if spec.kind == "circular":
        return [(l, l, complex(lam)) for l, lam in circular_coeffs(spec.nbar, tail_eps)]
    coeffs = linear_coeffs(zeta(spec.z0, spec.p0), tail_eps)
    return [(N, l, lam) for (N, l), lam in sorted(coeffs.items())]
