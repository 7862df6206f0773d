"""Quantum numbers, unit conventions and the exact Dirac-oscillator spectrum.

Units: hbar = m = omega = 1.  Lengths are in sigma = sqrt(hbar/(m omega)),
frequencies in omega, times in 1/omega (so the oscillator period is 2*pi).
The only physical knob is ``r = hbar*omega / (m c^2)``; the rest-frequency
``omega0 = m c^2 / hbar`` is then ``1/r``.

Half-integer quantum numbers are stored doubled (``j2 = 2j``, ``mj2 = 2m_j``)
so sector keys are exact and hashable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """Raised when a quantum-number tuple or parameter is out of range."""


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model parameters.

    ``paper_literal`` switches the lower-component propagator amplitude to the
    printed (non-unitary) form; it exists only for comparison runs.
    """

    r: float
    paper_literal: bool = False

    def __post_init__(self):
        if not (isinstance(self.r, (int, float)) and math.isfinite(self.r) and self.r > 0):
            raise ValidationError(f"r must be a finite positive number, got {self.r!r}")

    @property
    def omega0(self) -> float:
        return 1.0 / self.r

    @property
    def period(self) -> float:
        return TWO_PI


@dataclass(frozen=True, order=True)
class SectorKey:
    """Label ``|N l j m_j>`` of the upper member of a two-state sector."""

    N: int
    l: int
    j2: int
    mj2: int

    def __post_init__(self):
        N, l, j2, mj2 = self.N, self.l, self.j2, self.mj2
        for name, v in (("N", N), ("l", l), ("j2", j2), ("mj2", mj2)):
            if not isinstance(v, (int, np.integer)):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if N < 0:
            raise ValidationError(f"N must be non-negative, got {N}")
        if l < 0:
            raise ValidationError(f"l must be non-negative, got {l}")
        if l > N:
            raise ValidationError(f"l <= N violated: l={l}, N={N}")
        if (N - l) % 2:
            raise ValidationError(f"N - l must be even: N={N}, l={l}")
        if j2 not in (2 * l + 1, 2 * l - 1) or j2 <= 0:
            raise ValidationError(f"j2 must be 2l+1 or 2l-1 (positive): l={l}, j2={j2}")
        if mj2 % 2 == 0 or abs(mj2) > j2:
            raise ValidationError(f"mj2 must be odd with |mj2| <= j2: j2={j2}, mj2={mj2}")

    @property
    def upper_branch(self) -> bool:
        """True for j = l + 1/2."""
        return self.j2 == 2 * self.l + 1

    @property
    def l_partner(self) -> int:
        """Orbital number l' of the small-component partner state."""
        return self.l + 1 if self.upper_branch else self.l - 1

    @property
    def sgn(self) -> complex:
        return -1j if self.upper_branch else 1j

    @property
    def partner(self) -> tuple[int, int, int, int]:
        """``(N-1, l', j2, mj2)`` of the lower-component partner state."""
        return (self.N - 1, self.l_partner, self.j2, self.mj2)

    @property
    def has_partner(self) -> bool:
        # A = 0 exactly when the partner would need l' > N - 1
        return a_index(self) > 0


def a_index(key: SectorKey) -> int:
    """Spectral index ``A_Nlj``: 2(N-j)+1 for j=l+1/2, 2(N+j)+3 for j=l-1/2."""
    if key.upper_branch:
        return 2 * key.N - key.j2 + 1
    return 2 * key.N + key.j2 + 3


def omega_from_a(a, r: float):
    """``sqrt(1 + r*A) / r``, accepting scalars or arrays."""
    return np.sqrt(1.0 + r * np.asarray(a, dtype=float)) / r


def omega_nlj(key: SectorKey, params: ModelParams) -> float:
    """Positive eigenfrequency ``|E_Nlj|/hbar`` in units of omega."""
    return float(math.sqrt(1.0 + params.r * a_index(key)) / params.r)


def omega_branch(N: int, l: int, upper: bool, params: ModelParams) -> float:
    """Frequency of the (N, l, j = l +/- 1/2) level without building a key."""
    if upper:
        a = 2 * (N - l)
    else:
        if l == 0:
            raise ValidationError("j = l - 1/2 requires l >= 1")
        a = 2 * (N + l) + 2
    return float(math.sqrt(1.0 + params.r * a) / params.r)


def nonrel_splitting(l: int) -> int:
    """|omega_Nl> - omega_Nl<| in the r -> 0 limit: 2l + 1."""
    if l < 0:
        raise ValidationError(f"l must be non-negative, got {l}")
    return 2 * l + 1


def iter_sectors(n_max: int) -> Iterator[SectorKey]:
    """All sectors with N <= n_max and m_j = +1/2 (the spectrum is m_j independent)."""
    for N in range(n_max + 1):
        for l in range(N % 2, N + 1, 2):
            yield SectorKey(N, l, 2 * l + 1, 1)
            if l >= 1:
                yield SectorKey(N, l, 2 * l - 1, 1)
