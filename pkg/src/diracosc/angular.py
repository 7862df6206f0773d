"""Spin-1/2 coupling: closed-form Clebsch-Gordan coefficients and basis changes.

Decoupled keys are ``(N, l, m, ms2)``; coupled keys are ``(N, l, j2, mj2)``.
Condon-Shortley phases throughout.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Mapping

from .model import ValidationError

Amplitudes = Mapping[tuple, complex]


def cg_half(l: int, mj2: int, upper: bool, ms2: int) -> float:
    """<l, m_j - m_s; 1/2, m_s | j, m_j> with j = l + 1/2 (``upper``) or l - 1/2."""
    if ms2 not in (1, -1):
        raise ValidationError(f"ms2 must be +1 or -1, got {ms2}")
    if l < 0 or mj2 % 2 == 0:
        raise ValidationError(f"invalid (l, mj2) = ({l}, {mj2})")
    j2 = 2 * l + 1 if upper else 2 * l - 1
    if j2 <= 0:
        raise ValidationError("j = l - 1/2 requires l >= 1")
    if abs(mj2) > j2:
        raise ValidationError(f"|mj2| = {abs(mj2)} exceeds j2 = {j2}")
    d = 2 * (2 * l + 1)
    plus = math.sqrt((2 * l + 1 + mj2) / d)
    minus = math.sqrt((2 * l + 1 - mj2) / d)
    if upper:
        return plus if ms2 == 1 else minus
    return -minus if ms2 == 1 else plus


def coupled_components(l: int, j2: int, mj2: int):
    """Yield ``(m, ms2, cg)`` for the non-zero decoupled pieces of |l j m_j>."""
    upper = j2 == 2 * l + 1
    for ms2 in (1, -1):
        m2 = mj2 - ms2
        if abs(m2) > 2 * l:
            continue
        c = cg_half(l, mj2, upper, ms2)
        if c != 0.0:
            yield m2 // 2, ms2, c


def couple(amps: Amplitudes) -> dict[tuple, complex]:
    """Map decoupled amplitudes ``(N, l, m, ms2)`` onto ``(N, l, j2, mj2)``."""
    out: dict[tuple, complex] = defaultdict(complex)
    for (N, l, m, ms2), c in amps.items():
        if c == 0:
            continue
        mj2 = 2 * m + ms2
        for upper in (True, False):
            j2 = 2 * l + 1 if upper else 2 * l - 1
            if j2 <= 0 or abs(mj2) > j2:
                continue
            out[(N, l, j2, mj2)] += cg_half(l, mj2, upper, ms2) * c
    return dict(out)


def decouple(amps: Amplitudes) -> dict[tuple, complex]:
    """Inverse of :func:`couple`."""
    out: dict[tuple, complex] = defaultdict(complex)
    for (N, l, j2, mj2), c in amps.items():
        if c == 0:
            continue
        for m, ms2, cg in coupled_components(l, j2, mj2):
            out[(N, l, m, ms2)] += cg * c
    return dict(out)
