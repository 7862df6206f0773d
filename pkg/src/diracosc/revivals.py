"""Revival times and detection of full and fractional revivals in time series.

The detector works on a min-max normalised signal (|A(t)|^2 or a spin
projection), so its output does not depend on the scale of the input.
Peaks are labelled with the reduced fraction p/q (q <= 8) of the revival
time they fall close to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import find_peaks

from .model import ModelParams, ValidationError
from .observables import TimeSeries

MAX_ORDER = 8
REL_WINDOW = 0.02
FLAT_REL = 1e-10


@dataclass(frozen=True)
class RevivalEvent:
    time: float  # units of T
    kind: str  # "full", "fractional" or "peak" (no fraction matched)
    score: float
    fraction: Fraction | None = None

    @property
    def label(self) -> str:
        if self.fraction is None:
            return self.kind
        return f"{self.kind}({self.fraction.numerator}/{self.fraction.denominator})"


def revival_time(params: ModelParams) -> float:
    """Second-order revival time 1/r in units of T (small-r estimate)."""
    return 1.0 / params.r


def revival_time_spectral(nbar: float, params: ModelParams) -> float:
    """Revival time 2/|omega''| of the circular packet's dispersive ladder, in units of T.

    Only the j = l - 1/2 branch disperses for the circular family, with
    omega(l) = sqrt(1 + r(4l + 2))/r; the derivative is taken at l = nbar.
    Tends to 1/(2r) for r*nbar -> 0.
    """
    u = 1.0 + params.r * (4.0 * nbar + 2.0)
    w2 = 4.0 * params.r / u**1.5
    # 4*pi/|omega''| in units of 1/omega, divided by T = 2*pi
    return 2.0 / w2


def normalise(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    lo, hi = float(np.min(v)), float(np.max(v))
    # a flat signal carrying only rounding noise has no peaks to rank
    if hi - lo <= FLAT_REL * max(abs(hi), abs(lo)):
        return np.ones_like(v)
    return (v - lo) / (hi - lo)


def _check_uniform(times):
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise ValidationError("need at least 3 samples")
    d = np.diff(times)
    if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-6 * abs(d[0]):
        raise ValidationError("revival detection needs a uniform, increasing time grid")
    return times, float(d[0])


def match_fraction(t: float, t_rev: float, max_order: int = MAX_ORDER, rel: float = REL_WINDOW):
    """Lowest-order p/q with |t - (p/q) t_rev| <= rel * (p/q) t_rev, or None."""
    if t <= 0:
        return None
    for q in range(1, max_order + 1):
        p = round(q * t / t_rev)
        if p < 1 or math.gcd(p, q) != 1:
            continue
        target = p / q * t_rev
        if abs(t - target) <= rel * target:
            return Fraction(p, q)
    return None


def _series_values(series, column):
    if isinstance(series, TimeSeries):
        return series.times, np.asarray(series[column], dtype=float)
    times, values = series
    return np.asarray(times, dtype=float), np.asarray(values, dtype=float)


def find_revivals(
    series,
    threshold: float = 0.5,
    min_separation: float = 1.0,
    t_rev: float | None = None,
    column: str = "A2",
    include_edges: bool = True,
) -> list[RevivalEvent]:
    """Local maxima of the normalised signal above ``threshold``.

    ``series`` is a :class:`TimeSeries` (``column`` selects the signal) or a
    ``(times, values)`` pair; times and ``min_separation`` are in units of T.
    With ``t_rev`` given, events near (p/q) t_rev are labelled; q <= 2 counts
    as a full revival.
    """
    times, values = _series_values(series, column)
    times, dt = _check_uniform(times)
    y = normalise(values)
    dist = max(1, int(round(min_separation / dt)))
    if include_edges:
        pad = np.concatenate([[-np.inf], y, [-np.inf]])
        idx, _ = find_peaks(pad, height=threshold, distance=dist)
        idx = idx - 1
    else:
        idx, _ = find_peaks(y, height=threshold, distance=dist)
    events = []
    for i in idx:
        t = float(times[i])
        frac = match_fraction(t, t_rev) if t_rev else None
        if frac is None:
            kind = "peak"
        else:
            kind = "full" if frac.denominator <= 2 else "fractional"
        events.append(RevivalEvent(t, kind, float(y[i]), frac))
    return events


def score_at(series, t_center: float, column: str = "A2", rel: float = REL_WINDOW) -> float:
    """Largest normalised value within +-rel*t_center of ``t_center``."""
    times, values = _series_values(series, column)
    y = normalise(values)
    win = np.abs(times - t_center) <= rel * abs(t_center)
    if not np.any(win):
        raise ValidationError(f"no samples within the window around t = {t_center}")
    return float(np.max(y[win]))


def dominant_revival(series, t_min: float, column: str = "A2") -> RevivalEvent:
    """Highest peak of the normalised signal at t > ``t_min``."""
    times, values = _series_values(series, column)
    _check_uniform(times)
    y = normalise(values)
    mask = times > t_min
    if not np.any(mask):
        raise ValidationError("no samples after t_min")
    i = int(np.flatnonzero(mask)[np.argmax(y[mask])])
    return RevivalEvent(float(times[i]), "peak", float(y[i]))
