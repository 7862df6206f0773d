import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracosc import ModelParams, PacketSpec, ValidationError
from diracosc.observables import time_series
from diracosc.revivals import (
    dominant_revival,
    find_revivals,
    match_fraction,
    normalise,
    revival_time,
    revival_time_spectral,
    score_at,
)

from conftest import make_state


def test_revival_time_examples():
    assert revival_time(ModelParams(0.01)) == pytest.approx(100.0)
    assert revival_time(ModelParams(1e-4)) == pytest.approx(1e4)
    assert revival_time(ModelParams(0.01)) / 2 == pytest.approx(50.0)


def test_spectral_time_small_r_limit():
    p = ModelParams(1e-7)
    assert revival_time_spectral(20.0, p) == pytest.approx(1 / (2 * p.r), rel=1e-4)


def test_periodic_signal():
    t = np.arange(0, 10 + 1e-9, 1 / 64)
    ev = find_revivals((t, np.cos(2 * math.pi * t)), threshold=0.5, min_separation=0.5)
    assert [round(e.time, 9) for e in ev] == list(range(11))
    assert all(e.score == pytest.approx(1.0) for e in ev)


@given(st.floats(1e-3, 1e3), st.floats(-50, 50))
def test_scale_invariance(scale, shift):
    t = np.arange(0, 20, 1 / 64)
    y = np.exp(-((t - 7) ** 2)) + 0.6 * np.exp(-((t - 13) ** 2)) + 0.1 * np.cos(9 * t)
    a = find_revivals((t, y), 0.3, 1.0, t_rev=14.0)
    b = find_revivals((t, scale * y + shift), 0.3, 1.0, t_rev=14.0)
    assert [(e.time, e.kind) for e in a] == [(e.time, e.kind) for e in b]
    assert np.allclose([e.score for e in a], [e.score for e in b], atol=1e-9)
    assert all(0 <= e.score <= 1 for e in a)


def test_non_uniform_grid_rejected():
    t = np.array([0.0, 0.1, 0.25, 0.3, 0.4])
    with pytest.raises(ValidationError):
        find_revivals((t, np.sin(t)))
    with pytest.raises(ValidationError):
        find_revivals((t[:2], t[:2]))


def test_match_fraction():
    assert match_fraction(50.0, 100.0) == Fraction(1, 2)
    assert match_fraction(33.5, 100.0) == Fraction(1, 3)
    assert match_fraction(12.4, 100.0) == Fraction(1, 8)
    assert match_fraction(100.5, 100.0) == Fraction(1, 1)
    assert match_fraction(45.0, 100.0) is None
    assert match_fraction(0.0, 100.0) is None


def test_labels():
    t = np.arange(0, 60, 1 / 64)
    y = sum(np.exp(-(((t - c) / 0.3) ** 2)) for c in (12.5, 33.3, 50.0, 44.0))
    ev = {round(e.time): e for e in find_revivals((t, y), 0.5, 1.0, t_rev=100.0)}
    assert ev[50].kind == "full" and ev[50].label == "full(1/2)"
    assert ev[33].kind == "fractional" and ev[33].fraction == Fraction(1, 3)
    assert ev[12].label == "fractional(1/8)"
    assert ev[44].kind == "peak" and ev[44].fraction is None


def test_normalise_constant():
    assert np.all(normalise(np.full(5, 3.0)) == 1.0)


def test_score_window_must_contain_samples():
    t = np.arange(0, 5, 1 / 64)
    with pytest.raises(ValidationError):
        score_at((t, np.cos(t)), 50.0)


@pytest.mark.parametrize("r", [0.01, 0.005])
def test_circular_full_revival_at_spectral_estimate(r):
    """First full |A|^2 revival of the circular packet (spin along Ox) sits at half the spectral revival time."""
    p = ModelParams(r)
    est = revival_time_spectral(20.0, p) / 2
    t = np.arange(0, 1.2 * est, 1 / 64)
    ts = time_series(make_state(PacketSpec.circular(20.0, math.pi / 2), "dirac"), p, t)
    ev = dominant_revival(ts, t_min=2.0)
    assert ev.time == pytest.approx(est, rel=0.05)


def test_flat_signal_has_no_structure():
    """Spin along Oz makes the circular packet a stretched state: |A|^2 = 1 up to rounding."""
    p = ModelParams(0.01)
    ts = time_series(make_state(PacketSpec.circular(20.0, 0.0), "fw"), p, np.arange(0, 5, 1 / 64))
    assert np.all(normalise(ts["A2"]) == 1.0)
