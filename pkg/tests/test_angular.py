import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracosc.angular import cg_half, couple, coupled_components, decouple
from diracosc.model import ValidationError


def test_stretched():
    assert cg_half(0, 1, True, 1) == 1.0
    for l in range(6):
        assert cg_half(l, 2 * l + 1, True, 1) == 1.0


@pytest.mark.parametrize("l", range(0, 7))
def test_mj_half_weights(l):
    # orbital m = 0 with spin up inside j = l + 1/2, m_j = 1/2
    assert cg_half(l, 1, True, 1) == pytest.approx(math.sqrt((l + 1) / (2 * l + 1)), abs=1e-15)
    if l:
        assert cg_half(l, 1, False, 1) ** 2 == pytest.approx(l / (2 * l + 1), abs=1e-15)


@given(st.integers(1, 40), st.data())
def test_completeness(l, data):
    mj2 = data.draw(st.sampled_from(range(-2 * l + 1, 2 * l, 2)))
    for ms2 in (1, -1):
        s = cg_half(l, mj2, True, ms2) ** 2 + cg_half(l, mj2, False, ms2) ** 2
        assert s == pytest.approx(1.0, abs=1e-14)
    # rows of the 2x2 rotation are orthogonal
    dot = cg_half(l, mj2, True, 1) * cg_half(l, mj2, True, -1) + cg_half(l, mj2, False, 1) * cg_half(l, mj2, False, -1)
    assert abs(dot) < 1e-14


def test_out_of_range():
    with pytest.raises(ValidationError):
        cg_half(1, 5, True, 1)
    with pytest.raises(ValidationError):
        cg_half(0, 1, False, 1)


def test_against_sympy_free_formula():
    # <l, m; 1/2, ms | j, mj> from the general Racah expression, spot values
    assert cg_half(1, 1, True, 1) == pytest.approx(math.sqrt(2 / 3))
    assert cg_half(1, 1, True, -1) == pytest.approx(math.sqrt(1 / 3))
    assert cg_half(1, 1, False, 1) == pytest.approx(-math.sqrt(1 / 3))
    assert cg_half(1, 1, False, -1) == pytest.approx(math.sqrt(2 / 3))


def _random_amps(rng, nmax):
    amps = {}
    for N in range(nmax + 1):
        for l in range(N % 2, N + 1, 2):
            for m in range(-l, l + 1):
                for ms2 in (1, -1):
                    amps[(N, l, m, ms2)] = complex(rng.normal(), rng.normal())
    return amps


@given(st.integers(0, 2**31 - 1), st.integers(0, 6))
def test_round_trip_and_norm(seed, nmax):
    rng = np.random.default_rng(seed)
    amps = _random_amps(rng, nmax)
    c = couple(amps)
    back = decouple(c)
    n0 = sum(abs(v) ** 2 for v in amps.values())
    assert sum(abs(v) ** 2 for v in c.values()) == pytest.approx(n0, rel=1e-14)
    for k, v in amps.items():
        assert abs(back.get(k, 0) - v) < 1e-14 * max(1.0, math.sqrt(n0))


def test_stretched_couples_to_single():
    c = couple({(3, 3, 3, 1): 1.0})
    assert c == {(3, 3, 7, 7): pytest.approx(1.0)}


def test_linear_structure():
    # |N l 0>(alpha, beta) has weight (l+1)/(2l+1) alpha^2 + ... on j = l + 1/2
    l, a, b = 3, 0.6, 0.8
    c = couple({(5, l, 0, 1): a, (5, l, 0, -1): b})
    assert abs(c[(5, l, 2 * l + 1, 1)]) ** 2 == pytest.approx(a * a * (l + 1) / (2 * l + 1))
    assert abs(c[(5, l, 2 * l - 1, 1)]) ** 2 == pytest.approx(a * a * l / (2 * l + 1))
    assert abs(c[(5, l, 2 * l + 1, -1)]) ** 2 == pytest.approx(b * b * (l + 1) / (2 * l + 1))
    assert len(c) == 4


def test_coupled_components_shape():
    comps = list(coupled_components(2, 5, 3))
    assert {(m, ms) for m, ms, _ in comps} == {(1, 1), (2, -1)}
