import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import poisson

from diracosc.model import ValidationError
from diracosc.observables import spin_avg
from diracosc.packets import (
    BispinorExpansion,
    PacketSpec,
    Rep,
    circular_coeffs,
    initial_state,
    linear_coeffs,
    log_double_factorial_odd,
    packet_coefficients,
    zeta,
)

from oracles import overlap_linear


def test_zeta_examples():
    assert zeta(0, 0) == 0
    assert zeta(2, 0) == pytest.approx(math.sqrt(2))
    assert zeta(0, 2) == pytest.approx(1j * math.sqrt(2))


def test_double_factorial():
    for k, v in [(-1, 1), (0, 1), (1, 3), (2, 15), (5, 10395)]:
        assert math.exp(log_double_factorial_odd(k)) == pytest.approx(v, rel=1e-13)


def test_circular_ground():
    assert circular_coeffs(0.0) == [(0, 1.0)]


def test_circular_nbar20():
    c = circular_coeffs(20.0)
    assert c[0][1] == pytest.approx(math.exp(-10), rel=1e-13)
    w = np.array([v * v for _, v in c])
    assert int(np.argmax(w)) in (19, 20)
    assert w.sum() >= 1 - 1e-12
    assert all((v < 0) == (l % 2 == 1) for l, v in c if v != 0)


@given(st.floats(0.1, 80.0))
def test_circular_is_poisson(nbar):
    c = circular_coeffs(nbar)
    L = min(len(c) - 1, int(nbar + 10 * math.sqrt(nbar)))
    for l, v in c[: L + 1]:
        pmf = poisson.pmf(l, nbar)
        if pmf > 1e-290:
            assert v * v == pytest.approx(pmf, rel=1e-12)


def test_linear_ground_and_lambda11():
    assert linear_coeffs(0) == {(0, 0): 1.0}
    c = linear_coeffs(1.0)
    assert c[(1, 1)].real == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert c[(1, 1)].real == pytest.approx(0.606531, abs=1e-6)


@given(st.complex_numbers(max_magnitude=4.0))
def test_linear_normalisation(z):
    c = linear_coeffs(z)
    total = sum(abs(v) ** 2 for v in c.values())
    assert total == pytest.approx(1.0, abs=1e-10)
    assert all((N - l) % 2 == 0 and 0 <= l <= N for N, l in c)


def test_large_N_no_overflow():
    c = linear_coeffs(11.0)  # mean N = 121
    assert max(N for N, _ in c) > 150
    assert all(np.isfinite(abs(v)) for v in c.values())
    assert sum(abs(v) ** 2 for v in c.values()) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("eps", [0.0, 1.0, -1e-3, 2.0])
def test_tail_eps_range(eps):
    with pytest.raises(ValidationError):
        linear_coeffs(1.0, eps)
    with pytest.raises(ValidationError):
        circular_coeffs(3.0, eps)


@pytest.mark.parametrize("z0, p0", [(math.sqrt(2), 0.0), (2 * math.sqrt(2), math.sqrt(2)), (0.7, -1.3)])
def test_overlap_oracle(z0, p0):
    c = linear_coeffs(zeta(z0, p0))
    worst = 0.0
    for N in range(7):
        for l in range(N % 2, N + 1, 2):
            ref = overlap_linear(N, l, z0, p0)
            worst = max(worst, abs(ref - c.get((N, l), 0)))
    assert worst < 1e-8


def test_spec_validation():
    with pytest.raises(ValidationError):
        PacketSpec("circular", nbar=1.0, alpha=0.9, beta=0.9)
    with pytest.raises(ValidationError):
        PacketSpec("elliptic")
    with pytest.raises(ValidationError):
        PacketSpec.circular(-1.0)


def test_initial_state_examples():
    s = initial_state(PacketSpec.circular(0.0), Rep.DIRAC)
    assert s.upper == {(0, 0, 0, 1): 1.0} and not s.lower
    s = initial_state(PacketSpec.linear(math.sqrt(2), 0.0, math.pi / 2), Rep.FW)
    lam = linear_coeffs(1.0)
    for (N, l), v in lam.items():
        assert s.upper[(N, l, 0, 1)] == pytest.approx(v / math.sqrt(2))
        assert s.upper[(N, l, 0, -1)] == pytest.approx(v / math.sqrt(2))


@given(st.floats(0, math.pi), st.sampled_from(["circular", "linear"]))
def test_initial_spin(theta, kind):
    spec = PacketSpec.circular(3.0, theta) if kind == "circular" else PacketSpec.linear(1.5, 0.3, theta)
    s = initial_state(spec)
    sv = spin_avg(s)
    n = s.norm()
    a, b = spec.alpha, spec.beta
    assert sv.sx == pytest.approx(2 * a * b * n, abs=1e-12)
    assert abs(sv.sy) < 1e-12
    assert sv.sz == pytest.approx((a * a - b * b) * n, abs=1e-12)
    assert 1 - 1e-12 <= n <= 1 + 1e-14


def test_fw_state_rejects_lower():
    with pytest.raises(ValidationError):
        BispinorExpansion({}, {(0, 0, 0, 1): 1.0}, Rep.FW)


def test_packet_coefficients_rows():
    rows = packet_coefficients(PacketSpec.circular(2.0))
    assert all(N == l for N, l, _ in rows)
    rows = packet_coefficients(PacketSpec.linear(1.0, 0.0))
    assert all((N - l) % 2 == 0 for N, l, _ in rows)


@pytest.mark.parametrize("key", [(0, 2, 0, 1), (3, 2, 0, 1), (2, 2, 3, 1), (2, 0, 0, 0)])
def test_expansion_rejects_invalid_keys(key):
    with pytest.raises(ValidationError):
        BispinorExpansion({key: 1.0}, {}, Rep.DIRAC)
