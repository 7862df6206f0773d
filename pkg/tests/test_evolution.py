import cmath
import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracosc import ModelParams, PacketSpec, Propagator, SectorKey, ValidationError, dirac_AB, evolve, fw_ab
from diracosc.evolution import ab_from_index
from diracosc.model import omega_branch, omega_nlj
from diracosc.oracle import OracleEvolution
from diracosc.packets import BispinorExpansion, Rep, initial_state

from conftest import make_state

r_values = st.sampled_from([1e-4, 1e-2, 0.5, 2.0])


def _sector_keys():
    return st.integers(0, 30).flatmap(
        lambda N: st.integers(0, N).filter(lambda l: (N - l) % 2 == 0).flatmap(
            lambda l: st.sampled_from([2 * l + 1] + ([2 * l - 1] if l else [])).map(
                lambda j2: SectorKey(N, l, j2, 1)
            )
        )
    )


def test_ab_at_zero():
    p = ModelParams(0.5)
    pr = dirac_AB(SectorKey(3, 1, 3, 1), p, 0.0)
    assert (pr.A, pr.B) == (1, 0)
    a, b = fw_ab(4, 2, p, 0.0)
    assert a == pytest.approx(1) and b == pytest.approx(0)


def test_decoupled_sector():
    p = ModelParams(0.01)
    key = SectorKey(0, 0, 1, 1)
    for t in (0.3, 17.0, 1e3):
        pr = dirac_AB(key, p, t)
        assert pr.A == pytest.approx(cmath.exp(-1j * p.omega0 * t), abs=1e-12)
        assert pr.B == 0


def test_index_two_quarter_turn():
    p = ModelParams(0.5)
    w = math.sqrt(1 + 0.5 * 2) / 0.5
    A, B = ab_from_index(2, -1j, p, math.pi / 2 / w)
    assert complex(A) == pytest.approx(-1j / math.sqrt(2), abs=1e-15)
    assert abs(B) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


@given(_sector_keys(), r_values, st.floats(0, 1e4))
def test_ab_unitary(key, r, t):
    pr = dirac_AB(key, ModelParams(r), t)
    assert abs(pr.A) ** 2 + abs(pr.B) ** 2 == pytest.approx(1.0, abs=1e-13)


def test_fw_ab_unitary_random():
    rng = np.random.default_rng(7)
    for _ in range(10_000 // 50):
        N = int(rng.integers(0, 60))
        l = int(rng.integers(0, N + 1))
        l += (N - l) % 2  # l < N whenever the parity is odd
        p = ModelParams(float(10 ** rng.uniform(-5, 0.5)))
        t = rng.uniform(0, 1e4, 50)
        a, b = fw_ab(N, l, p, t)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)) < 1e-13


def test_fw_ab_l0():
    p = ModelParams(0.1)
    a, b = fw_ab(6, 0, p, 2.5)
    assert a == pytest.approx(cmath.exp(-2.5j * omega_branch(6, 0, True, p)))
    assert b == 0


def test_fw_ab_rejects_parity():
    with pytest.raises(ValidationError):
        fw_ab(3, 2, ModelParams(0.1), 0.0)


def _as_dict(state):
    return {("u",) + k: c for k, c in state.upper.items()} | {("l",) + k: c for k, c in state.lower.items()}


def _close(s1, s2, tol):
    d1, d2 = _as_dict(s1), _as_dict(s2)
    return all(abs(d1.get(k, 0) - d2.get(k, 0)) <= tol for k in set(d1) | set(d2))


@pytest.mark.parametrize("rep", ["dirac", "fw"])
def test_identity_at_zero(rep):
    s0 = make_state(PacketSpec.linear(2.0, 0.5, 0.7), rep)
    assert _close(evolve(s0, 0.0, ModelParams(0.3)), s0, 1e-15)


def test_representation_mismatch():
    s0 = make_state(PacketSpec.circular(2.0), "dirac")
    with pytest.raises(ValidationError):
        evolve(s0, 1.0, ModelParams(0.1), rep="fw")


@pytest.mark.parametrize("rep", ["dirac", "fw"])
def test_norm_long_times(rep):
    p = ModelParams(0.5)
    s0 = make_state(PacketSpec.linear(2 * math.sqrt(2), 1.0, 1.0), rep)
    prop = Propagator(s0, p)
    C = prop.amplitudes(np.array([1.0, 10.0, 100.0, 1000.0]) * p.period)
    n = np.sum(np.abs(C) ** 2, axis=(1, 2))
    assert np.max(np.abs(n - s0.norm())) < 1e-12


@given(
    st.complex_numbers(max_magnitude=3, allow_nan=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False),
    st.floats(0, 50),
    st.sampled_from(["dirac", "fw"]),
)
def test_linearity(c1, c2, t, rep):
    p = ModelParams(0.2)
    s1 = make_state(PacketSpec.linear(1.5, 0.5, 0.4), rep)
    s2 = make_state(PacketSpec.circular(3.0, 2.0), rep)
    lhs = evolve(s1.scaled(c1) + s2.scaled(c2), t, p)
    rhs = evolve(s1, t, p).scaled(c1) + evolve(s2, t, p).scaled(c2)
    assert _close(lhs, rhs, 1e-13)


def _mj_weights(state):
    w = defaultdict(float)
    for part in (state.upper, state.lower):
        for (N, l, m, ms2), c in part.items():
            w[2 * m + ms2] += abs(c) ** 2
    return w


@pytest.mark.parametrize("rep", ["dirac", "fw"])
def test_mj_conservation(rep):
    p = ModelParams(0.3)
    # superpose distinct m_j: circular tilted spin and a state with m_j = -3/2
    s0 = make_state(PacketSpec.circular(4.0, 1.2), rep) + BispinorExpansion({(3, 1, -1, -1): 0.3}, {}, rep)
    w0 = _mj_weights(s0)
    for t in (0.7, 13.0, 250.0):
        w = _mj_weights(evolve(s0, t, p))
        assert set(w) <= set(w0)
        for k in w0:
            assert w[k] == pytest.approx(w0[k], abs=1e-12)


@pytest.mark.parametrize("l", range(6))
def test_dirac_component_structure(l):
    """Single |N l 0> spin-up state: all four components against closed expressions."""
    N, alpha = l + 2, 0.8
    p = ModelParams(0.4)
    t = 1.37
    s = evolve(BispinorExpansion({(N, l, 0, 1): alpha}, {}, Rep.DIRAC), t, p)
    d = 2 * l + 1
    Au = dirac_AB(SectorKey(N, l, 2 * l + 1, 1), p, t)
    up_expected = (l + 1) / d * Au.A
    if l:
        Ad = dirac_AB(SectorKey(N, l, 2 * l - 1, 1), p, t)
        up_expected += l / d * Ad.A
        assert abs(s.upper[(N, l, 1, -1)]) == pytest.approx(alpha * math.sqrt(l * (l + 1)) / d * abs(Au.A - Ad.A))
        lo_dn = alpha * math.sqrt(l / d) * abs(Ad.B) * math.sqrt(l / (2 * l - 1))
        assert abs(s.lower[(N - 1, l - 1, 0, 1)]) == pytest.approx(lo_dn, abs=1e-14)
    assert s.upper[(N, l, 0, 1)] == pytest.approx(alpha * up_expected, abs=1e-14)
    lo_up = alpha * math.sqrt((l + 1) / d) * abs(Au.B) * math.sqrt((l + 1) / (2 * l + 3))
    assert abs(s.lower[(N - 1, l + 1, 0, 1)]) == pytest.approx(lo_up, abs=1e-14)
    allowed_up = {(N, l, 0, 1), (N, l, 1, -1)}
    allowed_lo = {(N - 1, lp, m, ms) for lp in (l - 1, l + 1) for m, ms in ((0, 1), (1, -1))}
    assert {k for k, c in s.upper.items() if abs(c) > 1e-15} <= allowed_up
    assert {k for k, c in s.lower.items() if abs(c) > 1e-15} <= allowed_lo
    assert s.norm() == pytest.approx(alpha**2, abs=1e-13)


@pytest.mark.parametrize("N, l", [(0, 0), (2, 2), (3, 1), (6, 4)])
def test_fw_phi_components(N, l):
    alpha, beta = 0.6, 0.8
    p = ModelParams(0.05)
    t = 3.3
    s = evolve(BispinorExpansion({(N, l, 0, 1): alpha, (N, l, 0, -1): beta}, {}, Rep.FW), t, p)
    a, b = fw_ab(N, l, p, t)
    assert s.upper[(N, l, 0, 1)] == pytest.approx(alpha * a, abs=1e-14)
    assert s.upper[(N, l, 0, -1)] == pytest.approx(beta * a, abs=1e-14)
    assert s.upper.get((N, l, -1, 1), 0) == pytest.approx(beta * b, abs=1e-14)
    assert s.upper.get((N, l, 1, -1), 0) == pytest.approx(alpha * b, abs=1e-14)
    assert not s.lower


def test_against_oracle_amplitudes():
    p = ModelParams(0.5)
    s0 = make_state(PacketSpec.linear(math.sqrt(2), 0.0, 0.9), "dirac")
    t = 0.3 * p.period
    mine = evolve(s0, t, p)
    ora = OracleEvolution(s0, p)
    ref = ora.basis.expansion(ora.amplitudes([t])[0], Rep.DIRAC)
    assert _close(mine, ref, 1e-10)


def test_literal_flag_deficit():
    r = 0.5
    lit = ModelParams(r, paper_literal=True)
    key = SectorKey(4, 2, 5, 1)
    x = 1 / math.sqrt(1 + r * 4)
    w = omega_nlj(key, lit)
    for t in np.linspace(0, 2 * math.pi, 17):
        pr = dirac_AB(key, lit, t)
        deficit = 1 - abs(pr.A) ** 2 - abs(pr.B) ** 2
        assert deficit == pytest.approx(0.5 * (1 - x * x) * math.sin(w * t) ** 2, abs=1e-14)
