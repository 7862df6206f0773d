import math

import numpy as np
import pytest
from scipy.special import roots_legendre, sph_harm_y

from diracosc import ModelParams, PacketSpec, ValidationError, evolve
from diracosc.density import (
    density_grid,
    density_xyz,
    norm_quadrature,
    phi_variation,
    radial_R,
    read_raw,
    window_fraction,
    ylm,
)

from conftest import make_state
from oracles import radial_ref


def test_r00_origin():
    assert radial_R(0, 0, 0.0) == pytest.approx(2 * math.pi**-0.25, rel=1e-15)


@pytest.mark.parametrize("N, l", [(2, 0), (6, 2), (9, 1), (12, 12), (14, 4)])
def test_node_count(N, l):
    rho = np.linspace(1e-3, 12, 20001)
    R = radial_R(N, l, rho)
    assert np.count_nonzero(np.diff(np.sign(R)) != 0) == (N - l) // 2


def test_radial_matches_laguerre():
    rho = np.linspace(0, 9, 301)
    for N in range(16):
        for l in range(N % 2, N + 1, 2):
            assert np.max(np.abs(radial_R(N, l, rho) - radial_ref(N, l, rho))) < 1e-12


def test_radial_orthonormal():
    x, w = roots_legendre(400)
    rho = 7.5 * (x + 1)
    w = 7.5 * w * rho * rho
    for l in range(0, 11):
        Ns = range(l, 11, 2)
        R = np.array([radial_R(N, l, rho) for N in Ns])
        G = (R * w) @ R.T
        assert np.max(np.abs(G - np.eye(len(R)))) < 1e-12


def test_ylm_matches_scipy_and_orthonormal():
    ct, wt = roots_legendre(30)
    th = np.arccos(ct)
    nph = 40
    ph = np.arange(nph) * 2 * math.pi / nph
    T, P = np.meshgrid(th, ph, indexing="ij")
    W = (wt[:, None] * np.full(nph, 2 * math.pi / nph)[None, :]).ravel()
    rows = []
    for l in range(13):
        for m in range(-l, l + 1):
            y = ylm(l, m, T, P)
            assert np.max(np.abs(y - sph_harm_y(l, m, T, P))) < 1e-13
            rows.append(y.ravel())
    Y = np.array(rows)
    G = (np.conj(Y) * W) @ Y.T
    assert np.max(np.abs(G - np.eye(len(Y)))) < 1e-12


def test_ground_state_gaussian():
    s0 = make_state(PacketSpec.linear(0.0, 0.0), "fw")
    g = density_grid(s0, "xz", 41, 41, extent=3.0)
    X, Z = np.meshgrid(g.axis1, g.axis2, indexing="ij")
    ref = math.pi**-1.5 * np.exp(-(X * X + Z * Z))
    assert np.max(np.abs(g.values - ref)) < 1e-14


@pytest.mark.parametrize(
    "spec, rep, r, t",
    [
        (PacketSpec.circular(20.0, math.pi / 2), "dirac", 0.5, 0.5),
        (PacketSpec.circular(5.0), "fw", 0.1, 1.3),
        (PacketSpec.linear(2 * math.sqrt(2), 1.0, 1.0), "dirac", 0.5, 0.37),
        (PacketSpec.linear(3.0, 0.0, 0.0), "fw", 1e-3, 2.0),
    ],
)
def test_global_normalisation(spec, rep, r, t):
    p = ModelParams(r)
    s0 = make_state(spec, rep)
    st = evolve(s0, t * p.period, p)
    assert norm_quadrature(st) == pytest.approx(s0.norm(), abs=1e-6)


@pytest.mark.parametrize("rep", ["dirac", "fw"])
def test_cylindrical_symmetry(rep):
    p = ModelParams(0.5)
    s0 = make_state(PacketSpec.linear(2 * math.sqrt(2), 0.5, 0.0), rep)
    st = evolve(s0, 0.3 * p.period, p)
    assert phi_variation(st, [0.5, 1.5, 2.8, 4.0]) < 1e-8
    tilted = evolve(make_state(PacketSpec.linear(2 * math.sqrt(2), 0.5, math.pi / 2), rep), 0.3 * p.period, p)
    assert phi_variation(tilted, [1.5, 2.8]) > 1e-3


def test_small_r_dirac_close_to_fw():
    p = ModelParams(1e-6)
    spec = PacketSpec.linear(2.0, 0.0, 1.0)
    t = 0.3 * p.period
    d = evolve(make_state(spec, "dirac"), t, p)
    f = evolve(make_state(spec, "fw"), t, p)
    x = np.linspace(-5, 5, 41)
    X, Z = np.meshgrid(x, x, indexing="ij")
    assert np.max(np.abs(density_xyz(d, X, 0.0, Z) - density_xyz(f, X, 0.0, Z))) < 1e-4


def test_grid_validation():
    s0 = make_state(PacketSpec.circular(1.0))
    with pytest.raises(ValidationError):
        density_grid(s0, "xy")
    with pytest.raises(ValidationError):
        density_grid(s0, "xz", 1, 10)
    with pytest.raises(ValidationError):
        density_grid(s0, "sphere", 10, 10)
    with pytest.raises(ValidationError):
        density_grid(s0, "perp", 10, 10, extent=-1.0)


def test_file_round_trips(tmp_path):
    s0 = make_state(PacketSpec.circular(2.0, 0.4))
    g = density_grid(s0, "sphere", 9, 12, radius=1.7, t=0.25)
    g.write_raw(tmp_path / "g.raw")
    back = read_raw(tmp_path / "g.raw")
    assert back.surface == "sphere" and back.t == 0.25
    assert np.array_equal(back.values, g.values)
    g.write_csv(tmp_path / "g.csv", comment="r=0.5")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "theta,phi,density" and lines[1] == "# r=0.5"
    vals = np.loadtxt(tmp_path / "g.csv", delimiter=",", comments="#", skiprows=1)
    assert np.array_equal(vals[:, 2].reshape(9, 12), g.values)


def test_squeezing_towards_centre():
    """Linear packet released at z0 = 4 is concentrated near the origin a quarter period later."""
    p = ModelParams(0.01)
    z0 = 4.0
    st = evolve(make_state(PacketSpec.linear(z0, 0.0, 0.0), "dirac"), 0.25 * p.period, p)
    g = density_grid(st, "xz", 161, 161, extent=7.0)
    assert window_fraction(g, 1, z0 / 2) >= 0.6
    g0 = density_grid(make_state(PacketSpec.linear(z0, 0.0, 0.0), "dirac"), "xz", 161, 161, extent=7.0)
    assert window_fraction(g0, 1, z0 / 2) < 0.1
