"""Smoke tests of the python bindings against the documented anchor values."""

import math

import pytest

import srlsim


def fig2(eta_hz=1e6, n_atoms=1e10):
    return srlsim.PhysicalParams.from_ordinary_hz(1e5, 1e8, 1.4e3, 1e7, eta_hz, 0.0, n_atoms)


def test_derived_anchors():
    d = srlsim.derive(fig2())
    assert d.c1 == pytest.approx(1.96e-7, rel=1e-12)
    assert d.n_crit == pytest.approx(1.02e9, rel=0.01)
    lw = srlsim.linewidth_cooperativity(d.c1, fig2().gamma)
    assert lw == pytest.approx(6.2e-3, rel=0.01)


def test_formula_helpers():
    assert srlsim.group_index(1.0, 2.0) == pytest.approx(2.0)
    kappa = srlsim.cold_cavity_loss(1e-3, 0.99, 0.99)
    assert kappa == pytest.approx(3.013014889246725e9, rel=1e-12)
    st = srlsim.linewidth_schawlow_townes(2e14, 1e6, 1e-6)
    assert st == pytest.approx(1.678403176237906e-3, rel=1e-12)


def test_steady_state_lasing_branch():
    s = srlsim.steady_state(fig2())
    assert s.n_photon > 1e6
    assert 0.0 < s.inversion < 1.0
    dark = srlsim.steady_state(fig2(eta_hz=0.0))
    assert abs(dark.n_photon) < 1e-8
    assert dark.inversion == pytest.approx(-1.0, abs=1e-8)


def test_evolve_returns_arrays():
    out = srlsim.evolve(srlsim.MeanFieldState(), fig2(n_atoms=2e9), 2e-4, n_samples=50)
    assert len(out["times"]) == 50
    assert out["n_photon"][-1] > 0.0
    assert all(abs(s) <= 1 + 1e-6 for s in out["sigma_z"])


def test_linewidth_sub_gamma():
    out = srlsim.linewidth(fig2(n_atoms=2e9), max_samples=1 << 13)
    assert 0.0 < out["fwhm_hz"] < 1e5  # below the atomic decay rate
    eig = -2.0 * out["lambda_slow"].real / (2.0 * math.pi)
    assert out["fwhm_hz"] == pytest.approx(eig, rel=0.02)


def test_me_steady_photon_matches_mft_scale():
    p = srlsim.PhysicalParams.from_ordinary_hz(7.5e3, 160e3, 100e3, 0.0, 30e3, 0.0, 4)
    n_me = srlsim.me_steady_photon(4, 10, p)
    n_mft = srlsim.steady_state(p).n_photon
    assert n_me > 0.0
    assert 0.5 < n_mft / n_me < 2.0


def test_sweep_photon_grid():
    out = srlsim.sweep_photon(fig2(), 3, 1e9, 1e10, 3, 1e5, 1e6, workers=2)
    assert out["n_photon"].shape == (3, 3)
    assert out["n_photon"].max() > 1e5


def test_validation_errors_map_to_python():
    with pytest.raises(ValueError):
        srlsim.PhysicalParams.angular(-1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0)
    with pytest.raises(RuntimeError):
        srlsim.linewidth(fig2(eta_hz=0.0))
