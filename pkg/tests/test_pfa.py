import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanocasimir.lifshitz import (CavityConfig, casimir_energy, casimir_ideal_curvature,
                                  casimir_ideal_energy)
from nanocasimir.materials import Plasma
from nanocasimir.pfa import (ContactError, PFAValidityWarning, ProfileError, ProfileSpectrum,
                             SurfaceProfile, TabulatedEnergy, load_profile, pfa_energy,
                             pfa_second_order, pfa_validity, plane_sphere_force,
                             profile_spectrum)
from nanocasimir.reflection import MirrorSpec


def ideal(l):
    return casimir_ideal_energy(1.0, l)


def test_flat_profiles_reduce_to_plane_plane():
    p = SurfaceProfile.flat(8, 4, 1e-8, 1e-8)
    assert pfa_energy(p, p, ideal, 1e-6) == pytest.approx(ideal(1e-6), rel=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.8), st.floats(0, 1))
def test_sinusoid_against_closed_form(ratio, shift):
    L = 1e-6
    a = ratio * L
    p1 = SurfaceProfile.sinusoid(a, 3e-6, n=2048, phase_shift=shift * 3e-6)
    p2 = SurfaceProfile.flat(2048, 1, p1.dx, p1.dy)
    # <(L - a cos)^-3> = (2 L^2 + a^2) / (2 (L^2 - a^2)^(5/2))
    exact = ideal(1.0) * (2 * L**2 + a**2) / (2 * (L**2 - a**2) ** 2.5)
    assert pfa_energy(p1, p2, ideal, L) == pytest.approx(exact, rel=1e-9)


def test_pfa_is_symmetric_in_plates():
    rng = np.random.default_rng(3)
    h1 = rng.standard_normal((16, 16)) * 1e-9
    h2 = rng.standard_normal((16, 16)) * 2e-9
    p1 = SurfaceProfile(h1 - h1.mean(), 1e-8, 1e-8)
    p2 = SurfaceProfile(h2 - h2.mean(), 1e-8, 1e-8)
    assert pfa_energy(p1, p2, ideal, 1e-7) == pytest.approx(pfa_energy(p2, p1, ideal, 1e-7),
                                                            rel=1e-14)


def test_pfa_roughness_raises_magnitude():
    # the energy is convex in L, so averaging over gaps increases |E|
    p1 = SurfaceProfile.sinusoid(2e-8, 1e-6, n=128)
    p2 = SurfaceProfile.flat(128, 1, p1.dx, p1.dy)
    assert pfa_energy(p1, p2, ideal, 1e-7) < ideal(1e-7)


def test_second_order_converges_cubically():
    L = 1e-6
    errs = []
    for a in (4e-8, 2e-8, 1e-8):
        p1 = SurfaceProfile.sinusoid(a, 5e-6, n=512)
        p2 = SurfaceProfile(np.roll(p1.h, 100, axis=1) * 0.7, p1.dx, p1.dy)
        full = pfa_energy(p1, p2, ideal, L)
        second = pfa_second_order(p1, p2, ideal(L), casimir_ideal_curvature(1.0, L))
        errs.append(abs(full - second))
    assert errs[0] / errs[1] > 8 and errs[1] / errs[2] > 8


def test_contact_and_validation():
    p1 = SurfaceProfile.sinusoid(1e-7, 1e-6, n=64)
    p2 = SurfaceProfile.flat(64, 1, p1.dx, p1.dy)
    with pytest.raises(ContactError):
        pfa_energy(p1, p2, ideal, 0.9e-7)
    with pytest.raises(ProfileError):
        pfa_energy(p1, SurfaceProfile.flat(32, 1), ideal, 1e-6)
    with pytest.raises(ProfileError):
        SurfaceProfile(np.ones((4, 4)), 1.0, 1.0)
    with pytest.raises(ProfileError):
        SurfaceProfile(np.zeros((4, 4)), 0.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 40), st.integers(4, 40), st.integers(0, 2**31))
def test_parseval(nx, ny, seed):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((ny, nx))
    p = SurfaceProfile((h - h.mean()) * 1e-9, 2e-9, 5e-9)
    assert profile_spectrum(p).integrate() == pytest.approx(p.mean_square(), rel=1e-12)


def test_spectrum_of_sinusoid():
    a, lam = 3e-9, 1e-6
    p = SurfaceProfile.sinusoid(a, lam, n=64)
    s = profile_spectrum(p)
    live = s.values > 1e-12 * s.values.max()
    np.testing.assert_allclose(s.kmod[live], 2 * math.pi / lam, rtol=1e-12)
    assert s.integrate() == pytest.approx(a**2 / 2, rel=1e-12)


def test_gaussian_spectrum_normalized():
    s = ProfileSpectrum.gaussian(rms=2e-9, corr_length=5e-8)
    assert s.integrate() == pytest.approx(4e-18, rel=1e-10)


def test_spectra_add():
    rng = np.random.default_rng(1)
    h = rng.standard_normal((8, 8))
    p = SurfaceProfile(h - h.mean(), 1.0, 1.0)
    s = profile_spectrum(p)
    assert (s + s).integrate() == pytest.approx(2 * p.mean_square())
    with pytest.raises(ProfileError):
        s + ProfileSpectrum.gaussian(1.0, 1.0)


def test_plane_sphere_force():
    e = -1e-3
    assert plane_sphere_force(1e-4, 1e-7, e) == pytest.approx(2 * math.pi * 1e-4 * 1e-3)
    gold = MirrorSpec(Plasma.from_wavelength(136e-9))
    f = plane_sphere_force(1e-4, 1e-7,
                           lambda l: casimir_energy(CavityConfig.symmetric(gold, l)).value)
    assert f > 0
    with pytest.warns(PFAValidityWarning):
        plane_sphere_force(1e-6, 2e-7, e)
    with pytest.raises(ValueError):
        plane_sphere_force(1e-7, 2e-7, e)


def test_validity_ratio():
    p = SurfaceProfile.sinusoid(1e-9, 1e-6, n=256, ny=1)
    assert pfa_validity(p, 1e-7) == pytest.approx(p.correlation_length / 1e-7)
    assert math.isinf(SurfaceProfile.flat(4, 4).correlation_length)


def test_load_profile(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("# heights\n3 2 1e-8 2e-8\n1e-9 -1e-9 0\n2e-9 -2e-9 0\n")
    p = load_profile(f)
    assert p.shape == (2, 3) and p.dy == 2e-8
    f.write_text("3 2 1e-8 2e-8\n1e-9 -1e-9\n")
    with pytest.raises(ProfileError, match="expected 6"):
        load_profile(f)
    f.write_text("3 2\n")
    with pytest.raises(ProfileError):
        load_profile(f)


def test_tabulated_energy():
    t = TabulatedEnergy(ideal, 1e-7, 1e-5, rel_tol=1e-9)
    probe = np.geomspace(1.1e-7, 9e-6, 13)
    np.testing.assert_allclose(t(probe), ideal(probe), rtol=1e-8)
    with pytest.raises(ValueError):
        t(1e-8)
