import numpy as np
import pytest

from nanocasimir.lifshitz import casimir_ideal_curvature
from nanocasimir.nonspecular import (CacheError, DielectricMirror, ExtrapolationError,
                                     KernelQuadrature, PerfectReflector, ResponseKernel,
                                     roughness_correction)
from nanocasimir.nonspecular.response import CACHE_FORMAT
from nanocasimir.pfa import ProfileSpectrum

L = 200e-9
FAST = KernelQuadrature(rel_tol=1e-4)


@pytest.fixture(scope="module")
def rough():
    return ResponseKernel.tabulate(PerfectReflector(), L, "roughness", kL_max=4.0, n=4, quad=FAST)


@pytest.fixture(scope="module")
def wide():
    return ResponseKernel.tabulate(PerfectReflector(), L, "roughness", kL_max=12.0, n=8, quad=FAST)


def test_tabulate_layout(rough):
    assert rough.k[0] == 0.0 and rough.kmax == pytest.approx(4.0 / L)
    assert len(rough.k) == 5
    assert rough.g0 == pytest.approx(0.5 * casimir_ideal_curvature(1.0, L), rel=1e-4)
    assert rough.model == {"mirror1": {"provider": "perfect"}, "mirror2": {"provider": "perfect"}}
    assert rough.tolerances["rel_tol"] == 1e-4


def test_interpolant_hits_nodes_and_is_flat_at_zero(rough):
    np.testing.assert_allclose(rough(np.array(rough.k)), rough.G, rtol=1e-14)
    h = 1e-3 * rough.k[1]
    assert (rough(h) - rough.g0) / rough.g0 == pytest.approx(0.0, abs=1e-6)
    assert rough.ratio(0.0) == 1.0


def test_extrapolation_refused(rough):
    with pytest.raises(ExtrapolationError):
        rough(1.01 * rough.kmax)
    with pytest.raises(ExtrapolationError):
        rough(-1.0)


def test_threads_do_not_change_values(rough):
    again = ResponseKernel.tabulate(PerfectReflector(), L, "roughness", kL_max=4.0, n=4,
                                    quad=FAST, threads=3)
    assert again.G == rough.G and again.est_error == rough.est_error


def test_cache_roundtrip(tmp_path, rough):
    path = tmp_path / "g.txt"
    rough.save(path)
    text = path.read_text()
    assert text.startswith(f"# format: {CACHE_FORMAT}\n")
    back = ResponseKernel.load(path, expect_model=rough.model)
    assert back == rough


def test_cache_rejects_other_model(tmp_path, rough):
    path = tmp_path / "g.txt"
    rough.save(path)
    with pytest.raises(CacheError, match="different model"):
        ResponseKernel.load(path, expect_model={"mirror1": DielectricMirror.plasma().describe(),
                                                "mirror2": DielectricMirror.plasma().describe()})


def test_cache_detects_tampering(tmp_path, rough):
    path = tmp_path / "g.txt"
    rough.save(path)
    path.write_text(path.read_text().replace('"perfect"', '"perfekt"', 1))
    with pytest.raises(CacheError, match="hash"):
        ResponseKernel.load(path)
    path.write_text("# format: something-else\n0\t1\t0\n")
    with pytest.raises(CacheError):
        ResponseKernel.load(path)
    rough.save(path)
    path.write_text(path.read_text() + "1e9\tnope\t0\n")
    with pytest.raises(CacheError, match="malformed"):
        ResponseKernel.load(path)


def test_kernel_validation():
    with pytest.raises(ValueError):
        ResponseKernel("roughness", L, {}, (1.0, 2.0), (1.0, 1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        ResponseKernel("roughness", L, {}, (0.0, 2.0), (1.0,), (0.0,))


def test_long_wavelength_roughness_is_pfa(rough):
    # correlation length >> L: only k ~ 0 contributes, giving (1/2) E'' <h^2>
    spec = ProfileSpectrum.gaussian(rms=1e-9, corr_length=1e3 * L)
    dE = roughness_correction(spec, rough)
    assert dE == pytest.approx(0.5 * casimir_ideal_curvature(1.0, L) * 1e-18, rel=1e-4)


def test_roughness_beyond_kernel_range(rough):
    with pytest.raises(ExtrapolationError):
        roughness_correction(ProfileSpectrum.gaussian(rms=1e-9, corr_length=0.1 * L), rough)


def test_roughness_requires_roughness_kernel():
    kern = ResponseKernel("corrugation", L, {}, (0.0, 1e7), (1.0, 1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        roughness_correction(ProfileSpectrum.gaussian(1e-9, 1e-6), kern)


@pytest.mark.slow
@pytest.mark.parametrize("corr", [1.0, 1.5, 2.0])
def test_broad_roughness_exceeds_pfa(wide, corr):
    # correlation length ~ L puts weight on the rising part of the kernel
    spec = ProfileSpectrum.gaussian(rms=1e-9, corr_length=corr * L)
    pfa = 0.5 * casimir_ideal_curvature(1.0, L) * 1e-18
    assert roughness_correction(spec, wide) / pfa > 1.0


def test_long_correlation_sits_in_the_dip(rough):
    # the PFA lower bound is not universal: corr_length = 4L lands slightly below it
    spec = ProfileSpectrum.gaussian(rms=1e-9, corr_length=4 * L)
    pfa = 0.5 * casimir_ideal_curvature(1.0, L) * 1e-18
    assert 0.99 < roughness_correction(spec, rough) / pfa < 1.0


@pytest.mark.slow
def test_perfect_roughness_dips_below_pfa():
    # known shallow dip near kL = 0.5, so the PFA bound is not universal
    from nanocasimir.nonspecular import kernel
    g = kernel(PerfectReflector(), 0.5 / L, L, kind="roughness").value
    ratio = g / (0.5 * casimir_ideal_curvature(1.0, L))
    assert 0.99 < ratio < 1.0
