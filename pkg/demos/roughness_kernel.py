"""Beyond the proximity-force approximation: the roughness response.

Tabulates G_rough(k) / G_rough(0) for plasma mirrors at a few
separations.  The ratio is 1 at k -> 0 and grows once the roughness
wavelength drops below the gap, so the proximity-force estimate
undercounts the effect of short-wavelength roughness.  The last block
applies the kernel to a Gaussian roughness spectrum.

    python demos/roughness_kernel.py        # about a minute
"""

from nanocasimir.nonspecular import (DielectricMirror, KernelQuadrature, ResponseKernel,
                                     roughness_correction)
from nanocasimir.pfa import ProfileSpectrum

gold = DielectricMirror.plasma(136e-9)
quad = KernelQuadrature(rel_tol=1e-4)

for L in (50e-9, 200e-9):
    kern = ResponseKernel.tabulate(gold, L, "roughness", kL_max=8.0, n=6, quad=quad)
    print(f"L = {L * 1e9:.0f} nm")
    for k in kern.k[1:]:
        print(f"  kL = {k * L:6.3f}   G/G(0) = {float(kern.ratio(k)):.4f}")

    rms = 1e-9
    for ell in (20 * L, 2 * L):
        spec = ProfileSpectrum.gaussian(rms=rms, corr_length=ell)
        try:
            full = roughness_correction(spec, kern)
        except ValueError as exc:      # spectrum reaches beyond the tabulated k range
            print(f"  correlation length {ell * 1e9:.0f} nm: {exc}")
            continue
        pfa = kern.g0 * rms**2
        print(f"  correlation length {ell * 1e9:5.0f} nm: dE/A = {full:.4e} J/m^2, "
              f"{full / pfa:.3f} x proximity-force value")
