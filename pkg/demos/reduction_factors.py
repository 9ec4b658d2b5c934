"""How much of the ideal Casimir force survives for gold-like mirrors.

Prints the force and energy reduction factors for a plasma model
(lambda_P = 136 nm) from 10 nm to 10 um, then the same at two slab
thicknesses of a silicon-like film.

    python demos/reduction_factors.py
"""

import numpy as np

from nanocasimir import CavityConfig, MirrorSpec, Oscillator, Plasma, casimir_force, eta_factors

gold = MirrorSpec(Plasma.from_wavelength(136e-9))
print("L [nm]     eta_F     eta_E")
for L in np.geomspace(10e-9, 10e-6, 13):
    eta = eta_factors(CavityConfig.symmetric(gold, L))
    print(f"{L * 1e9:8.1f}  {eta.eta_F:8.5f}  {eta.eta_E:8.5f}")

# A thin film reflects less than the bulk once the gap exceeds its thickness.
si = Oscillator.silicon()
print("\nsilicon-like film, F_slab / F_bulk")
print("L [nm]   D = 20 nm   D = 200 nm")
for L in (20e-9, 200e-9, 2e-6):
    bulk = casimir_force(CavityConfig.symmetric(MirrorSpec(si), L)).value
    ratios = [casimir_force(CavityConfig.symmetric(MirrorSpec(si, thickness=D), L)).value / bulk
              for D in (20e-9, 200e-9)]
    print(f"{L * 1e9:7.0f}   {ratios[0]:9.4f}   {ratios[1]:9.4f}")
