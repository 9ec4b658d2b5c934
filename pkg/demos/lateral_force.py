"""Lateral force between a corrugated plate and a corrugated sphere.

Uses the parameters of a classic measurement (R = 97 um, L = 221 nm,
amplitudes 59 nm and 8 nm) and sweeps the corrugation wavevector.  The
proximity-force column grows like k, while the full result peaks near
k L ~ 2 and then falls off.  The larger amplitude is not small against
the plasma wavelength, which the validity warning reports.

    python demos/lateral_force.py           # about a minute
"""

import math
import warnings

import numpy as np

from nanocasimir.nonspecular import (CorrugationPair, DielectricMirror, lateral_force_peak,
                                     lateral_force_ps, separation_integrated_kernel)

L, R = 221e-9, 97e-6
gold = DielectricMirror.plasma(136e-9)
pfa = separation_integrated_kernel(gold, 0.0, L).value

print("k [1/um]   F_lat [pN]   F_PFA [pN]")
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    for k in np.geomspace(2e6, 3e7, 8):
        pair = CorrugationPair.from_k(k, a1=59e-9, a2=8e-9, b=math.pi / (2 * k), R=R)
        res = lateral_force_ps(pair, gold, L, pfa_integral=pfa)
        print(f"{k * 1e-6:8.2f}   {res.value * 1e12:10.4f}   {res.pfa_value * 1e12:10.4f}")
for msg in sorted({str(w.message) for w in caught}):
    print("warning:", msg)

k_peak = lateral_force_peak(gold, L)
print(f"\npeak at k = {k_peak * 1e-6:.3f} /um, L / lambda_C = {k_peak * L / (2 * math.pi):.4f}")
