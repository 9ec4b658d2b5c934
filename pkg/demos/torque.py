"""Torque between two misaligned corrugated plates.

For a corrugation of length L_y the torque is largest at
theta* = x* lambda_C / (pi L_y); its size follows k |G_C(k)|.  This
prints the peak torque per unit area against k for plasma and perfect
mirrors at L = 1 um, next to the proximity-force value.

    python demos/torque.py                  # about half a minute
"""

import warnings

import numpy as np

from nanocasimir.nonspecular import (CorrugationPair, DielectricMirror, PerfectReflector,
                                     PerturbationValidityWarning, kernel, max_torque,
                                     max_torque_angle)

L, Ly = 1e-6, 24e-6
gold, perfect = DielectricMirror.plasma(136e-9), PerfectReflector()
g0 = kernel(gold, 0.0, L).value

print("torque per unit area in N m / m^2")
print("kL     theta* [mrad]   tau         tau_PFA     tau_perfect")
with warnings.catch_warnings():
    warnings.simplefilter("ignore", PerturbationValidityWarning)
    for kL in np.linspace(0.5, 5.0, 10):
        pair = CorrugationPair.from_k(kL / L, a1=14e-9, a2=14e-9, Lx=Ly, Ly=Ly)
        tau = max_torque(pair, kernel(gold, kL / L, L).value)
        tau_pfa = max_torque(pair, g0)
        tau_pf = max_torque(pair, kernel(perfect, kL / L, L).value)
        print(f"{kL:4.1f}   {max_torque_angle(pair) * 1e3:12.3f}   {tau:.4e}  "
              f"{tau_pfa:.4e}  {tau_pf:.4e}")
