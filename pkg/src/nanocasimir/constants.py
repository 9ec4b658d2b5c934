"""Physical constants (CODATA 2018 exact/recommended values), SI units."""

import math

HBAR = 1.054571817e-34  # J s
C = 299792458.0  # m/s
HBARC = HBAR * C
PI = math.pi
EV = 1.602176634e-19  # J per eV


def omega_from_wavelength(lam: float) -> float:
    """Angular frequency 2 pi c / lambda (rad/s)."""
    return 2.0 * PI * C / lam


def wavelength_from_omega(omega: float) -> float:
    return 2.0 * PI * C / omega


def as_dict() -> dict:
    return {"hbar": HBAR, "c": C}
