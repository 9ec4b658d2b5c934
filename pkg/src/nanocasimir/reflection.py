"""Specular reflection amplitudes at imaginary frequencies.

Amplitudes are seen from the vacuum gap and follow the Fresnel sign
convention: a perfect mirror has r_TE = -1 and r_TM = +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .constants import C
from .materials import DielectricModel, DomainError


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class TransverseMode:
    k: float
    xi: float
    p: Polarization

    def __post_init__(self):
        if self.k < 0 or self.xi < 0:
            raise ValueError("k and xi must be >= 0")


@dataclass(frozen=True)
class MirrorSpec:
    """A mirror: bulk (``thickness is None``) or slab of thickness ``thickness``.

    ``perfect=True`` ignores the material entirely.
    """

    material: DielectricModel | None = None
    thickness: float | None = None
    perfect: bool = False

    def __post_init__(self):
        if not self.perfect and self.material is None:
            raise ValueError("a non-perfect mirror needs a material")
        if self.thickness is not None and not self.thickness > 0:
            raise ValueError("slab thickness must be > 0")

    @classmethod
    def perfect_mirror(cls) -> "MirrorSpec":
        return cls(perfect=True)

    def describe(self) -> dict:
        if self.perfect:
            return {"perfect": True}
        d = {"material": self.material.describe()}
        if self.thickness is not None:
            d["thickness"] = self.thickness
        return d


def kappa(xi, k):
    """sqrt(k^2 + xi^2/c^2)."""
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any((xi == 0) & (k == 0)):
        raise DomainError("kappa undefined at xi = k = 0")
    return np.sqrt(k**2 + (xi / C) ** 2)


def _transmitted_wavenumber(xi2_chi, ckappa):
    """c * sqrt(xi^2 (eps - 1) + c^2 kappa^2) / c, returned as c*kappa_t."""
    return np.sqrt(xi2_chi + ckappa**2)


def fresnel_pair(xi, kap, xi2_chi):
    """(r_TE, r_TM) for a bulk medium, written without dividing by xi.

    ``xi2_chi`` is xi^2 (eps - 1); eps xi^2 = xi^2 + xi2_chi.  At xi -> 0
    this gives r_TM -> +1 for conductors without evaluating eps.
    """
    xi = np.asarray(xi, dtype=float)
    ck = C * np.asarray(kap, dtype=float)
    s = _transmitted_wavenumber(xi2_chi, ck)
    r_te = -(s - ck) / (s + ck)
    xi2 = xi**2
    eps_xi2 = xi2 + xi2_chi
    num = s * xi2 - ck * eps_xi2
    den = s * xi2 + ck * eps_xi2
    with np.errstate(invalid="ignore", divide="ignore"):
        r_tm = np.where(den == 0, 0.0, -num / np.where(den == 0, 1.0, den))
    return r_te, r_tm


def fresnel(mode: TransverseMode, eps: float) -> float:
    """Bulk Fresnel amplitude for one mode and permittivity ``eps`` >= 1."""
    if eps < 1:
        raise ValueError("eps must be >= 1")
    if np.isinf(eps):
        return perfect_amplitude(mode)
    ck = C * float(kappa(mode.xi, mode.k))
    s = float(np.sqrt(mode.xi**2 * (eps - 1.0) + ck**2))
    if mode.p is Polarization.TE:
        return -(s - ck) / (s + ck)
    return -(s - ck * eps) / (s + ck * eps)


def slab_factor(r, delta):
    """Fabry-Perot combination r (1 - e^{-2 delta}) / (1 - r^2 e^{-2 delta})."""
    # exp underflows to 0 cleanly for large delta; no NaN path
    two_delta = 2.0 * np.asarray(delta, dtype=float)
    return r * -np.expm1(-two_delta) / (1.0 - r * r * np.exp(-two_delta))


def slab_pair(xi, kap, xi2_chi, D: float):
    r_te, r_tm = fresnel_pair(xi, kap, xi2_chi)
    delta = D * _transmitted_wavenumber(xi2_chi, C * np.asarray(kap, dtype=float)) / C
    return slab_factor(r_te, delta), slab_factor(r_tm, delta)


def slab_amplitude(mode: TransverseMode, eps: float, D: float) -> float:
    if not D > 0:
        raise ValueError("D must be > 0")
    r = fresnel(mode, eps)
    s = float(np.sqrt(mode.xi**2 * (eps - 1.0) + (C * kappa(mode.xi, mode.k)) ** 2))
    return float(slab_factor(r, D * s / C))


def perfect_amplitude(mode: TransverseMode) -> float:
    return -1.0 if mode.p is Polarization.TE else 1.0


def mirror_amplitudes(mirror: MirrorSpec, xi, kap):
    """Vectorized (r_TE, r_TM) of a mirror at imaginary frequencies ``xi``."""
    xi = np.asarray(xi, dtype=float)
    kap = np.asarray(kap, dtype=float)
    shape = np.broadcast(xi, kap).shape
    if mirror.perfect:
        return np.full(shape, -1.0), np.full(shape, 1.0)
    chi = np.broadcast_to(mirror.material.xi2_chi(xi), shape)
    if mirror.thickness is None:
        return fresnel_pair(xi, kap, chi)
    return slab_pair(xi, kap, chi, mirror.thickness)


def open_loop_rho(cavity, mode: TransverseMode) -> float:
    """r1 r2 exp(-2 kappa L) for one mode of ``cavity`` (a CavityConfig)."""
    L = cavity.L
    if not L > 0:
        raise ValueError("L must be > 0")
    kap = kappa(mode.xi, mode.k)
    i = 0 if mode.p is Polarization.TE else 1
    r1 = mirror_amplitudes(cavity.mirror1, mode.xi, kap)[i]
    r2 = mirror_amplitudes(cavity.mirror2, mode.xi, kap)[i]
    return float(r1 * r2 * np.exp(-2.0 * kap * L))


def field_ratio_g(rho: complex) -> float:
    """Intracavity/outside energy ratio (1 - |rho|^2) / |1 - rho|^2 on the real axis."""
    rho = complex(rho)
    if abs(rho) > 1:
        raise DomainError("|rho| must be <= 1")
    den = abs(1.0 - rho) ** 2
    if den == 0:
        raise DomainError("rho = 1: cavity resonance is singular")
    return (1.0 - abs(rho) ** 2) / den
