"""Perturbation providers: mirror models that supply non-specular amplitudes.

A provider turns a separation L and dimensionless imaginary frequencies
u = xi L / c into an :class:`~.spm.InterfaceSolver`, with all
wavevectors measured in units of 1/L.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from ..constants import C
from ..materials import DielectricModel, Plasma
from .spm import imaginary_axis_solver


class ContractViolation(RuntimeError):
    """Provider amplitudes disagree with their own specular limit."""


class PerturbationProvider:
    name = "abstract"

    def solver(self, u, L: float):
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def content_hash(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def specular(self, u, kmod, L: float):
        """(r_TE, r_TM) in the Fresnel sign convention at |K| = kmod (units 1/L)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        kmod = np.broadcast_to(np.asarray(kmod, dtype=float), u.shape)
        K = np.stack([kmod, np.zeros_like(kmod)], axis=-1)
        _, r0, _ = self.solver(u, L).zeroth(K)
        return r0[:, 0, 0].real, -r0[:, 1, 1].real

    def self_test(self, L: float, rtol: float = 1e-9) -> float:
        """Check rho(K, K) = 2 kappa r0 on a few sample modes.

        This is the displacement derivative of the specular amplitude, the
        property the zero-k limit of every kernel rests on.  Returns the
        worst relative deviation; raises :class:`ContractViolation` above
        ``rtol``.
        """
        u = np.array([0.05, 0.4, 1.0, 2.5, 6.0])
        K = np.array([[0.3, 0.0], [0.1, 0.7], [2.0, -1.0], [0.0, 0.05], [4.0, 3.0]])
        s = self.solver(u, L)
        z = s.zeroth(K)
        rho, _, _ = s.first(K, np.zeros_like(K), zeroth=z)
        kap = np.sqrt(u**2 + np.sum(K**2, axis=1))
        want = 2.0 * kap[:, None, None] * z[1]
        scale = np.maximum(np.abs(want), 1e-300)
        dev = float(np.max(np.abs(rho - want) / np.max(scale, axis=(1, 2), keepdims=True)))
        if not dev <= rtol:
            raise ContractViolation(
                f"{self.name}: first-order specular limit off by {dev:.3e} (rho(K,K) != 2 kappa r)")
        return dev


@dataclass(frozen=True)
class PerfectReflector(PerturbationProvider):
    name = "perfect"

    def solver(self, u, L: float):
        return imaginary_axis_solver(u)

    def describe(self):
        return {"provider": "perfect"}


@dataclass(frozen=True)
class DielectricMirror(PerturbationProvider):
    """Bulk local dielectric (plasma, Drude, oscillator, tabulated).

    Lossy or tabulated models are accepted but only the plasma model is
    cross-checked in the test suite; treat others as experimental.
    """

    material: DielectricModel
    name = "dielectric"

    def solver(self, u, L: float):
        u = np.asarray(u, dtype=float)
        xi = u * (C / L)
        w = self.material.xi2_chi(xi) * (L / C) ** 2
        return imaginary_axis_solver(u, w)

    def describe(self):
        return {"provider": "dielectric", "material": self.material.describe()}

    @classmethod
    def plasma(cls, lambda_p: float = 136e-9) -> "DielectricMirror":
        return cls(Plasma.from_wavelength(lambda_p))
