"""Casimir force and energy between plane mirrors at zero temperature.

The imaginary-frequency integrals are evaluated in the dimensionless
variables v = kappa L and u = xi L / c = v s with s in [0, 1]:

    F = hbar c A / (2 pi^2 L^4) int dv v^3 int ds  sum_p rho / (1 - rho)
    E = hbar c A / (4 pi^2 L^3) int dv v^2 int ds  sum_p ln(1 - rho)

with rho = r1 r2 exp(-2 v).  For perfect mirrors both reduce to the ideal
Casimir expressions, which the tests use as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import C, HBARC, PI
from .quadrature import ConvergenceError, QuadratureSpec, integrate
from .reflection import MirrorSpec, mirror_amplitudes

__all__ = [
    "CavityConfig", "CasimirResult", "EtaFactors", "casimir_ideal_force", "casimir_ideal_energy",
    "casimir_ideal_curvature", "casimir_force", "casimir_energy", "eta_factors",
    "energy_curvature", "energy_curvature_quad",
]


@dataclass(frozen=True)
class CavityConfig:
    mirror1: MirrorSpec
    mirror2: MirrorSpec
    L: float
    A: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("separation L must be > 0")
        if not self.A > 0:
            raise ValueError("area A must be > 0")

    def at(self, L: float) -> "CavityConfig":
        return replace(self, L=L)

    @classmethod
    def symmetric(cls, mirror: MirrorSpec, L: float, A: float = 1.0) -> "CavityConfig":
        return cls(mirror, mirror, L, A)


@dataclass(frozen=True)
class CasimirResult:
    value: float
    est_error: float
    evals: int


@dataclass(frozen=True)
class EtaFactors:
    eta_F: float
    eta_E: float
    error_F: float
    error_E: float

    def __iter__(self):
        yield self.eta_F
        yield self.eta_E


def casimir_ideal_force(A: float, L: float) -> float:
    """pi^2 hbar c A / (240 L^4); positive means attraction."""
    return PI**2 * HBARC * A / (240.0 * L**4)


def casimir_ideal_energy(A: float, L: float) -> float:
    return -PI**2 * HBARC * A / (720.0 * L**3)


def casimir_ideal_curvature(A: float, L: float) -> float:
    """d^2 E / dL^2 of the ideal energy, -pi^2 hbar c A / (60 L^5)."""
    return -PI**2 * HBARC * A / (60.0 * L**5)


# integrand families: (power of v, function of rho)
def _force_fn(rho):
    return rho / (1.0 - rho)


def _energy_fn(rho):
    return np.log1p(-rho)


def _curvature_fn(rho):
    return rho / (1.0 - rho) ** 2


def _tail_bound(power: int, V: float) -> float:
    """Bound on 2 int_V^inf v^n e^{-2v} / (1 - e^{-2v}) dv (both polarizations, |r| <= 1)."""
    s = 0.0
    for j in range(power + 1):
        s += math.factorial(power) / math.factorial(power - j) * V ** (power - j) / 2.0 ** (j + 1)
    return 2.0 * math.exp(-2.0 * V) * s / (1.0 - math.exp(-2.0 * V))


# ideal values of the dimensionless integrals, used as scale for the absolute floor
_IDEAL = {3: PI**4 / 120.0, 2: PI**4 / 180.0, 4: PI**4 / 120.0}


def _dimensionless(cavity: CavityConfig, power: int, fn, quad: QuadratureSpec):
    L = cavity.L
    m1, m2 = cavity.mirror1, cavity.mirror2
    inner_spec = QuadratureSpec(rel_tol=0.1 * quad.rel_tol, abs_tol=0.0, max_evals=quad.max_evals)
    floor = 1e-15 * _IDEAL[power]
    evals = 0

    def outer(v):
        nonlocal evals

        def inner(s):
            u = s[:, None] * v[None, :]
            xi = u * (C / L)
            kap = np.broadcast_to(v[None, :] / L, u.shape)
            r1te, r1tm = mirror_amplitudes(m1, xi, kap)
            r2te, r2tm = mirror_amplitudes(m2, xi, kap)
            prop = np.exp(-2.0 * v)[None, :]
            return fn(r1te * r2te * prop) + fn(r1tm * r2tm * prop)

        res = integrate(inner, 0.0, 1.0, replace(inner_spec, abs_tol=floor))
        evals += res.evals * v.size
        return v**power * res.value

    V = 20.0
    outer_spec = QuadratureSpec(rel_tol=0.5 * quad.rel_tol, abs_tol=floor, max_evals=quad.max_evals)
    while True:
        res = integrate(outer, 0.0, V, outer_spec, breakpoints=(0.5, 2.0, 5.0))
        tail = _tail_bound(power, V)
        if tail <= max(1e-3 * quad.rel_tol * abs(res.value), floor) or V > 400:
            break
        V += 10.0
    err = res.error + 0.1 * quad.rel_tol * abs(res.value) + tail
    return res.value, err, evals


def _check(value, err, quad, scale, evals, what):
    if err > max(quad.rel_tol * abs(value), quad.abs_tol / scale if scale else 0.0, 1e-15):
        raise ConvergenceError(f"{what}: error estimate {err:.3e} exceeds tolerance",
                               value=value * scale, error=err * scale, evals=evals)


def casimir_force(cavity: CavityConfig, quad: QuadratureSpec | None = None) -> CasimirResult:
    """Force between the mirrors (N); positive for attraction."""
    quad = quad or QuadratureSpec()
    scale = HBARC * cavity.A / (2.0 * PI**2 * cavity.L**4)
    val, err, evals = _dimensionless(cavity, 3, _force_fn, quad)
    _check(val, err, quad, scale, evals, "casimir_force")
    return CasimirResult(val * scale, err * abs(scale), evals)


def casimir_energy(cavity: CavityConfig, quad: QuadratureSpec | None = None) -> CasimirResult:
    """Interaction energy (J); negative for a bound configuration."""
    quad = quad or QuadratureSpec()
    scale = HBARC * cavity.A / (4.0 * PI**2 * cavity.L**3)
    val, err, evals = _dimensionless(cavity, 2, _energy_fn, quad)
    _check(val, err, quad, scale, evals, "casimir_energy")
    return CasimirResult(val * scale, err * abs(scale), evals)


def energy_curvature_quad(cavity: CavityConfig, quad: QuadratureSpec | None = None) -> CasimirResult:
    """d^2E/dL^2 by direct quadrature of the L-differentiated integrand.

    Independent of :func:`energy_curvature`, which differentiates numerically.
    """
    quad = quad or QuadratureSpec()
    scale = -HBARC * cavity.A / (PI**2 * cavity.L**5)
    val, err, evals = _dimensionless(cavity, 4, _curvature_fn, quad)
    _check(val, err, quad, scale, evals, "energy_curvature_quad")
    return CasimirResult(val * scale, err * abs(scale), evals)


def eta_factors(cavity: CavityConfig, quad: QuadratureSpec | None = None) -> EtaFactors:
    """Reduction factors F / F_Cas and E / E_Cas."""
    f = casimir_force(cavity, quad)
    e = casimir_energy(cavity, quad)
    fc = casimir_ideal_force(cavity.A, cavity.L)
    ec = casimir_ideal_energy(cavity.A, cavity.L)
    return EtaFactors(f.value / fc, e.value / ec, f.est_error / fc, e.est_error / abs(ec))


def energy_curvature(cavity: CavityConfig, quad: QuadratureSpec | None = None,
                     step: float | None = None, tol: float = 1e-4) -> CasimirResult:
    """d^2E/dL^2 from central second differences with Richardson extrapolation.

    Differences at steps h, h/2, h/4 give two extrapolated values; their
    spread is the error estimate.  The energy is integrated at
    rel_tol <= 1e-11 so that difference noise stays far below ``tol``.
    """
    quad = quad or QuadratureSpec()
    L = cavity.L
    h = step if step is not None else 0.04 * L
    if not 0 < h < 0.5 * L:
        raise ValueError("step must satisfy 0 < step < L/2")
    fine = replace(quad, rel_tol=min(quad.rel_tol, 1e-11))
    cache = {}
    evals = 0

    def energy(x):
        nonlocal evals
        if x not in cache:
            r = casimir_energy(cavity.at(x), fine)
            cache[x] = r.value
            evals += r.evals
        return cache[x]

    e0 = energy(L)
    d = []
    for hh in (h, h / 2, h / 4):
        d.append((energy(L + hh) - 2.0 * e0 + energy(L - hh)) / hh**2)
    r1 = (4.0 * d[1] - d[0]) / 3.0
    r2 = (4.0 * d[2] - d[1]) / 3.0
    err = abs(r2 - r1)
    if err > tol * abs(r2):
        raise ConvergenceError(
            f"energy_curvature: Richardson spread {err / abs(r2):.2e} > {tol:.1e}; "
            f"tighten rel_tol or change step", value=r2, error=err, evals=evals)
    return CasimirResult(r2, err, evals)
