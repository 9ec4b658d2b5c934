"""Lateral force and misalignment torque between corrugated plates.

Profiles h1 = a1 cos(k x) and h2 = a2 cos(k (x - b)) give a cross energy

    dE = A (a1 a2 / 2) cos(k b) G_C(k).

G_C < 0 here, so dE is minimal at b = 0 and the lateral force
-d(dE)/db pulls the corrugations back into register.  Rotating plate 2
by theta over a L_x by L_y section multiplies dE by
sinc(k L_y theta / 2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..constants import PI
from .kernels import KernelQuadrature, separation_integrated_kernel
from .providers import PerturbationProvider
from .response import ResponseKernel


class PerturbationValidityWarning(UserWarning):
    """Parameters outside the regime where second-order results are reliable."""


@dataclass(frozen=True)
class CorrugationPair:
    """Two sinusoidal corrugations of common wavelength ``lambda_c`` (SI units)."""

    a1: float
    a2: float
    lambda_c: float
    b: float = 0.0
    theta: float = 0.0
    Lx: float | None = None
    Ly: float | None = None
    R: float | None = None

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError("corrugation amplitudes must be > 0")
        if not self.lambda_c > 0:
            raise ValueError("lambda_c must be > 0")
        for name in ("Lx", "Ly", "R"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def k(self) -> float:
        return 2.0 * PI / self.lambda_c

    @classmethod
    def from_k(cls, k: float, **kw) -> "CorrugationPair":
        return cls(lambda_c=2.0 * PI / k, **kw)

    def validity(self, L: float, lambda_p: float | None = None) -> list[str]:
        """Human-readable perturbation-condition violations (empty when fine)."""
        out = []
        scales = {"L": L, "lambda_C": self.lambda_c}
        if lambda_p is not None:
            scales["lambda_P"] = lambda_p
        smallest = min(scales, key=scales.get)
        amax = max(self.a1, self.a2)
        if amax > 0.1 * scales[smallest]:
            out.append(f"amplitude {amax:.3g} m is not small against {smallest} = "
                       f"{scales[smallest]:.3g} m (perturbative regime needs a << L, lambda_C, lambda_P)")
        if self.Ly is not None and self.k * self.Ly < 10:
            out.append(f"k L_y = {self.k * self.Ly:.3g} is not >> 1")
        if self.Lx is not None and self.Ly is not None and self.Lx > self.Ly:
            out.append("L_x exceeds L_y; the long-line torque formula assumes L_x <~ L_y")
        return out


def _warn(msgs):
    for m in msgs:
        warnings.warn(m, PerturbationValidityWarning, stacklevel=3)


def _gc(pair: CorrugationPair, kern) -> float:
    if isinstance(kern, ResponseKernel):
        if kern.kind != "corrugation":
            raise ValueError("need a corrugation kernel")
        return float(kern(pair.k))
    return float(kern)


def lateral_energy(pair: CorrugationPair, kern, A: float) -> float:
    """A (a1 a2 / 2) cos(k b) G_C(k) in J.  ``kern``: ResponseKernel or a G_C value."""
    return A * 0.5 * pair.a1 * pair.a2 * math.cos(pair.k * pair.b) * _gc(pair, kern)


def lateral_force_pp(pair: CorrugationPair, kern, A: float) -> float:
    """-d(dE)/db = A (a1 a2 / 2) k sin(k b) G_C(k) in N, along +b."""
    return A * 0.5 * pair.a1 * pair.a2 * pair.k * math.sin(pair.k * pair.b) * _gc(pair, kern)


@dataclass(frozen=True)
class LateralForceResult:
    value: float
    est_error: float
    pfa_value: float
    warnings: tuple = field(default_factory=tuple)


def lateral_force_ps(pair: CorrugationPair, provider: PerturbationProvider, L: float,
                     R: float | None = None, provider2: PerturbationProvider | None = None,
                     quad: KernelQuadrature | None = None,
                     pfa_integral: float | None = None) -> LateralForceResult:
    """Plane-sphere lateral force pi a1 a2 k R sin(k b) int_L^inf G_C(k, L') dL'.

    ``pfa_value`` replaces G_C(k, L') by G_C(0, L'); pass ``pfa_integral``
    (J/m^3) to reuse it across a k sweep.  Validity problems are returned in
    ``warnings`` and also emitted as :class:`PerturbationValidityWarning`.
    """
    R = R if R is not None else pair.R
    if R is None or not R > 0:
        raise ValueError("plane-sphere force needs a sphere radius R > 0")
    msgs = []
    lam_p = _lambda_p(provider)
    msgs += pair.validity(L, lam_p)
    if L / R >= 0.1:
        msgs.append(f"L/R = {L / R:.3g} is not small")
    if R * L < 10 * pair.lambda_c**2:
        msgs.append(f"R L = {R * L:.3g} m^2 is not >> lambda_C^2 = {pair.lambda_c**2:.3g} m^2")
    _warn(msgs)
    pref = PI * pair.a1 * pair.a2 * pair.k * R * math.sin(pair.k * pair.b)
    iv = separation_integrated_kernel(provider, pair.k, L, provider2=provider2, quad=quad)
    if pfa_integral is None:
        pfa_integral = separation_integrated_kernel(provider, 0.0, L, provider2=provider2,
                                                    quad=quad, self_test=False).value
    return LateralForceResult(pref * iv.value, abs(pref) * iv.est_error, pref * pfa_integral,
                              tuple(msgs))


def _lambda_p(provider):
    mat = getattr(provider, "material", None)
    return getattr(mat, "lambda_p", None) if mat is not None else None


def lateral_force_peak(provider: PerturbationProvider, L: float,
                       kL_bounds: tuple = (0.5, 6.0), quad: KernelQuadrature | None = None,
                       xtol: float = 1e-3) -> float:
    """k (rad/m) maximizing k |int_L^inf G_C(k, L') dL'|, i.e. the plane-sphere
    lateral force amplitude at fixed amplitudes and radius."""
    provider.self_test(L)

    def neg(kL):
        v = separation_integrated_kernel(provider, kL / L, L, quad=quad, self_test=False).value
        return -kL * abs(v)

    res = minimize_scalar(neg, bounds=kL_bounds, method="bounded", options={"xatol": xtol})
    return float(res.x) / L


def _sinc(x):
    return np.sinc(np.asarray(x, dtype=float) / PI)


def _dsinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, -x / 3.0 + x**3 / 30.0, (xs * np.cos(xs) - np.sin(xs)) / xs**2)


def _reduce(theta):
    """Map theta onto (-pi/2, pi/2]: turning a plate by pi leaves its corrugation unchanged."""
    theta = np.asarray(theta, dtype=float)
    return -((PI / 2 - theta) % PI) + PI / 2


def _need_ly(pair):
    if pair.Ly is None:
        raise ValueError("torque formulas need the corrugation length Ly")
    _warn([m for m in pair.validity(float("inf")) if "amplitude" not in m])


def torque_energy(pair: CorrugationPair, kern, theta=None):
    """(a1 a2 / 2) G_C cos(k b) sinc(k L_y theta / 2), energy per area (J/m^2)."""
    _need_ly(pair)
    theta = pair.theta if theta is None else theta
    x = 0.5 * pair.k * pair.Ly * _reduce(theta)
    out = 0.5 * pair.a1 * pair.a2 * _gc(pair, kern) * math.cos(pair.k * pair.b) * _sinc(x)
    return float(out) if np.ndim(out) == 0 else out


def torque(pair: CorrugationPair, kern, theta=None):
    """-d/dtheta of :func:`torque_energy`, torque per area (N m / m^2)."""
    _need_ly(pair)
    theta = pair.theta if theta is None else theta
    half = 0.5 * pair.k * pair.Ly
    x = half * _reduce(theta)
    out = -0.5 * pair.a1 * pair.a2 * _gc(pair, kern) * math.cos(pair.k * pair.b) * half * _dsinc(x)
    return float(out) if np.ndim(out) == 0 else out


def _xstar() -> float:
    """Positive root of (2 - x^2) sin x = 2 x cos x, where |d sinc/dx| peaks."""
    return brentq(lambda x: (2.0 - x * x) * math.sin(x) - 2.0 * x * math.cos(x), 1.5, 2.5,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps)


X_STAR = _xstar()


def max_torque_angle(pair: CorrugationPair) -> float:
    """theta* = 2 x* / (k L_y) = x* lambda_C / (pi L_y), independent of G_C and b."""
    _need_ly(pair)
    return 2.0 * X_STAR / (pair.k * pair.Ly)


def max_torque(pair: CorrugationPair, kern) -> float:
    """|torque| at theta* (N m / m^2)."""
    return abs(torque(pair, kern, max_torque_angle(pair)))
