"""Second-order response kernels G_C (corrugation) and G_rough (roughness).

Expanding E = hbar int dxi/2pi Tr ln(1 - R1 P R2 P) to second order in the
profiles, with P = exp(-kappa L) and D = 1/(1 - r1 r2 P^2) the specular
dressing, gives (transfer wavevector q, K' = Q - q/2, K'' = Q + q/2):

    G_C(q) = -hbar int dxi/2pi int d^2Q/(2pi)^2
             tr[ (DP)(K'') rho1(K'', K') (DP)(K') rho2(K', K'') ]

    G_rough(q) = -hbar int dxi/2pi int d^2Q/(2pi)^2
             tr[ D P^2 r2 (K') { b(K', q)
                 + 1/2 rho1(K', K'') (P^2 r2 D)(K'') rho1(K'', K') } ]

for a corrugation energy  dE = A (a1 a2 / 2) cos(k b) G_C(k)  and a
roughness energy  dE = A int d^2q/(2pi)^2 sigma(q) G_rough(q)  (profile
on mirror 1, mirror 2 flat).  With rho(K, K) = 2 kappa r and
b(K, 0) = 2 kappa^2 r, both collapse at q = 0 onto the plane-plane
curvature: G_C(0) = E''/A and G_rough(0) = E''/(2A).

In units of L the prefactor is -hbar c / L^5 / (2pi)^3 and the integral
runs over (u, Qx, Qy), done here in spherical coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..constants import HBARC, PI
from ..quadrature import ConvergenceError, QuadratureSpec, gauss_legendre, integrate
from .providers import PerturbationProvider

KINDS = ("corrugation", "roughness")


def _diag(m):
    return np.stack([m[:, 0, 0], m[:, 1, 1]], axis=1)


def _corrugation_parts(p1, p2, L, u, Kp, Kpp, q):
    """Amplitude content of the corrugation trace at each point.

    Returns kappa', kappa'', the round-trip products r1 r2 at K' and K''
    and m[a, b] = rho1[a, b] rho2[b, a] (a polarization at K'', b at K').
    """
    s1 = p1.solver(u, L)
    s2 = s1 if p2 is p1 else p2.solver(u, L)
    z1p, z1pp = s1.zeroth(Kp), s1.zeroth(Kpp)
    z2p, z2pp = (z1p, z1pp) if p2 is p1 else (s2.zeroth(Kp), s2.zeroth(Kpp))
    qv = np.broadcast_to(q, Kp.shape)
    rho1, _, _ = s1.first(Kp, qv, zeroth=z1p)        # K' -> K''
    rho2, _, _ = s2.first(Kpp, -qv, zeroth=z2pp)     # K'' -> K'
    kp = np.sqrt(u**2 + np.sum(Kp**2, axis=1))
    kpp = np.sqrt(u**2 + np.sum(Kpp**2, axis=1))
    ap = (_diag(z1p[1]) * _diag(z2p[1])).real
    app = (_diag(z1pp[1]) * _diag(z2pp[1])).real
    m = (rho1 * np.swapaxes(rho2, 1, 2)).real
    return kp, kpp, ap, app, m


def _corrugation_trace(p1, p2, L, u, Kp, Kpp, q):
    kp, kpp, ap, app, m = _corrugation_parts(p1, p2, L, u, Kp, Kpp, q)
    Pp, Ppp = np.exp(-kp)[:, None], np.exp(-kpp)[:, None]
    dp = Pp / (1.0 - ap * Pp**2)
    dpp = Ppp / (1.0 - app * Ppp**2)
    return np.einsum("na,nab,nb->n", dpp, m, dp)


_LAG_S, _LAG_W = np.polynomial.laguerre.laggauss(32)


def _propagation_integral(kp, kpp, ap, app):
    """J[a, b] = int_1^inf dtau P''(tau) D''_a(tau) P'(tau) D'_b(tau), P = e^{-kappa tau}.

    Gauss-Laguerre in s = alpha (tau - 1) with alpha = kappa' + kappa''.
    """
    alpha = kp + kpp
    tau = 1.0 + _LAG_S[None, :] / alpha[:, None]             # (N, j)
    ep = np.exp(-2.0 * kp[:, None] * tau)
    epp = np.exp(-2.0 * kpp[:, None] * tau)
    gp = 1.0 / (1.0 - ap[:, :, None] * ep[:, None, :])        # (N, b, j)
    gpp = 1.0 / (1.0 - app[:, :, None] * epp[:, None, :])     # (N, a, j)
    J = np.einsum("naj,nbj,j->nab", gpp, gp, _LAG_W)
    return J * (np.exp(-alpha) / alpha)[:, None, None]


def _corrugation_lint_trace(p1, p2, L, u, Kp, Kpp, q):
    kp, kpp, ap, app, m = _corrugation_parts(p1, p2, L, u, Kp, Kpp, q)
    return np.einsum("nab,nab->n", _propagation_integral(kp, kpp, ap, app), m)


def _roughness_trace(p1, p2, L, u, Kp, Kpp, q):
    s1 = p1.solver(u, L)
    qv = np.broadcast_to(q, Kp.shape)
    b, r1p, rho_f = s1.second(Kp, qv)                # rho_f: K' -> K''
    rho_b, _, _ = s1.first(Kpp, -qv)                 # K'' -> K'
    r1pp = s1.zeroth(Kpp)[1]
    if p2 is p1:
        r2p, r2pp = _diag(r1p), _diag(r1pp)
    else:
        s2 = p2.solver(u, L)
        r2p, r2pp = _diag(s2.zeroth(Kp)[1]), _diag(s2.zeroth(Kpp)[1])
    kp = np.sqrt(u**2 + np.sum(Kp**2, axis=1))
    kpp = np.sqrt(u**2 + np.sum(Kpp**2, axis=1))
    P2p, P2pp = np.exp(-2 * kp)[:, None], np.exp(-2 * kpp)[:, None]
    ap = P2p * r2p / (1.0 - _diag(r1p) * r2p * P2p)
    app = P2pp * r2pp / (1.0 - _diag(r1pp) * r2pp * P2pp)
    t = np.einsum("na,na->n", ap, _diag(b))
    t = t + 0.5 * np.einsum("na,nab,nb,nba->n", ap, rho_b, app, rho_f)
    return t.real


_TRACES = {"corrugation": _corrugation_trace, "roughness": _roughness_trace,
           "corrugation_lint": _corrugation_lint_trace}


@dataclass(frozen=True)
class KernelQuadrature:
    """Controls for the (u, Q) integral.

    The radial direction is adaptive; the two angles use Gauss-Legendre
    rules of order ``n_angle`` and are checked against a 1.5x finer rule.
    """

    rel_tol: float = 1e-5
    n_angle: int = 20
    max_angle: int = 96
    r_extent: float = 45.0
    max_evals: int = 20_000_000


@dataclass(frozen=True)
class KernelValue:
    k: float
    L: float
    value: float
    est_error: float
    evals: int


def _dimensionless_kernel(kind, p1, p2, L, kL, n_ang, rel_tol, max_evals):
    trace = _TRACES[kind]
    th, wth = gauss_legendre(n_ang, 0.0, PI / 2)
    ph, wph = gauss_legendre(n_ang, 0.0, PI)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    W = (np.outer(wth, wph) * np.sin(TH) * 2.0).ravel()  # factor 2: Qy -> -Qy symmetry
    cu = np.cos(TH).ravel()
    sx = (np.sin(TH) * np.cos(PH)).ravel()
    sy = (np.sin(TH) * np.sin(PH)).ravel()
    q = np.array([kL, 0.0])
    evals = 0

    def f(r):
        nonlocal evals
        R = np.repeat(r, cu.size)
        u = R * np.tile(cu, r.size)
        Q = np.stack([R * np.tile(sx, r.size), R * np.tile(sy, r.size)], axis=1)
        t = trace(p1, p2, L, u, Q - q / 2, Q + q / 2, q)
        evals += t.size
        return r**2 * (t.reshape(r.size, cu.size) @ W)

    r0 = 0.5 * kL
    rmax = r0 + 45.0
    bps = tuple(x for x in (r0, r0 + 1.0, r0 + 4.0, r0 + 12.0) if 0 < x < rmax)
    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=0.0, max_evals=max_evals)
    res = integrate(f, 0.0, rmax, spec, breakpoints=bps, raise_on_fail=False)
    return res.value, res.error, evals


def _scale(L):
    return -HBARC / L**5 / (2.0 * PI) ** 3


def _converged(key, provider, p2, k, L, quad, scale):
    kL = k * L
    n = quad.n_angle
    tol = quad.rel_tol
    total = 0
    prev, _, ev = _dimensionless_kernel(key, provider, p2, L, kL, n, 0.2 * tol, quad.max_evals)
    total += ev
    while True:
        n2 = int(math.ceil(1.5 * n))
        val, err, ev = _dimensionless_kernel(key, provider, p2, L, kL, n2, 0.2 * tol,
                                             quad.max_evals)
        total += ev
        est = abs(val - prev) + err
        if est <= tol * abs(val):
            return KernelValue(k, L, val * scale, est * abs(scale), total)
        if n2 > quad.max_angle:
            raise ConvergenceError(
                f"{key}(k={k:.4g}, L={L:.4g}): angular refinement stalled at order {n2}, "
                f"relative error {est / abs(val):.2e}", value=val * scale,
                error=est * abs(scale), evals=total)
        prev, n = val, n2


def _prepare(provider, provider2, k, L, quad, self_test):
    if not (k >= 0 and L > 0):
        raise ValueError("need k >= 0 and L > 0")
    p2 = provider2 if provider2 is not None else provider
    if self_test:
        provider.self_test(L)
        if p2 is not provider:
            p2.self_test(L)
    return p2, quad or KernelQuadrature()


def kernel(provider: PerturbationProvider, k: float, L: float, kind: str = "corrugation",
           provider2: PerturbationProvider | None = None,
           quad: KernelQuadrature | None = None, self_test: bool = True) -> KernelValue:
    """G(k) in J/m^4 per unit area and squared amplitude (see module docstring).

    ``provider2`` describes mirror 2 (defaults to ``provider``).  The
    angular order is raised until two successive orders agree to
    ``quad.rel_tol``.  Unless ``self_test`` is off, the providers are
    first checked against their specular limit
    (:meth:`~.providers.PerturbationProvider.self_test`).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    p2, quad = _prepare(provider, provider2, k, L, quad, self_test)
    return _converged(kind, provider, p2, k, L, quad, _scale(L))


def separation_integrated_kernel(provider: PerturbationProvider, k: float, L: float,
                                 provider2: PerturbationProvider | None = None,
                                 quad: KernelQuadrature | None = None,
                                 self_test: bool = True) -> KernelValue:
    """int_L^inf dL' G_C(k, L') in J/m^3.

    Only the propagation factors depend on L', so the L' integral is done
    inside the (u, Q) integrand by Gauss-Laguerre quadrature rather than by
    tabulating G_C over many separations.
    """
    p2, quad = _prepare(provider, provider2, k, L, quad, self_test)
    return _converged("corrugation_lint", provider, p2, k, L, quad, _scale(L) * L)
