"""Perturbative (Rayleigh) reflection amplitudes of a deformed mirror.

Geometry: the medium fills z < h(r), vacuum is above.  Boundary
conditions are imposed on the tangent vectors (1, 0, h_x) and
(0, 1, h_y) at z = h and Taylor-expanded about z = 0, order by order in
the profile.  Each order leaves a small linear system per transverse
wavevector: 4x4 (reflected + transmitted TE/TM) for a dielectric, 2x2 for
a perfect conductor.

Mode basis (shared by both mirrors of a cavity): TE = z x K_hat for every
wave; TM_up = (|K| z - kz K_hat)/q0 and TM_down = -(|K| z + kz K_hat)/q0.
The basis is mapped onto itself by z -> -z, so a mirror facing down is
described by the same amplitudes as one facing up.  In this basis the
zeroth-order TM amplitude is minus the Fresnel-convention r_TM.

Everything works at complex frequency q0 = omega/c; the imaginary axis
is q0 = i u.  "H" below is k x E, i.e. q0 c B, continuous across the
interface like B itself.

Outputs (last two axes are [out polarization, in polarization]):

* ``zeroth``  r0(K)
* ``first``   rho(K+q, K) per unit Fourier amplitude h[q]
* ``second``  b(K, q): the specular second-order amplitude per |h[q]|^2
  reached through the intermediate wavevector K+q, plus half of the
  direct h^2 term.  The full specular shift of a single Fourier pair is
  b(K, q) + b(K, -q).
"""

from __future__ import annotations

import numpy as np


def _branch_sqrt(z):
    s = np.sqrt(np.asarray(z, dtype=complex))
    return np.where(s.imag < 0, -s, s)


def _cross(a, b):
    return np.stack([
        a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
        a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
        a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
    ], axis=-1)


class _ModeSet:
    """Unit-amplitude plane waves at transverse wavevectors K (N, 2)."""

    def __init__(self, K, q0, epsq0sq=None):
        K = np.asarray(K, dtype=float)
        self.K = K
        kmod = np.hypot(K[:, 0], K[:, 1])
        safe = np.where(kmod > 0, kmod, 1.0)
        khat = np.where(kmod[:, None] > 0, K / safe[:, None], np.array([1.0, 0.0]))
        n = K.shape[0]
        q0 = np.broadcast_to(np.asarray(q0, dtype=complex), (n,))
        self.q0 = q0
        zhat = np.zeros((n, 3))
        zhat[:, 2] = 1.0
        kh3 = np.zeros((n, 3))
        kh3[:, :2] = khat
        te = np.zeros((n, 3), dtype=complex)
        te[:, 0] = -khat[:, 1]
        te[:, 1] = khat[:, 0]
        kz = _branch_sqrt(q0**2 - kmod**2)
        self.kz = kz
        K3 = np.zeros((n, 3), dtype=complex)
        K3[:, :2] = K
        # vacuum up-going (reflected): k = (K, kz)
        k_up = K3.copy()
        k_up[:, 2] = kz
        tm_up = (kmod[:, None] * zhat - kz[:, None] * kh3) / q0[:, None]
        # vacuum down-going (incident): k = (K, -kz)
        k_dn = K3.copy()
        k_dn[:, 2] = -kz
        tm_dn = -(kmod[:, None] * zhat + kz[:, None] * kh3) / q0[:, None]
        self.up = self._pack(te, tm_up, k_up, 1j * kz)
        self.down = self._pack(te, tm_dn, k_dn, -1j * kz)
        if epsq0sq is not None:
            epsq0sq = np.broadcast_to(np.asarray(epsq0sq, dtype=complex), (n,))
            kt = _branch_sqrt(epsq0sq - kmod**2)
            nq0 = _branch_sqrt(epsq0sq)
            k_t = K3.copy()
            k_t[:, 2] = -kt
            tm_t = -(kmod[:, None] * zhat + kt[:, None] * kh3) / nq0[:, None]
            self.trans = self._pack(te, tm_t, k_t, -1j * kt)
            self.kt = kt
        else:
            self.trans = None

    @staticmethod
    def _pack(te, tm, kvec, d):
        E = np.stack([te, tm], axis=1)  # (N, pol, 3)
        H = _cross(kvec[:, None, :], E)
        return E, H, d


def _rows(mode, pec, q=None, order=0):
    """Tangential boundary quantities of unit waves, shape (N, rows, pol).

    order 0: the fields themselves; order 1: d/dz plus tilt terms for a
    profile Fourier component with wavevector q; order 2: d^2/dz^2.
    """
    E, H, d = mode
    dd = d[:, None, None]
    if order == 0:
        comps = [E[..., 0], E[..., 1]] + ([] if pec else [H[..., 0], H[..., 1]])
        return np.stack(comps, axis=1)
    if order == 2:
        return (d**2)[:, None, None] * _rows(mode, pec)
    q = np.asarray(q, dtype=float)
    qx = q[..., 0][:, None] if q.ndim == 2 else q[0]
    qy = q[..., 1][:, None] if q.ndim == 2 else q[1]
    rows = [dd[:, 0] * E[..., 0] + 1j * qx * E[..., 2],
            dd[:, 0] * E[..., 1] + 1j * qy * E[..., 2]]
    if not pec:
        rows += [dd[:, 0] * H[..., 0] + 1j * qx * H[..., 2],
                 dd[:, 0] * H[..., 1] + 1j * qy * H[..., 2]]
    return np.stack(rows, axis=1)


class InterfaceSolver:
    """Order-by-order amplitudes for one mirror at given frequencies.

    ``epsq0sq`` is eps * q0^2 (None for a perfect conductor), broadcast over
    the points of each call.
    """

    def __init__(self, q0, epsq0sq=None):
        self.q0 = q0
        self.epsq0sq = epsq0sq
        self.pec = epsq0sq is None

    def _modes(self, K):
        return _ModeSet(K, self.q0, self.epsq0sq)

    def _matrix(self, m):
        up = _rows(m.up, self.pec)
        if self.pec:
            return up
        return np.concatenate([up, -_rows(m.trans, self.pec)], axis=2)

    def _split(self, X):
        return X[:, :2, :], (None if self.pec else X[:, 2:, :])

    def zeroth(self, K):
        m = self._modes(K)
        rhs = -_rows(m.down, self.pec)
        X = np.linalg.solve(self._matrix(m), rhs)
        r0, t0 = self._split(X)
        return m, r0, t0

    def _source(self, m, r0, t0, q, order):
        S = _rows(m.down, self.pec, q, order) + _rows(m.up, self.pec, q, order) @ r0
        if not self.pec:
            S = S - _rows(m.trans, self.pec, q, order) @ t0
        return S

    def first(self, K, q, zeroth=None):
        """(rho, tau, modes at K+q) for the Fourier component q of the profile."""
        K = np.asarray(K, dtype=float)
        m0, r0, t0 = zeroth if zeroth is not None else self.zeroth(K)
        S = self._source(m0, r0, t0, q, 1)
        Q = K + np.asarray(q, dtype=float)
        mq = self._modes(Q)
        X = np.linalg.solve(self._matrix(mq), -S)
        rho, tau = self._split(X)
        return rho, tau, mq

    def second(self, K, q, full=False):
        """Route amplitude b(K, q) together with r0(K) and rho(K+q, K).

        ``full=True`` returns the dict of every amplitude involved.
        """
        K = np.asarray(K, dtype=float)
        q = np.asarray(q, dtype=float)
        z = self.zeroth(K)
        m0, r0, t0 = z
        rho, tau, mq = self.first(K, q, zeroth=z)
        S = _rows(mq.up, self.pec, -q, 1) @ rho
        if not self.pec:
            S = S - _rows(mq.trans, self.pec, -q, 1) @ tau
        S = S + 0.5 * self._source(m0, r0, t0, None, 2)
        X = np.linalg.solve(self._matrix(m0), -S)
        b, t2 = self._split(X)
        if full:
            return {"b": b, "t2": t2, "r0": r0, "t0": t0, "rho": rho, "tau": tau,
                    "modes0": m0, "modesq": mq}
        return b, r0, rho


def imaginary_axis_solver(u, w=None):
    """Solver at q0 = i u (dimensionless); ``w`` = xi^2 (eps - 1) in the same units.

    ``w=None`` selects the perfect conductor.
    """
    u = np.asarray(u, dtype=float)
    q0 = 1j * u
    if w is None:
        return InterfaceSolver(q0)
    return InterfaceSolver(q0, -(u**2 + np.asarray(w, dtype=float)))
