"""Dielectric response evaluated on the imaginary frequency axis.

Every model exposes ``eps(xi)`` and ``xi2_chi(xi)`` = xi^2 (eps(i xi) - 1).
The second form stays finite at xi -> 0 for conductors and is what the
reflection amplitudes consume.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .constants import C, EV, HBAR, PI
from .quadrature import QuadratureSpec, integrate


class DomainError(ValueError):
    """Evaluation outside the domain of a formula (e.g. xi = 0 for a conductor)."""


class OpticalDataError(ValueError):
    """Malformed or invalid optical data."""


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(xi)) or np.any(xi <= 0):
        raise DomainError("imaginary frequency xi must be finite and > 0")
    return xi


def eps_plasma(xi, omega_p: float):
    """Plasma model 1 + omega_p^2 / xi^2."""
    xi = _check_xi(xi)
    return 1.0 + omega_p**2 / xi**2


def eps_drude(xi, omega_p: float, gamma: float):
    """Drude model 1 + omega_p^2 / (xi (xi + gamma)); gamma = 0 is the plasma model."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    xi = _check_xi(xi)
    return 1.0 + omega_p**2 / (xi * (xi + gamma))


class DielectricModel:
    """Base class; subclasses are frozen dataclasses."""

    name = "abstract"
    #: True when eps(i xi) diverges at xi -> 0
    conductor = False

    def eps(self, xi):
        return 1.0 + self.xi2_chi(xi) / np.asarray(xi, dtype=float) ** 2

    def xi2_chi(self, xi):
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(DielectricModel):
    name = "vacuum"

    def eps(self, xi):
        return np.ones_like(np.asarray(xi, dtype=float))

    def xi2_chi(self, xi):
        return np.zeros_like(np.asarray(xi, dtype=float))

    def describe(self):
        return {"model": "vacuum"}


@dataclass(frozen=True)
class Plasma(DielectricModel):
    omega_p: float
    name = "plasma"
    conductor = True

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be > 0")

    @classmethod
    def from_wavelength(cls, lambda_p: float) -> "Plasma":
        return cls(2.0 * PI * C / lambda_p)

    @property
    def lambda_p(self) -> float:
        return 2.0 * PI * C / self.omega_p

    def eps(self, xi):
        return eps_plasma(xi, self.omega_p)

    def xi2_chi(self, xi):
        return np.full_like(np.asarray(xi, dtype=float), self.omega_p**2)

    def describe(self):
        return {"model": "plasma", "omega_p": self.omega_p}


@dataclass(frozen=True)
class Drude(DielectricModel):
    omega_p: float
    gamma: float
    name = "drude"
    conductor = True

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    def eps(self, xi):
        return eps_drude(xi, self.omega_p, self.gamma)

    def xi2_chi(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.omega_p**2 * xi / (xi + self.gamma)

    def describe(self):
        return {"model": "drude", "omega_p": self.omega_p, "gamma": self.gamma}


@dataclass(frozen=True)
class Oscillator(DielectricModel):
    """Single undamped oscillator 1 + (eps0 - 1) omega0^2 / (omega0^2 + xi^2).

    Used as the silicon-like model: finite static permittivity and
    transparency above the cut-off omega0.
    """

    eps0: float
    omega0: float
    name = "oscillator"

    def __post_init__(self):
        if not self.eps0 >= 1:
            raise ValueError("eps0 must be >= 1")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be > 0")

    @classmethod
    def silicon(cls, eps0: float = 11.87, lambda0: float = 286e-9) -> "Oscillator":
        return cls(eps0, 2.0 * PI * C / lambda0)

    def eps(self, xi):
        xi = np.asarray(xi, dtype=float)
        return 1.0 + (self.eps0 - 1.0) * self.omega0**2 / (self.omega0**2 + xi**2)

    def xi2_chi(self, xi):
        xi = np.asarray(xi, dtype=float)
        return (self.eps0 - 1.0) * self.omega0**2 * xi**2 / (self.omega0**2 + xi**2)

    def describe(self):
        return {"model": "oscillator", "eps0": self.eps0, "omega0": self.omega0}


@dataclass(frozen=True)
class Tabulated(DielectricModel):
    """eps(i xi) given on a grid, interpolated by a cubic spline in log-log.

    Outside the grid the first/last log-log segment is continued as a power
    law, which keeps eps >= 1 and eps -> 1 at high frequency.
    """

    xi: tuple
    eps_values: tuple
    label: str = "tabulated"
    _spline: object = field(default=None, repr=False, compare=False)
    name = "tabulated"

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        ev = np.asarray(self.eps_values, dtype=float)
        if xi.ndim != 1 or xi.size < 2 or xi.size != ev.size:
            raise ValueError("need matching 1-D grids with at least 2 points")
        if np.any(np.diff(xi) <= 0) or xi[0] <= 0:
            raise ValueError("xi grid must be positive and strictly increasing")
        if np.any(ev < 1):
            raise ValueError("tabulated eps(i xi) must be >= 1")
        chi = np.maximum(ev - 1.0, 1e-300)
        spline = CubicSpline(np.log(xi), np.log(chi))
        object.__setattr__(self, "_spline", spline)

    def _log_chi(self, t):
        t0, t1 = self._spline.x[0], self._spline.x[-1]
        y = self._spline(np.clip(t, t0, t1))
        lo = t < t0
        hi = t > t1
        if np.any(lo):
            s = self._spline(t0, 1)
            y = np.where(lo, self._spline(t0) + s * (t - t0), y)
        if np.any(hi):
            s = min(float(self._spline(t1, 1)), 0.0)
            y = np.where(hi, self._spline(t1) + s * (t - t1), y)
        return y

    def eps(self, xi):
        xi = _check_xi(xi)
        return 1.0 + np.exp(self._log_chi(np.log(xi)))

    def xi2_chi(self, xi):
        xi = _check_xi(xi)
        return xi**2 * np.exp(self._log_chi(np.log(xi)))

    def describe(self):
        xi = np.asarray(self.xi)
        return {"model": "tabulated", "label": self.label, "points": int(xi.size),
                "xi_min": float(xi[0]), "xi_max": float(xi[-1])}


# ---------------------------------------------------------------------------
# optical data and the causality transform


@dataclass(frozen=True)
class OpticalDataTable:
    """Absorptive response eps''(omega) on the real frequency axis."""

    omega: np.ndarray
    eps_imag: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        e2 = np.asarray(self.eps_imag, dtype=float)
        if om.ndim != 1 or om.size < 2 or om.size != e2.size:
            raise OpticalDataError("optical data needs at least 2 rows")
        if np.any(np.diff(om) <= 0) or om[0] <= 0:
            raise OpticalDataError("frequencies must be positive and strictly increasing")
        if np.any(e2 < 0) or np.any(~np.isfinite(e2)):
            raise OpticalDataError("eps'' must be finite and >= 0")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "eps_imag", e2)

    def __len__(self):
        return self.omega.size


_COLUMNS = {"omega_ev", "lambda_um", "n", "k", "eps2"}


def load_optical_data(path, provenance: str | None = None) -> OpticalDataTable:
    """Read an optical data file.

    The first non-comment line names the columns (any of ``omega_eV``,
    ``lambda_um``, ``n``, ``k``, ``eps2``); one frequency column and either
    ``eps2`` or both ``n`` and ``k`` are required.  Lines starting with
    ``#`` are ignored, separators may be commas or whitespace.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OpticalDataError(f"{path}: cannot read optical data ({exc.strerror})") from exc

    header = None
    rows = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in re.split(r"[,\s]+", line) if f]
        if header is None:
            header = [f.lower() for f in fields]
            unknown = set(header) - _COLUMNS
            if unknown:
                raise OpticalDataError(
                    f"{path}:{lineno}: unknown column(s) {sorted(unknown)}; "
                    f"expected among omega_eV, lambda_um, n, k, eps2")
            continue
        if len(fields) != len(header):
            raise OpticalDataError(
                f"{path}:{lineno}: expected {len(header)} columns, got {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise OpticalDataError(f"{path}:{lineno}: malformed number in {line!r}") from None
        lines.append(lineno)
    if header is None:
        raise OpticalDataError(f"{path}: empty optical data file")
    if len(rows) < 2:
        raise OpticalDataError(f"{path}: need at least 2 data rows, got {len(rows)}")

    data = np.array(rows)
    col = {name: data[:, i] for i, name in enumerate(header)}
    if "omega_ev" in col:
        omega = col["omega_ev"] * EV / HBAR
    elif "lambda_um" in col:
        lam = col["lambda_um"] * 1e-6
        if np.any(lam <= 0):
            bad = lines[int(np.argmax(lam <= 0))]
            raise OpticalDataError(f"{path}:{bad}: wavelength must be > 0")
        omega = 2.0 * PI * C / lam
    else:
        raise OpticalDataError(f"{path}: no frequency column (omega_eV or lambda_um)")
    if "eps2" in col:
        eps2 = col["eps2"]
    elif "n" in col and "k" in col:
        eps2 = 2.0 * col["n"] * col["k"]
    else:
        raise OpticalDataError(f"{path}: need an eps2 column or both n and k")

    neg = np.flatnonzero(eps2 < 0)
    if neg.size:
        raise OpticalDataError(f"{path}:{lines[neg[0]]}: negative eps'' ({eps2[neg[0]]})")

    # wavelength tables run backwards in frequency; accept either monotone order
    d = np.diff(omega)
    if np.all(d < 0):
        order = slice(None, None, -1)
        omega, eps2, lines = omega[order], eps2[order], lines[order]
        d = np.diff(omega)
    bad = np.flatnonzero(d <= 0)
    if bad.size:
        raise OpticalDataError(
            f"{path}:{lines[bad[0] + 1]}: frequency not strictly monotone")
    return OpticalDataTable(omega, eps2, provenance or str(path))


@dataclass(frozen=True)
class Extrapolation:
    """How eps'' is continued outside the tabulated range.

    ``low``: ``"drude"`` fits eps'' = A g / (w (w^2 + g^2)) through the two
    lowest rows; ``"none"`` sets eps'' = 0 below the table.
    ``high``: ``"power3"`` continues eps'' ~ w^-3; ``"none"`` truncates.
    """

    low: str = "drude"
    high: str = "power3"

    def __post_init__(self):
        if self.low not in ("drude", "none"):
            raise ValueError("low extrapolation must be 'drude' or 'none'")
        if self.high not in ("power3", "none"):
            raise ValueError("high extrapolation must be 'power3' or 'none'")


def drude_tail_fit(table: OpticalDataTable):
    """(omega_p^2, gamma) of the Drude tail through the two lowest rows, or None."""
    w1, w2 = table.omega[:2]
    y1, y2 = table.eps_imag[0] * w1, table.eps_imag[1] * w2
    if y1 <= y2 or y2 <= 0:
        return None
    g2 = (y2 * w2**2 - y1 * w1**2) / (y1 - y2)
    if g2 <= 0:
        return None
    gamma = math.sqrt(g2)
    wp2 = y1 * (w1**2 + g2) / gamma
    return wp2, gamma


_DECADES = 40.0  # log-range used for the tails, e^-40 relative cut


def kk_transform(table: OpticalDataTable, xi, quad: QuadratureSpec | None = None,
                 extrapolation: Extrapolation | None = None):
    """eps(i xi) = 1 + (2/pi) int_0^inf dw w eps''(w) / (w^2 + xi^2).

    Integrated in t = ln w.  Inside the table eps'' is interpolated
    monotonically in log-log (PCHIP); rows with eps'' = 0 switch the
    interpolation to linear in eps''.
    """
    quad = quad or QuadratureSpec(rel_tol=1e-10)
    extrapolation = extrapolation or Extrapolation()
    xi = _check_xi(np.atleast_1d(xi))
    t = np.log(table.omega)
    e2 = table.eps_imag
    if np.all(e2 > 0):
        interp = PchipInterpolator(t, np.log(e2))

        def eps2_in(tt):
            return np.exp(interp(tt))
    else:
        interp = PchipInterpolator(t, e2)

        def eps2_in(tt):
            return np.maximum(interp(tt), 0.0)

    xi2 = xi**2

    def integrand(eps2_fn):
        def f(tt):
            w = np.exp(tt)[:, None]
            return (w**2 * eps2_fn(tt)[:, None]) / (w**2 + xi2[None, :])
        return f

    total = integrate(integrand(eps2_in), t[0], t[-1], quad, breakpoints=tuple(t[1:-1])).value

    if extrapolation.low == "drude":
        fit = drude_tail_fit(table)
        if fit is not None:
            wp2, gamma = fit

            def low(tt):
                w = np.exp(tt)
                return wp2 * gamma / (w * (w**2 + gamma**2))
        else:
            # eps'' ~ 1/w continuation through the lowest row
            e0, w0 = e2[0], table.omega[0]

            def low(tt):
                return e0 * w0 / np.exp(tt)
        total = total + integrate(integrand(low), t[0] - _DECADES, t[0], quad).value
    if extrapolation.high == "power3":
        e_last = e2[-1]

        def high(tt):
            return e_last * np.exp(-3.0 * (tt - t[-1]))
        total = total + integrate(integrand(high), t[-1], t[-1] + _DECADES, quad).value
    return 1.0 + (2.0 / PI) * np.asarray(total)


def tabulated_from_optical_data(table: OpticalDataTable, n: int = 400,
                                span: tuple[float, float] | None = None,
                                extrapolation: Extrapolation | None = None,
                                quad: QuadratureSpec | None = None) -> Tabulated:
    """Causality-transform a table once onto a log-spaced xi grid."""
    if span is None:
        span = (table.omega[0] * 1e-3, table.omega[-1] * 1e3)
    xi = np.geomspace(span[0], span[1], n)
    ev = kk_transform(table, xi, quad=quad, extrapolation=extrapolation)
    return Tabulated(tuple(xi), tuple(ev), label=table.provenance or "optical-data")


def synthetic_drude_table(omega_p: float, gamma: float, omega_min: float, omega_max: float,
                          n: int = 2000) -> OpticalDataTable:
    """Dense eps''(w) table sampled from the Drude model (oracle data)."""
    w = np.geomspace(omega_min, omega_max, n)
    e2 = omega_p**2 * gamma / (w * (w**2 + gamma**2))
    return OpticalDataTable(w, e2, provenance=f"synthetic-drude(wp={omega_p:.6g},g={gamma:.6g})")


def model_from_dict(d: dict) -> DielectricModel:
    """Inverse of ``describe()`` for the closed-form models."""
    kind = d["model"]
    if kind == "vacuum":
        return Vacuum()
    if kind == "plasma":
        return Plasma(float(d["omega_p"]))
    if kind == "drude":
        return Drude(float(d["omega_p"]), float(d["gamma"]))
    if kind == "oscillator":
        return Oscillator(float(d["eps0"]), float(d["omega0"]))
    raise ValueError(f"cannot rebuild model {kind!r} from a description")
