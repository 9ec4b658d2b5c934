"""Command-line front end.

    nanocasimir <command> [--config FILE] [--out FILE] [--rel-tol X]
                          [--threads N] [--strict] [-D key=value ...]

Commands: eta, slab, kernel, lateral, torque, pfa-check.  The config file
is INI-style with one section per command (``[eta]``, ``[pfa-check]``,
...); ``-D`` and the common flags override file values.  Unknown keys are
configuration errors.

Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence,
provider contract violation or a failed pfa-check, 3 physics-validity
violation under ``--strict``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import constants
from ._version import __version__
from .lifshitz import (CavityConfig, casimir_energy, casimir_force, casimir_ideal_curvature,
                       casimir_ideal_energy, casimir_ideal_force, energy_curvature,
                       energy_curvature_quad, eta_factors)
from .materials import (Drude, Extrapolation, OpticalDataError, Oscillator, Plasma,
                        load_optical_data, tabulated_from_optical_data)
from .pfa import (ProfileError, SurfaceProfile, pfa_energy, pfa_second_order, plane_sphere_force,
                  profile_spectrum)
from .quadrature import ConvergenceError, QuadratureSpec
from .reflection import MirrorSpec
from .nonspecular import (X_STAR, ContractViolation, CorrugationPair, DielectricMirror,
                          KernelQuadrature, PerfectReflector, PerturbationValidityWarning, kernel,
                          separation_integrated_kernel)
from .nonspecular.corrugation import _dsinc

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDITY = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# -- configuration schema ----------------------------------------------------

def _floats(s):
    out = [float(x) for x in str(s).replace(",", " ").split()]
    if not out:
        raise ValueError("empty list")
    return out


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_MATERIAL_KEYS = {
    "material": (str, "plasma"),
    "lambda_p": (float, 136e-9),
    "gamma": (float, 0.0),
    "eps0": (float, 11.87),
    "lambda0": (float, 286e-9),
    "data_file": (str, ""),
    "extrap_low": (str, "drude"),
    "extrap_high": (str, "power3"),
}

SCHEMA = {
    "eta": {**_MATERIAL_KEYS, "L_min": (float, 10e-9), "L_max": (float, 10e-6),
            "n": (int, 31), "rel_tol": (float, 1e-8)},
    "slab": {**_MATERIAL_KEYS, "material": (str, "oscillator"),
             "thicknesses": (_floats, [10e-9, 100e-9, 1e-6]),
             "L_min": (float, 10e-9), "L_max": (float, 10e-6), "n": (int, 31),
             "rel_tol": (float, 1e-8)},
    "kernel": {**_MATERIAL_KEYS, "kind": (str, "roughness"),
               "L": (_floats, [50e-9, 100e-9, 200e-9, 400e-9]),
               "kL_min": (float, 1e-2), "kL_max": (float, 10.0), "n": (int, 25),
               "rel_tol": (float, 1e-5)},
    "lateral": {**_MATERIAL_KEYS, "L": (float, 221e-9), "R": (float, 97e-6),
                "a1": (float, 59e-9), "a2": (float, 8e-9),
                "k_min": (float, 1e6), "k_max": (float, 3e7), "n": (int, 30),
                "k_exp": (float, 5.2e6), "rel_tol": (float, 1e-5)},
    "torque": {**_MATERIAL_KEYS, "L": (float, 1e-6), "a1": (float, 14e-9), "a2": (float, 14e-9),
               "Ly": (float, 24e-6), "Lx": (float, 24e-6), "b": (float, 0.0),
               "k_min": (float, 2e5), "k_max": (float, 8e6), "n": (int, 25),
               "rel_tol": (float, 1e-5)},
    "pfa-check": {**_MATERIAL_KEYS, "material": (str, "perfect"), "L": (float, 1e-6),
                  "rel_tol": (float, 1e-8), "corrupt": (_bool, False)},
}

_POSITIVE = {"lambda_p", "lambda0", "L_min", "L_max", "n", "rel_tol", "kL_min", "kL_max", "R",
             "a1", "a2", "k_min", "k_max", "k_exp", "Ly", "Lx", "L", "thicknesses"}


def resolve_config(command: str, path: str | None, overrides: dict) -> dict:
    """Defaults <- config file section <- overrides; typed and validated."""
    schema = SCHEMA[command]
    raw = {}
    if path:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            if not cp.read(path):
                raise ConfigError(f"config file not found: {path}")
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if cp.has_section(command):
            raw.update(cp.items(command))
    raw.update(overrides)
    cfg = {k: d for k, (_, d) in schema.items()}
    for key, val in raw.items():
        if key not in schema:
            raise ConfigError(f"[{command}] unknown key {key!r}")
        typ = schema[key][0]
        try:
            cfg[key] = typ(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{command}] {key}: {exc}") from None
    for key in _POSITIVE & cfg.keys():
        vals = cfg[key] if isinstance(cfg[key], list) else [cfg[key]]
        if not all(v > 0 for v in vals):
            raise ConfigError(f"[{command}] {key} must be > 0")
    if "L_min" in cfg and not cfg["L_min"] < cfg["L_max"]:
        raise ConfigError(f"[{command}] L_min must be < L_max")
    if "k_min" in cfg and not cfg["k_min"] < cfg["k_max"]:
        raise ConfigError(f"[{command}] k_min must be < k_max")
    if "kL_min" in cfg and not cfg["kL_min"] < cfg["kL_max"]:
        raise ConfigError(f"[{command}] kL_min must be < kL_max")
    if cfg.get("gamma", 0) < 0:
        raise ConfigError(f"[{command}] gamma must be >= 0")
    if cfg["material"] not in MATERIALS:
        raise ConfigError(f"[{command}] unknown material {cfg['material']!r}; "
                          f"choose from {', '.join(MATERIALS)}")
    try:
        Extrapolation(low=cfg["extrap_low"], high=cfg["extrap_high"])
    except ValueError as exc:
        raise ConfigError(f"[{command}] {exc}") from None
    return cfg


MATERIALS = ("perfect", "plasma", "drude", "oscillator", "tabulated")


def build_material(cfg):
    name = cfg["material"]
    if name == "perfect":
        return None
    if name == "plasma":
        return Plasma.from_wavelength(cfg["lambda_p"])
    if name == "drude":
        return Drude(Plasma.from_wavelength(cfg["lambda_p"]).omega_p, cfg["gamma"])
    if name == "oscillator":
        return Oscillator.silicon(cfg["eps0"], cfg["lambda0"])
    if name == "tabulated":
        if not cfg["data_file"]:
            raise ConfigError("material = tabulated needs data_file")
        table = load_optical_data(cfg["data_file"])
        ext = Extrapolation(low=cfg["extrap_low"], high=cfg["extrap_high"])
        return tabulated_from_optical_data(table, extrapolation=ext)
    raise ConfigError(f"unknown material {name!r}")


def build_mirror(cfg, thickness=None) -> MirrorSpec:
    mat = build_material(cfg)
    if mat is None:
        return MirrorSpec.perfect_mirror()
    return MirrorSpec(mat, thickness)


def build_provider(cfg):
    mat = build_material(cfg)
    return PerfectReflector() if mat is None else DielectricMirror(mat)


# -- output --------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


class Table:
    def __init__(self, command, cfg, columns, tolerances):
        self.command = command
        self.cfg = cfg
        self.columns = columns
        self.tolerances = tolerances
        self.notes: list[str] = []
        self.rows: list[list] = []

    def render(self) -> str:
        head = [
            f"# nanocasimir {__version__} {self.command}",
            f"# config: {json.dumps(self.cfg, sort_keys=True)}",
            f"# constants: {json.dumps(constants.as_dict(), sort_keys=True)}",
            f"# tolerances: {json.dumps(self.tolerances, sort_keys=True)}",
        ]
        head += [f"# {n}" for n in self.notes]
        head.append("# " + "\t".join(self.columns))
        body = ["\t".join(_fmt(v) for v in r) for r in self.rows]
        return "\n".join(head + body) + "\n"


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _guard(fn):
    """Run ``fn``; map ConvergenceError to (nan, message)."""
    def wrapped(x):
        try:
            return fn(x), None
        except ConvergenceError as exc:
            return None, str(exc)
    return wrapped


class Outcome:
    def __init__(self, table, failures=0, violations=()):
        self.table = table
        self.failures = failures
        self.violations = list(violations)


# -- commands -------------------------------------------------------------------

def cmd_eta(cfg, threads=1) -> Outcome:
    mirror = build_mirror(cfg)
    quad = QuadratureSpec(rel_tol=cfg["rel_tol"])
    Ls = np.geomspace(cfg["L_min"], cfg["L_max"], cfg["n"])
    t = Table("eta", cfg, ["L[m]", "eta_F", "eta_E", "est_error"], {"rel_tol": cfg["rel_tol"]})

    def row(L):
        eta = eta_factors(CavityConfig.symmetric(mirror, float(L)), quad)
        return [L, eta.eta_F, eta.eta_E, max(eta.error_F, eta.error_E)]

    fails = 0
    for L, (r, err) in zip(Ls, _pmap(_guard(row), Ls, threads)):
        if err:
            fails += 1
            t.notes.append(f"non-converged at L={_fmt(L)}: {err}")
            r = [L, math.nan, math.nan, math.nan]
        t.rows.append(r)
    return Outcome(t, fails)


def cmd_slab(cfg, threads=1) -> Outcome:
    Ds = cfg["thicknesses"]
    quad = QuadratureSpec(rel_tol=cfg["rel_tol"])
    bulk = build_mirror(cfg)
    slabs = [build_mirror(cfg, D) for D in Ds]
    Ls = np.geomspace(cfg["L_min"], cfg["L_max"], cfg["n"])
    cols = ["L[m]", "F_bulk/A[N/m^2]"] + [f"F_D={_fmt(D)}/A[N/m^2]" for D in Ds]
    t = Table("slab", cfg, cols, {"rel_tol": cfg["rel_tol"]})

    def row(L):
        out = [L, casimir_force(CavityConfig.symmetric(bulk, float(L)), quad).value]
        for m in slabs:
            out.append(casimir_force(CavityConfig.symmetric(m, float(L)), quad).value)
        return out

    fails = 0
    for L, (r, err) in zip(Ls, _pmap(_guard(row), Ls, threads)):
        if err:
            fails += 1
            t.notes.append(f"non-converged at L={_fmt(L)}: {err}")
            r = [L] + [math.nan] * (len(cols) - 1)
        t.rows.append(r)
    return Outcome(t, fails)


def _decay_slope(ks, gs, L, lo=3.0, hi=6.0):
    sel = [(k, g) for k, g in zip(ks, gs) if lo <= k * L <= hi and g != 0 and np.isfinite(g)]
    if len(sel) < 2:
        return None
    k, g = np.array(sel).T
    return float(np.polyfit(k, np.log(np.abs(g)), 1)[0])


def cmd_kernel(cfg, threads=1) -> Outcome:
    provider = build_provider(cfg)
    kind = cfg["kind"]
    if kind not in ("roughness", "corrugation"):
        raise ConfigError("[kernel] kind must be roughness or corrugation")
    kq = KernelQuadrature(rel_tol=cfg["rel_tol"])
    mirror = build_mirror(cfg)
    t = Table("kernel", cfg, ["L[m]", "k[rad/m]", "G[J/m^4]", "G/E_PP[1/m^2]", "G/G_PFA"],
              {"kernel_rel_tol": cfg["rel_tol"], "lifshitz_rel_tol": 1e-10})
    fails = 0
    for L in cfg["L"]:
        provider.self_test(L)
        cav = CavityConfig.symmetric(mirror, L)
        epp = casimir_energy(cav, QuadratureSpec(rel_tol=1e-10)).value
        curv = energy_curvature(cav, QuadratureSpec(rel_tol=1e-10)).value
        g_pfa = 0.5 * curv if kind == "roughness" else curv
        ks = [1e-3 / L] + list(np.geomspace(cfg["kL_min"], cfg["kL_max"], cfg["n"]) / L)
        res = _pmap(_guard(lambda k, L=L: kernel(provider, k, L, kind, quad=kq, self_test=False)),
                    ks, threads)
        gs = []
        for k, (v, err) in zip(ks, res):
            if err:
                fails += 1
                t.notes.append(f"non-converged at L={_fmt(L)} k={_fmt(k)}: {err}")
                g = math.nan
            else:
                g = v.value
            gs.append(g)
            t.rows.append([L, k, g, g / epp, g / g_pfa])
        slope = _decay_slope(ks, gs, L)
        if slope is not None:
            t.notes.append(f"decay L={_fmt(L)}: d ln|G|/dk over kL in [3,6] = {_fmt(slope * L)} L "
                           f"(pure e^-kL would give -1)")
    return Outcome(t, fails)


def cmd_lateral(cfg, threads=1) -> Outcome:
    provider = build_provider(cfg)
    kq = KernelQuadrature(rel_tol=cfg["rel_tol"])
    L, R = cfg["L"], cfg["R"]
    ks = sorted(set(np.geomspace(cfg["k_min"], cfg["k_max"], cfg["n"]).tolist() + [cfg["k_exp"]]))
    t = Table("lateral", cfg, ["k[rad/m]", "F_PS_lat[N]", "F_PFA[N]", "experimental_k"],
              {"kernel_rel_tol": cfg["rel_tol"]})
    t.notes.append("force amplitude at b = lambda_C/4; negative sign = restoring")
    provider.self_test(L)
    pfa_int = separation_integrated_kernel(provider, 0.0, L, quad=kq, self_test=False).value
    lam_p = cfg["lambda_p"] if cfg["material"] != "perfect" else None
    violations = []
    for k in (ks[0], cfg["k_exp"], ks[-1]):
        pair = CorrugationPair.from_k(k, a1=cfg["a1"], a2=cfg["a2"])
        violations += [m for m in pair.validity(L, lam_p) if m not in violations]
    if L / R >= 0.1:
        violations.append(f"L/R = {L / R:.3g} is not small")
    kmin_ok = min(ks)
    if R * L < 10 * (2 * math.pi / kmin_ok) ** 2:
        violations.append("R L is not >> lambda_C^2 at the smallest k of the sweep")

    def row(k):
        iv = separation_integrated_kernel(provider, k, L, quad=kq, self_test=False)
        pref = math.pi * cfg["a1"] * cfg["a2"] * k * R
        return [k, pref * iv.value, pref * pfa_int]

    fails = 0
    best = None
    for k, (r, err) in zip(ks, _pmap(_guard(row), ks, threads)):
        if err:
            fails += 1
            t.notes.append(f"non-converged at k={_fmt(k)}: {err}")
            r = [k, math.nan, math.nan]
        elif best is None or abs(r[1]) > abs(best[1]):
            best = r
        t.rows.append(r + [1 if k == cfg["k_exp"] else 0])
    if best is not None:
        t.notes.append(f"sampled peak: k={_fmt(best[0])} rad/m, L/lambda_C={_fmt(L * best[0] / (2 * math.pi))}")
    t.notes += [f"warning: {m}" for m in violations]
    return Outcome(t, fails, violations)


def cmd_torque(cfg, threads=1) -> Outcome:
    provider = build_provider(cfg)
    perfect = PerfectReflector()
    kq = KernelQuadrature(rel_tol=cfg["rel_tol"])
    L = cfg["L"]
    ks = np.geomspace(cfg["k_min"], cfg["k_max"], cfg["n"])
    t = Table("torque", cfg, ["k[rad/m]", "theta*[rad]", "tau_max[N/m]", "tau_PFA[N/m]",
                              "tau_perfect[N/m]"], {"kernel_rel_tol": cfg["rel_tol"]})
    t.notes.append("torque per unit area at theta* = x* lambda_C / (pi L_y), "
                   f"x* = {_fmt(X_STAR)}")
    provider.self_test(L)
    perfect.self_test(L)
    curv = energy_curvature(CavityConfig.symmetric(build_mirror(cfg), L),
                            QuadratureSpec(rel_tol=1e-10)).value
    violations = []
    for k in (ks[0], ks[-1]):
        pair = CorrugationPair.from_k(k, a1=cfg["a1"], a2=cfg["a2"], Lx=cfg["Lx"], Ly=cfg["Ly"])
        lam_p = cfg["lambda_p"] if cfg["material"] != "perfect" else None
        violations += [m for m in pair.validity(L, lam_p) if m not in violations]
    amp = abs(_dsinc(X_STAR))

    def scale(k):
        return 0.5 * cfg["a1"] * cfg["a2"] * abs(math.cos(k * cfg["b"])) * 0.5 * k * cfg["Ly"] * amp

    def row(k):
        g = kernel(provider, k, L, quad=kq, self_test=False).value
        gp = kernel(perfect, k, L, quad=kq, self_test=False).value
        s = scale(k)
        return [k, 2 * X_STAR / (k * cfg["Ly"]), s * abs(g), s * abs(curv), s * abs(gp)]

    fails = 0
    for k, (r, err) in zip(ks, _pmap(_guard(row), ks, threads)):
        if err:
            fails += 1
            t.notes.append(f"non-converged at k={_fmt(k)}: {err}")
            r = [k] + [math.nan] * 4
        t.rows.append(r)
    t.notes += [f"warning: {m}" for m in violations]
    return Outcome(t, fails, violations)


# -- pfa-check --------------------------------------------------------------------

def _checks(cfg):
    """Yield (name, callable -> (passed, deviation, detail))."""
    L = cfg["L"]
    quad = QuadratureSpec(rel_tol=cfg["rel_tol"])
    mirror = build_mirror(cfg)
    provider = build_provider(cfg)
    fudge = 1.001 if cfg["corrupt"] else 1.0

    def ideal_force():
        f = casimir_force(CavityConfig.symmetric(MirrorSpec.perfect_mirror(), L), quad).value
        d = abs(f / (fudge * casimir_ideal_force(1.0, L)) - 1)
        return d <= 1e-6, d, "perfect-mirror quadrature vs closed form, tol 1e-6"

    def ideal_energy():
        e = casimir_energy(CavityConfig.symmetric(MirrorSpec.perfect_mirror(), L), quad).value
        d = abs(e / casimir_ideal_energy(1.0, L) - 1)
        return d <= 1e-6, d, "tol 1e-6"

    def thermo():
        cav = CavityConfig.symmetric(mirror, L)
        fine = QuadratureSpec(rel_tol=1e-10)
        h = 1e-3 * L
        de = (casimir_energy(cav.at(L + h), fine).value - casimir_energy(cav.at(L - h), fine).value) / (2 * h)
        f = casimir_force(cav, fine).value
        d = abs(de / f - 1)
        return d <= 1e-4, d, "dE/dL (central difference) vs F, tol 1e-4"

    def curvature():
        cav = CavityConfig.symmetric(mirror, L)
        a = energy_curvature(cav, quad).value
        b = energy_curvature_quad(cav, QuadratureSpec(rel_tol=1e-10)).value
        d = abs(a / b - 1)
        return d <= 1e-4, d, "Richardson second difference vs direct quadrature, tol 1e-4"

    def pfa_dense():
        a, lam = 0.3 * L, 5.0 * L
        p1 = SurfaceProfile.sinusoid(a, lam, n=4096)
        p2 = SurfaceProfile.flat(4096, 1, p1.dx, p1.dy)
        v = pfa_energy(p1, p2, lambda l: casimir_ideal_energy(1.0, l), L)
        exact = casimir_ideal_energy(1.0, 1.0) * (2 * L**2 + a**2) / (2 * (L**2 - a**2) ** 2.5)
        d = abs(v / exact - 1)
        return d <= 1e-6, d, "sinusoid average vs closed form, tol 1e-6"

    def pfa_order():
        errs = []
        for a in (1e-2 * L, 0.5e-2 * L):
            p1 = SurfaceProfile.sinusoid(a, 5.0 * L, n=256)
            p2 = SurfaceProfile(np.roll(p1.h, 37, axis=1) * 0.5, p1.dx, p1.dy)
            e8 = pfa_energy(p1, p2, lambda l: casimir_ideal_energy(1.0, l), L)
            e10 = pfa_second_order(p1, p2, casimir_ideal_energy(1.0, L), casimir_ideal_curvature(1.0, L))
            errs.append(abs(e8 - e10))
        r = errs[0] / errs[1]
        return r >= 8, r, "error reduction when halving a, need >= 8"

    def parseval():
        rng = np.random.default_rng(20240611)
        h = rng.standard_normal((64, 48))
        prof = SurfaceProfile((h - h.mean()) * 1e-9, 1e-8, 2e-8)
        d = abs(profile_spectrum(prof).integrate() / prof.mean_square() - 1)
        return d <= 1e-12, d, "white noise, tol 1e-12"

    def sphere():
        R = 100 * L
        e = casimir_energy(CavityConfig.symmetric(mirror, L), quad).value
        f = plane_sphere_force(R, L, e)
        d = abs(f / (2 * math.pi * R) / abs(e) - 1)
        return d <= 1e-14, d, "F_PS / 2 pi R = |E_PP / A|"

    def pft(kind):
        def run():
            cav = CavityConfig.symmetric(mirror, L)
            curv = energy_curvature(cav, quad).value
            g = kernel(provider, 1e-3 / L, L, kind).value
            want = 0.5 * curv if kind == "roughness" else curv
            d = abs(g / want - 1)
            label = "E''/2" if kind == "roughness" else "E''"
            return d <= 1e-2, d, f"G_{kind}(k = 1e-3/L) vs {label}, tol 1e-2"
        return run

    return [("ideal-force", ideal_force), ("ideal-energy", ideal_energy),
            ("thermodynamic", thermo), ("curvature", curvature), ("pfa-dense", pfa_dense),
            ("pfa-second-order", pfa_order), ("parseval", parseval),
            ("plane-sphere", sphere), ("pft-roughness", pft("roughness")),
            ("pft-corrugation", pft("corrugation"))]


def cmd_pfa_check(cfg, threads=1, report=None) -> Outcome:
    t = Table("pfa-check", cfg, ["check", "passed", "deviation"], {"rel_tol": cfg["rel_tol"]})
    fails = 0
    for name, fn in _checks(cfg):
        t0 = time.perf_counter()
        try:
            ok, dev, detail = fn()
        except (ConvergenceError, ContractViolation) as exc:
            ok, dev, detail = False, math.nan, f"error: {exc}"
        dt = time.perf_counter() - t0
        fails += not ok
        t.rows.append([name, int(ok), dev])
        if report is not None:
            print(f"{'PASS' if ok else 'FAIL'}  {name:18s} deviation={dev:.3e}  "
                  f"runtime={dt:.2f}s  ({detail})", file=report)
    return Outcome(t, fails)


COMMANDS = {"eta": cmd_eta, "slab": cmd_slab, "kernel": cmd_kernel, "lateral": cmd_lateral,
            "torque": cmd_torque, "pfa-check": cmd_pfa_check}


def _parser():
    p = argparse.ArgumentParser(prog="nanocasimir", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"nanocasimir {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file; section [%s]" % name)
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--rel-tol", type=float, help="override rel_tol")
        s.add_argument("--threads", type=int, default=1, help="worker threads (rows in parallel)")
        s.add_argument("--strict", action="store_true",
                       help="treat physics-validity warnings as fatal (exit 3)")
        s.add_argument("-D", dest="defines", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {}
    for d in args.defines:
        key, sep, val = d.partition("=")
        if not sep:
            print(f"error: -D expects KEY=VALUE, got {d!r}", file=sys.stderr)
            return EXIT_CONFIG
        overrides[key.strip()] = val.strip()
    if args.rel_tol is not None:
        overrides["rel_tol"] = str(args.rel_tol)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args.command, args.config, overrides)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerturbationValidityWarning)
            if args.command == "pfa-check":
                out = cmd_pfa_check(cfg, args.threads, report=sys.stdout)
            else:
                out = COMMANDS[args.command](cfg, args.threads)
    except (ConfigError, OpticalDataError, ProfileError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ContractViolation) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = out.table.render()
    if args.out:
        Path(args.out).write_text(text)
    elif args.command != "pfa-check":
        sys.stdout.write(text)
    for m in out.violations:
        print(f"warning: {m}", file=sys.stderr)
    if out.failures:
        # non-converged rows, or failed oracle checks for pfa-check
        return EXIT_NUMERIC
    if args.strict and out.violations:
        return EXIT_VALIDITY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
