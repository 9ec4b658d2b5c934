"""Tabulated response kernels, their disk cache and the roughness correction."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .._version import __version__
from ..pfa import ProfileSpectrum
from .kernels import KernelQuadrature, kernel
from .providers import PerturbationProvider

CACHE_FORMAT = "nanocasimir-kernel/1"


class ExtrapolationError(ValueError):
    """A kernel was requested outside its tabulated k range."""


class CacheError(ValueError):
    pass


@dataclass(frozen=True)
class ResponseKernel:
    """G(k) samples at fixed L for one provider pair.

    ``k`` starts at 0 and is increasing; ``G`` in J/m^4 (see
    :mod:`.kernels`).  Interpolation is a cubic spline in k with zero slope
    at k = 0 (the kernel is a function of k^2).
    """

    kind: str
    L: float
    model: dict
    k: tuple
    G: tuple
    est_error: tuple
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.size < 2 or k[0] != 0.0 or np.any(np.diff(k) <= 0):
            raise ValueError("k samples must start at 0 and increase strictly")
        if len(self.G) != k.size or len(self.est_error) != k.size:
            raise ValueError("k, G and est_error must have equal length")
        if not np.all(np.isfinite(self.G)):
            raise ValueError("kernel samples must be finite")

    @property
    def kmax(self) -> float:
        return float(self.k[-1])

    @property
    def g0(self) -> float:
        return float(self.G[0])

    def _spline(self):
        return CubicSpline(np.asarray(self.k), np.asarray(self.G), bc_type=((1, 0.0), "not-a-knot"))

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        if np.any(k < 0) or np.any(k > self.kmax * (1 + 1e-12)):
            raise ExtrapolationError(
                f"k outside tabulated range [0, {self.kmax:.4g}] rad/m for this kernel")
        return self._spline()(k)

    def ratio(self, k):
        """G(k) / G(0), the deviation from the proximity-force value."""
        return self(k) / self.g0

    @classmethod
    def tabulate(cls, provider: PerturbationProvider, L: float, kind: str = "corrugation",
                 kL_max: float = 10.0, n: int = 24, kL_min: float = 1e-2,
                 provider2: PerturbationProvider | None = None,
                 quad: KernelQuadrature | None = None, threads: int = 1) -> "ResponseKernel":
        """Sample k = 0 plus ``n`` log-spaced points kL in [kL_min, kL_max]."""
        quad = quad or KernelQuadrature()
        provider.self_test(L)
        if provider2 is not None:
            provider2.self_test(L)
        ks = np.concatenate([[0.0], np.geomspace(kL_min, kL_max, n) / L])

        def one(kk):
            return kernel(provider, kk, L, kind, provider2=provider2, quad=quad, self_test=False)

        vals = _parallel_map(one, ks, threads)
        model = {"mirror1": provider.describe(),
                 "mirror2": (provider2 or provider).describe()}
        return cls(kind, L, model, tuple(float(x) for x in ks),
                   tuple(v.value for v in vals), tuple(v.est_error for v in vals),
                   {"rel_tol": quad.rel_tol, "n_angle": quad.n_angle})

    # -- cache -------------------------------------------------------------
    def provider_hash(self) -> str:
        blob = json.dumps(self.model, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def save(self, path) -> None:
        """Text table: ``#`` header (format, version, kind, L, model, hash,
        tolerances) then tab-separated k, G, est_error at 17 digits."""
        lines = [
            f"# format: {CACHE_FORMAT}",
            f"# version: {__version__}",
            f"# kind: {self.kind}",
            f"# L: {self.L!r}",
            f"# model: {json.dumps(self.model, sort_keys=True)}",
            f"# provider_hash: {self.provider_hash()}",
            f"# tolerances: {json.dumps(self.tolerances, sort_keys=True)}",
            "# columns: k[rad/m]\tG[J/m^4]\test_error[J/m^4]",
        ]
        for k, g, e in zip(self.k, self.G, self.est_error):
            lines.append(f"{k:.17g}\t{g:.17g}\t{e:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path, expect_model: dict | None = None) -> "ResponseKernel":
        head, rows = {}, []
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            if raw.startswith("#"):
                key, _, val = raw[1:].partition(":")
                head[key.strip()] = val.strip()
            elif raw.strip():
                try:
                    rows.append([float(x) for x in raw.split("\t")])
                except ValueError:
                    raise CacheError(f"{path}:{lineno}: malformed row") from None
        if head.get("format") != CACHE_FORMAT:
            raise CacheError(f"{path}: not a kernel cache ({head.get('format')!r})")
        model = json.loads(head["model"])
        kern = cls(head["kind"], float(head["L"]), model,
                   tuple(r[0] for r in rows), tuple(r[1] for r in rows),
                   tuple(r[2] for r in rows), json.loads(head.get("tolerances", "{}")))
        if head.get("provider_hash") != kern.provider_hash():
            raise CacheError(f"{path}: provider hash does not match the stored model")
        if expect_model is not None and json.loads(json.dumps(expect_model)) != model:
            raise CacheError(f"{path}: cached kernel was computed for a different model")
        return kern


def _parallel_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def roughness_correction(sigma: ProfileSpectrum, kern: ResponseKernel, area: float = 1.0) -> float:
    """int d^2k/(2 pi)^2 G_rough(k) sigma(k), times ``area`` (J).

    ``sigma`` is the roughness spectrum summed over both plates.  Spectral
    weight beyond the tabulated kernel range raises
    :class:`ExtrapolationError`.
    """
    if kern.kind != "roughness":
        raise ValueError("roughness_correction needs a roughness kernel")
    km = sigma.kmod
    live = np.asarray(sigma.values) > 0
    if np.any(km[live] > kern.kmax * (1 + 1e-12)):
        raise ExtrapolationError(
            f"spectrum extends to k = {km[live].max():.4g} rad/m beyond the kernel range "
            f"{kern.kmax:.4g} rad/m")
    g = np.zeros_like(km, dtype=float)
    g[live] = kern(km[live])
    return area * float(np.sum(sigma.weights * sigma.values * g))
