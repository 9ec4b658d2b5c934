"""Casimir forces between real mirrors: Lifshitz integrals, PFA and
second-order kernels for rough and corrugated plates."""

from ._version import __version__
from .constants import C, HBAR, HBARC
from .lifshitz import (CasimirResult, CavityConfig, EtaFactors, casimir_energy, casimir_force,
                       casimir_ideal_curvature, casimir_ideal_energy, casimir_ideal_force,
                       energy_curvature, energy_curvature_quad, eta_factors)
from .materials import (DielectricModel, DomainError, Drude, OpticalDataError, OpticalDataTable,
                        Oscillator, Plasma, Tabulated, Vacuum, eps_drude, eps_plasma, kk_transform,
                        load_optical_data)
from .quadrature import ConvergenceError, QuadratureSpec
from .reflection import (MirrorSpec, Polarization, TransverseMode, field_ratio_g, fresnel, kappa,
                         open_loop_rho, perfect_amplitude, slab_amplitude)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
