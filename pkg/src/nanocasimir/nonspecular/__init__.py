"""Second-order non-specular corrections: roughness, lateral force, torque."""

from .corrugation import (X_STAR, CorrugationPair, LateralForceResult, PerturbationValidityWarning,
                          lateral_energy, lateral_force_peak, lateral_force_pp, lateral_force_ps,
                          max_torque, max_torque_angle, torque, torque_energy)
from .kernels import KernelQuadrature, KernelValue, kernel, separation_integrated_kernel
from .providers import ContractViolation, DielectricMirror, PerfectReflector, PerturbationProvider
from .response import CacheError, ExtrapolationError, ResponseKernel, roughness_correction
from .spm import InterfaceSolver, imaginary_axis_solver

__all__ = [name for name in dir() if not name.startswith("_")]
