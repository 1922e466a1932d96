"""Semiclassical expansion of hydrogen about the Kepler problem."""

from .atomic import DomainError, OrbitGeometry, QuantumNumbers, Variant, energy_level, orbit_from_state
from .dipole import EvalConvention, TransitionSpec, calibrate_convention, dipole_exact, evaluate
from .engine import build_hierarchy, contour_integral
from .quantization import quantize
from .wavefunctions import WkbWave, exact_radial, wkb_wavefunction

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EvalConvention",
    "OrbitGeometry",
    "QuantumNumbers",
    "TransitionSpec",
    "Variant",
    "WkbWave",
    "build_hierarchy",
    "calibrate_convention",
    "contour_integral",
    "dipole_exact",
    "energy_level",
    "evaluate",
    "exact_radial",
    "orbit_from_state",
    "quantize",
    "wkb_wavefunction",
]
