"""Thermal Casimir-Polder free energies of hydrogen atoms and molecules near
uniaxial plates, semispaces and multi-wall carbon nanotubes."""

from .constants import CONSTANTS, MatsubaraGrid, PhysicalConstants, ThermalGeometry, characteristic_frequency, matsubara_zeta
from .freeenergy import (
    Cylinder,
    FreeEnergyResult,
    PFADomainError,
    Plate,
    QuadratureSettings,
    Semispace,
    SummationSettings,
    ZeroFrequencyMode,
    free_energy,
    free_energy_cylinder,
    free_energy_plate,
    free_energy_semispace,
)
from .kernels import BACKEND
from .materials import PermittivityModel, build_permittivity, bundled_graphite_tables, kramers_kronig, load_optical_table
from .polarizability import OscillatorModel, preset

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CONSTANTS", "Cylinder", "FreeEnergyResult", "MatsubaraGrid", "OscillatorModel",
    "PFADomainError", "PermittivityModel", "PhysicalConstants", "Plate", "QuadratureSettings",
    "Semispace", "SummationSettings", "ThermalGeometry", "ZeroFrequencyMode", "build_permittivity",
    "bundled_graphite_tables", "characteristic_frequency", "free_energy", "free_energy_cylinder",
    "free_energy_plate", "free_energy_semispace", "kramers_kronig", "load_optical_table",
    "matsubara_zeta", "preset",
]
