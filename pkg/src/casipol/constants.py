"""Physical constants, thermal state and the dimensionless Matsubara grid.

Internal units: lengths in nm, energies in eV, temperatures in K. Frequencies
on the imaginary axis are carried as photon energies (hbar * xi, in eV).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "ThermalGeometry",
    "MatsubaraGrid",
    "matsubara_zeta",
    "characteristic_frequency",
    "characteristic_energy",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed conversion constants.

    Values are CODATA 2018 (exact SI definitions for k_B, h, c, e), plus the
    atomic-unit-of-polarizability conversion used for the H and H2 data.
    """

    boltzmann_k: float = 8.617333262e-5  # eV/K, CODATA 2018 (exact)
    hbar: float = 6.582119569e-16  # eV s, CODATA 2018 (exact)
    speed_of_light: float = 299792458.0  # m/s, exact
    hbar_c: float = 197.3269804  # eV nm, CODATA 2018
    polarizability_au: float = 1.482e-31  # m^3 per atomic unit of polarizability
    joule_per_ev: float = 1.602176634e-19  # exact

    @property
    def polarizability_au_nm3(self) -> float:
        return self.polarizability_au * 1e27


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ThermalGeometry:
    """Temperature (K) and atom-surface separation (nm)."""

    temperature: float
    separation_a: float

    def __post_init__(self):
        if not (self.temperature > 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be positive, got {self.temperature!r}")
        if not (self.separation_a > 0 and math.isfinite(self.separation_a)):
            raise ValueError(f"separation must be positive, got {self.separation_a!r}")

    @property
    def omega_c(self) -> float:
        """Characteristic angular frequency c/(2a) in rad/s."""
        return characteristic_frequency(self)

    @property
    def hbar_omega_c(self) -> float:
        """Characteristic frequency as an energy, hbar*c/(2a) in eV."""
        return characteristic_energy(self)

    @property
    def zeta_step(self) -> float:
        return matsubara_zeta(1, self)

    def grid(self) -> "MatsubaraGrid":
        return MatsubaraGrid(self)


def matsubara_zeta(l, geom: ThermalGeometry, constants: PhysicalConstants = CONSTANTS):
    """Dimensionless Matsubara frequency 4*pi*k_B*l*T*a/(hbar*c).

    Accepts an integer or an integer array for ``l``.
    """
    step = 4.0 * math.pi * constants.boltzmann_k * geom.temperature * geom.separation_a / constants.hbar_c
    if np.ndim(l) == 0:
        if l < 0:
            raise ValueError("Matsubara index must be non-negative")
        return step * l
    l = np.asarray(l)
    if np.any(l < 0):
        raise ValueError("Matsubara index must be non-negative")
    return step * l


def characteristic_frequency(geom: ThermalGeometry, constants: PhysicalConstants = CONSTANTS) -> float:
    """omega_c = c/(2a) in rad/s."""
    a = geom.separation_a
    if not a > 0:
        raise ValueError("separation must be positive")
    return constants.speed_of_light / (2.0 * a * 1e-9)


def characteristic_energy(geom: ThermalGeometry, constants: PhysicalConstants = CONSTANTS) -> float:
    """hbar*omega_c = hbar*c/(2a) in eV."""
    a = geom.separation_a
    if not a > 0:
        raise ValueError("separation must be positive")
    return constants.hbar_c / (2.0 * a)


@dataclass(frozen=True)
class MatsubaraGrid:
    """zeta_l and the matching imaginary frequencies xi_l = zeta_l * omega_c."""

    geom: ThermalGeometry

    def zeta(self, l):
        return matsubara_zeta(l, self.geom)

    def xi(self, l):
        """hbar*xi_l in eV, equal to 2*pi*k_B*T*l."""
        return self.zeta(l) * characteristic_energy(self.geom)

    def index_below(self, zeta_max: float) -> int:
        """Largest l with zeta_l <= zeta_max."""
        return int(math.floor(zeta_max / self.geom.zeta_step))
