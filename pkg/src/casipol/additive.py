"""Pairwise-additive van der Waals energies.

The wall is treated as a continuum of pair potentials -C/r^6 with the number
density absorbed into K = n C. K is fixed by matching the additive
semispace energy -pi K / (6 a^3) to the Lifshitz semispace free energy at a
reference separation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import CONSTANTS, ThermalGeometry
from .freeenergy import Cylinder, free_energy_semispace
from .polarizability import OscillatorModel

__all__ = [
    "AdditiveModel",
    "InteratomicModel",
    "AXIAL_LINE_FACTOR",
    "additive_semispace_energy",
    "calibrate",
    "interior_energy",
    "c6_single_oscillator",
    "interatomic_energy",
]

# int_{-inf}^{inf} (s^2 + z^2)^-3 dz = AXIAL_LINE_FACTOR / s^5
AXIAL_LINE_FACTOR = 3.0 * math.pi / 8.0


@dataclass(frozen=True)
class AdditiveModel:
    """K in eV nm^3 plus the record of how it was calibrated."""

    K: float
    a_ref: float | None = None
    matched_value: float | None = None
    temperature: float | None = None

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("interaction strength K must be positive")

    def describe(self) -> dict:
        return {"K_eV_nm3": self.K, "a_ref_nm": self.a_ref, "matched_value_eV": self.matched_value,
                "temperature_K": self.temperature, "kernel": "nonretarded r^-6"}


@dataclass(frozen=True)
class InteratomicModel:
    C6: float  # eV nm^6

    def __post_init__(self):
        if not self.C6 > 0:
            raise ValueError("C6 must be positive")

    @classmethod
    def from_oscillator(cls, particle: OscillatorModel) -> "InteratomicModel":
        return cls(c6_single_oscillator(particle))


def additive_semispace_energy(K: float, a: float) -> float:
    return -math.pi * K / (6.0 * a**3)


def calibrate(permittivity, particle, a_ref: float = 3.0, temperature: float = 300.0,
              summation=None, quadrature=None) -> AdditiveModel:
    if not (1.0 <= a_ref <= 10.0):
        raise ValueError(f"a_ref must lie in 1-10 nm, got {a_ref!r}")
    res = free_energy_semispace(ThermalGeometry(temperature, a_ref), permittivity, particle, summation, quadrature)
    K = 6.0 * a_ref**3 * abs(res.value) / math.pi
    return AdditiveModel(K, a_ref, res.value, temperature)


def _annulus_integral(rho: float, R0: float, R: float, n: int) -> float:
    """int_{R0}^{R} rho' d rho' int_0^{2 pi} d phi |rho' - rho|^-5 for 0 <= rho < R0."""
    x, w = leggauss(n)
    g_lo, g_hi = R0 - rho, R - rho
    # gap g = rho' - rho on a logarithmic scale
    span = math.log(g_hi / g_lo)
    wv = 0.5 * span * (x + 1.0)
    g = g_lo * np.exp(wv)
    wg = 0.5 * span * w * g
    rp = rho + g
    if rho == 0.0:
        return float(np.sum(wg * rp * 2.0 * math.pi * rp**-5.0))
    two_root = 2.0 * np.sqrt(rho * rp)
    # near side, phi in [0, pi/2]: 2 sqrt(rho rho') sin(phi/2) = g sinh(v)
    vmax = np.arcsinh(two_root * math.sin(math.pi / 4.0) / g)
    v = 0.5 * vmax[:, None] * (x[None, :] + 1.0)
    sh = np.sinh(v)
    ch = np.cosh(v)
    arg = g[:, None] * sh / two_root[:, None]
    dphi = 2.0 * (g[:, None] * ch / two_root[:, None]) / np.sqrt(1.0 - arg * arg)
    near = np.sum(0.5 * vmax[:, None] * w[None, :] * dphi * (g[:, None] * ch) ** -5.0, axis=1)
    # far side, phi in [pi/2, pi]
    phi = 0.75 * math.pi + 0.25 * math.pi * x
    s2 = g[:, None] ** 2 + (two_root[:, None] * np.sin(0.5 * phi[None, :])) ** 2
    far = np.sum(0.25 * math.pi * w[None, :] * s2**-2.5, axis=1)
    return float(np.sum(wg * rp * 2.0 * (near + far)))


def interior_energy(model: AdditiveModel, shell: Cylinder, a: float, *, rel_tol: float = 1e-6,
                    max_doublings: int = 8) -> float:
    """Energy (eV) of an atom inside the shell at distance ``a`` from the internal surface."""
    if not (0 < a < shell.R0):
        raise ValueError(f"atom must be strictly inside the cavity: need 0 < a < R0={shell.R0}")
    rho = shell.R0 - a
    n = 16
    prev = _annulus_integral(rho, shell.R0, shell.R, n)
    for _ in range(max_doublings):
        n *= 2
        cur = _annulus_integral(rho, shell.R0, shell.R, n)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return -model.K * AXIAL_LINE_FACTOR * cur
        prev = cur
    raise ArithmeticError("annulus quadrature did not converge")


def c6_single_oscillator(particle: OscillatorModel) -> float:
    """(3/4) hbar omega0 alpha0^2 in eV nm^6 for two identical oscillators."""
    alpha = particle.alpha0 * CONSTANTS.polarizability_au_nm3
    return 0.75 * particle.omega0 * alpha * alpha


def interatomic_energy(model: InteratomicModel, r):
    """London energy -C6 / r^6 (eV), r in nm."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("interatomic distance must be positive")
    out = -model.C6 / r**6
    return float(out) if out.ndim == 0 else out
