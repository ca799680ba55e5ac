"""Dynamic polarizability of the probe atom or molecule."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .constants import CONSTANTS

__all__ = ["Polarizability", "OscillatorModel", "PRESETS", "preset", "alpha_imag"]


@runtime_checkable
class Polarizability(Protocol):
    """Anything that can report alpha(i*xi) in atomic units."""

    alpha0: float

    def alpha_au(self, xi): ...


@dataclass(frozen=True)
class OscillatorModel:
    """Single-oscillator polarizability alpha(i xi) = g / (omega0^2 + xi^2).

    alpha0 is the static value in atomic units, omega0 the characteristic
    energy in eV.
    """

    alpha0: float
    omega0: float
    name: str = "custom"

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0!r}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0!r}")

    @property
    def g(self) -> float:
        return self.alpha0 * self.omega0**2

    def alpha_au(self, xi):
        """alpha(i xi) in atomic units; xi in eV."""
        xi = np.asarray(xi, dtype=float)
        out = self.g / (self.omega0**2 + xi * xi)
        return float(out) if out.ndim == 0 else out

    def alpha_nm3(self, xi):
        return self.alpha_au(xi) * CONSTANTS.polarizability_au_nm3

    def describe(self) -> dict:
        return {"name": self.name, "alpha0_au": self.alpha0, "omega0_eV": self.omega0}


PRESETS = {
    "hydrogen-atom": OscillatorModel(4.50, 11.65, "hydrogen-atom"),
    "hydrogen-molecule": OscillatorModel(5.439, 14.09, "hydrogen-molecule"),
}


def preset(species: str) -> OscillatorModel:
    try:
        return PRESETS[species]
    except KeyError:
        raise ValueError(
            f"unknown species {species!r}; available presets: {', '.join(sorted(PRESETS))}"
        ) from None


def alpha_imag(model: Polarizability, xi, unit: str = "au"):
    """Polarizability at imaginary frequency xi (eV), in 'au' or 'nm3'."""
    if np.any(np.asarray(xi) < 0):
        raise ValueError("imaginary frequency must be non-negative")
    val = model.alpha_au(xi)
    if unit == "au":
        return val
    if unit == "nm3":
        return val * CONSTANTS.polarizability_au_nm3
    if unit == "m3":
        return val * CONSTANTS.polarizability_au
    raise ValueError(f"unknown unit {unit!r}")
