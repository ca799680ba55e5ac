"""Reflection coefficients of a uniaxial plate at imaginary frequency.

Arguments are in the dimensionless variables of the atom-plate problem:
``zeta`` is the Matsubara frequency in units of omega_c and ``y`` the
integration variable (y >= zeta). The plate thickness enters through
``thickness_ratio = d / (2a)``; ``math.inf`` selects the semispace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["UniaxialLayer", "f_axis", "f_x", "f_z", "coth_stable", "r_parallel", "r_perp"]

COTH_CLAMP = 20.0


@dataclass(frozen=True)
class UniaxialLayer:
    eps_x: float
    eps_z: float
    thickness_ratio: float = math.inf

    def __post_init__(self):
        if not (self.eps_x >= 1 and self.eps_z >= 1):
            raise ValueError("permittivities on the imaginary axis must be >= 1")
        if not self.thickness_ratio > 0:
            raise ValueError("thickness_ratio must be positive (or inf for a semispace)")

    @property
    def is_semispace(self) -> bool:
        return math.isinf(self.thickness_ratio)


def f_axis(y, zeta, eps):
    """sqrt(y^2 + zeta^2 (eps - 1))."""
    rad = np.asarray(y, dtype=float) ** 2 + np.asarray(zeta, dtype=float) ** 2 * (np.asarray(eps, dtype=float) - 1.0)
    if np.any(rad < 0):
        raise ValueError("negative radicand: eps < 1 is outside the physical domain")
    return np.sqrt(rad)


def f_x(y, zeta, eps_x):
    return f_axis(y, zeta, eps_x)


def f_z(y, zeta, eps_z):
    return f_axis(y, zeta, eps_z)


def coth_stable(x):
    """coth(x) for x > 0, via 1 + 2/expm1(2x); exactly 1 beyond x = 20."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        out = np.where(x > COTH_CLAMP, 1.0, 1.0 + 2.0 / np.expm1(2.0 * np.minimum(x, COTH_CLAMP)))
    return out


def _coth_factor(f, ratio):
    if math.isinf(ratio):
        return np.ones_like(f)
    return coth_stable(f * ratio)


def _ratio(zeta, y):
    """zeta / y with the y = 0 corner mapped to 0 (only zeta = 0 is in the domain there)."""
    safe = np.where(y > 0, y, 1.0)
    return np.where(y > 0, zeta / safe, 0.0)


def r_parallel(layer: UniaxialLayer, zeta, y):
    """TM-like coefficient; written in terms of zeta/y so small y cannot underflow."""
    y = np.asarray(y, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    ex, ez = layer.eps_x, layer.eps_z
    prod = ex * ez
    if math.isinf(prod):
        out = np.ones(np.broadcast(y, zeta).shape)
        return float(out) if out.ndim == 0 else out
    f_axis(y, zeta, ez)  # domain check
    w2 = _ratio(zeta, y) ** 2
    gz = np.sqrt(1.0 + w2 * (ez - 1.0))  # f_z / y
    root = math.sqrt(prod)
    num = (prod - 1.0) - w2 * (ez - 1.0)
    with np.errstate(over="ignore"):
        coth = _coth_factor(y * gz, layer.thickness_ratio)
        den = prod + gz * gz + 2.0 * root * gz * coth
        out = num / den
    return float(out) if out.ndim == 0 else out


def r_perp(layer: UniaxialLayer, zeta, y):
    """TE-like coefficient."""
    y = np.asarray(y, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    ex = layer.eps_x
    if math.isinf(ex):
        # f_x -> inf for zeta > 0; at zeta = 0 the numerator vanishes first
        out = np.where(zeta > 0, 1.0, 0.0) * np.ones_like(y)
        return float(out) if out.ndim == 0 else out
    f_axis(y, zeta, ex)
    w2 = _ratio(zeta, y) ** 2
    gx = np.sqrt(1.0 + w2 * (ex - 1.0))
    num = w2 * (ex - 1.0)
    with np.errstate(over="ignore"):
        den = 1.0 + gx * gx + 2.0 * gx * _coth_factor(y * gx, layer.thickness_ratio)
        out = num / den
    return float(out) if out.ndim == 0 else out
