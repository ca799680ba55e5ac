"""Casimir-Polder free energy of a particle near a plate, semispace or cylindrical shell.

The Matsubara sum is evaluated term by term in ascending order; each term's
y-integral uses a composite exponential-weight rule (log-graded
Gauss-Legendre next to the lower limit, Gauss-Laguerre beyond it) with node
doubling until successive values agree.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_laguerre

from . import kernels
from .constants import CONSTANTS, ThermalGeometry, characteristic_energy, matsubara_zeta
from .reflection import UniaxialLayer, r_parallel, r_perp

__all__ = [
    "ZeroFrequencyMode",
    "Plate",
    "Semispace",
    "Cylinder",
    "SummationSettings",
    "QuadratureSettings",
    "FreeEnergyResult",
    "PFADomainError",
    "ConvergenceWarning",
    "integrand_plate",
    "integrand_cylinder",
    "free_energy",
    "free_energy_plate",
    "free_energy_semispace",
    "free_energy_cylinder",
]

LAGUERRE_MAX_NODES = 128


class ZeroFrequencyMode(str, Enum):
    """How the l = 0 Matsubara term is formed.

    PAPER_METALLIC uses the fixed value 2 alpha(0) times the geometry factor,
    the limit for a diverging static in-plane permittivity. GENERIC evaluates
    the l = 0 summand from eps(i 0+) with weight 1/2.
    """

    PAPER_METALLIC = "paper-metallic"
    GENERIC = "generic"


@dataclass(frozen=True)
class Plate:
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"plate thickness must be positive, got {self.d!r}")

    kind = "plate"


@dataclass(frozen=True)
class Semispace:
    kind = "semispace"


@dataclass(frozen=True)
class Cylinder:
    """Infinitely long cylindrical shell with external radius R and internal radius R0 (nm)."""

    R: float
    R0: float

    kind = "cylinder"

    def __post_init__(self):
        if not (0 < self.R0 < self.R):
            raise ValueError(f"cylinder needs 0 < R0 < R, got R0={self.R0!r}, R={self.R!r}")

    @classmethod
    def from_thickness(cls, R: float, d: float) -> "Cylinder":
        return cls(R, R - d)

    @property
    def d(self) -> float:
        return self.R - self.R0

    def pfa_valid(self, a: float) -> bool:
        return a <= self.R / 2


@dataclass(frozen=True)
class SummationSettings:
    term_rel_tol: float = 1e-9
    l_max_cap: int = 10**6
    zero_frequency_mode: ZeroFrequencyMode = ZeroFrequencyMode.PAPER_METALLIC
    min_zeta: float = 5.0
    consecutive: int = 3

    def __post_init__(self):
        if not (0 < self.term_rel_tol <= 1e-3):
            raise ValueError("term_rel_tol must lie in (0, 1e-3]")
        if self.l_max_cap < 10:
            raise ValueError("l_max_cap must be >= 10")
        object.__setattr__(self, "zero_frequency_mode", ZeroFrequencyMode(self.zero_frequency_mode))


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-8
    max_refinements: int = 4
    base_nodes: int = 16

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-4):
            raise ValueError("rel_tol must lie in (0, 1e-4]")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")


@dataclass(frozen=True)
class FreeEnergyResult:
    value: float  # eV
    terms_used: int
    truncation_estimate: float  # eV
    quadrature_refinements: int
    converged: bool = True
    zero_frequency_term: float = 0.0  # eV
    notes: tuple[str, ...] = ()

    @property
    def value_joule(self) -> float:
        return self.value * CONSTANTS.joule_per_ev

    def to_dict(self) -> dict:
        d = asdict(self)
        d["notes"] = list(self.notes)
        return d


class PFADomainError(ValueError):
    pass


class ConvergenceWarning(RuntimeWarning):
    pass


def integrand_plate(layer: UniaxialLayer, zeta, y):
    """e^{-y} [(2y^2 - zeta^2) r_par + zeta^2 r_perp]."""
    y = np.asarray(y, dtype=float)
    z2 = np.asarray(zeta, dtype=float) ** 2
    out = np.exp(-y) * ((2.0 * y * y - z2) * r_parallel(layer, zeta, y) + z2 * r_perp(layer, zeta, y))
    return float(out) if np.ndim(out) == 0 else out


def integrand_cylinder(layer: UniaxialLayer, zeta, y, curvature: float):
    """y e^{-y} (y - b) [(2 - zeta^2/y^2) r_par + zeta^2/y^2 r_perp] with b = a/(2(R+a))."""
    y = np.asarray(y, dtype=float)
    return integrand_plate(layer, zeta, y) * (1.0 - curvature / y)


@lru_cache(maxsize=None)
def _nodes(level: int, base: int):
    n = base * 2**level
    gx, gw = leggauss(n)
    lx, lw = roots_laguerre(min(n, LAGUERRE_MAX_NODES))
    return gx, gw, lx, lw


def _integrate(zeta, ex, ez, ratio, curvature, quad: QuadratureSettings, workers: int = 1):
    """Per-term y-integrals without the e^{-zeta} factor; returns (values, doublings, ok)."""

    def run(level, idx):
        nodes = _nodes(level, quad.base_nodes)
        if workers > 1 and idx.size >= 2 * workers:
            chunks = np.array_split(idx, workers)
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(lambda c: kernels.term_integrals(zeta[c], ex[c], ez[c], ratio, curvature, *nodes), chunks))
            return np.concatenate(parts)
        return kernels.term_integrals(zeta[idx], ex[idx], ez[idx], ratio, curvature, *nodes)

    idx = np.arange(zeta.size)
    prev = run(0, idx)
    out = np.empty_like(prev)
    pending = idx
    level = 0
    while pending.size:
        level += 1
        cur = run(level, pending)
        diff = np.abs(cur - prev)
        ok = (diff <= quad.rel_tol * np.abs(cur)) | (diff == 0.0)
        out[pending[ok]] = cur[ok]
        if level >= quad.max_refinements:
            out[pending[~ok]] = cur[~ok]
            return out, level, bool(np.all(ok))
        pending = pending[~ok]
        prev = cur[~ok]
    return out, level, True


def _default_workers() -> int:
    import os

    try:
        return max(1, int(os.environ.get("CASIPOL_WORKERS", "1")))
    except ValueError:
        return 1


def free_energy(geom: ThermalGeometry, body, permittivity, particle,
                summation: SummationSettings | None = None,
                quadrature: QuadratureSettings | None = None, *,
                allow_outside_pfa: bool = False, workers: int | None = None) -> FreeEnergyResult:
    """Free energy (eV) of ``particle`` at separation ``geom.separation_a`` from ``body``."""
    summation = summation or SummationSettings()
    quadrature = quadrature or QuadratureSettings()
    workers = workers or _default_workers()
    a = geom.separation_a
    kT = CONSTANTS.boltzmann_k * geom.temperature
    prefactor = -kT / (8.0 * a**3)
    notes = []

    if isinstance(body, Semispace):
        ratio, curvature, static = math.inf, 0.0, 2.0
    elif isinstance(body, Plate):
        ratio, curvature, static = body.d / (2.0 * a), 0.0, 2.0
    elif isinstance(body, Cylinder):
        if not body.pfa_valid(a):
            msg = f"outside PFA validity a <= R/2 (a={a:g} nm, R={body.R:g} nm)"
            if not allow_outside_pfa:
                raise PFADomainError(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
        R = body.R
        ratio = body.d / (2.0 * a)
        curvature = a / (2.0 * (R + a))
        static = (4.0 * R + 3.0 * a) / (2.0 * (R + a))
        prefactor *= math.sqrt(R / (R + a))
    else:
        raise TypeError(f"unknown body {body!r}")

    au = CONSTANTS.polarizability_au_nm3
    hwc = characteristic_energy(geom)
    step = matsubara_zeta(1, geom)
    refinements = 0
    quad_ok = True

    if summation.zero_frequency_mode is ZeroFrequencyMode.PAPER_METALLIC:
        zero = static * particle.alpha0 * au
    else:
        ex0, ez0 = permittivity(np.zeros(1))
        j0, lev, ok = _integrate(np.zeros(1), np.atleast_1d(ex0), np.atleast_1d(ez0), ratio, curvature, quadrature)
        refinements, quad_ok = max(refinements, lev), quad_ok and ok
        zero = 0.5 * particle.alpha0 * au * float(j0[0])

    # tail of a geometric sequence with ratio e^{-step}
    tail_factor = 1.0 / math.expm1(step)
    terms: list[float] = []
    partial = zero
    streak = 0
    stop = None
    tail = 0.0
    l_next = 1
    block = min(summation.l_max_cap, max(64, int(math.ceil(summation.min_zeta / step)) + 16))
    while stop is None and l_next <= summation.l_max_cap:
        l = np.arange(l_next, min(l_next + block, summation.l_max_cap + 1), dtype=np.int64)
        zeta = step * l
        xi = zeta * hwc
        ex, ez = permittivity(xi)
        ex, ez = np.atleast_1d(ex), np.atleast_1d(ez)
        j, lev, ok = _integrate(zeta, ex, ez, ratio, curvature, quadrature, workers)
        refinements, quad_ok = max(refinements, lev), quad_ok and ok
        block_terms = particle.alpha_au(xi) * au * np.exp(-zeta) * j
        for li, zl, term in zip(l.tolist(), zeta.tolist(), block_terms.tolist()):
            terms.append(term)
            partial += term
            tail = term * tail_factor
            if zl > summation.min_zeta and abs(tail) <= summation.term_rel_tol * abs(partial):
                streak += 1
                if streak >= summation.consecutive:
                    stop = li
                    break
            else:
                streak = 0
        l_next = int(l[-1]) + 1
        block *= 2

    value = prefactor * math.fsum([zero, *terms])
    converged = stop is not None and quad_ok
    if stop is None:
        msg = f"Matsubara sum not converged within l_max_cap={summation.l_max_cap}"
        notes.append(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    if not quad_ok:
        msg = "y-quadrature did not reach rel_tol within max_refinements"
        notes.append(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    return FreeEnergyResult(
        value=value,
        terms_used=len(terms) + 1,
        truncation_estimate=prefactor * tail,
        quadrature_refinements=refinements,
        converged=converged,
        zero_frequency_term=prefactor * zero,
        notes=tuple(notes),
    )


def free_energy_plate(geom, permittivity, d, particle, summation=None, quadrature=None, **kw):
    return free_energy(geom, Plate(d), permittivity, particle, summation, quadrature, **kw)


def free_energy_semispace(geom, permittivity, particle, summation=None, quadrature=None, **kw):
    return free_energy(geom, Semispace(), permittivity, particle, summation, quadrature, **kw)


def free_energy_cylinder(geom, shell: Cylinder, permittivity, particle, summation=None, quadrature=None, **kw):
    return free_energy(geom, shell, permittivity, particle, summation, quadrature, **kw)
