"""Parameter sweeps: semispace curves, inside/outside nanotube comparison and
atom-atom versus atom-nanotube dominance regions."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .additive import AdditiveModel, InteratomicModel, interatomic_energy, interior_energy
from .constants import ThermalGeometry
from .freeenergy import Cylinder, free_energy, Semispace, _default_workers

__all__ = [
    "Table",
    "SweepSpec",
    "RegionMapSpec",
    "BracketError",
    "bisect_log",
    "sweep_semispace",
    "compare_inside_outside",
    "region_boundaries",
]


@dataclass
class Table:
    """Plot-ready result: named numeric columns plus a per-row convergence flag."""

    columns: list[str]
    units: list[str]
    rows: list[tuple[float, ...]]
    converged: list[bool] = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return all(self.converged)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    min: float
    max: float
    count: int
    spacing: str = "log"
    fixed: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("sweep needs count >= 2")
        if not self.min < self.max:
            raise ValueError("sweep needs min < max")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and not self.min > 0:
            raise ValueError("log spacing needs min > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    @classmethod
    def parse(cls, text: str, variable: str = "a") -> "SweepSpec":
        """'log:1:200:50' or 'linear:2:40:20'."""
        try:
            spacing, lo, hi, count = text.split(":")
            return cls(variable, float(lo), float(hi), int(count), spacing)
        except ValueError as exc:
            raise ValueError(f"bad sweep {text!r}; expected spacing:min:max:count ({exc})") from None


@dataclass(frozen=True)
class RegionMapSpec:
    a_values: tuple[float, ...]
    kappa: float = 10.0
    R: float = 50.0
    d: float = 30.0
    r_tol: float = 1e-6
    r_bracket: tuple[float, float] = (0.1, 1e3)

    def __post_init__(self):
        if not self.kappa >= 1:
            raise ValueError("dominance factor kappa must be >= 1")
        if not self.r_tol > 0:
            raise ValueError("r_tol must be positive")


class BracketError(ValueError):
    pass


def bisect_log(func: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int = 60) -> float:
    """Root of ``func`` in [lo, hi] by bisection on log(r); stops when the bracket is narrower than ``tol``."""
    flo, fhi = func(lo), func(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change in [{lo}, {hi}]")
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(max_iter):
        mid = 0.5 * (llo + lhi)
        fm = func(math.exp(mid))
        if fm == 0:
            return math.exp(mid)
        if (fm > 0) == (flo > 0):
            llo, flo = mid, fm
        else:
            lhi = mid
        if math.exp(lhi) - math.exp(llo) <= tol:
            break
    return math.exp(0.5 * (llo + lhi))


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def sweep_semispace(spec: SweepSpec | Sequence[float], particles: dict, permittivity, temperature: float = 300.0,
                    summation=None, quadrature=None, workers: int | None = None) -> Table:
    """|F| of every particle versus separation from a semispace."""
    workers = workers or _default_workers()
    a_values = sorted(spec.values() if isinstance(spec, SweepSpec) else spec)

    def point(a):
        g = ThermalGeometry(temperature, float(a))
        return [free_energy(g, Semispace(), permittivity, p, summation, quadrature) for p in particles.values()]

    results = _map(point, a_values, workers)
    names = list(particles)
    table = Table(["a"] + [f"F_{n}" for n in names], ["nm"] + ["eV"] * len(names), [])
    for a, res in zip(a_values, results):
        table.rows.append((float(a), *(r.value for r in res)))
        table.converged.append(all(r.converged for r in res))
    return table


def _shell(mode: str, radius: float, d: float) -> Cylinder:
    if mode == "fixed-R0":
        return Cylinder(radius + d, radius)
    if mode == "fixed-R":
        return Cylinder(radius, radius - d)
    raise ValueError(f"unknown mode {mode!r}; expected 'fixed-R0' or 'fixed-R'")


def compare_inside_outside(a: float, thicknesses: Sequence[float], mode: str, radius: float, permittivity,
                           particle, additive: AdditiveModel, temperature: float = 300.0,
                           summation=None, quadrature=None, workers: int | None = None) -> Table:
    """Exterior (Lifshitz, PFA) versus interior (additive) energy at distance a from each wall surface."""
    workers = workers or _default_workers()
    ds = sorted(float(d) for d in thicknesses)
    shells = [_shell(mode, radius, d) for d in ds]
    for s in shells:
        if not s.pfa_valid(a):
            raise ValueError(f"outside PFA validity a <= R/2 at d={s.d:g} nm (R={s.R:g} nm)")
        if not a < s.R0:
            raise ValueError(f"atom does not fit inside R0={s.R0:g} nm at d={s.d:g} nm")
    g = ThermalGeometry(temperature, a)

    def point(shell):
        ext = free_energy(g, shell, permittivity, particle, summation, quadrature)
        return ext, interior_energy(additive, shell, a)

    table = Table(["d", "R", "R0", "F_ext", "F_int", "difference"], ["nm", "nm", "nm", "eV", "eV", "eV"], [])
    for shell, (ext, inner) in zip(shells, _map(point, shells, workers)):
        table.rows.append((shell.d, shell.R, shell.R0, ext.value, inner, ext.value - inner))
        table.converged.append(ext.converged)
    return table


def region_boundaries(spec: RegionMapSpec, permittivity, particle, interatomic: InteratomicModel,
                      temperature: float = 300.0, summation=None, quadrature=None,
                      workers: int | None = None) -> Table:
    """For each a: r where |E_HH(r)| = |F_c(a)|/kappa (line 1), = |F_c(a)| and = kappa |F_c(a)| (line 2)."""
    workers = workers or _default_workers()
    shell = Cylinder.from_thickness(spec.R, spec.d)
    a_values = sorted(float(a) for a in spec.a_values)
    lo, hi = spec.r_bracket

    def point(a):
        return free_energy(ThermalGeometry(temperature, a), shell, permittivity, particle, summation, quadrature)

    table = Table(["a", "r_line1", "r_equal", "r_line2", "F_c"], ["nm", "nm", "nm", "nm", "eV"], [])
    for a, res in zip(a_values, _map(point, a_values, workers)):
        mag = abs(res.value)
        roots = []
        for target in (mag / spec.kappa, mag, mag * spec.kappa):
            try:
                roots.append(bisect_log(lambda r: abs(interatomic_energy(interatomic, r)) - target, lo, hi, spec.r_tol))
            except BracketError:
                raise BracketError(f"no bracket for a={a:g} nm in r in [{lo}, {hi}] nm") from None
        table.rows.append((a, *roots, res.value))
        table.converged.append(res.converged)
    return table
