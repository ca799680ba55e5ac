"""Dielectric response on the imaginary frequency axis.

Tabulated optical constants (n, k versus photon energy) are turned into
eps(i xi) with the Kramers-Kronig relation

    eps(i xi) = 1 + (2/pi) * int_0^inf  w eps''(w) / (w^2 + xi^2) dw,

where eps'' = 2 n k. All frequencies are photon energies in eV.
"""
from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import PchipInterpolator

__all__ = [
    "OpticalTableError",
    "AxisTable",
    "OpticalDataTable",
    "Extrapolation",
    "DEFAULT_EXTRAPOLATION",
    "load_optical_table",
    "load_optical_tables",
    "axis_from_filename",
    "kramers_kronig",
    "LorentzDrude",
    "ConstantResponse",
    "TabulatedResponse",
    "PermittivityModel",
    "build_permittivity",
    "graphite_like",
    "bundled_graphite_tables",
]

AXES = ("x", "z")


class OpticalTableError(ValueError):
    """Malformed or physically invalid optical-constant table."""


@dataclass(frozen=True, eq=False)
class AxisTable:
    """One axis of optical data: photon energy (eV), n, k; energies strictly increasing."""

    energy: np.ndarray
    n: np.ndarray
    k: np.ndarray
    axis: str | None = None
    source: str = "<memory>"
    digest: str = ""

    def __post_init__(self):
        for name in ("energy", "n", "k"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        _validate(self.energy, self.n, self.k, self.source)

    def __len__(self):
        return len(self.energy)

    @property
    def eps_imag(self) -> np.ndarray:
        return 2.0 * self.n * self.k


@dataclass(frozen=True)
class OpticalDataTable:
    x: AxisTable
    z: AxisTable

    def __getitem__(self, axis: str) -> AxisTable:
        if axis not in AXES:
            raise KeyError(axis)
        return getattr(self, axis)


def _validate(energy, n, k, source, lines=None):
    def where(i):
        if lines is not None:
            return f"{source}: line {lines[i]}"
        return f"{source}: row {i}"

    if not (len(energy) == len(n) == len(k)):
        raise OpticalTableError(f"{source}: column lengths differ")
    if len(energy) < 2:
        raise OpticalTableError(f"{source}: need at least 2 rows, got {len(energy)}")
    for i in range(len(energy)):
        if not (np.isfinite(energy[i]) and np.isfinite(n[i]) and np.isfinite(k[i])):
            raise OpticalTableError(f"{where(i)}: non-finite value")
        if energy[i] <= 0:
            raise OpticalTableError(f"{where(i)}: photon energy must be positive")
        if n[i] <= 0:
            raise OpticalTableError(f"{where(i)}: refractive index n must be positive")
        if k[i] < 0:
            raise OpticalTableError(f"{where(i)}: extinction coefficient k must be >= 0")
    steps = np.diff(energy)
    if np.any(steps == 0):
        i = int(np.argmin(steps != 0)) + 1
        raise OpticalTableError(f"{where(i)}: duplicate energy {energy[i]!r}")
    if np.any(steps < 0):
        i = int(np.argmax(steps < 0)) + 1
        raise OpticalTableError(f"{where(i)}: non-monotone grid (energies must increase)")


_SPLIT = re.compile(r"[,\s]+")


def axis_from_filename(path) -> str | None:
    """'graphite_x.csv' -> 'x', 'foo-z.txt' -> 'z'; None when no axis tag."""
    stem = Path(str(path)).stem.lower()
    m = re.search(r"(?:^|[_\-.])(x|z|inplane|outofplane)$", stem)
    if not m:
        return None
    return {"inplane": "x", "outofplane": "z"}.get(m.group(1), m.group(1))


def load_optical_table(source, axis: str | None = None, *, sort: bool = False) -> AxisTable:
    """Parse a three-column (energy_eV, n, k) table.

    ``source`` is a path, a text/byte stream or raw bytes. Columns may be
    separated by commas or whitespace; '#' lines and blank lines are skipped.
    With ``sort=True`` rows are sorted by energy instead of rejecting an
    unsorted file (duplicates are rejected either way).
    """
    name = "<stream>"
    if isinstance(source, (str, os.PathLike)):
        name = str(source)
        raw = Path(source).read_bytes()
        if axis is None:
            axis = axis_from_filename(source)
    elif isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        raw = source.read()
        name = getattr(source, "name", name)
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
    if axis is not None and axis not in AXES:
        raise OpticalTableError(f"unknown axis {axis!r}; expected one of {AXES}")
    text = raw.decode("utf-8")
    rows, lines = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = [p for p in _SPLIT.split(s) if p]
        if len(parts) != 3:
            raise OpticalTableError(f"{name}: line {lineno}: expected 3 columns, got {len(parts)}")
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError:
            raise OpticalTableError(f"{name}: line {lineno}: non-numeric value in {s!r}") from None
        lines.append(lineno)
    if len(rows) < 2:
        raise OpticalTableError(f"{name}: need at least 2 rows, got {len(rows)}")
    arr = np.array(rows)
    if sort:
        order = np.argsort(arr[:, 0], kind="stable")
        arr = arr[order]
        lines = [lines[i] for i in order]
    _validate(arr[:, 0], arr[:, 1], arr[:, 2], name, lines)
    return AxisTable(arr[:, 0], arr[:, 1], arr[:, 2], axis=axis, source=name,
                     digest=hashlib.sha256(raw).hexdigest())


def load_optical_tables(sources: Mapping[str, object] | Sequence) -> OpticalDataTable:
    """Load both axes, either from ``{'x': src, 'z': src}`` or from file paths
    whose names carry the axis tag."""
    if isinstance(sources, Mapping):
        tables = {ax: load_optical_table(src, ax) for ax, src in sources.items()}
    else:
        tables = {}
        for src in sources:
            t = load_optical_table(src)
            if t.axis is None:
                raise OpticalTableError(f"{src}: cannot infer axis from file name")
            tables[t.axis] = t
    missing = [ax for ax in AXES if ax not in tables]
    if missing:
        raise OpticalTableError(f"missing axis: {', '.join(missing)}")
    return OpticalDataTable(tables["x"], tables["z"])


# ---------------------------------------------------------------------------
# Kramers-Kronig


@dataclass(frozen=True)
class Extrapolation:
    """How eps'' is continued outside the tabulated range.

    low: 'drude' (A/w fitted to the two lowest rows), 'constant' (lowest
    value held down to ``low_cutoff`` eV, zero below) or 'zero'.
    high: 'power3' (w^-3 matched at the highest row) or 'zero'.
    """

    low: str = "constant"
    high: str = "power3"
    low_cutoff: float = 1e-4

    def __post_init__(self):
        if self.low not in ("drude", "constant", "zero"):
            raise ValueError(f"unknown low-frequency extrapolation {self.low!r}")
        if self.high not in ("power3", "zero"):
            raise ValueError(f"unknown high-frequency extrapolation {self.high!r}")
        if not self.low_cutoff >= 0:
            raise ValueError("low_cutoff must be >= 0")

    def describe(self) -> dict:
        return {"low": self.low, "high": self.high, "low_cutoff_eV": self.low_cutoff}


NO_EXTRAPOLATION = Extrapolation(low="zero", high="zero")
DEFAULT_EXTRAPOLATION = {"x": Extrapolation(low="drude"), "z": Extrapolation(low="constant")}

_GL_X, _GL_W = leggauss(8)


def _panel_nodes(u_lo, u_hi, max_width):
    """Log-frequency Gauss-Legendre nodes for every table interval."""
    widths = u_hi - u_lo
    m = np.maximum(1, np.ceil(widths / max_width)).astype(int)
    idx = np.repeat(np.arange(len(widths)), m)
    start = np.concatenate([[0], np.cumsum(m)[:-1]])
    j = np.arange(idx.size) - np.repeat(start, m)
    h = widths[idx] / m[idx]
    a = u_lo[idx] + j * h
    u = (a[:, None] + 0.5 * h[:, None] * (_GL_X[None, :] + 1.0)).ravel()
    w = (0.5 * h[:, None] * _GL_W[None, :]).ravel()
    return idx.repeat(len(_GL_X)), u, w


def _interior_eps_imag(table: AxisTable, idx, u):
    """Piecewise power-law eps'' (log-log linear); linear where an end is zero."""
    e = table.eps_imag
    w = np.exp(u)
    w0, w1 = table.energy[idx], table.energy[idx + 1]
    e0, e1 = e[idx], e[idx + 1]
    pos = (e0 > 0) & (e1 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(pos, np.log(np.where(pos, e1 / np.where(pos, e0, 1.0), 1.0)) / np.log(w1 / w0), 0.0)
        loglog = e0 * np.exp(p * (u - np.log(w0)))
    lin = e0 + (e1 - e0) * (w - w0) / (w1 - w0)
    return np.where(pos, loglog, lin)


def _high_tail(x):
    """int_1^inf v^-2 / (v^2 + x^2) dv."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-2
    xs = np.where(small, x, 1.0)
    x2 = xs * xs
    series = 1.0 / 3.0 - x2 / 5.0 + x2 * x2 / 7.0 - x2 ** 3 / 9.0
    xl = np.where(small, 1.0, x)
    closed = (1.0 - np.arctan(xl) / xl) / (xl * xl)
    return np.where(small, series, closed)


def _drude_coefficient(table: AxisTable) -> float:
    e = table.eps_imag[:2]
    w = table.energy[:2]
    if np.any(e <= 0):
        return 0.0
    return float(np.exp(np.mean(np.log(w * e))))


def _kk_once(table: AxisTable, xi, extrap: Extrapolation, max_width):
    u_grid = np.log(table.energy)
    idx, u, wts = _panel_nodes(u_grid[:-1], u_grid[1:], max_width)
    eps2 = _interior_eps_imag(table, idx, u)
    om2 = np.exp(2.0 * u)
    xi2 = (xi * xi)[:, None]
    # d(omega) = omega du
    interior = ((om2 * eps2 * wts)[None, :] / (om2[None, :] + xi2)).sum(axis=1)
    total = interior
    w_lo, w_hi = table.energy[0], table.energy[-1]
    e_lo, e_hi = table.eps_imag[0], table.eps_imag[-1]
    if extrap.low == "drude":
        A = _drude_coefficient(table)
        if A > 0:
            with np.errstate(divide="ignore"):
                low = np.where(xi > 0, A * np.arctan(w_lo / np.where(xi > 0, xi, 1.0)) / np.where(xi > 0, xi, 1.0), np.inf)
            total = total + low
    elif extrap.low == "constant" and e_lo > 0 and extrap.low_cutoff < w_lo:
        total = total + 0.5 * e_lo * np.log((w_lo**2 + xi * xi) / (extrap.low_cutoff**2 + xi * xi))
    if extrap.high == "power3" and e_hi > 0:
        total = total + e_hi * _high_tail(xi / w_hi)
    return 1.0 + (2.0 / math.pi) * total


def kramers_kronig(table: AxisTable, xi, extrapolation: Extrapolation | None = None, *,
                   rel_tol: float = 1e-6, resolution: float = 1.0, max_doublings: int = 8):
    """eps(i xi) from tabulated n, k.

    Integration is Gauss-Legendre in log(omega) on every table interval,
    with panels refined by halving until successive results agree to
    ``rel_tol``. ``resolution`` scales the initial panel count.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi_arr < 0) or np.any(~np.isfinite(xi_arr)):
        raise ValueError("imaginary frequency xi must be finite and >= 0")
    if extrapolation is None:
        extrapolation = DEFAULT_EXTRAPOLATION.get(table.axis or "z", Extrapolation())
    width = 0.5 / resolution
    prev = _kk_once(table, xi_arr, extrapolation, width)
    for _ in range(max_doublings):
        width *= 0.5
        cur = _kk_once(table, xi_arr, extrapolation, width)
        with np.errstate(invalid="ignore"):
            done = np.all((cur == prev) | (np.abs(cur - prev) <= rel_tol * np.abs(cur)))
        prev = cur
        if done:
            break
    else:
        raise ArithmeticError("Kramers-Kronig quadrature did not converge")
    return float(prev[0]) if np.ndim(xi) == 0 else prev


# ---------------------------------------------------------------------------
# Response models


@dataclass(frozen=True)
class LorentzDrude:
    """eps(w) = 1 - wp^2/(w^2 + i g w) + sum_j wpj^2/(w0j^2 - w^2 - i gj w).

    ``drude`` is (plasma energy, damping) or None; each oscillator is
    (strength energy, resonance energy, damping), all in eV.
    """

    drude: tuple[float, float] | None = None
    oscillators: tuple[tuple[float, float, float], ...] = ()

    @property
    def provenance(self) -> str:
        return "analytic-drude" if self.drude else "analytic-oscillator"

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.ones_like(xi)
        if self.drude:
            wp, g = self.drude
            with np.errstate(divide="ignore"):
                out = out + np.where(xi > 0, wp * wp / np.where(xi > 0, xi * (xi + g), 1.0), np.inf)
        for wp, w0, g in self.oscillators:
            out = out + wp * wp / (w0 * w0 + g * xi + xi * xi)
        return float(out) if out.ndim == 0 else out

    def complex_eps(self, omega):
        w = np.asarray(omega, dtype=float)
        out = np.ones_like(w, dtype=complex)
        if self.drude:
            wp, g = self.drude
            out -= wp * wp / (w * w + 1j * g * w)
        for wp, w0, g in self.oscillators:
            out += wp * wp / (w0 * w0 - w * w - 1j * g * w)
        return out

    def eps_imag(self, omega):
        return self.complex_eps(omega).imag

    def to_table(self, energies, axis=None) -> AxisTable:
        """Sample n, k on the given photon energies."""
        nk = np.sqrt(self.complex_eps(energies))
        return AxisTable(np.asarray(energies, float), nk.real, np.abs(nk.imag), axis=axis,
                         source=f"synthetic:{self!r}")

    def describe(self) -> dict:
        return {"kind": self.provenance, "drude": list(self.drude) if self.drude else None,
                "oscillators": [list(o) for o in self.oscillators]}


@dataclass(frozen=True)
class ConstantResponse:
    value: float
    provenance = "constant"

    def __post_init__(self):
        if not self.value >= 1:
            raise ValueError("constant permittivity must be >= 1")

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.full_like(xi, self.value)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> dict:
        return {"kind": "constant", "value": self.value}


class TabulatedResponse:
    """eps(i xi) from an optical table, cached on a log-spaced xi grid.

    Between grid points log(eps - 1) is interpolated with a monotone cubic
    in log(xi); outside the grid the KK integral is evaluated directly.
    """

    provenance = "optical-table"

    def __init__(self, table: AxisTable, extrapolation: Extrapolation | None = None, *,
                 xi_min: float = 1e-4, xi_max: float = 1e4, per_decade: int = 64,
                 rel_tol: float = 1e-8):
        self.table = table
        self.extrapolation = extrapolation or DEFAULT_EXTRAPOLATION.get(table.axis or "z", Extrapolation())
        self.rel_tol = rel_tol
        ndec = math.log10(xi_max / xi_min)
        self.grid = np.logspace(math.log10(xi_min), math.log10(xi_max), int(round(ndec * per_decade)) + 1)
        self.values = kramers_kronig(table, self.grid, self.extrapolation, rel_tol=rel_tol)
        self.values.setflags(write=False)
        excess = self.values - 1.0
        lg = np.log(self.grid)
        if np.all(excess > 0):
            self._log = True
            self._interp = PchipInterpolator(lg, np.log(excess), extrapolate=False)
        else:
            self._log = False
            self._interp = PchipInterpolator(lg, self.values, extrapolate=False)

    def __call__(self, xi):
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        if np.any(xi_arr < 0):
            raise ValueError("imaginary frequency must be >= 0")
        out = np.empty_like(xi_arr)
        inside = (xi_arr >= self.grid[0]) & (xi_arr <= self.grid[-1])
        if np.any(inside):
            v = self._interp(np.log(xi_arr[inside]))
            out[inside] = 1.0 + np.exp(v) if self._log else v
        if np.any(~inside):
            out[~inside] = kramers_kronig(self.table, xi_arr[~inside], self.extrapolation, rel_tol=self.rel_tol)
        return float(out[0]) if np.ndim(xi) == 0 else out

    def describe(self) -> dict:
        return {"kind": "optical-table", "source": self.table.source, "sha256": self.table.digest,
                "rows": len(self.table), "extrapolation": self.extrapolation.describe(),
                "cache_grid": [float(self.grid[0]), float(self.grid[-1]), len(self.grid)]}


class PermittivityModel:
    """eps_x(i xi), eps_z(i xi); immutable after construction."""

    def __init__(self, x, z):
        self._x = x
        self._z = z

    @property
    def provenance(self) -> dict:
        return {"x": self._x.provenance, "z": self._z.provenance}

    def eps_x(self, xi):
        return self._x(xi)

    def eps_z(self, xi):
        return self._z(xi)

    def __call__(self, xi):
        return self._x(xi), self._z(xi)

    def describe(self) -> dict:
        return {"x": self._x.describe(), "z": self._z.describe()}


def _as_response(src, axis, extrapolation):
    if src is None:
        raise ValueError(f"no source for axis {axis!r}")
    if isinstance(src, AxisTable):
        return TabulatedResponse(src, extrapolation or DEFAULT_EXTRAPOLATION[axis])
    if isinstance(src, (int, float)):
        return ConstantResponse(float(src))
    if callable(src) and hasattr(src, "describe"):
        return src
    raise TypeError(f"unsupported permittivity source for axis {axis!r}: {type(src).__name__}")


def build_permittivity(x=None, z=None, *, tables: OpticalDataTable | None = None,
                       extrapolation: Mapping[str, Extrapolation] | None = None) -> PermittivityModel:
    """Assemble a model from one source per axis.

    A source is an :class:`AxisTable` (Kramers-Kronig path), an analytic
    response such as :class:`LorentzDrude`, or a number (constant).
    """
    extrapolation = dict(extrapolation or {})
    if tables is not None:
        if x is not None or z is not None:
            raise ValueError("give either tables or per-axis sources, not both")
        x, z = tables.x, tables.z
    if x is None or z is None:
        raise ValueError("inconsistent axis coverage: both x and z sources are required")
    return PermittivityModel(_as_response(x, "x", extrapolation.get("x")),
                             _as_response(z, "z", extrapolation.get("z")))


# ---------------------------------------------------------------------------
# Bundled synthetic graphite-like data

GRAPHITE_X = LorentzDrude(drude=(1.0, 0.02), oscillators=((5.0, 4.5, 1.5), (20.0, 14.0, 6.0)))
GRAPHITE_Z = LorentzDrude(oscillators=((12.0, 11.0, 6.0),))
GRAPHITE_ENERGIES = np.logspace(-3, 3, 601)

_DATA = Path(__file__).parent / "data"


def graphite_like() -> tuple[LorentzDrude, LorentzDrude]:
    """Analytic models behind the bundled graphite-like tables (x, z)."""
    return GRAPHITE_X, GRAPHITE_Z


def bundled_graphite_tables() -> OpticalDataTable:
    return load_optical_tables({"x": _DATA / "graphite_like_x.csv", "z": _DATA / "graphite_like_z.csv"})


def write_optical_table(table: AxisTable, path, header: Iterable[str] = ()) -> None:
    lines = [f"# {h}" for h in header]
    lines.append("# energy_eV, n, k")
    lines += [f"{e:.10e}, {n:.12e}, {k:.12e}" for e, n, k in zip(table.energy, table.n, table.k)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
