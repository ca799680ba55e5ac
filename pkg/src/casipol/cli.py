"""Command-line interface.

Settings are resolved in the order: built-in defaults, then the ``--config``
file (INI sections material/particle/geometry/numerics/output), then
command-line flags. ``--from-manifest`` replaces the first two with the
configuration recorded in an earlier run's manifest.

Every run writes ``<prefix>.dat`` (the table), ``<prefix>.manifest.json``
and ``<prefix>.summary.txt`` to the output directory. Exit status is 0 when
every row converged, 2 when some did not and 1 on error.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .additive import InteratomicModel, calibrate
from .constants import CONSTANTS, ThermalGeometry
from .freeenergy import (
    Cylinder,
    PFADomainError,
    Plate,
    QuadratureSettings,
    Semispace,
    SummationSettings,
    free_energy,
)
from .materials import (
    ConstantResponse,
    Extrapolation,
    OpticalTableError,
    build_permittivity,
    kramers_kronig,
    load_optical_table,
)
from .polarizability import OscillatorModel, preset
from .scenarios import (
    BracketError,
    RegionMapSpec,
    SweepSpec,
    Table,
    compare_inside_outside,
    region_boundaries,
    sweep_semispace,
)

log = logging.getLogger("casipol")

DATA_DIR = Path(__file__).parent / "data"
BUILTIN_MATERIALS = {"graphite-like": DATA_DIR / "graphite_like.cfg"}

DEFAULTS = {
    "material": {"file": "builtin:graphite-like"},
    "particle": {"species": "hydrogen-atom"},
    "geometry": {"T_K": "300", "a_nm": "3"},
    "numerics": {
        "term_rel_tol": "1e-9",
        "l_max_cap": "1000000",
        "zero_frequency_mode": "paper-metallic",
        "quad_rel_tol": "1e-8",
        "max_refinements": "4",
    },
    "output": {"unit": "eV"},
}

ENERGY_UNITS = {"eV": 1.0, "1e-20J": CONSTANTS.joule_per_ev / 1e-20}


class CLIError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _read_ini(path: Path) -> dict:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if not path.is_file():
        raise CLIError(f"config file not found: {path}")
    parser.read(path, encoding="utf-8")
    return {s: dict(parser[s]) for s in parser.sections()}


def _merge(base: dict, extra: dict) -> dict:
    out = {k: dict(v) for k, v in base.items()}
    for section, values in extra.items():
        out.setdefault(section, {}).update({k: str(v) for k, v in values.items() if v is not None})
    return out


def _get(cfg, section, key, conv=str, default=None):
    raw = cfg.get(section, {}).get(key, default)
    if raw is None:
        raise CLIError(f"[{section}] {key}: required value missing")
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"[{section}] {key}: invalid value {raw!r} ({exc})") from None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolve_material(cfg: dict, base_dir: Path) -> dict:
    """Inline the material file into cfg['material'] with absolute table paths and digests."""
    mat = dict(cfg.get("material", {}))
    ref = mat.pop("file", None)
    if ref:
        if ref.startswith("builtin:"):
            name = ref.split(":", 1)[1]
            if name not in BUILTIN_MATERIALS:
                raise CLIError(f"unknown builtin material {name!r}; available: {', '.join(BUILTIN_MATERIALS)}")
            path = BUILTIN_MATERIALS[name]
        else:
            path = (base_dir / ref).resolve()
        section = _read_ini(path).get("material")
        if section is None:
            raise CLIError(f"{path}: missing [material] section")
        for key in ("x_table", "z_table"):
            if key in section:
                section[key] = str((path.parent / section[key]).resolve())
        section.update(mat)
        mat = section
    else:
        for key in ("x_table", "z_table"):
            if key in mat:
                mat[key] = str((base_dir / mat[key]).resolve())
    for axis in ("x", "z"):
        table = mat.get(f"{axis}_table")
        if table:
            p = Path(table)
            if not p.is_file():
                raise CLIError(f"optical table not found: {p}")
            mat[f"{axis}_sha256"] = _sha256(p)
        elif f"{axis}_constant" not in mat:
            raise CLIError(f"[material] needs {axis}_table or {axis}_constant")
    return mat


def build_material(mat: dict):
    sources, extrap = {}, {}
    for axis in ("x", "z"):
        if mat.get(f"{axis}_table"):
            table = load_optical_table(mat[f"{axis}_table"], axis)
            if table.digest != mat.get(f"{axis}_sha256", table.digest):
                raise CLIError(f"{mat[f'{axis}_table']}: file changed since the manifest was written")
            sources[axis] = table
            extrap[axis] = Extrapolation(
                low=mat.get(f"{axis}_low_extrapolation", "drude" if axis == "x" else "constant"),
                high=mat.get("high_extrapolation", "power3"),
                low_cutoff=float(mat.get("low_cutoff_eV", "1e-4")),
            )
        else:
            sources[axis] = ConstantResponse(float(mat[f"{axis}_constant"]))
    return build_permittivity(sources["x"], sources["z"], extrapolation=extrap)


def build_particle(cfg: dict, species: str | None = None) -> OscillatorModel:
    part = cfg.get("particle", {})
    if species is None and "alpha0_au" in part:
        return OscillatorModel(_get(cfg, "particle", "alpha0_au", float), _get(cfg, "particle", "omega0_eV", float))
    try:
        return preset(species or part.get("species", "hydrogen-atom"))
    except ValueError as exc:
        raise CLIError(str(exc)) from None


def build_settings(cfg: dict):
    try:
        summation = SummationSettings(
            term_rel_tol=_get(cfg, "numerics", "term_rel_tol", float),
            l_max_cap=_get(cfg, "numerics", "l_max_cap", int),
            zero_frequency_mode=_get(cfg, "numerics", "zero_frequency_mode"),
        )
        quadrature = QuadratureSettings(
            rel_tol=_get(cfg, "numerics", "quad_rel_tol", float),
            max_refinements=_get(cfg, "numerics", "max_refinements", int),
        )
    except ValueError as exc:
        raise CLIError(f"[numerics] {exc}") from None
    return summation, quadrature


# ---------------------------------------------------------------------------
# output


def _fmt(v: float, unit: str = "") -> str:
    if unit == "count":
        return str(int(v))
    return format(float(v), ".11e")


def manifest_text(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"


def table_text(table: Table, digest: str, title: str) -> str:
    lines = [
        f"# casipol {__version__} {title}",
        "# columns: " + "\t".join(table.columns),
        "# units: " + "\t".join(table.units),
        "# converged: " + "".join("1" if c else "0" for c in table.converged),
        f"# manifest-sha256: {digest}",
    ]
    lines += ["\t".join(_fmt(v, u) for v, u in zip(row, table.units)) for row in table.rows]
    return "\n".join(lines) + "\n"


def _scale_energy(table: Table, unit: str) -> Table:
    if unit not in ENERGY_UNITS:
        raise CLIError(f"[output] unit: expected one of {', '.join(ENERGY_UNITS)}")
    f = ENERGY_UNITS[unit]
    if f == 1.0:
        return table
    cols = [i for i, u in enumerate(table.units) if u == "eV"]
    rows = [tuple(v * f if i in cols else v for i, v in enumerate(r)) for r in table.rows]
    units = [unit if u == "eV" else u for u in table.units]
    return Table(table.columns, units, rows, table.converged)


def write_outputs(table: Table, cfg: dict, command: str, out_dir: Path, prefix: str, extra: dict) -> int:
    table = _scale_energy(table, cfg.get("output", {}).get("unit", "eV"))
    manifest = {
        "artifact": "casipol",
        "version": __version__,
        "command": command,
        "config": {s: dict(sorted(v.items())) for s, v in sorted(cfg.items()) if s != "output" or v},
        "constants": {
            "boltzmann_k_eV_per_K": CONSTANTS.boltzmann_k,
            "hbar_c_eV_nm": CONSTANTS.hbar_c,
            "polarizability_au_m3": CONSTANTS.polarizability_au,
        },
        "kernel_backend": kernels.BACKEND,
        **extra,
    }
    mtext = manifest_text(manifest)
    digest = hashlib.sha256(mtext.encode()).hexdigest()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{prefix}.manifest.json").write_text(mtext, encoding="utf-8")
    (out_dir / f"{prefix}.dat").write_text(table_text(table, digest, command), encoding="utf-8")
    status = 0 if table.all_converged else 2
    summary = [
        f"casipol {command}: {len(table.rows)} rows, "
        + ("all converged" if status == 0 else f"{table.converged.count(False)} rows NOT converged"),
        f"table: {out_dir / (prefix + '.dat')}",
        f"manifest: {out_dir / (prefix + '.manifest.json')} (sha256 {digest[:16]})",
    ]
    for name, i in zip(table.columns, range(len(table.columns))):
        col = [r[i] for r in table.rows]
        if col:
            unit = table.units[i]
            summary.append(f"  {name} [{unit}]: {_fmt(col[0], unit)} .. {_fmt(col[-1], unit)}")
    text = "\n".join(summary) + "\n"
    (out_dir / f"{prefix}.summary.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return status


# ---------------------------------------------------------------------------
# subcommands


def _geometry(cfg, key="a_nm"):
    return ThermalGeometry(_get(cfg, "geometry", "T_K", float), _get(cfg, "geometry", key, float))


def _a_values(cfg):
    sweep = cfg.get("geometry", {}).get("a_sweep")
    if sweep:
        return SweepSpec.parse(sweep).values().tolist()
    return [_get(cfg, "geometry", "a_nm", float)]


def _body(cfg, kind):
    if kind == "semispace":
        return Semispace()
    if kind == "plate":
        return Plate(_get(cfg, "geometry", "d_nm", float))
    if kind == "cylinder":
        geo = cfg.get("geometry", {})
        R = _get(cfg, "geometry", "R_nm", float)
        if "R0_nm" in geo:
            return Cylinder(R, float(geo["R0_nm"]))
        return Cylinder.from_thickness(R, _get(cfg, "geometry", "d_nm", float))
    raise CLIError(f"unknown body {kind!r}; expected semispace, plate or cylinder")


def _point_table(cfg, kind, perm, particle, summation, quadrature, allow):
    T = _get(cfg, "geometry", "T_K", float)
    body = _body(cfg, kind)
    table = Table(["a", "F", "truncation_estimate", "terms_used", "quadrature_refinements"],
                  ["nm", "eV", "eV", "count", "count"], [])
    for a in sorted(_a_values(cfg)):
        res = free_energy(ThermalGeometry(T, a), body, perm, particle, summation, quadrature,
                          allow_outside_pfa=allow)
        table.rows.append((a, res.value, res.truncation_estimate, res.terms_used, res.quadrature_refinements))
        table.converged.append(res.converged)
    return table


def run_command(args, cfg: dict) -> tuple[Table, dict]:
    cmd = args.command
    if cmd == "kk-transform":
        return _kk_transform(cfg)
    perm = build_material(cfg["material"])
    summation, quadrature = build_settings(cfg)
    extra = {"material": perm.describe()}
    allow = cfg.get("geometry", {}).get("allow_outside_pfa", "false").lower() == "true"
    if cmd in ("point", "plate", "cylinder"):
        kind = {"plate": "plate", "cylinder": "cylinder"}.get(cmd) or cfg.get("geometry", {}).get("body", "semispace")
        particle = build_particle(cfg)
        extra["particle"] = particle.describe()
        return _point_table(cfg, kind, perm, particle, summation, quadrature, allow), extra
    if cmd == "semispace":
        names = [s.strip() for s in cfg.get("particle", {}).get("species_list", "").split(",") if s.strip()]
        particles = {n: build_particle(cfg, n) for n in names} if names else {"particle": build_particle(cfg)}
        spec = SweepSpec.parse(_get(cfg, "geometry", "a_sweep"))
        table = sweep_semispace(spec, particles, perm, _get(cfg, "geometry", "T_K", float), summation, quadrature)
        if len(particles) == 2:
            f0, f1 = table.column(table.columns[1]), table.column(table.columns[2])
            ratio = f1 / f0
            table = Table(table.columns + [f"ratio_{names[1]}/{names[0]}"], table.units + ["1"],
                          [(*r, q) for r, q in zip(table.rows, ratio.tolist())], table.converged)
        extra["particles"] = {n: p.describe() for n, p in particles.items()}
        return table, extra
    if cmd == "compare-inside-outside":
        particle = build_particle(cfg)
        T = _get(cfg, "geometry", "T_K", float)
        a_ref = _get(cfg, "geometry", "a_ref_nm", float, "3")
        model = calibrate(perm, particle, a_ref, T, summation, quadrature)
        spec = SweepSpec.parse(_get(cfg, "geometry", "d_sweep"), "d")
        table = compare_inside_outside(_get(cfg, "geometry", "a_nm", float), spec.values().tolist(),
                                       _get(cfg, "geometry", "mode"), _get(cfg, "geometry", "radius_nm", float),
                                       perm, particle, model, T, summation, quadrature)
        extra.update(particle=particle.describe(), additive_model=model.describe())
        return table, extra
    if cmd == "region-map":
        particle = build_particle(cfg)
        spec = RegionMapSpec(
            a_values=tuple(SweepSpec.parse(_get(cfg, "geometry", "a_sweep")).values().tolist()),
            kappa=_get(cfg, "geometry", "kappa", float, "10"),
            R=_get(cfg, "geometry", "R_nm", float, "50"),
            d=_get(cfg, "geometry", "d_nm", float, "30"),
            r_tol=_get(cfg, "geometry", "r_tol_nm", float, "1e-6"),
        )
        for a in spec.a_values:
            if a > spec.R / 2 and not allow:
                raise PFADomainError(f"outside PFA validity a <= R/2 (a={a:g} nm, R={spec.R:g} nm)")
        inter = InteratomicModel.from_oscillator(particle)
        table = region_boundaries(spec, perm, particle, inter, _get(cfg, "geometry", "T_K", float),
                                  summation, quadrature)
        extra.update(particle=particle.describe(), interatomic={"C6_eV_nm6": inter.C6, "kernel": "London r^-6"})
        return table, extra
    raise CLIError(f"unknown subcommand {cmd!r}")


def _kk_transform(cfg) -> tuple[Table, dict]:
    kk = cfg.get("kk", {})
    path = Path(_get(cfg, "kk", "input"))
    table = load_optical_table(path, kk.get("axis") or None)
    if "input_sha256" in kk and kk["input_sha256"] != table.digest:
        raise CLIError(f"{path}: file changed since the manifest was written")
    extrap = Extrapolation(
        low=kk.get("low_extrapolation", "drude" if table.axis == "x" else "constant"),
        high=kk.get("high_extrapolation", "power3"),
        low_cutoff=float(kk.get("low_cutoff_eV", "1e-4")),
    )
    xi = SweepSpec.parse(_get(cfg, "kk", "xi_grid"), "xi").values()
    eps = kramers_kronig(table, xi, extrap)
    out = Table(["xi", "eps"], ["eV", "1"], [(float(x), float(e)) for x, e in zip(xi, eps)],
                [bool(np.isfinite(e)) for e in eps])
    return out, {"kk_input": {"path": str(path), "sha256": table.digest, "rows": len(table),
                              "extrapolation": extrap.describe()}}


# ---------------------------------------------------------------------------
# argument parsing

FLAG_MAP = {
    # dest: (section, key)
    "material": ("material", "file"),
    "species": ("particle", "species"),
    "alpha0_au": ("particle", "alpha0_au"),
    "omega0_eV": ("particle", "omega0_eV"),
    "T_K": ("geometry", "T_K"),
    "a_nm": ("geometry", "a_nm"),
    "a_sweep": ("geometry", "a_sweep"),
    "d_nm": ("geometry", "d_nm"),
    "R_nm": ("geometry", "R_nm"),
    "R0_nm": ("geometry", "R0_nm"),
    "body": ("geometry", "body"),
    "d_sweep": ("geometry", "d_sweep"),
    "mode": ("geometry", "mode"),
    "radius_nm": ("geometry", "radius_nm"),
    "a_ref_nm": ("geometry", "a_ref_nm"),
    "kappa": ("geometry", "kappa"),
    "r_tol_nm": ("geometry", "r_tol_nm"),
    "term_rel_tol": ("numerics", "term_rel_tol"),
    "l_max_cap": ("numerics", "l_max_cap"),
    "zero_frequency_mode": ("numerics", "zero_frequency_mode"),
    "quad_rel_tol": ("numerics", "quad_rel_tol"),
    "max_refinements": ("numerics", "max_refinements"),
    "unit": ("output", "unit"),
    "input": ("kk", "input"),
    "axis": ("kk", "axis"),
    "xi_grid": ("kk", "xi_grid"),
    "low_extrapolation": ("kk", "low_extrapolation"),
    "high_extrapolation": ("kk", "high_extrapolation"),
    "low_cutoff_eV": ("kk", "low_cutoff_eV"),
}

SUBCOMMAND_DEFAULTS = {
    "semispace": {"geometry": {"a_sweep": "log:1:200:25"}, "particle": {"species_list": "hydrogen-atom,hydrogen-molecule"}},
    "plate": {"geometry": {"d_nm": "10"}},
    "cylinder": {"geometry": {"R_nm": "50", "d_nm": "30"}},
    "compare-inside-outside": {"geometry": {"a_nm": "3", "d_sweep": "linear:2:40:20", "mode": "fixed-R0",
                                            "radius_nm": "10", "a_ref_nm": "3"}},
    "region-map": {"geometry": {"a_sweep": "log:1:25:15", "kappa": "10", "R_nm": "50", "d_nm": "30"}},
    "point": {"geometry": {"body": "semispace"}},
    "kk-transform": {"kk": {"xi_grid": "log:0.01:100:50"}},
}


def _common(p: argparse.ArgumentParser, kk: bool = False):
    g = p.add_argument_group("run")
    g.add_argument("--config", type=Path, help="INI config file (default: none)")
    g.add_argument("--from-manifest", type=Path, help="re-run with the configuration recorded in a manifest")
    g.add_argument("--out-dir", type=Path, default=Path("."), help="output directory (default: .)")
    g.add_argument("--prefix", help="output file prefix (default: subcommand name)")
    if kk:
        return
    m = p.add_argument_group("material and particle")
    m.add_argument("--material", help="material file or builtin:NAME (default: builtin:graphite-like)")
    m.add_argument("--species", help="hydrogen-atom or hydrogen-molecule (default: hydrogen-atom)")
    m.add_argument("--alpha0-au", dest="alpha0_au", type=float, help="custom static polarizability, a.u.")
    m.add_argument("--omega0-eV", dest="omega0_eV", type=float, help="custom oscillator energy, eV")
    m.add_argument("--T-K", dest="T_K", type=float, help="temperature in K (default: 300)")
    n = p.add_argument_group("numerics")
    n.add_argument("--zero-frequency-mode", choices=["paper-metallic", "generic"], help="default: paper-metallic")
    n.add_argument("--term-rel-tol", type=float, help="Matsubara truncation tolerance (default: 1e-9)")
    n.add_argument("--l-max-cap", type=int, help="maximum Matsubara index (default: 1000000)")
    n.add_argument("--quad-rel-tol", type=float, help="y-quadrature tolerance (default: 1e-8)")
    n.add_argument("--max-refinements", type=int, help="node doublings allowed (default: 4)")
    n.add_argument("--unit", choices=list(ENERGY_UNITS), help="energy unit of the table (default: eV)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casipol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"casipol {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("semispace", help="free energy vs separation from a semispace", formatter_class=fmt)
    _common(p)
    p.add_argument("--a-sweep", help="separations, spacing:min:max:count (default: log:1:200:25)")
    p.add_argument("--species-list", dest="species_list",
                   help="comma separated species (default: hydrogen-atom,hydrogen-molecule)")

    p = sub.add_parser("plate", help="free energy vs separation from a plate of thickness d", formatter_class=fmt)
    _common(p)
    p.add_argument("--d-nm", dest="d_nm", type=float, help="plate thickness (default: 10)")
    p.add_argument("--a-nm", dest="a_nm", type=float, help="single separation (default: 3)")
    p.add_argument("--a-sweep", help="separation sweep spacing:min:max:count")

    p = sub.add_parser("cylinder", help="free energy outside a cylindrical shell", formatter_class=fmt)
    _common(p)
    p.add_argument("--R-nm", dest="R_nm", type=float, help="external radius (default: 50)")
    p.add_argument("--R0-nm", dest="R0_nm", type=float, help="internal radius (overrides --d-nm)")
    p.add_argument("--d-nm", dest="d_nm", type=float, help="wall thickness (default: 30)")
    p.add_argument("--a-nm", dest="a_nm", type=float, help="single separation (default: 3)")
    p.add_argument("--a-sweep", help="separation sweep spacing:min:max:count")
    p.add_argument("--allow-outside-pfa", action="store_true", help="permit a > R/2 with a warning")

    p = sub.add_parser("compare-inside-outside", help="exterior minus interior free energy vs wall thickness",
                       formatter_class=fmt)
    _common(p)
    p.add_argument("--a-nm", dest="a_nm", type=float, help="distance from either surface (default: 3)")
    p.add_argument("--d-sweep", help="thicknesses spacing:min:max:count (default: linear:2:40:20)")
    p.add_argument("--mode", choices=["fixed-R0", "fixed-R"], help="which radius is held fixed (default: fixed-R0)")
    p.add_argument("--radius-nm", dest="radius_nm", type=float, help="the fixed radius (default: 10)")
    p.add_argument("--a-ref-nm", dest="a_ref_nm", type=float, help="additive-model calibration separation (default: 3)")

    p = sub.add_parser("region-map", help="atom-atom vs atom-nanotube dominance boundaries", formatter_class=fmt)
    _common(p)
    p.add_argument("--a-sweep", help="separations spacing:min:max:count (default: log:1:25:15)")
    p.add_argument("--kappa", type=float, help="dominance factor (default: 10)")
    p.add_argument("--R-nm", dest="R_nm", type=float, help="external radius (default: 50)")
    p.add_argument("--d-nm", dest="d_nm", type=float, help="wall thickness (default: 30)")
    p.add_argument("--r-tol-nm", dest="r_tol_nm", type=float, help="bisection tolerance on r (default: 1e-6)")
    p.add_argument("--allow-outside-pfa", action="store_true", help="permit a > R/2 with a warning")

    p = sub.add_parser("kk-transform", help="eps(i xi) of an optical table", formatter_class=fmt)
    _common(p, kk=True)
    p.add_argument("--input", help="optical table (energy_eV, n, k)")
    p.add_argument("--axis", choices=["x", "z"], help="axis label (default: from file name)")
    p.add_argument("--xi-grid", help="imaginary frequencies spacing:min:max:count in eV (default: log:0.01:100:50)")
    p.add_argument("--low-extrapolation", choices=["drude", "constant", "zero"],
                   help="default: drude for x, constant otherwise")
    p.add_argument("--high-extrapolation", choices=["power3", "zero"], help="default: power3")
    p.add_argument("--low-cutoff-eV", dest="low_cutoff_eV", type=float, help="cutoff for constant extrapolation (default: 1e-4)")

    p = sub.add_parser("point", help="single free-energy evaluation", formatter_class=fmt)
    _common(p)
    p.add_argument("--body", choices=["semispace", "plate", "cylinder"], help="default: semispace")
    p.add_argument("--a-nm", dest="a_nm", type=float, help="separation (default: 3)")
    p.add_argument("--d-nm", dest="d_nm", type=float, help="plate or wall thickness")
    p.add_argument("--R-nm", dest="R_nm", type=float, help="cylinder external radius")
    p.add_argument("--R0-nm", dest="R0_nm", type=float, help="cylinder internal radius")
    p.add_argument("--allow-outside-pfa", action="store_true", help="permit a > R/2 with a warning")
    return parser


def resolve_config(args) -> dict:
    if args.from_manifest:
        manifest = json.loads(Path(args.from_manifest).read_text(encoding="utf-8"))
        if manifest.get("command") != args.command:
            raise CLIError(f"manifest was written by {manifest.get('command')!r}, not {args.command!r}")
        return manifest["config"]
    cfg = _merge(DEFAULTS, SUBCOMMAND_DEFAULTS.get(args.command, {}))
    base = Path.cwd()
    if args.config:
        cfg = _merge(cfg, _read_ini(args.config))
        base = args.config.resolve().parent
    flags = {}
    for dest, (section, key) in FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is not None:
            flags.setdefault(section, {})[key] = repr(value) if isinstance(value, float) else str(value)
    if getattr(args, "allow_outside_pfa", False):
        flags.setdefault("geometry", {})["allow_outside_pfa"] = "true"
    if "a_nm" in flags.get("geometry", {}):
        cfg.get("geometry", {}).pop("a_sweep", None)
    cfg = _merge(cfg, flags)
    if args.command == "kk-transform":
        cfg = {"kk": cfg.get("kk", {}), "output": cfg.get("output", {})}
        if "input" not in cfg["kk"]:
            raise CLIError("kk-transform needs --input")
        path = (base / cfg["kk"]["input"]).resolve() if args.config else Path(cfg["kk"]["input"]).resolve()
        cfg["kk"]["input"] = str(path)
        if not path.is_file():
            raise CLIError(f"optical table not found: {path}")
        cfg["kk"]["input_sha256"] = _sha256(path)
    else:
        cfg["material"] = _resolve_material(cfg, base)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args)
        table, extra = run_command(args, cfg)
        return write_outputs(table, cfg, args.command, args.out_dir, args.prefix or args.command, extra)
    except (CLIError, PFADomainError, OpticalTableError, BracketError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
