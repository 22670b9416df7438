"""Command-line front end.

    matterwave run CONFIG [--threads N] [--out DIR] [--seed S]
    matterwave selftest [--json]
    matterwave list-scenarios

Configs are INI files (UTF-8, ``#`` comments).  Unknown sections or keys
are rejected.  Outputs are CSV files with a ``# key: value`` preamble.
Exit codes: 0 success, 1 compute failure, 2 configuration error.
"""
import argparse
import configparser
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from ._accel import backend_name
from ._parallel import map_chunks
from .greens import green_array
from .propagators import FieldConfig
from .scales import CONSTANTS, make_scales, to_dimensionless

__all__ = ["ConfigError", "Scenario", "SCENARIOS", "load_config", "parse_config", "run_scenario",
           "write_csv", "read_csv", "main"]


class ConfigError(ValueError):
    """Malformed or invalid configuration (exit code 2)."""


# ---------------------------------------------------------------------------
# schema

def _float(v):
    return float(v)


def _pos(v):
    x = float(v)
    if not x > 0:
        raise ValueError("must be > 0")
    return x


def _floats(v):
    out = [float(t) for t in v.replace(",", " ").split()]
    if not out:
        raise ValueError("empty list")
    return out


def _vec3(v):
    out = _floats(v)
    if len(out) != 3:
        raise ValueError("needs three components")
    return out


def _axis(v):
    """``start stop n`` -> uniform axis; a single number is a one-point axis."""
    t = _floats(v)
    if len(t) == 1:
        return t
    if len(t) != 3 or int(t[2]) != t[2] or t[2] < 2:
        raise ValueError("axis is 'start stop n' with integer n >= 2")
    if not t[1] > t[0]:
        raise ValueError("axis stop must exceed start")
    return t


def _int_pos(v):
    n = int(v)
    if n < 1:
        raise ValueError("must be >= 1")
    return n


def _choice(*opts):
    def f(v):
        v = v.strip().lower()
        if v not in opts:
            raise ValueError(f"must be one of {', '.join(opts)}")
        return v
    return f


SCENARIOS = {
    "field_fringes": "point source in a uniform force: two-path fringes (radial cut + plane map)",
    "eb_parallel": "point source with parallel electric and magnetic fields: wave and current in a plane",
    "atom_laser": "Gaussian source falling under gravity: transverse cuts for a sweep of widths",
    "dos_crossed": "local density of states in crossed electric and magnetic fields",
    "free_point": "free-space point source: wave, current and conservation checks",
    "custom": "any source and field; every physical parameter given explicitly",
}

SCHEMA = {
    "scenario": {"name": _choice(*SCENARIOS), "species": _choice("electron", "rb87", "custom"),
                 "mass_kg": _pos, "units": _choice("internal", "field_units", "cyclotron_units"),
                 "length_scale_m": _pos, "energy_scale_j": _pos},
    "physics": {"energy": _float, "energy_uev": _float, "delta_nu_hz": _float,
                "force_ev_per_m": _vec3, "force_internal": _vec3, "gravity": _pos,
                "b_tesla": lambda v: float(v), "b_internal": lambda v: float(v),
                "charge_sign": lambda v: int(v), "eta": _pos, "eta_uev": _pos,
                "widths_um": _floats, "width": _pos, "source": _vec3,
                "source_kind": _choice("point", "gaussian"),
                "force_y_ev_per_m": _floats, "depth_mm": _pos, "strength": _float},
    "grid": {"x": _axis, "y": _axis, "z": _axis, "cut_points": _int_pos, "cut_halfwidth": _pos},
    "sweep": {"e_min": _float, "e_max": _float, "n": _int_pos},
    "output": {"prefix": str, "dir": str},
}

DEFAULTS = {
    "field_fringes": {
        "scenario": {"species": "electron"},
        "physics": {"force_ev_per_m": "0 0 -1000", "energy": "10", "source": "0 0 0"},
        "grid": {"x": "-80 80 161", "y": "0", "z": "-120 10 131", "cut_points": "2000"},
    },
    "eb_parallel": {
        "scenario": {"species": "electron"},
        "physics": {"energy_uev": "60.8", "force_ev_per_m": "0 0 -116", "b_tesla": "0.001",
                    "charge_sign": "-1", "source": "0 0 0"},
        "grid": {"x": "-40 40 21", "y": "0", "z": "-62 18 21"},
    },
    "atom_laser": {
        "scenario": {"species": "rb87"},
        "physics": {"delta_nu_hz": "2500", "gravity": str(CONSTANTS.standard_gravity),
                    "widths_um": "0.1 0.2 0.4 1.0", "depth_mm": "1.0", "source": "0 0 0"},
        "grid": {"cut_points": "1201"},
    },
    "dos_crossed": {
        "scenario": {"species": "electron", "units": "cyclotron_units"},
        "physics": {"b_tesla": "0.5", "force_y_ev_per_m": "1 100 400", "eta_uev": "1.0",
                    "charge_sign": "-1", "source": "0 0 0"},
        "sweep": {"e_min": "0.05", "e_max": "6.0", "n": "600"},
    },
    "free_point": {
        "scenario": {"species": "custom", "units": "internal"},
        "physics": {"energy": "0.5", "source": "0 0 0", "strength": "1"},
        "grid": {"x": "0.55 2.55 21", "y": "-0.95 1.05 21", "z": "-1.15 0.85 21"},
    },
    "custom": {"scenario": {"units": "internal"}, "physics": {"source": "0 0 0"}},
}


@dataclass(frozen=True)
class Scenario:
    name: str
    raw: dict                 # section -> key -> string, defaults merged in
    params: dict              # section -> key -> parsed value
    source_path: str = ""
    explicit_keys: tuple = dc_field(default=())

    def get(self, section, key, default=None):
        return self.params.get(section, {}).get(key, default)


def parse_config(text, source_path="<string>"):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#", ";"),
                                   interpolation=None, strict=True)
    cp.optionxform = str.lower
    try:
        cp.read_string(text, source=source_path)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source_path}: parse error at line {exc.lineno}: "
                          "key outside any [section]") from None
    except configparser.ParsingError as exc:
        where = ", ".join(f"line {n}: {line}" for n, line in exc.errors)
        raise ConfigError(f"{source_path}: parse error at {where}") from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        at = f" at line {lineno}" if lineno else ""
        raise ConfigError(f"{source_path}: parse error{at}: {exc.message.splitlines()[-1]}") from None
    user = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"{source_path}: unknown section [{sec}]")
        user[sec] = dict(cp.items(sec))
    name = user.get("scenario", {}).get("name")
    if name is None:
        raise ConfigError(f"{source_path}: missing key 'name' in [scenario]")
    name = name.strip().lower()
    if name not in SCENARIOS:
        raise ConfigError(f"{source_path}: key 'name': unknown scenario {name!r}")
    raw = {sec: dict(v) for sec, v in DEFAULTS[name].items()}
    user_phys = user.get("physics", {})
    # a user-supplied energy (in any unit) replaces the default one
    for group in (("energy", "energy_uev", "delta_nu_hz"), ("eta", "eta_uev"),
                  ("force_ev_per_m", "force_internal", "gravity")):
        if any(k in user_phys for k in group):
            for k in group:
                if k not in user_phys:
                    raw.get("physics", {}).pop(k, None)
    explicit = []
    for sec, kv in user.items():
        for k, v in kv.items():
            if k not in SCHEMA[sec]:
                raise ConfigError(f"{source_path}: unknown key '{k}' in [{sec}]")
            raw.setdefault(sec, {})[k] = v
            explicit.append(f"{sec}.{k}")
    params = {}
    for sec, kv in raw.items():
        params[sec] = {}
        for k, v in kv.items():
            try:
                params[sec][k] = SCHEMA[sec][k](v)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{source_path}: key '{k}' in [{sec}]: {exc}") from None
    sc = Scenario(name, raw, params, source_path, tuple(explicit))
    _validate(sc)
    return sc


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text, str(path))


def _validate(sc):
    p = sc.params
    phys = p.get("physics", {})
    species = p["scenario"].get("species", "custom")
    if species == "custom" and p["scenario"].get("units", "internal") != "internal" \
            and "mass_kg" not in p["scenario"]:
        raise ConfigError("key 'mass_kg' in [scenario]: required for species=custom with physical units")
    n_energy = sum(k in phys for k in ("energy", "energy_uev", "delta_nu_hz"))
    if sc.name not in ("dos_crossed",) and n_energy != 1:
        raise ConfigError("key 'energy' in [physics]: give exactly one of energy, energy_uev, delta_nu_hz")
    if sc.name in ("field_fringes", "eb_parallel", "free_point", "custom"):
        for ax in ("x", "y", "z"):
            if ax not in p.get("grid", {}):
                raise ConfigError(f"key '{ax}' in [grid]: required for {sc.name}")
    if sc.name == "dos_crossed":
        s = p["sweep"]
        if not s["e_max"] > s["e_min"] or s["n"] < 2:
            raise ConfigError("key 'e_max' in [sweep]: sweep must have e_max > e_min and n >= 2")
    if phys.get("source_kind") == "gaussian" and "width" not in phys:
        raise ConfigError("key 'width' in [physics]: required for a gaussian source")


# ---------------------------------------------------------------------------
# physical setup

def _mass(sc):
    species = sc.params["scenario"].get("species", "custom")
    if species == "electron":
        return CONSTANTS.electron_mass
    if species == "rb87":
        return CONSTANTS.rubidium87_mass
    return sc.params["scenario"].get("mass_kg")


def _setup(sc, force_override=None):
    """Return ``(scales or None, FieldConfig, energy, eta)`` in internal units."""
    p = sc.params["scenario"]
    phys = sc.params["physics"]
    units = p.get("units", "field_units" if sc.name != "dos_crossed" else "cyclotron_units")
    e = CONSTANTS.elementary_charge
    if units == "internal":
        force = phys.get("force_internal", [0.0, 0.0, 0.0])
        if force_override is not None:
            force = force_override
        f = FieldConfig(force=tuple(force), b_field=abs(phys.get("b_internal", 0.0)),
                        charge_sign=phys.get("charge_sign", 1), mass=1.0)
        return None, f, phys.get("energy"), phys.get("eta", 1e-5)
    m = _mass(sc)
    if "force_ev_per_m" in phys:
        force_si = np.asarray(phys["force_ev_per_m"]) * e
    elif "gravity" in phys:
        force_si = np.array([0.0, 0.0, -m * phys["gravity"]])
    else:
        force_si = np.zeros(3)
    if force_override is not None:
        force_si = np.asarray(force_override, dtype=float) * e
    b = abs(phys.get("b_tesla", 0.0))
    kw = {}
    if "length_scale_m" in p:
        kw = dict(length_scale=p["length_scale_m"], energy_scale=p.get("energy_scale_j"))
    if units == "cyclotron_units" and b > 0:
        scales = make_scales(m, force=force_si, b_field=b, prefer="cyclotron_units", **kw)
    else:
        scales = make_scales(m, force=force_si, b_field=b, prefer="field_units", **kw)
    force = to_dimensionless(force_si, "force", scales)
    qb = to_dimensionless(e * b, "charge_field", scales)
    f = FieldConfig(force=tuple(np.asarray(force, dtype=float)), b_field=float(qb),
                    charge_sign=phys.get("charge_sign", 1), mass=scales.dimensionless_mass)
    if "energy" in phys:
        E = phys["energy"]
    elif "energy_uev" in phys:
        E = to_dimensionless(phys["energy_uev"] * 1e-6 * e, "energy", scales)
    elif "delta_nu_hz" in phys:
        E = to_dimensionless(2.0 * math.pi * CONSTANTS.hbar * phys["delta_nu_hz"], "energy", scales)
    else:
        E = None
    if "eta_uev" in phys:
        eta = to_dimensionless(phys["eta_uev"] * 1e-6 * e, "energy", scales)
    else:
        eta = phys.get("eta", 1e-5)
    return scales, f, E, eta


def _axes(sc):
    g = sc.params["grid"]
    out = []
    for k in ("x", "y", "z"):
        t = g[k]
        out.append(np.array(t) if len(t) == 1 else np.linspace(t[0], t[1], int(t[2])))
    return out


# ---------------------------------------------------------------------------
# CSV

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, meta, columns, data):
    """One ``# key: value`` line per metadata item, a header row, then rows."""
    data = np.asarray(data, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}: {_fmt(v)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in data:
            w.writerow([repr(float(x)) for x in row])


def read_csv(path):
    """Inverse of :func:`write_csv`: ``(meta, columns, data)``; metadata values stay strings."""
    meta = {}
    rows = []
    columns = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                k, _, v = line[2:].rstrip("\n").partition(": ")
                meta[k] = v
            elif columns is None:
                columns = next(csv.reader([line]))
            else:
                rows.append([float(x) for x in next(csv.reader([line]))])
    return meta, columns, np.array(rows).reshape(-1, len(columns or []))


def _base_meta(sc, scales, field, energy, eta):
    meta = {"scenario": sc.name, "code_version": __version__, "backend": backend_name()}
    for sec in sorted(sc.raw):
        for k in sorted(sc.raw[sec]):
            meta[f"param.{sec}.{k}"] = sc.raw[sec][k].strip()
    if scales is not None:
        for k, v in scales.describe().items():
            meta[f"scale.{k}"] = v
    else:
        meta["scale.derivation"] = "internal"
    meta["internal.energy"] = energy if energy is not None else "sweep"
    meta["internal.force"] = " ".join(repr(v) for v in field.force)
    meta["internal.b_field"] = field.b_field
    meta["internal.mass"] = field.mass
    meta["internal.eta"] = eta
    return meta


# ---------------------------------------------------------------------------
# scenario runners

def _source(sc, E, width=None):
    from .sources import SourceSpec
    phys = sc.params["physics"]
    pos = tuple(phys.get("source", [0.0, 0.0, 0.0]))
    S = phys.get("strength", 1.0)
    kind = phys.get("source_kind", "gaussian" if width else "point")
    if kind == "gaussian":
        return SourceSpec.gaussian(pos, width or phys["width"], E, S)
    return SourceSpec.point(pos, E, S)


def _plane_records(sc, src, field, pts, threads, eta):
    from .observables import CurrentSampler
    from .sources import scatter_points
    psi, err = scatter_points(src, field, pts, eta=eta, threads=threads)
    j, jerr = CurrentSampler(src, field, eta=eta, threads=threads)(pts)
    jn = np.linalg.norm(j, axis=1)
    cols = ["x", "y", "z", "re_psi", "im_psi", "abs2_psi", "psi_err", "jx", "jy", "jz", "abs_j"]
    data = np.column_stack([pts, psi.real, psi.imag, np.abs(psi) ** 2, err, j, jn])
    return cols, data


def _grid_points(sc, src):
    x, y, z = _axes(sc)
    X, Y, Z = np.meshgrid(x, y, z, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], -1)
    d = np.linalg.norm(pts - np.asarray(src.position), axis=1)
    keep = d > 1e-9
    return pts[keep], int((~keep).sum())


def _run_field_fringes(sc, outdir, prefix, threads):
    from .interference import count_maxima, semiclassical_field_pattern
    scales, field, E, eta = _setup(sc)
    src = _source(sc, E)
    meta = _base_meta(sc, scales, field, E, eta)
    pts, skipped = _grid_points(sc, src)
    chunks = map_chunks(lambda c: green_array(c, src.position, E, field, eta=eta), pts, threads)
    g = np.concatenate([c[0] for c in chunks])
    meta["skipped_source_points"] = skipped
    f1 = os.path.join(outdir, f"{prefix}_plane.csv")
    write_csv(f1, meta, ["x", "y", "z", "re_psi", "im_psi", "abs2_psi"],
              np.column_stack([pts, g.real, g.imag, np.abs(g) ** 2]))
    # radial cut at the lowest z of the grid, inside the caustic
    F = field.force_magnitude
    fhat = field.force_vec / F
    depth = float(np.max(-(pts - np.asarray(src.position)) @ fhat))
    rc = math.sqrt(4.0 * (E / F) * (E / F + depth))
    n = sc.params["grid"].get("cut_points", 2000)
    u = np.cross(fhat, [0.0, 1.0, 0.0] if abs(fhat[1]) < 0.9 else [1.0, 0.0, 0.0])
    u /= np.linalg.norm(u)
    rho = np.linspace(0.0, 0.9 * rc, n)
    cut = np.asarray(src.position) + depth * fhat + rho[:, None] * u
    exact = np.abs(green_array(cut, src.position, E, field)[0]) ** 2
    semi = semiclassical_field_pattern(cut, E, field.force_vec, field.mass, src.position)
    meta2 = dict(meta, depth=depth, caustic_radius=rc,
                 fringes_exact=count_maxima(exact), fringes_semiclassical=semi.fringe_count)
    f2 = os.path.join(outdir, f"{prefix}_radial_cut.csv")
    write_csv(f2, meta2, ["rho", "abs2_exact", "abs2_semiclassical", "delta_phase"],
              np.column_stack([rho, exact, semi.intensity, semi.delta_phase]))
    return [f1, f2], {"fringes_exact": count_maxima(exact), "fringes_semiclassical": semi.fringe_count}


def _run_plane_current(sc, outdir, prefix, threads):
    from .observables import CurrentSampler, Sphere, flux_through_surface, total_current
    scales, field, E, eta = _setup(sc)
    width = sc.params["physics"].get("width")
    src = _source(sc, E, width if sc.params["physics"].get("source_kind") == "gaussian" else None)
    meta = _base_meta(sc, scales, field, E, eta)
    pts, skipped = _grid_points(sc, src)
    cols, data = _plane_records(sc, src, field, pts, threads, eta)
    summary = {"points": len(pts), "skipped_source_points": skipped}
    if not field.magnetic or np.all(field.force_perp == 0):
        try:
            J = total_current(src, field, eta=eta)
            summary["total_current"] = J
        except ValueError:
            pass
    if not field.magnetic:
        R = 4.0 * (src.width if src.kind == "gaussian" else 0.25) + 1.0
        flux, _ = flux_through_surface(CurrentSampler(src, field, eta=eta, threads=threads),
                                       Sphere(src.position, R))
        summary["sphere_flux"] = flux
        summary["sphere_radius"] = R
    meta.update(summary)
    f1 = os.path.join(outdir, f"{prefix}_grid.csv")
    write_csv(f1, meta, cols, data)
    return [f1], summary


def _atom_laser_cut(src, field, depth, x):
    from .sources import scatter_points
    pts = np.column_stack([x, np.zeros_like(x), np.full_like(x, -depth)]) + np.asarray(src.position)
    return pts, scatter_points(src, field, pts)[0]


def _run_atom_laser(sc, outdir, prefix, threads):
    from .observables import fringe_visibility
    from .interference import count_maxima
    from .sources import virtual_point_source
    scales, field, E, eta = _setup(sc)
    phys = sc.params["physics"]
    depth = to_dimensionless(phys["depth_mm"] * 1e-3, "length", scales)
    F = field.force_magnitude
    half = sc.params["grid"].get("cut_halfwidth") or 1.2 * math.sqrt(4.0 * (E / F) * (E / F + depth))
    x = np.linspace(-half, half, sc.params["grid"]["cut_points"])
    meta = _base_meta(sc, scales, field, E, eta)
    meta["depth_internal"] = depth
    files, rows, summary = [], [], {}
    for a_um in phys["widths_um"]:
        a = to_dimensionless(a_um * 1e-6, "length", scales)
        src = _source(sc, E, a)
        vs = virtual_point_source(src, field)
        pts, psi = _atom_laser_cut(src, field, depth, x)
        I = np.abs(psi) ** 2

        def refine(t, src=src):
            return float(np.abs(_atom_laser_cut(src, field, depth, np.array([t]))[1][0]) ** 2)

        vis = fringe_visibility(x, I, refine)
        nmax = count_maxima(I)
        rows.append([a_um, a, vs.displacement, vs.effective_energy, vis, nmax])
        fn = os.path.join(outdir, f"{prefix}_cut_a{a_um:g}um.csv")
        write_csv(fn, dict(meta, width_um=a_um, width_internal=a, visibility=vis,
                           effective_energy=vs.effective_energy, displacement=vs.displacement,
                           maxima=nmax),
                  ["x", "re_psi", "im_psi", "abs2_psi"], np.column_stack([x, psi.real, psi.imag, I]))
        files.append(fn)
        summary[f"visibility_a{a_um:g}um"] = vis
    fs = os.path.join(outdir, f"{prefix}_summary.csv")
    write_csv(fs, meta, ["width_um", "width_internal", "displacement", "effective_energy",
                         "visibility", "maxima"], rows)
    return files + [fs], summary


def _run_dos_crossed(sc, outdir, prefix, threads):
    from .observables import dos, spectrum_peaks
    phys = sc.params["physics"]
    sw = sc.params["sweep"]
    E = np.linspace(sw["e_min"], sw["e_max"], sw["n"])
    cols = ["energy"]
    data = [E]
    summary = {}
    meta = None
    for fy in phys["force_y_ev_per_m"]:
        scales, field, _, eta = _setup(sc, force_override=[0.0, fy, 0.0])
        if meta is None:
            meta = _base_meta(sc, scales, field, None, eta)
        r = tuple(phys.get("source", [0.0, 0.0, 0.0]))
        parts = map_chunks(lambda e: dos(r, e, field, eta=eta).values, E, threads, chunk=32)
        vals = np.concatenate(parts)
        from .observables import Spectrum
        spec = Spectrum(E, vals, eta)
        centres, widths = spectrum_peaks(spec)
        cols.append(f"dos_fy{fy:g}")
        data.append(vals)
        summary[f"peaks_fy{fy:g}"] = " ".join(f"{c:.6g}" for c in centres[:8])
        summary[f"width0_fy{fy:g}"] = float(widths[0]) if widths.size else float("nan")
    meta.update(summary)
    fn = os.path.join(outdir, f"{prefix}_dos.csv")
    write_csv(fn, meta, cols, np.column_stack(data))
    return [fn], summary


RUNNERS = {
    "field_fringes": _run_field_fringes,
    "eb_parallel": _run_plane_current,
    "atom_laser": _run_atom_laser,
    "dos_crossed": _run_dos_crossed,
    "free_point": _run_plane_current,
    "custom": _run_plane_current,
}


def run_scenario(sc, outdir=None, threads=1):
    """Run a validated :class:`Scenario`; returns ``(files, summary)``."""
    out = sc.params.get("output", {})
    outdir = outdir or out.get("dir") or "."
    prefix = out.get("prefix") or sc.name
    os.makedirs(outdir, exist_ok=True)
    return RUNNERS[sc.name](sc, outdir, prefix, threads)


# ---------------------------------------------------------------------------
# entry point

def _cmd_run(args):
    try:
        sc = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        files, summary = run_scenario(sc, args.out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surfaced with scenario context
        print(f"scenario {sc.name!r} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f"wrote {f}")
    for k, v in summary.items():
        print(f"{k}: {_fmt(v)}")
    print(f"elapsed_s: {time.perf_counter() - t0:.2f}")
    return 0


def _cmd_selftest(args):
    from .selftest import run_all
    results = run_all()
    ok = all(r["passed"] for r in results)
    if args.json:
        print(json.dumps(results, indent=1))
    else:
        for r in results:
            flag = "PASS" if r["passed"] else "FAIL"
            print(f"{flag} {r['name']}: measured={r['measured']:.3e} limit={r['limit']:.1e}")
    return 0 if ok else 1


def _cmd_list(args):
    for k, v in SCENARIOS.items():
        print(f"{k:14s} {v}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="matterwave", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--out", default=None, help="output directory")
    r.add_argument("--seed", type=int, default=None, help="reserved; the computation is deterministic")
    r.set_defaults(func=_cmd_run)
    s = sub.add_parser("selftest", help="run the oracle checks")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_selftest)
    ls = sub.add_parser("list-scenarios", help="list scenario names")
    ls.set_defaults(func=_cmd_list)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if getattr(args, "threads", 1) < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
