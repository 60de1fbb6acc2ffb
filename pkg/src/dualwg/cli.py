"""Command-line front end: device-config ingestion, sweep execution with
deterministic seeding, and delimited-text/JSON emission of all results.

Every run writes its tables as delimited text with unit-annotated headers
plus one JSON metadata record (parameters, seed, package versions).  The
default output directory is '.' or $DUALWG_OUTDIR.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import asdict, replace

import numpy as np
import scipy

from . import __version__
from .comb import (DISPERSION_RATE_FORMULA, CombParams, classify_spectrum,
                   comb_bandwidth, rf_detuning_sweep, simulate_comb)
from .dispersion import sweep_neff, width_design_sweep
from .grid import build_permittivity_grid
from .liv import analyze_map, load_liv, load_map, save_map, \
    channel_anticorrelation, power_oscillation_metric, threshold_and_slope
from .modes import solve_modes_2d, vertical_parity
from .stacks import (ParseError, ValidationError, load_device_config,
                     narrow_device, parse_period, wide_device)
from .tmm import CoatingStack, facet_reflectivity


class CliError(Exception):
    """Validation failure; the message names the offending field."""


def _out_dir(args):
    d = args.out or os.environ.get("DUALWG_OUTDIR", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _write_table(path, header_lines, columns, names):
    with open(path, "w") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write("# " + " ".join(names) + "\n")
        for row in zip(*columns):
            f.write(" ".join(repr(float(v)) for v in row) + "\n")


def _write_meta(path, subcommand, params, seed=None):
    rec = {
        "subcommand": subcommand,
        "params": params,
        "seed": seed,
        "versions": {
            "dualwg": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    with open(path, "w") as f:
        json.dump(rec, f, indent=1, sort_keys=True)
        f.write("\n")


def _device(args):
    if getattr(args, "config", None):
        return load_device_config(args.config)
    w = getattr(args, "width", 3.0)
    return wide_device(w) if w > 5.0 else narrow_device(w)


def _grid_opts(args):
    opts = {}
    if getattr(args, "dx", None):
        opts["dx_um"] = args.dx
    if getattr(args, "dy", None):
        opts["dy_um"] = args.dy
    return opts


# ---------------------------------------------------------------- subcommands

def cmd_parse_stack(args):
    period = parse_period(args.period)
    print("# pos role    thickness_A")
    for i, (role, t) in enumerate(period.sublayers, start=1):
        print(f"{i:5d} {role:7s} {t:g}")
    print(f"# total {period.total_thickness_A:g} A, "
          f"well fraction {period.well_fraction:.3f}")
    return 0


def cmd_modes(args):
    cs = _device(args)
    grid = build_permittivity_grid(cs, args.nu, **_grid_opts(args))
    modes = solve_modes_2d(grid, count=args.count)
    out = _out_dir(args)
    path = os.path.join(out, "modes.txt")
    with open(path, "w") as f:
        f.write(f"# modes at nu = {args.nu} cm^-1\n")
        f.write("# n_eff gamma loss_cm vertical_parity\n")
        for m in modes:
            f.write(f"{m.n_eff.real!r} {m.gamma!r} {m.loss_cm!r} "
                    f"{vertical_parity(m, grid)}\n")
    _write_meta(os.path.join(out, "modes.json"), "modes",
                {"nu_cm": args.nu, "count": args.count,
                 "config": args.config, "width": args.width})
    print(f"wrote {path}")
    return 0


def cmd_dispersion(args):
    cs = _device(args)
    curve = sweep_neff(cs, args.nu_start, args.nu_stop, args.step,
                       workers=args.workers, grid_opts=_grid_opts(args))
    out = _out_dir(args)
    path = os.path.join(out, "dispersion.txt")
    labels = list(curve.branches)
    cols = [curve.nu_cm]
    names = ["nu_cm1"]
    for lab in labels:
        b = curve.branches[lab]
        gvd, tod = curve.gvd_tod(lab)
        ng = curve.group_index(lab)
        cols += [b.n_eff, ng, gvd, tod, b.gamma]
        names += [f"n_eff_{lab}", f"n_g_{lab}", f"gvd_fs2mm_{lab}",
                  f"tod_fs3mm_{lab}", f"gamma_{lab}"]
    flags = [f"{lab}: {nu} {msg}" for lab in labels
             for nu, msg in curve.branches[lab].flags]
    _write_table(path, ["supermode dispersion sweep"] + flags, cols, names)
    _write_meta(os.path.join(out, "dispersion.json"), "dispersion",
                {"nu_start": args.nu_start, "nu_stop": args.nu_stop,
                 "step": args.step, "config": args.config,
                 "width": args.width, "workers": args.workers,
                 "grid_opts": _grid_opts(args)})
    print(f"wrote {path}")
    return 0


def cmd_design_sweep(args):
    cs = _device(args)
    widths = [float(w) for w in args.widths.split(",")]
    table = width_design_sweep(cs, widths, band=(args.nu_start, args.nu_stop),
                               step=args.step, workers=args.workers,
                               grid_opts=_grid_opts(args))
    out = _out_dir(args)
    path = os.path.join(out, "design_sweep.txt")
    with open(path, "w") as f:
        f.write(f"# width design table, band {table.band} cm^-1\n")
        f.write("# width_um parity gamma_band gvd_center_fs2mm "
                "gvd_zero_crossings tod_center_fs3mm lasing\n")
        for r in table.rows:
            f.write(f"{r.width_um!r} {r.parity} {r.gamma_band!r} "
                    f"{r.gvd_center!r} {r.gvd_zero_crossings} "
                    f"{r.tod_center!r} {int(r.lasing)}\n")
    _write_meta(os.path.join(out, "design_sweep.json"), "design-sweep",
                {"widths": widths, "band": list(table.band),
                 "step": args.step, "workers": args.workers,
                 "resonant_width_um": table.resonant_width_um,
                 "recommended_widths": table.recommended_widths})
    print(f"wrote {path}; resonant width {table.resonant_width_um} um, "
          f"recommended {table.recommended_widths}")
    return 0


def cmd_facet(args):
    films = []
    if args.coating:
        for part in args.coating.split(","):
            try:
                n_str, t_str = part.split(":")
                films.append((float(n_str), float(t_str)))
            except ValueError:
                raise CliError(f"coating: bad film spec {part!r}, "
                               "expected n:thickness_um")
    coating = CoatingStack(tuple(films)) if films else None
    r = facet_reflectivity(args.n, coating, args.nu)
    print(f"R = {r:.4f}")
    return 0


def _comb_params_from_config(path, preset=None):
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise CliError(f"config: cannot read {path}")
    section = "comb"
    if preset:
        section = f"preset:{preset}"
        if section not in cp:
            raise CliError(f"config: no [{section}] section in {path}")
    elif "comb" not in cp:
        raise CliError(f"config: no [comb] section in {path}")
    fields = {f: float for f in (
        "f_rep_ghz", "f_mod_ghz", "mod_index", "gain", "loss", "sat_power",
        "gain_curvature", "lef", "d2", "d3", "backscatter", "facet_feedback",
        "noise_floor", "noise_rate", "dt_ns")}
    fields["mode_count"] = int
    kwargs = {}
    for key, value in cp[section].items():
        if key not in fields:
            raise CliError(f"{section}.{key}: unknown comb parameter")
        try:
            kwargs[key] = fields[key](value)
        except ValueError:
            raise CliError(f"{section}.{key}: bad value {value!r}")
    if preset and "f_mod_ghz" not in kwargs:
        kwargs["f_mod_ghz"] = kwargs.get("f_rep_ghz", CombParams.f_rep_ghz)
    try:
        return CombParams(**kwargs)
    except ValueError as e:
        raise CliError(f"{section}: {e}")


def cmd_comb(args):
    p = _comb_params_from_config(args.config, args.preset)
    state = simulate_comb(p, t_end_ns=args.t_end, seed=args.seed)
    spec = state.spectrum()
    ref = spec.max()
    db = 10.0 * np.log10(np.maximum(spec / ref, 1e-30))
    out = _out_dir(args)
    path = os.path.join(out, "comb_spectrum.txt")
    _write_table(path,
                 [f"comb steady state, t = {args.t_end} ns, "
                  f"converged = {state.converged}"],
                 [p.sites, p.sites * p.line_spacing_cm, db],
                 ["site", "offset_cm1", "intensity_db"])
    _write_meta(os.path.join(out, "comb_spectrum.json"), "comb",
                {"params": asdict(p), "t_end_ns": args.t_end,
                 "preset": args.preset,
                 "bandwidth_cm1": comb_bandwidth(spec, p.line_spacing_cm),
                 "state": classify_spectrum(spec)}, seed=args.seed)
    print(f"wrote {path}")
    return 0


def cmd_rf_map(args):
    p = _comb_params_from_config(args.config, args.preset)
    half = args.span / 2.0
    smap = rf_detuning_sweep(p, p.f_rep_ghz - half, p.f_rep_ghz + half,
                             args.steps, t_end_ns=args.t_end, seed=args.seed)
    out = _out_dir(args)
    path = os.path.join(out, "rf_map.txt")
    save_map(smap, path)
    _write_meta(os.path.join(out, "rf_map.json"), "rf-map",
                {"params": asdict(p), "span_ghz": args.span,
                 "steps": args.steps, "t_end_ns": args.t_end,
                 "preset": args.preset,
                 "line_spacing_cm1": p.line_spacing_cm,
                 "dispersion_rate_formula": DISPERSION_RATE_FORMULA,
                 "flagged_f_mod_ghz": smap.flagged}, seed=args.seed)
    print(f"wrote {path}")
    return 0


def cmd_analyze_liv(args):
    curve = load_liv(args.path)
    # with two facet channels the lasing direction can switch, so fit the
    # threshold on the total power
    chan = None if curve.power_mw.shape[1] >= 2 else 0
    thr, slope = threshold_and_slope(curve, channel=chan)
    summary = {"threshold_ma": thr, "slope_mw_per_ma": slope,
               "oscillation_per_100ma": power_oscillation_metric(
                   curve, channel=0, above_ma=thr)}
    if curve.power_mw.shape[1] >= 2:
        summary["channel_anticorrelation"] = channel_anticorrelation(
            curve, above_ma=thr)
    out = _out_dir(args)
    _write_meta(os.path.join(out, "liv_analysis.json"), "analyze-liv",
                {"input": args.path, "results": summary})
    for k, v in summary.items():
        print(f"{k} = {v:.6g}")
    return 0


def cmd_analyze_map(args):
    smap = load_map(args.path)
    res = analyze_map(smap)
    out = _out_dir(args)
    _write_meta(os.path.join(out, "map_analysis.json"), "analyze-map",
                {"input": args.path,
                 "results": {
                     "states": res.states,
                     "bandwidths_cm1": list(res.bandwidths_cm),
                     "best_sweep_value": float(
                         smap.sweep_axis[res.best_index]),
                     "best_bandwidth_cm1": res.best_bandwidth_cm,
                     "monochromatic_ranges": res.monochromatic_ranges}})
    print(f"best bandwidth {res.best_bandwidth_cm:.2f} cm^-1 at "
          f"{smap.sweep_label} = {smap.sweep_axis[res.best_index]:g}")
    return 0


# figure-reproduction presets: (g0, f_rep, M) triples stand in for the
# measured operating points; d3/lef set the cavity dispersion response
_FIG4_PRESETS = {
    "reference-like": dict(gain=2.0, loss=1.0, f_rep_ghz=15.691,
                           mod_index=1.2, d3=0.0, lef=1.5, noise_rate=1e-4),
    "high-tod": dict(gain=2.0, loss=1.0, f_rep_ghz=11.091,
                     mod_index=1.2, d3=0.02, lef=2.0),
    "low-tod": dict(gain=2.0, loss=1.0, f_rep_ghz=10.15,
                    mod_index=1.2, d3=2e-3, lef=1.5),
}


def cmd_reproduce(args):
    out = _out_dir(args)
    if args.figure == "fig3":
        widths = [3.0, 5.0, 8.5]
        step = args.step or 8.0
        table = width_design_sweep(narrow_device(3.0), widths,
                                   step=step, workers=args.workers,
                                   grid_opts=_grid_opts(args))
        path = os.path.join(out, "fig3_design.txt")
        with open(path, "w") as f:
            f.write("# three-width supermode design table\n")
            f.write("# width_um parity gamma_band gvd_center_fs2mm "
                    "gvd_zero_crossings tod_center_fs3mm lasing\n")
            for r in table.rows:
                f.write(f"{r.width_um!r} {r.parity} {r.gamma_band!r} "
                        f"{r.gvd_center!r} {r.gvd_zero_crossings} "
                        f"{r.tod_center!r} {int(r.lasing)}\n")
        _write_meta(os.path.join(out, "fig3_design.json"), "reproduce fig3",
                    {"widths": widths, "step": step,
                     "grid_opts": _grid_opts(args), "workers": args.workers,
                     "resonant_width_um": table.resonant_width_um},
                    seed=args.seed)
        print(f"wrote {path}")
        return 0
    if args.figure == "fig4-sim":
        mode_count = args.modes or 257
        steps = args.steps or 21
        for name, over in _FIG4_PRESETS.items():
            p = CombParams(mode_count=mode_count, **over)
            p = replace(p, f_mod_ghz=p.f_rep_ghz)
            smap = rf_detuning_sweep(p, p.f_rep_ghz - args.span / 2,
                                     p.f_rep_ghz + args.span / 2, steps,
                                     t_end_ns=args.t_end, seed=args.seed)
            path = os.path.join(out, f"fig4_{name}.txt")
            save_map(smap, path)
            _write_meta(os.path.join(out, f"fig4_{name}.json"),
                        "reproduce fig4-sim",
                        {"preset": name, "params": asdict(p),
                         "span_ghz": args.span, "steps": steps,
                         "t_end_ns": args.t_end}, seed=args.seed)
            print(f"wrote {path}")
        return 0
    raise CliError(f"figure: unknown target {args.figure!r}")


# -------------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(
        prog="dualwg",
        description="Design and analysis of dual-waveguide ring lasers")
    ap.add_argument("--out", help="output directory (default $DUALWG_OUTDIR or .)")
    sub = ap.add_subparsers(dest="cmd")

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("parse-stack", cmd_parse_stack,
            help="print a superlattice period table")
    p.add_argument("period", help="slash-separated Angstrom thicknesses")

    def geometry_args(p):
        p.add_argument("--config", help="device INI file")
        p.add_argument("--width", type=float, default=3.0,
                       help="top waveguide width [um] for the built-in device")
        p.add_argument("--dx", type=float, help="lateral grid step [um]")
        p.add_argument("--dy", type=float, help="growth-axis grid step [um]")

    p = add("modes", cmd_modes, help="solve 2D modes at one wavenumber")
    geometry_args(p)
    p.add_argument("--nu", type=float, default=2200.0, help="wavenumber [cm^-1]")
    p.add_argument("--count", type=int, default=2)

    p = add("dispersion", cmd_dispersion, help="supermode dispersion sweep")
    geometry_args(p)
    p.add_argument("--nu-start", type=float, default=2140.0)
    p.add_argument("--nu-stop", type=float, default=2260.0)
    p.add_argument("--step", type=float, default=8.0)
    p.add_argument("--workers", type=int, default=1)

    p = add("design-sweep", cmd_design_sweep,
            help="per-width supermode design table")
    geometry_args(p)
    p.add_argument("--widths", default="3,5,8.5",
                   help="comma-separated top widths [um]")
    p.add_argument("--nu-start", type=float, default=2140.0)
    p.add_argument("--nu-stop", type=float, default=2260.0)
    p.add_argument("--step", type=float, default=8.0)
    p.add_argument("--workers", type=int, default=1)

    p = add("facet", cmd_facet, help="facet reflectivity")
    p.add_argument("--n", type=float, required=True, help="facet modal index")
    p.add_argument("--coating",
                   help="comma-separated films n:thickness_um, e.g. 1.35:0.7")
    p.add_argument("--nu", type=float, default=2222.0)

    p = add("comb", cmd_comb, help="single comb simulation from a config file")
    p.add_argument("--config", required=True, help="comb INI file")
    p.add_argument("--preset", help="use [preset:NAME] section")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)

    p = add("rf-map", cmd_rf_map, help="spectrum vs modulation frequency")
    p.add_argument("--config", required=True, help="comb INI file")
    p.add_argument("--preset", help="use [preset:NAME] section")
    p.add_argument("--span", type=float, default=0.02,
                   help="modulation-frequency span [GHz] centered on f_rep")
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)

    p = add("analyze-liv", cmd_analyze_liv, help="LIV threshold/slope analysis")
    p.add_argument("path")

    p = add("analyze-map", cmd_analyze_map, help="spectral-map classification")
    p.add_argument("path")

    p = add("reproduce", cmd_reproduce, help="figure-reproduction datasets")
    p.add_argument("figure", choices=["fig3", "fig4-sim"])
    p.add_argument("--step", type=float, help="sweep step [cm^-1] (fig3)")
    p.add_argument("--dx", type=float, help="lateral grid step [um] (fig3)")
    p.add_argument("--dy", type=float, help="growth-axis grid step [um] (fig3)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--modes", type=int, help="lattice size (fig4-sim)")
    p.add_argument("--steps", type=int, help="sweep points (fig4-sim)")
    p.add_argument("--span", type=float, default=0.02)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "fn", None):
        ap.print_usage(sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (CliError, ParseError, ValidationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
