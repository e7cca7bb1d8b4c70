"""
Command-line entry point.

Subcommands: simulate, sweep, contact-loop, shearplane, fit, crush-extract.
Exit codes: 0 success, 2 usage/config, 3 input parse, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io as pio
from .config import RunConfig, load_config, with_overrides
from .core import Kinematics, ToolGeometry, Trace
from .engagement import engagement_loop, loop_orientation
from .errors import (AlignmentError, ConfigurationError, DegenerateLoopError, DomainError,
                     FitError, ParseError, SearchWindowError, UndefinedPhaseError)
from .forces import crushing_force, fit_linear, fit_sinusoid, max_force_vs_wavelength
from .shearplane import (WavySurfaceSpec, find_jumps, length_phase_leads, shear_length_series,
                         third_harmonic_ratio)
from .surface import machined_surface, tool_tip_path

log = logging.getLogger("procdamp")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3, 4

# maxima within this relative spread across wavelengths count as saturated
FLAT_SPREAD = 0.02

NUMERIC_ERRORS = (FitError, SearchWindowError, AlignmentError, DegenerateLoopError,
                  UndefinedPhaseError, FloatingPointError)


class UsageError(Exception):
    pass


def _tag(v: float) -> str:
    return format(v, "g").replace(".", "p")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    io_cfg = cfg.io
    if args.out_dir is not None or args.format is not None:
        io_cfg = with_overrides(io_cfg, out_dir=args.out_dir, format=args.format)
    return with_overrides(cfg, io=io_cfg, seed=args.seed, workers=args.workers)


def _out(cfg: RunConfig) -> Path:
    return Path(cfg.io.out_dir)


def _write_table(cfg: RunConfig, stem: str, header, rows) -> Path:
    """Summary table as CSV, or as a JSON list of records when io.format is json."""
    if cfg.io.format == "json":
        recs = [{h: (v if isinstance(v, str) else float(v)) for h, v in zip(header, r)} for r in rows]
        return pio.write_json(_out(cfg) / f"{stem}.json", recs)
    return pio.write_csv(_out(cfg) / f"{stem}.csv", header, list(zip(*rows)) or [[] for _ in header])


# --- simulate ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _config(args)
    tool, kin = cfg.require_tool(), cfg.require_kinematics()
    wl = kin.wavelength
    surf = machined_surface(tool, kin, cfg.grid.length(wl), cfg.grid.step(wl))
    out = _out(cfg)
    pio.write_surface_csv(out / "surface.csv", surf)
    pio.write_csv(out / "tip_path.csv", ("x", "y"), (surf.x, tool_tip_path(kin, surf.x)))
    print(f"wavelength {wl:.6g} mils, {surf.heights.size} samples, "
          f"min height {surf.heights.min():.4f} mils -> {out}")
    return EXIT_OK


# --- contact loops -----------------------------------------------------------

def _run_cell(tool: ToolGeometry, kin: Kinematics, cycles: int, ppw: int, dx: float | None):
    wl = kin.wavelength
    return engagement_loop(tool, kin, cycles=cycles, dx=dx if dx is not None else wl / ppw)


def cmd_contact_loop(args) -> int:
    cfg = _config(args)
    tool, kin = cfg.require_tool(), cfg.require_kinematics()
    loop = _run_cell(tool, kin, cfg.grid.cycles, cfg.grid.points_per_wavelength, cfg.grid.dx)
    pio.write_loop_csv(_out(cfg) / "loop.csv", loop)
    msg = f"max contact {loop.max_contact:.4f} mils"
    try:
        areas = loop_orientation(loop)
        msg += f", loop area per cycle {', '.join(f'{a:.4f}' for a in areas)}"
    except DegenerateLoopError:
        msg += ", no contact"
    print(msg)
    return EXIT_OK


def _sweep_cell(job):
    tool, kin, cycles, ppw, dx = job
    try:
        return _run_cell(tool, kin, cycles, ppw, dx), None
    except Exception as exc:  # reported per cell, the sweep carries on
        return None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    cfg = _config(args)
    wls = tuple(args.wavelengths) if args.wavelengths else cfg.sweep_wavelengths
    lrs = tuple(args.relief_lengths) if args.relief_lengths else cfg.sweep_relief_lengths
    if not wls or not lrs:
        raise UsageError("sweep needs at least one wavelength and one relief length")
    base_tool, base_kin = cfg.require_tool(), cfg.require_kinematics()
    cells = [(lr, wl) for lr in lrs for wl in wls]
    jobs = []
    for lr, wl in cells:
        tool = ToolGeometry(base_tool.rake_angle, base_tool.relief_angle, lr, base_tool.edge_radius)
        kin = Kinematics.from_wavelength(base_kin.cutting_speed, wl, base_kin.vibration_amplitude,
                                         base_kin.nominal_feed,
                                         amplitude_convention=base_kin.amplitude_convention,
                                         phase0=base_kin.phase0)
        jobs.append((tool, kin, cfg.grid.cycles, cfg.grid.points_per_wavelength, cfg.grid.dx))

    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_sweep_cell, jobs))
    else:
        results = [_sweep_cell(j) for j in jobs]

    out = _out(cfg)
    failed = 0
    rows = []
    by_length: dict[float, list] = {}
    for (lr, wl), (loop, err) in zip(cells, results):
        if err is not None:
            failed += 1
            print(f"cell relief_length={lr:g} wavelength={wl:g} failed: {err}", file=sys.stderr)
            continue
        pio.write_loop_csv(out / f"loop_L{_tag(lr)}_wl{_tag(wl)}.csv", loop)
        rows.append((wl, lr, loop.max_contact))
        by_length.setdefault(lr, []).append((wl, loop))

    _write_table(cfg, "summary", ("wavelength", "relief_length", "max_contact"), rows)
    cls_rows = []
    for lr in lrs:
        pairs = by_length.get(lr, [])
        if len(pairs) >= 2:
            t = max_force_vs_wavelength(pairs)
            label = "flat-max" if t.spread < FLAT_SPREAD else t.trend
            cls_rows.append((lr, label, t.spread))
            print(f"relief_length {lr:g}: max contact "
                  f"{', '.join(f'{m:.3f}' for m in t.maxima)} -> {label} (spread {t.spread:.2%})")
    _write_table(cfg, "classification", ("relief_length", "trend", "spread"), cls_rows)
    return EXIT_NUMERIC if failed else EXIT_OK


# --- shear plane -------------------------------------------------------------

def cmd_shearplane(args) -> int:
    cfg = _config(args)
    sp = cfg.shearplane
    missing = [k for k in ("mean_depth", "amplitude", "wavelength") if k not in sp]
    if missing:
        raise ConfigurationError(f"config lacks shearplane.{', shearplane.'.join(missing)}")
    surf = WavySurfaceSpec(sp["mean_depth"], sp["amplitude"], sp["wavelength"],
                           math.radians(sp.get("phase_deg", 0.0)))
    phis = sp.get("phi") or tuple(np.round(np.arange(0.2, 1.0001, 0.1), 6))
    n = sp.get("samples", 256)
    out = _out(cfg)
    leads = length_phase_leads(surf, phis, n=min(n, 128))
    rows = []
    for phi, lead in zip(phis, leads):
        series = shear_length_series(surf, phi, n)
        chip = surf.chip_thickness(series.x)
        pio.write_csv(out / f"shear_phi{_tag(phi)}.csv", ("tip_x", "length", "chip_thickness"),
                      (series.x, series.values, chip))
        rows.append((phi, lead, third_harmonic_ratio(series, surf.wavelength), len(find_jumps(surf, phi))))
    _write_table(cfg, "shearplane_summary", ("phi", "phase_lead", "third_harmonic_ratio", "jumps"), rows)
    for phi, lead, h3, nj in rows:
        print(f"phi {phi:.3f} rad: lead {lead:+.4f} rad, 3rd/1st harmonic {h3:.4f}, jumps {nj}")
    return EXIT_OK


# --- fitting -----------------------------------------------------------------

def _columns(cols: dict, names: str | None):
    keys = list(cols)
    if names:
        want = [s.strip() for s in names.split(",")]
        if len(want) != 2 or any(w not in cols for w in want):
            raise ParseError(f"columns {want} not found in header {keys}")
    else:
        if len(keys) < 2:
            raise ParseError("series needs at least two columns")
        want = keys[:2]
    return cols[want[0]], cols[want[1]]


def cmd_fit(args) -> int:
    cfg = _config(args)
    x, y = _columns(pio.read_csv(args.series), args.columns)
    if args.mode == "sinusoid":
        if args.wavelength is None:
            raise UsageError("--wavelength is required for sinusoid fits")
        fit = fit_sinusoid(Trace(x, y), args.wavelength)
        line = (f"Y = {fit.a0:.3f} + {fit.a1:.3f} * cos(2 pi X / {fit.wavelength:g}) "
                f"+ {fit.a2:.3f} * sin(2 pi X / {fit.wavelength:g}), error {fit.rms_residual:.2f}")
    else:
        fit = fit_linear(x, y)
        line = f"{fit.equation()}, error {fit.rms_error:.2f}"
    rec = pio.fit_record(fit)
    if args.bootstrap:
        rec["bootstrap"] = _bootstrap(x, y, args, cfg.seed)
    pio.write_json(_out(cfg) / "fit.json", rec)
    print(line)
    return EXIT_OK


def _bootstrap(x, y, args, seed: int) -> dict:
    """Resample rows with replacement; report coefficient standard deviations."""
    rng = np.random.default_rng(seed)
    coefs = []
    for _ in range(args.bootstrap):
        i = np.sort(rng.integers(0, x.size, x.size))
        try:
            if args.mode == "sinusoid":
                xs, ix = np.unique(x[i], return_index=True)
                f = fit_sinusoid(Trace(xs, y[i][ix]), args.wavelength)
                coefs.append((f.a0, f.a1, f.a2))
            else:
                f = fit_linear(x[i], y[i])
                coefs.append((f.intercept, f.slope))
        except (FitError, DomainError):
            continue
    if not coefs:
        raise FitError("every bootstrap resample was degenerate")
    c = np.array(coefs)
    return {"resamples": len(coefs), "seed": seed, "coefficient_std": c.std(axis=0, ddof=1).tolist()}


# --- crushing force ----------------------------------------------------------

def cmd_crush_extract(args) -> int:
    cfg = _config(args)
    crush = pio.read_force_csv(args.crush_csv)
    nocrush = pio.read_force_csv(args.nocrush_csv)
    cf = crushing_force(crush.thrust(), nocrush.thrust())
    out = _out(cfg)
    pio.write_csv(out / "crushing_force.csv", ("x", "crushing_force"), (cf.x, cf.values))
    if cfg.kinematics is not None:
        pio.write_csv(out / "crush_loop.csv", ("x", "tool_y", "crushing_force"),
                      (cf.x, tool_tip_path(cfg.kinematics, cf.x), cf.values))
    print(f"crushing force over {cf.x[0]:g}..{cf.x[-1]:g} mils: "
          f"max {cf.values.max():.3f} lbf, min {cf.values.min():.3f} lbf")
    return EXIT_OK


# --- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value run config")
    common.add_argument("--out-dir", help="output directory (default: io.out_dir or .)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="summary format for sweep and shearplane (fit records are always JSON)")
    common.add_argument("--workers", type=int, help="parallel sweep cells")
    common.add_argument("--seed", type=int, help="seed for resampling")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="procdamp", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="machined surface and tip path")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("contact-loop", parents=[common], help="contact length along one run")
    s.set_defaults(func=cmd_contact_loop)

    s = sub.add_parser("sweep", parents=[common], help="contact loops over wavelengths x relief lengths")
    s.add_argument("--wavelengths", type=float, nargs="+")
    s.add_argument("--relief-lengths", type=float, nargs="+")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("shearplane", parents=[common], help="sliding-line shear-plane series")
    s.set_defaults(func=cmd_shearplane)

    s = sub.add_parser("fit", parents=[common], help="sinusoid or linear least-squares fit")
    s.add_argument("series", help="CSV with a header row")
    s.add_argument("--mode", choices=("sinusoid", "linear"), required=True)
    s.add_argument("--wavelength", type=float)
    s.add_argument("--columns", help="X,Y column names (default: first two)")
    s.add_argument("--bootstrap", type=int, default=0, help="number of seeded resamples")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("crush-extract", parents=[common], help="crushing force from paired runs")
    s.add_argument("crush_csv")
    s.add_argument("nocrush_csv")
    s.set_defaults(func=cmd_crush_extract)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"procdamp {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, DomainError) as exc:
        print(f"procdamp {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"procdamp {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NUMERIC_ERRORS as exc:
        print(f"procdamp {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
