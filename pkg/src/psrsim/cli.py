"""Command line entry point: ``psrsim {run,preset,sweep,soliton,pulse}``.

Outputs go to ``--output-dir`` if given, else ``$PSRSIM_OUTPUT_DIR``, else
the configuration's ``output.dir``.  The exit status is nonzero when any run
fails.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import pulse as P
from .config import (PRESETS, SOLITON_PRESETS, ConfigError, SolitonJob, emit_values, parse_config,
                     parse_soliton_config, preset, soliton_preset, soliton_values)
from .io import write_rows, write_table
from .params import MediumParams, derive, flux_to_amplitude
from .solver import InstabilityError, delay_time, peak_flux, released_fraction
from .soliton import (analytic_residual, flux_table, integrate_profile, steady_state_residual,
                      tail_efold_length)
from .sweep import run_to_dir, sweep

log = logging.getLogger("psrsim")


def _outdir(flag: str | None, configured: str) -> Path:
    p = Path(flag or os.environ.get("PSRSIM_OUTPUT_DIR") or configured)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _overrides(items: list[str] | None) -> dict[str, str]:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError(f"override must be key=value, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _report_run(rec, out: Path) -> None:
    dl = delay_time(rec)
    print(f"output: {out}")
    print(f"peak flux   {peak_flux(rec):.4e} W/mm^2")
    print(f"delay       {'none' if dl is None else f'{dl:.4g} ns'}")
    print(f"released    {released_fraction(rec):.3f} of stored energy")


def _run_scenario(s, flag) -> int:
    out = _outdir(flag, s.output_dir)
    try:
        rec = run_to_dir(s, out)
    except InstabilityError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    _report_run(rec, out)
    return 0


def _soliton(job: SolitonJob, flag) -> int:
    out = _outdir(flag, job.output_dir)
    d = derive(job.medium)
    e0 = float(flux_to_amplitude(job.total_flux, d))
    l = d.cm_to_xi(job.length_cm)
    prof = integrate_profile(e0, l, job.region, d, num=job.num_points)
    ar = analytic_residual(prof, d)
    ss = steady_state_residual(prof, d)
    (out / "config_resolved.txt").write_text(emit_values(soliton_values(job)))
    write_table(flux_table(prof, d), out / "soliton_profile.csv")
    total = np.abs(prof.eR) ** 2 + np.abs(prof.eL) ** 2
    rows = [
        ("e0_dimensionless", e0),
        ("length_dimensionless", l),
        ("r3_edge", float(prof.r3[0])),
        ("r3_mid", float(prof.r3[len(prof.r3) // 2])),
        ("flux_constancy", float(np.max(np.abs(total / e0 ** 2 - 1.0)))),
        ("winding", prof.winding.value),
        ("winding_spinor", int(prof.winding.spinor)),
        ("soliton_size_printed_cm", d.xi_to_cm(prof.xi_s)),
        ("soliton_size_rederived_cm", d.xi_to_cm(prof.xi_s_rederived)),
        ("tail_efold_cm", d.xi_to_cm(tail_efold_length(prof))),
        ("analytic_residual_printed", ar.printed),
        ("analytic_residual_rederived", ar.rederived),
        ("analytic_match", ar.matches),
        ("steady_state_residual_dimensionless", ss["max"]),
    ]
    write_rows(("quantity", "value"), rows, out / "soliton_summary.csv")
    print(f"output: {out}")
    for k, v in rows:
        print(f"{k:38s} {v}")
    return 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(a) -> int:
    s = parse_config(Path(a.config).read_text())
    return _run_scenario(s, a.output_dir)


def cmd_preset(a) -> int:
    ov = _overrides(a.set)
    if a.name in SOLITON_PRESETS:
        return _soliton(soliton_preset(a.name, ov), a.output_dir)
    return _run_scenario(preset(a.name, ov), a.output_dir)


def cmd_sweep(a) -> int:
    if Path(a.source).is_file():
        base = parse_config(Path(a.source).read_text())
    elif a.source in PRESETS and a.source not in SOLITON_PRESETS:
        base = preset(a.source, _overrides(a.set))
    else:
        raise ConfigError(f"{a.source!r} is neither a config file nor a run preset")
    values = [float(v) for v in a.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("no sweep values given")
    out = _outdir(a.output_dir, base.output_dir)
    rows = sweep(base, a.axis, values, out, workers=a.workers)
    print(f"summary: {out / 'summary.csv'}")
    for r in rows:
        tail = r.error if not r.ok else f"peak {r.peak_flux:.4e} W/mm^2, delay {r.delay_ns:.4g} ns"
        print(f"  {a.axis} = {r.value:g}: {r.status}, {tail}")
    return 0 if all(r.ok for r in rows) else 1


def _medium_from_args(a) -> MediumParams:
    return MediumParams(n=a.n, T1=a.T1, T2=a.T2, flux_convention=a.flux_convention)


def cmd_soliton(a) -> int:
    if a.config:
        job = parse_soliton_config(Path(a.config).read_text())
    else:
        m = _medium_from_args(a)
        if a.total_flux is None and a.e0 is None:
            raise ConfigError("give --total-flux or --e0")
        flux = a.total_flux if a.total_flux is not None else a.e0 ** 2 * derive(m).flux_unit
        job = SolitonJob(m, a.length_cm, flux, a.region, a.num_points)
    return _soliton(job, a.output_dir)


def cmd_pulse(a) -> int:
    m = _medium_from_args(a)
    if a.shape == "lorentzian":
        shape = P.PulseShape.lorentzian(a.peak, a.width_ns)
    elif a.shape == "rectangular":
        shape = P.PulseShape.rectangular(a.peak, a.width_ns)
    else:
        data = np.loadtxt(a.file, delimiter=",", skiprows=1, ndmin=2)
        shape = P.PulseShape.sampled(data[:, 0], data[:, 1])
    theta = P.pulse_area(shape, m)
    n, rem = P.split_count(theta)
    d = derive(m)
    rows = [("area_rad", theta), ("area_physical_rad", P.pulse_area_physical(shape, m)),
            ("split_pulses", n), ("remainder_rad", rem)]
    for x in a.x_cm or []:
        ax = d.cm_to_xi(x)
        rows.append((f"compression_amplifier_x{x:g}cm", P.compression_factor(theta, ax, "amplifier")))
        rows.append((f"compression_absorber_x{x:g}cm", P.compression_factor(theta, ax, "absorber")))
    out = _outdir(a.output_dir, "psr_out")
    write_rows(("quantity", "value"), rows, out / "pulse_summary.csv")
    for k, v in rows:
        print(f"{k:34s} {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psrsim", description="Paired superradiance Maxwell-Bloch simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("-o", "--output-dir", default=None,
                       help="output directory (overrides $PSRSIM_OUTPUT_DIR and output.dir)")

    def medium(p):
        p.add_argument("--n", type=float, default=2.6e22, help="number density (cm^-3)")
        p.add_argument("--T1", type=float, default=1e3, help="population relaxation (ns)")
        p.add_argument("--T2", type=float, default=20.0, help="phase relaxation (ns)")
        p.add_argument("--flux-convention", default="envelope", choices=("envelope", "printed"))

    p = sub.add_parser("run", help="run a configuration file")
    p.add_argument("config")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a named figure preset")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key")
    common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("sweep", help="sweep one numeric key")
    p.add_argument("source", help="config file or run preset name")
    p.add_argument("--axis", required=True, help="key to vary (or trigger.power for both powers)")
    p.add_argument("--values", required=True, help="comma separated values")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a preset key")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("soliton", help="stationary soliton profile")
    p.add_argument("--config", default=None, help="soliton configuration file")
    p.add_argument("--e0", type=float, default=None, help="total-flux amplitude (dimensionless)")
    p.add_argument("--total-flux", type=float, default=None, help="|E_R|^2 + |E_L|^2 (W/mm^2)")
    p.add_argument("--length-cm", type=float, default=5.0)
    p.add_argument("--region", default="absorber", choices=("absorber", "emitter"))
    p.add_argument("--num-points", type=int, default=8001)
    medium(p)
    common(p)
    p.set_defaults(func=cmd_soliton)

    p = sub.add_parser("pulse", help="pulse area, splitting and compression")
    p.add_argument("--shape", default="lorentzian", choices=("lorentzian", "rectangular", "sampled"))
    p.add_argument("--peak", type=float, default=1.0, help="peak flux (W/mm^2)")
    p.add_argument("--width-ns", type=float, default=1.0, help="HWHM or duration (ns)")
    p.add_argument("--file", default=None, help="CSV of t_ns,flux_W_mm2 for sampled shapes")
    p.add_argument("--x-cm", type=float, action="append", help="propagation distance for compression")
    medium(p)
    common(p)
    p.set_defaults(func=cmd_pulse)
    return ap


def main(argv: list[str] | None = None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(a.func(a))
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
