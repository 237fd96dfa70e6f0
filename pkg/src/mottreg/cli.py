"""Command-line front end: one subcommand per reported quantity, one config
file plus --set overrides (flags win), deterministic JSON/CSV emission.

Every run prints a JSON envelope with the fully resolved configuration; the
primary artifact goes to --out (resolved against $MOTTREG_OUTDIR for
relative paths) or to stdout.  Exit codes: 0 ok, 2 config error, 3 physics
domain error, 4 numerics error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import removal as removal_mod
from . import speedup as speedup_mod
from . import superlattice as lattice_mod
from . import transfer as transfer_mod
from .budget import resolved_config_echo, run_scheme1, run_scheme2, sweep
from .config import (RunConfig, build_species, load_config, resolve_pulse_rules,
                     resolve_xi_bar, set_by_path)
from .errors import ConfigError, NumericsError, PhysicsDomainError
from .pulse import GaussianPulse, pi_pulse_amplitude, rabi_evolve
from .stark import default_search_band, optimize_lpol_wavelength, wavelength_scan
from .units import UnitSystem

__all__ = ["main"]


def _fmt_float(value: float, digits: int) -> float:
    return float(format(float(value), f".{digits}g"))


def _round_floats(obj, digits: int):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _fmt_float(obj, digits)
    if isinstance(obj, (np.floating,)):
        return _fmt_float(float(obj), digits)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def _json_text(report, digits: int) -> str:
    return json.dumps(_round_floats(report, digits), indent=2) + "\n"


def _csv_text(rows, digits: int) -> str:
    if isinstance(rows, dict):
        rows = [rows]
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            value = row[key]
            if isinstance(value, bool):
                cells.append(str(value).lower())
            elif isinstance(value, (float, np.floating)):
                cells.append(format(float(value), f".{digits}g"))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit(report, fmt: str, path, digits: int = 12) -> str:
    """Serialize a report (dict or list of dicts) deterministically.

    Returns the text; writes it to path when given.  Floats carry `digits`
    significant digits, so identical reports give byte-identical files.
    """
    text = _json_text(report, digits) if fmt == "json" else _csv_text(report, digits)
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot write output '{path}': {exc}") from exc
    return text


def _resolve_out(args, cfg: RunConfig, name: str | None = None):
    out = name if name is not None else args.out
    if out is None:
        return None
    out = Path(out)
    if not out.is_absolute():
        base = os.environ.get("MOTTREG_OUTDIR", cfg.output.directory)
        out = Path(base) / out
    return out


def _species_units(cfg: RunConfig):
    species = build_species(cfg.species)
    units = UnitSystem.for_lattice(species, cfg.lattice.lambda_s_nm * 1e-9)
    return species, units


def _deliver(args, cfg: RunConfig, report, default_fmt: str, side_files=()):
    """Write the primary artifact and print the envelope with the resolved
    config; report may be a dict (json) or rows (csv)."""
    digits = cfg.output.float_digits
    fmt = args.format or default_fmt
    out = _resolve_out(args, cfg)
    for side_path, side_rows in side_files:
        emit(side_rows, "csv", side_path, digits)
    if out is not None:
        emit(report, fmt, out, digits)
        envelope = {"config": resolved_config_echo(cfg), "out": str(out)}
        sys.stdout.write(_json_text(envelope, digits))
    elif fmt == "json":
        envelope = {"config": resolved_config_echo(cfg), "report": report}
        sys.stdout.write(_json_text(envelope, digits))
    else:
        sys.stdout.write(_csv_text(report, digits))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_stark_scan(args, cfg: RunConfig):
    species, units = _species_units(cfg)
    exclusion = cfg.lattice.band_exclusion_nm * 1e-9
    band = default_search_band(species, exclusion)
    rows = wavelength_scan(species, band, args.points, units.base_energy)
    _deliver(args, cfg, rows, "csv")


def _cmd_lattice(args, cfg: RunConfig):
    species, units = _species_units(cfg)
    lam_l = cfg.lattice.lpol_wavelength_nm
    if lam_l == "optimize":
        lam_l = optimize_lpol_wavelength(
            species, exclusion=cfg.lattice.band_exclusion_nm * 1e-9)[0] * 1e9
    base = lattice_mod.SuperlatticeConfig(
        spol_wavelength=cfg.lattice.lambda_s_nm * 1e-9,
        spol_depth=cfg.lattice.depth_er,
        pattern_period=cfg.lattice.pattern_period,
        lpol_wavelength=lam_l * 1e-9,
        lpol_phase=cfg.lattice.lpol_phase_nm * 1e-9)
    intensity = lattice_mod.solve_intensity_for_delta(base, species,
                                                      cfg.lattice.delta_target_er)
    config = lattice_mod.SuperlatticeConfig(
        spol_wavelength=base.spol_wavelength, spol_depth=base.spol_depth,
        pattern_period=base.pattern_period, lpol_wavelength=base.lpol_wavelength,
        lpol_intensity=intensity, lpol_phase=base.lpol_phase)
    sites = lattice_mod.site_hyperfine_detunings(config, species, n_sites=args.sites)
    rows = [{"index": j,
             "position_um": sites.pattern.site_positions[j] * 1e6,
             "deltaE0_ER": sites.delta_e0[j],
             "deltaE1_ER": sites.delta_e1[j],
             "label": sites.pattern.labels[j]}
            for j in range(len(sites.pattern.labels))]

    side = []
    if args.profile_out:
        lam_s = cfg.lattice.lambda_s_nm * 1e-9
        eta_l = lattice_mod.lpol_period(config.pattern_period, lam_s)
        span = sites.pattern.site_positions[-1]
        xs = np.linspace(0.0, span if span > 0 else lam_s, 601)
        shift0 = sites.delta_e0[0]
        shift1 = sites.delta_e1[0]
        envelope = np.cos(np.pi * (xs - config.lpol_phase) / eta_l) ** 2
        vs = cfg.lattice.depth_er * np.sin(2 * np.pi * xs / lam_s) ** 2
        profile = [{"x_um": x * 1e6,
                    "v0_er": float(v + shift0 * e),
                    "v1_er": float(v + shift1 * e)}
                   for x, v, e in zip(xs, vs, envelope)]
        side.append((_resolve_out(args, cfg, args.profile_out), profile))
    _deliver(args, cfg, rows, "csv", side_files=side)


def _cmd_pulse(args, cfg: RunConfig):
    species, units = _species_units(cfg)
    if args.omega0 is not None:
        cfg.pulse.omega0_er = args.omega0
    if args.tf is not None:
        cfg.pulse.cutoff = args.tf
    if args.detuning is not None:
        cfg.pulse.detuning_er = args.detuning
    omega0, t_f, detuning = resolve_pulse_rules(cfg)
    pulse = GaussianPulse(peak_rabi=pi_pulse_amplitude(omega0, t_f),
                          envelope_width=omega0, cutoff=t_f, detuning=detuning)
    outcome = rabi_evolve(pulse)
    report = {"omega0": omega0, "t_f": t_f, "Omega0": pulse.peak_rabi,
              "detuning": detuning, "p_flip": outcome.p_flip,
              "p_stay": outcome.p_stay,
              "pulse_duration_us": units.time_from_natural(2 * t_f) * 1e6}
    side = []
    if args.trajectory_out:
        ts = np.linspace(-t_f, t_f, 801)
        amps = outcome.trajectory.sample(ts)
        rows = [{"t": float(t),
                 "re_c0": float(a[0].real), "im_c0": float(a[0].imag),
                 "re_c1": float(a[1].real), "im_c1": float(a[1].imag)}
                for t, a in zip(ts, amps)]
        side.append((_resolve_out(args, cfg, args.trajectory_out), rows))
    _deliver(args, cfg, report, "json", side_files=side)


def _cmd_remove(args, cfg: RunConfig):
    species, _ = _species_units(cfg)
    if args.trap_depth is not None:
        cfg.removal.trap_depth_er = args.trap_depth
    if args.duration is not None:
        cfg.removal.duration_us = args.duration
    detuning = (2 * np.pi * args.detuning_ghz * 1e9 if args.detuning_ghz is not None
                else species.hyperfine_splitting)
    threshold = removal_mod.removal_photon_threshold(cfg.removal.trap_depth_er)
    plan = removal_mod.solve_removal_drive(
        species.gamma2, threshold, cfg.removal.duration_us * 1e-6,
        cfg.removal.excited_population_cap)
    n_p_b = removal_mod.photon_count(removal_mod.ObeParams(
        linewidth=species.gamma2, rabi_frequency=plan.rabi_frequency,
        detuning=0.0, duration=plan.duration))
    n_p_a = removal_mod.photon_count(removal_mod.ObeParams(
        linewidth=species.gamma2, rabi_frequency=plan.rabi_frequency,
        detuning=detuning, duration=plan.duration))
    report = {"n_p_B": n_p_b, "n_p_A": n_p_a, "threshold": threshold,
              "feasible": plan.feasible_at_request,
              "duration_used": plan.duration,
              "rabi_frequency_rad_s": plan.rabi_frequency}
    _deliver(args, cfg, report, "json")


def _cmd_transfer(args, cfg: RunConfig):
    species, units = _species_units(cfg)
    if args.xi is not None:
        cfg.transfer.xi = args.xi
    if args.ratio is not None:
        cfg.transfer.frequency_ratio = args.ratio
    if args.direction is not None:
        cfg.transfer.direction = args.direction
    if args.depth is not None:
        cfg.lattice.depth_er = args.depth
    omega_i = transfer_mod.initial_frequency(cfg.lattice.depth_er)
    ratio = cfg.transfer.frequency_ratio
    omega_f = (omega_i * ratio if cfg.transfer.direction == "deepen"
               else omega_i / ratio)
    ramp = transfer_mod.HarmonicRamp(initial_frequency=omega_i,
                                     adiabaticity=cfg.transfer.xi,
                                     direction=cfg.transfer.direction,
                                     final_frequency=omega_f)
    result = transfer_mod.excitation_numeric(ramp)
    matched = transfer_mod.matched_microtrap_depth(
        cfg.lattice.depth_er, cfg.transfer.waist_um * 1e-6,
        cfg.lattice.lambda_s_nm * 1e-9)
    report = {"T_us": units.time_from_natural(ramp.duration) * 1e6,
              "max_Pe_analytic": transfer_mod.max_excitation_analytic(ramp),
              "max_Pe_numeric": result.max_excitation,
              "gap": result.analytic_numeric_gap,
              "matched_microtrap_depth_er": matched,
              "matched_microtrap_depth_uK":
                  transfer_mod.microtrap_depth_kelvin(matched, units) * 1e6,
              "hopping_time_s":
                  units.time_from_natural(transfer_mod.hopping_time(cfg.lattice.depth_er))}
    side = []
    if args.trajectory_out:
        rows = [{"t": float(t),
                 "omega": transfer_mod.ramp_schedule(ramp, float(t)),
                 "Pe_analytic": float(pa), "Pe_numeric": float(pn)}
                for t, pa, pn in zip(result.times, result.excitation_analytic,
                                     result.excitation_numeric)]
        side.append((_resolve_out(args, cfg, args.trajectory_out), rows))
    _deliver(args, cfg, report, "json", side_files=side)


def _cmd_speedup(args, cfg: RunConfig):
    species, _ = _species_units(cfg)
    spd = cfg.speedup
    potential = speedup_mod.DoubleGaussianPotential(
        confine_depth=spd.confine_depth, focus_depth=spd.focus_depth,
        confine_waist=1.0, focus_waist=spd.focus_waist_ratio)
    xi_bar = resolve_xi_bar(cfg)
    schedule = speedup_mod.build_moving_schedule(
        potential, spd.final_displacement_sigma, xi_bar,
        n_points=spd.profile_points, basis_size=spd.basis_size)
    sp_units = speedup_mod.SpeedupUnits(sigma_c=spd.sigma_c_um * 1e-6,
                                        mass=species.mass)
    move_time = speedup_mod.moving_time(schedule) * sp_units.time
    laser = speedup_mod.FocusLaserModel(
        effective_linewidth=spd.effective_linewidth_rad_s,
        detuning=spd.focus_detuning_rad_s)
    p_exc, p_scatter = speedup_mod.excitation_and_scattering(schedule, laser)
    report = {"T_ms": move_time * 1e3, "P_exc": p_exc, "P_scatter": p_scatter,
              "xi_bar_used": xi_bar,
              "yield_5_cycles": speedup_mod.cycle_yield(5, spd.per_cycle_fraction)}
    side = []
    if args.profile_out:
        rows = [{"a": float(a), "y_min": float(y), "gap": float(g),
                 "element": float(m)}
                for a, y, g, m in zip(schedule.displacements, schedule.minima,
                                      schedule.gap_profile,
                                      schedule.element_profile)]
        side.append((_resolve_out(args, cfg, args.profile_out), rows))
    if args.potential_out:
        ys = np.linspace(-2.0, 3.5, 551)
        curves = {a: potential.at(a).value(ys) for a in (0.2, 0.8, 1.5)}
        rows = [{"y": float(y),
                 "v_a_0p2": float(curves[0.2][i]),
                 "v_a_0p8": float(curves[0.8][i]),
                 "v_a_1p5": float(curves[1.5][i])}
                for i, y in enumerate(ys)]
        side.append((_resolve_out(args, cfg, args.potential_out), rows))
    _deliver(args, cfg, report, "json", side_files=side)


def _cmd_scheme1(args, cfg: RunConfig):
    budget = run_scheme1(cfg, zero_channels=args.zero_channels)
    _deliver(args, cfg, budget.to_dict(), "json")


def _cmd_scheme2(args, cfg: RunConfig):
    budget = run_scheme2(cfg, zero_channels=args.zero_channels)
    _deliver(args, cfg, budget.to_dict(), "json")


def _cmd_sweep(args, cfg: RunConfig):
    values = [json.loads(v) for v in args.values]
    rows = sweep(cfg, args.parameter, values)
    _deliver(args, cfg, rows, "csv")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mottreg",
        description="Simulator and error budget for initialising a neutral-atom "
                    "register by extraction from a lattice into microtraps.")
    parser.add_argument("--config", help="JSON config file (empty = defaults)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config value, e.g. transfer.xi=0.0025")
    parser.add_argument("--out", help="primary output path")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stark-scan", help="shift/rate/eta scan across the band")
    p.add_argument("--points", type=int, default=501)
    p.set_defaults(handler=_cmd_stark_scan)

    p = sub.add_parser("lattice", help="per-site shifts and A/B labels")
    p.add_argument("--sites", type=int, default=9)
    p.add_argument("--profile-out", help="potential-profile CSV path")
    p.set_defaults(handler=_cmd_lattice)

    p = sub.add_parser("pulse", help="microwave pi-pulse flip probabilities")
    p.add_argument("--omega0", type=float, help="envelope width, E_R/hbar")
    p.add_argument("--tf", type=float, help="cutoff time, hbar/E_R")
    p.add_argument("--detuning", type=float, help="detuning, E_R/hbar")
    p.add_argument("--trajectory-out", help="amplitude trajectory CSV path")
    p.set_defaults(handler=_cmd_pulse)

    p = sub.add_parser("remove", help="removing-laser photon counts")
    p.add_argument("--trap-depth", type=float, help="trap depth, E_R")
    p.add_argument("--duration", type=float, help="requested window, us")
    p.add_argument("--detuning-ghz", type=float,
                   help="target-atom detuning over 2 pi, GHz")
    p.set_defaults(handler=_cmd_remove)

    p = sub.add_parser("transfer", help="lattice-to-microtrap adiabatic ramp")
    p.add_argument("--xi", type=float)
    p.add_argument("--ratio", type=float, help="final/initial frequency ratio")
    p.add_argument("--direction", choices=("deepen", "shallow"))
    p.add_argument("--depth", type=float, help="lattice depth, E_R")
    p.add_argument("--trajectory-out", help="ramp trajectory CSV path")
    p.set_defaults(handler=_cmd_transfer)

    p = sub.add_parser("speedup", help="moving-focus extraction estimates")
    p.add_argument("--profile-out", help="gap/element profile CSV path")
    p.add_argument("--potential-out", help="potential curves CSV path")
    p.set_defaults(handler=_cmd_speedup)

    p = sub.add_parser("scheme1", help="full four-step budget")
    p.add_argument("--zero-channels", action="store_true",
                   help="diagnostic: force all failure channels to zero")
    p.set_defaults(handler=_cmd_scheme1)

    p = sub.add_parser("scheme2", help="cyclic speedup budget")
    p.add_argument("--zero-channels", action="store_true")
    p.set_defaults(handler=_cmd_scheme2)

    p = sub.add_parser("sweep", help="scheme-1 budgets over a parameter grid")
    p.add_argument("--parameter", required=True, metavar="SECTION.KEY")
    p.add_argument("--values", nargs="+", required=True)
    p.set_defaults(handler=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        for override in args.set or []:
            key, sep, value = override.partition("=")
            if not sep:
                raise ConfigError(f"override '{override}' must look like KEY=VALUE")
            set_by_path(cfg, key, value)
        args.handler(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PhysicsDomainError as exc:
        print(f"physics domain error: {exc}", file=sys.stderr)
        return 3
    except NumericsError as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
