"""Orchestration of the two extraction schemes: wires the lattice, pulse,
removal, and transfer modules along the protocol time sequence, aggregates
per-step failure channels, and sweeps parameters.

Failure channels combine as independent events (1 - prod(1 - p)); with every
p well below 1e-3 this matches the plain channel sum to first order, and the
report carries both.  Budgets are fully deterministic.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

from . import removal as removal_mod
from . import speedup as speedup_mod
from . import superlattice as lattice_mod
from . import transfer as transfer_mod
from .config import (RunConfig, build_species, config_to_dict, resolve_pulse_rules,
                     resolve_xi_bar, set_by_path)
from .errors import PhysicsDomainError
from .pulse import GaussianPulse, pi_pulse_amplitude, rabi_evolve, step2_scattering_probability
from .stark import optimize_lpol_wavelength
from .units import UnitSystem

__all__ = [
    "StepReport",
    "ProtocolBudget",
    "run_scheme1",
    "run_scheme2",
    "sweep",
    "resolved_config_echo",
]

STEP_NAMES = ("mott_prep", "selective_depop", "removal", "transfer", "speedup_move")


@dataclass(frozen=True)
class StepReport:
    """One protocol step: duration in seconds and its failure channels."""

    name: str
    duration: float
    failure_channels: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if self.name not in STEP_NAMES:
            raise PhysicsDomainError(f"unknown step name '{self.name}'")
        if self.duration < 0:
            raise PhysicsDomainError("step duration must be >= 0")
        for label, p in self.failure_channels:
            if not 0.0 <= p <= 1.0:
                raise PhysicsDomainError(f"channel '{label}' probability outside [0, 1]")


@dataclass(frozen=True)
class ProtocolBudget:
    """Aggregate timing and failure budget of one scheme run.

    For the cyclic scheme the steps describe one representative cycle and
    total_time = cycles * sum(step durations); failure stays per extracted
    atom (each atom passes through one cycle).
    """

    steps: tuple[StepReport, ...]
    total_time: float
    total_failure: float
    channel_sum: float
    atoms_extracted: int
    extraction_fraction: float
    cycles: int = 1
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "steps": [{"name": s.name, "duration_us": s.duration * 1e6,
                       "channels": [{"label": lbl, "p": p}
                                    for lbl, p in s.failure_channels]}
                      for s in self.steps],
            "total_time_us": self.total_time * 1e6,
            "total_failure": self.total_failure,
            "channel_sum": self.channel_sum,
            "atoms_extracted": self.atoms_extracted,
            "extraction_fraction": self.extraction_fraction,
            "cycles": self.cycles,
            **self.extras,
        }


def _compose(steps: list[StepReport], cycles: int = 1) -> tuple[float, float, float]:
    total_time = cycles * sum(s.duration for s in steps)
    probs = [p for s in steps for _, p in s.failure_channels]
    total_failure = 1.0 - math.prod(1.0 - p for p in probs)
    return total_time, total_failure, sum(probs)


def _lpol_wavelength_m(cfg: RunConfig, species) -> float:
    lam = cfg.lattice.lpol_wavelength_nm
    if lam == "optimize":
        exclusion = cfg.lattice.band_exclusion_nm * 1e-9
        return optimize_lpol_wavelength(species, exclusion=exclusion)[0]
    return float(lam) * 1e-9


@dataclass(frozen=True)
class _StepTwo:
    """Shared selective-depopulation results (used by both schemes)."""

    step: StepReport
    lattice_config: lattice_mod.SuperlatticeConfig
    delta_realized: float
    ramp: lattice_mod.RampPlan
    pulse: GaussianPulse
    p_flip: float
    p_scatter: float
    lpol_wavelength: float
    lpol_intensity: float


def _run_step_two(cfg: RunConfig, species, units: UnitSystem,
                  zero_channels: bool) -> _StepTwo:
    lam_l = _lpol_wavelength_m(cfg, species)
    base = lattice_mod.SuperlatticeConfig(
        spol_wavelength=cfg.lattice.lambda_s_nm * 1e-9,
        spol_depth=cfg.lattice.depth_er,
        pattern_period=cfg.lattice.pattern_period,
        lpol_wavelength=lam_l,
        lpol_phase=cfg.lattice.lpol_phase_nm * 1e-9)
    intensity = lattice_mod.solve_intensity_for_delta(base, species,
                                                      cfg.lattice.delta_target_er)
    lattice_config = lattice_mod.SuperlatticeConfig(
        spol_wavelength=base.spol_wavelength, spol_depth=base.spol_depth,
        pattern_period=base.pattern_period, lpol_wavelength=lam_l,
        lpol_intensity=intensity, lpol_phase=base.lpol_phase)
    delta_realized = lattice_mod.site_hyperfine_detunings(lattice_config, species).delta

    ramp = lattice_mod.lpol_ramp_time(lattice_config, species,
                                      cfg.lattice.ramp_target_excitation,
                                      delta_target=delta_realized)

    omega0, t_f, detuning = resolve_pulse_rules(cfg)
    pulse = GaussianPulse(peak_rabi=pi_pulse_amplitude(omega0, t_f),
                          envelope_width=omega0, cutoff=t_f, detuning=detuning)
    p_flip = rabi_evolve(pulse).p_flip

    hold = units.time_from_natural(2.0 * t_f)
    ramp_t = ramp.duration

    def schedule(t: float) -> float:
        if t <= ramp_t:
            return intensity * ramp.intensity_fraction(t)
        if t <= ramp_t + hold:
            return intensity
        return intensity * ramp.intensity_fraction(2.0 * ramp_t + hold - t)

    duration = 2.0 * ramp_t + hold
    p_scatter = step2_scattering_probability(schedule, species, lam_l, duration)

    channels = (("lpol_ramp_excitation", cfg.lattice.ramp_target_excitation),
                ("pulse_flip_error", p_flip),
                ("step2_scattering", p_scatter))
    if zero_channels:
        channels = tuple((lbl, 0.0) for lbl, _ in channels)
    step = StepReport(name="selective_depop", duration=duration,
                      failure_channels=channels)
    return _StepTwo(step=step, lattice_config=lattice_config,
                    delta_realized=delta_realized, ramp=ramp, pulse=pulse,
                    p_flip=p_flip, p_scatter=p_scatter,
                    lpol_wavelength=lam_l, lpol_intensity=intensity)


def run_scheme1(cfg: RunConfig, zero_channels: bool = False) -> ProtocolBudget:
    """Four-step extraction: selective depopulation, removal, transfer.

    Each step duration comes from its module; channels cover LPOL ramp
    excitation, pulse flip error, step-II scattering, removal impact on
    targets, collision, and transfer excitation.
    """
    species = build_species(cfg.species)
    units = UnitSystem.for_lattice(species, cfg.lattice.lambda_s_nm * 1e-9)
    two = _run_step_two(cfg, species, units, zero_channels)

    threshold = removal_mod.removal_photon_threshold(cfg.removal.trap_depth_er)
    plan = removal_mod.solve_removal_drive(
        species.gamma2, threshold, cfg.removal.duration_us * 1e-6,
        cfg.removal.excited_population_cap)
    impact = removal_mod.photon_count(removal_mod.ObeParams(
        linewidth=species.gamma2, rabi_frequency=plan.rabi_frequency,
        detuning=species.hyperfine_splitting, duration=plan.duration))
    p_impact = min(1.0, impact)
    p_collision = removal_mod.collision_probability(
        plan.duration, cfg.removal.tunneling_time_ms * 1e-3)

    omega_i = transfer_mod.initial_frequency(cfg.lattice.depth_er)
    ratio = cfg.transfer.frequency_ratio
    omega_f = omega_i * ratio if cfg.transfer.direction == "deepen" else omega_i / ratio
    ramp = transfer_mod.HarmonicRamp(initial_frequency=omega_i,
                                     adiabaticity=cfg.transfer.xi,
                                     direction=cfg.transfer.direction,
                                     final_frequency=omega_f)
    transfer_duration = units.time_from_natural(ramp.duration)
    p_transfer = transfer_mod.max_excitation_analytic(ramp)

    def maybe_zero(p: float) -> float:
        return 0.0 if zero_channels else p

    steps = [
        StepReport(name="mott_prep", duration=0.0, failure_channels=()),
        two.step,
        StepReport(name="removal", duration=plan.duration,
                   failure_channels=(("removal_target_impact", maybe_zero(p_impact)),
                                     ("collision", maybe_zero(p_collision)))),
        StepReport(name="transfer", duration=transfer_duration,
                   failure_channels=(("transfer_excitation", maybe_zero(p_transfer)),)),
    ]
    total_time, total_failure, channel_sum = _compose(steps)
    targets, fraction = lattice_mod.pattern_yield(cfg.lattice.total_sites,
                                                  cfg.lattice.pattern_period,
                                                  cfg.lattice.dimensions)
    extras = {
        "lpol_wavelength_nm": two.lpol_wavelength * 1e9,
        "lpol_intensity_w_m2": two.lpol_intensity,
        "delta_realized_er": two.delta_realized,
        "lpol_ramp_us": two.ramp.duration * 1e6,
        "pulse_omega0_er": two.pulse.envelope_width,
        "pulse_peak_rabi_er": two.pulse.peak_rabi,
        "removal_rabi_rad_s": plan.rabi_frequency,
        "removal_duration_us": plan.duration * 1e6,
        "removal_feasible_at_request": plan.feasible_at_request,
        "transfer_time_us": transfer_duration * 1e6,
    }
    return ProtocolBudget(steps=tuple(steps), total_time=total_time,
                          total_failure=total_failure, channel_sum=channel_sum,
                          atoms_extracted=targets, extraction_fraction=fraction,
                          extras=extras)


def run_scheme2(cfg: RunConfig, zero_channels: bool = False) -> ProtocolBudget:
    """Cyclic moving-focus extraction: steps I-II plus the adiabatic move,
    repeated over melt/re-form cycles; per-atom failure is dominated by the
    move's excitation and scattering."""
    species = build_species(cfg.species)
    units = UnitSystem.for_lattice(species, cfg.lattice.lambda_s_nm * 1e-9)
    two = _run_step_two(cfg, species, units, zero_channels)

    spd = cfg.speedup
    potential = speedup_mod.DoubleGaussianPotential(
        confine_depth=spd.confine_depth, focus_depth=spd.focus_depth,
        confine_waist=1.0, focus_waist=spd.focus_waist_ratio)
    xi_bar = resolve_xi_bar(cfg)
    schedule = speedup_mod.build_moving_schedule(
        potential, spd.final_displacement_sigma, xi_bar,
        n_points=spd.profile_points, basis_size=spd.basis_size)
    move_time_nat = speedup_mod.moving_time(schedule)
    sp_units = speedup_mod.SpeedupUnits(sigma_c=spd.sigma_c_um * 1e-6,
                                        mass=species.mass)
    move_time = move_time_nat * sp_units.time
    laser = speedup_mod.FocusLaserModel(
        effective_linewidth=spd.effective_linewidth_rad_s,
        detuning=spd.focus_detuning_rad_s)
    p_exc, p_scatter = speedup_mod.excitation_and_scattering(schedule, laser)

    def maybe_zero(p: float) -> float:
        return 0.0 if zero_channels else p

    steps = [
        StepReport(name="mott_prep", duration=0.0, failure_channels=()),
        two.step,
        StepReport(name="speedup_move", duration=move_time,
                   failure_channels=(("move_excitation", maybe_zero(p_exc)),
                                     ("move_scattering", maybe_zero(min(1.0, p_scatter))))),
    ]
    total_time, total_failure, channel_sum = _compose(steps, cycles=spd.cycles)
    fraction = speedup_mod.cycle_yield(spd.cycles, spd.per_cycle_fraction)
    atoms = int(math.floor(fraction * cfg.lattice.total_sites))
    extras = {
        "xi_bar": xi_bar,
        "move_time_ms": move_time * 1e3,
        "p_exc": p_exc,
        "p_scatter": p_scatter,
        "yield_after_cycles": fraction,
    }
    return ProtocolBudget(steps=tuple(steps), total_time=total_time,
                          total_failure=total_failure, channel_sum=channel_sum,
                          atoms_extracted=atoms, extraction_fraction=fraction,
                          cycles=spd.cycles, extras=extras)


def sweep(cfg: RunConfig, parameter: str, values) -> list[dict]:
    """One scheme-1 budget per grid value of a dotted config parameter.

    Rows are computed independently and returned in grid order.
    """
    rows = []
    for value in values:
        trial = copy.deepcopy(cfg)
        set_by_path(trial, parameter, repr(value) if not isinstance(value, str) else value)
        budget = run_scheme1(trial)
        row = {"parameter": parameter, "value": value,
               "total_time_us": budget.total_time * 1e6,
               "total_failure": budget.total_failure,
               "atoms_extracted": budget.atoms_extracted,
               "extraction_fraction": budget.extraction_fraction}
        for step in budget.steps:
            for label, p in step.failure_channels:
                row[f"p_{label}"] = p
        rows.append(row)
    return rows


def resolved_config_echo(cfg: RunConfig) -> dict:
    """Config dict with every rule string expanded to its numeric value."""
    echo = config_to_dict(cfg)
    species = build_species(cfg.species)
    omega0, t_f, detuning = resolve_pulse_rules(cfg)
    echo["pulse"]["omega0_er"] = omega0
    echo["pulse"]["cutoff"] = t_f
    echo["pulse"]["detuning_er"] = detuning
    echo["speedup"]["xi_bar"] = resolve_xi_bar(cfg)
    if cfg.lattice.lpol_wavelength_nm == "optimize":
        echo["lattice"]["lpol_wavelength_nm"] = _lpol_wavelength_m(cfg, species) * 1e9
    return echo
