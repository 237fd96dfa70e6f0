"""Short/long-period lattice geometry, site-resolved hyperfine detunings,
A/B site classification, the long-lattice ramp-time estimate, and patterned
extraction counting.

The long lattice (LPOL) is formed by two beams intersecting at the angle
that makes its period exactly n short-lattice periods; its intensity
envelope cos^2(pi x / eta_l) peaks on the target (A) sites.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsDomainError
from .stark import FieldAtAtom, shift_report
from .units import AtomSpecies, UnitSystem

__all__ = [
    "SuperlatticeConfig",
    "SitePattern",
    "SiteDetunings",
    "RampPlan",
    "lpol_angle",
    "lpol_period",
    "site_hyperfine_detunings",
    "solve_intensity_for_delta",
    "lpol_ramp_time",
    "pattern_yield",
]


@dataclass(frozen=True)
class SuperlatticeConfig:
    """Geometry and drive of the combined short + long lattice.

    spol_wavelength and lpol_wavelength in m, spol_depth in E_R,
    lpol_intensity in W/m^2, lpol_phase a length offset (m) of the LPOL
    antinode relative to site 0.
    """

    spol_wavelength: float = 850e-9
    spol_depth: float = 50.0
    pattern_period: int = 3
    lpol_wavelength: float = 787.6e-9
    lpol_intensity: float = 0.0
    lpol_phase: float = 0.0

    def __post_init__(self):
        if self.pattern_period < 3 or int(self.pattern_period) != self.pattern_period:
            raise PhysicsDomainError("pattern_period must be an integer >= 3")
        if self.spol_depth <= 0:
            raise PhysicsDomainError("spol_depth must be positive")
        if self.lpol_wavelength > self.pattern_period * self.spol_wavelength:
            raise PhysicsDomainError("no intersection angle exists: lambda_l > n lambda_s")
        if self.lpol_intensity < 0:
            raise PhysicsDomainError("lpol_intensity must be >= 0")


@dataclass(frozen=True)
class SitePattern:
    """Periodic A/B labels over site indices, A marking extraction targets."""

    labels: tuple[str, ...]
    site_positions: tuple[float, ...]


@dataclass(frozen=True)
class SiteDetunings:
    """Per-site logical-state shifts (E_R) and the worst-case A-B differential."""

    pattern: SitePattern
    delta_e0: tuple[float, ...]
    delta_e1: tuple[float, ...]
    delta_diff: tuple[float, ...]
    delta: float


def lpol_period(n: int, lambda_s: float) -> float:
    """Long-lattice period eta_l = n lambda_s / 2."""
    return n * lambda_s / 2.0


def lpol_angle(n: int, lambda_s: float, lambda_l: float) -> float:
    """Beam intersection angle theta = 2 arcsin(lambda_l / (n lambda_s))."""
    ratio = lambda_l / (n * lambda_s)
    if ratio > 1.0:
        raise PhysicsDomainError(f"lpol_angle: lambda_l/(n lambda_s) = {ratio:.4f} > 1")
    return 2.0 * math.asin(ratio)


def _intensity_envelope(config: SuperlatticeConfig, x: np.ndarray) -> np.ndarray:
    eta_l = lpol_period(config.pattern_period, config.spol_wavelength)
    return np.cos(np.pi * (x - config.lpol_phase) / eta_l) ** 2


def site_hyperfine_detunings(config: SuperlatticeConfig, species: AtomSpecies,
                             n_sites: int | None = None) -> SiteDetunings:
    """Evaluate the LPOL shifts at site centers and classify A/B sites.

    Sites sit at x_j = j lambda_s / 2.  The site with the largest
    differential shift in each period is the target A; delta is the A shift
    minus the largest B shift (worst case for microwave selectivity).
    Raises if the phase makes the per-period maximum ambiguous.
    """
    n = config.pattern_period
    count = n if n_sites is None else n_sites
    if count < n:
        raise PhysicsDomainError("need at least one full pattern period of sites")
    units = UnitSystem.for_lattice(species, config.spol_wavelength)
    xs = np.arange(count) * config.spol_wavelength / 2.0
    envelope = _intensity_envelope(config, xs)

    e0, e1, diff = [], [], []
    for env in envelope:
        rep = shift_report(FieldAtAtom(intensity=config.lpol_intensity * float(env),
                                       wavelength=config.lpol_wavelength), species)
        e0.append(units.energy_to_natural(rep.deltaE_0))
        e1.append(units.energy_to_natural(rep.deltaE_1))
        diff.append(units.energy_to_natural(rep.deltaE_diff))

    # classify within the first period, then tile
    period_diff = np.array(diff[:n])
    order = np.argsort(period_diff)[::-1]
    top, second = period_diff[order[0]], period_diff[order[1]]
    scale = max(abs(top), 1e-30)
    if config.lpol_intensity > 0 and abs(top - second) <= 1e-9 * scale:
        tied = [int(j) for j in np.flatnonzero(np.abs(period_diff - top) <= 1e-9 * scale)]
        raise PhysicsDomainError(
            f"ambiguous site pattern: sites {tied} tie for the maximal shift; "
            "adjust lpol_phase")
    a_index = int(order[0])
    labels = tuple("A" if j % n == a_index else "B" for j in range(count))
    b_shifts = [period_diff[j] for j in range(len(period_diff)) if j != a_index]
    delta = float(top - max(b_shifts)) if b_shifts else 0.0

    return SiteDetunings(pattern=SitePattern(labels=labels,
                                             site_positions=tuple(float(x) for x in xs)),
                         delta_e0=tuple(e0), delta_e1=tuple(e1),
                         delta_diff=tuple(diff), delta=delta)


def solve_intensity_for_delta(config: SuperlatticeConfig, species: AtomSpecies,
                              target_delta: float) -> float:
    """LPOL intensity (W/m^2) producing the requested A-B differential (E_R).

    delta is exactly linear in intensity, so a unit-intensity evaluation
    fixes the scale.
    """
    if target_delta < 0:
        raise PhysicsDomainError("target delta must be >= 0")
    if target_delta == 0:
        return 0.0
    probe = SuperlatticeConfig(
        spol_wavelength=config.spol_wavelength, spol_depth=config.spol_depth,
        pattern_period=config.pattern_period, lpol_wavelength=config.lpol_wavelength,
        lpol_intensity=1.0, lpol_phase=config.lpol_phase)
    per_unit = site_hyperfine_detunings(probe, species).delta
    if per_unit <= 0:
        raise PhysicsDomainError("differential shift is not positive at this wavelength")
    return target_delta / per_unit


@dataclass(frozen=True)
class RampPlan:
    """Adiabatic LPOL ramp: site frequency follows the rate-saturating
    schedule omega(t) = omega_i / (1 - 4 sqrt(2) xi omega_i t).

    Frequencies in E_R/hbar, duration in seconds; intensity_weight is
    int I(t) dt / I_peak in seconds, the full-intensity-equivalent exposure
    of one ramp (used in the scattering budget).
    """

    duration: float
    xi: float
    omega_initial: float
    omega_final: float
    intensity_weight: float
    base_time: float

    def omega_at(self, t_natural: float) -> float:
        b = 4.0 * math.sqrt(2.0) * self.xi * self.omega_initial
        return self.omega_initial / (1.0 - b * t_natural)

    def intensity_fraction(self, t_second: float) -> float:
        """Instantaneous LPOL intensity over its peak value, 0 <= f <= 1."""
        t = min(max(t_second, 0.0), self.duration) / self.base_time
        w_i, w_f = self.omega_initial, self.omega_final
        return (self.omega_at(t) ** 2 - w_i ** 2) / (w_f ** 2 - w_i ** 2)


def lpol_ramp_time(config: SuperlatticeConfig, species: AtomSpecies,
                   target_excitation: float = 1e-4,
                   delta_target: float | None = None) -> RampPlan:
    """Ramp duration keeping band excitation below target during LPOL turn-on.

    The site-local frequency runs from 2 sqrt(V_s) to 2 sqrt(V_s + |dE_A|)
    (E_R/hbar) where dE_A is the full differential shift on A sites, and the
    ramp follows the adiabatic schedule whose excitation ceiling is
    4 xi^2 = target.
    """
    if not 0.0 < target_excitation < 0.1:
        raise PhysicsDomainError("target excitation must lie in (0, 0.1)")
    if delta_target is None:
        delta_target = site_hyperfine_detunings(config, species).delta
    if delta_target <= 0:
        raise PhysicsDomainError("ramp target unreachable: differential shift is zero")
    n = config.pattern_period
    shift_a = delta_target / (1.0 - math.cos(math.pi / n) ** 2)

    xi = math.sqrt(target_excitation) / 2.0
    w_i = 2.0 * math.sqrt(config.spol_depth)
    w_f = 2.0 * math.sqrt(config.spol_depth + shift_a)
    b = 4.0 * math.sqrt(2.0) * xi * w_i
    duration_nat = (1.0 - w_i / w_f) / b
    # int (omega(t)^2 - w_i^2) dt in closed form gives the intensity exposure
    depth_integral = w_i ** 2 * ((1.0 / b) * (w_f / w_i - 1.0) - duration_nat)
    weight_nat = depth_integral / (w_f ** 2 - w_i ** 2)

    units = UnitSystem.for_lattice(species, config.spol_wavelength)
    return RampPlan(duration=units.time_from_natural(duration_nat), xi=xi,
                    omega_initial=w_i, omega_final=w_f,
                    intensity_weight=units.time_from_natural(weight_nat),
                    base_time=units.base_time)


def pattern_yield(total_sites: int, n: int, dimensions: int = 1) -> tuple[int, float]:
    """Extraction targets and their fraction for one atom per n sites.

    1-D keeps one site in n; 2-D keeps one site in n^2.
    """
    if total_sites < n:
        raise PhysicsDomainError("need at least one pattern period of sites")
    if dimensions not in (1, 2):
        raise PhysicsDomainError("dimensions must be 1 or 2")
    per = n if dimensions == 1 else n * n
    targets = total_sites // per
    return targets, targets / total_sites
