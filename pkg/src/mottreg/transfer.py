"""Lattice-to-microtrap handoff: frequency matching, the closed-form
adiabatic ramp, its analytic excitation probability, direct numerical
verification, and the depleted-lattice hopping-time bound.

Natural units throughout: frequencies in E_R/hbar, times in hbar/E_R,
depths in E_R, lengths in lattice wavelengths.  With E_R = h^2/(2 m
lambda_s^2) = 1 the atom mass is 2 pi^2 and the lattice wavevector 2 pi,
which makes omega(V) = 2 sqrt(V) for a lattice site of depth V.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsDomainError
from .numerics import OdeProblem, integrate_ode, jacobi_eigh
from .units import K_BOLTZMANN, PI, UnitSystem

__all__ = [
    "HarmonicRamp",
    "TransferResult",
    "initial_frequency",
    "matched_microtrap_depth",
    "combined_frequency",
    "microtrap_depth_kelvin",
    "ramp_schedule",
    "ramp_rate",
    "excitation_analytic",
    "max_excitation_analytic",
    "excitation_numeric",
    "transfer_time",
    "band_tunneling",
    "hopping_time",
]

_LATTICE_MASS = 2.0 * PI ** 2   # natural-unit mass from E_R = 1, hbar = 1
_LATTICE_K = 2.0 * PI           # lattice wavevector in 1/lambda_s


@dataclass(frozen=True)
class HarmonicRamp:
    """Trapping-frequency schedule omega(t) = omega0 / (1 -/+ 4 sqrt(2) xi
    omega0 t), deepening (-) or opening (+) the trap."""

    initial_frequency: float
    adiabaticity: float
    direction: str
    final_frequency: float

    def __post_init__(self):
        if not 0.0 < self.adiabaticity < 0.1:
            raise PhysicsDomainError("adiabaticity must lie in (0, 0.1)")
        if self.initial_frequency <= 0 or self.final_frequency <= 0:
            raise PhysicsDomainError("frequencies must be positive")
        if self.direction not in ("deepen", "shallow"):
            raise PhysicsDomainError("direction must be 'deepen' or 'shallow'")
        if self.direction == "deepen" and self.final_frequency <= self.initial_frequency:
            raise PhysicsDomainError("deepen requires final > initial frequency")
        if self.direction == "shallow" and self.final_frequency >= self.initial_frequency:
            raise PhysicsDomainError("shallow requires final < initial frequency")

    @property
    def rate_constant(self) -> float:
        """b = 4 sqrt(2) xi omega0, the inverse time scale of the schedule."""
        return 4.0 * math.sqrt(2.0) * self.adiabaticity * self.initial_frequency

    @property
    def duration(self) -> float:
        return transfer_time(self.initial_frequency, self.final_frequency,
                             self.adiabaticity)


def initial_frequency(lattice_depth: float) -> float:
    """Site frequency omega(0) = 2 sqrt(V_L / E_R) in E_R/hbar."""
    if lattice_depth <= 0:
        raise PhysicsDomainError("lattice depth must be positive")
    return 2.0 * math.sqrt(lattice_depth)


def matched_microtrap_depth(lattice_depth: float, waist: float, lambda_s: float) -> float:
    """Microtrap depth V_f = V_L k^2 w^2 / 2 (E_R) that matches the lattice
    site frequency for a beam waist w."""
    if waist <= 0:
        raise PhysicsDomainError("waist must be positive")
    k_w = 2.0 * PI * waist / lambda_s
    return lattice_depth * k_w ** 2 / 2.0


def combined_frequency(microtrap_depth: float, lattice_depth: float,
                       waist: float, lambda_s: float) -> float:
    """omega = sqrt((4 V_f / w^2 + 2 V_L k^2) / m) with depths in E_R and
    the waist in meters alongside lambda_s."""
    w_nat = waist / lambda_s
    return math.sqrt((4.0 * microtrap_depth / w_nat ** 2
                      + 2.0 * lattice_depth * _LATTICE_K ** 2) / _LATTICE_MASS)


def microtrap_depth_kelvin(depth_er: float, units: UnitSystem) -> float:
    """Equivalent temperature of a trap depth, quoted as U / (2 kB)."""
    return depth_er * units.base_energy / (2.0 * K_BOLTZMANN)


def _signed_rate(ramp: HarmonicRamp) -> float:
    return ramp.rate_constant if ramp.direction == "deepen" else -ramp.rate_constant


def ramp_schedule(ramp: HarmonicRamp, t: float) -> float:
    """omega(t) along the ramp; only defined for 0 <= t <= duration."""
    if t < 0 or t > ramp.duration * (1.0 + 1e-12):
        raise PhysicsDomainError(f"t = {t} outside the ramp domain [0, {ramp.duration}]")
    return ramp.initial_frequency / (1.0 - _signed_rate(ramp) * t)


def ramp_rate(ramp: HarmonicRamp, t: float) -> float:
    """d omega / dt, analytic; equals 4 sqrt(2) xi omega^2 in magnitude."""
    omega = ramp_schedule(ramp, t)
    return _signed_rate(ramp) * omega ** 2 / ramp.initial_frequency


def transfer_time(omega_initial: float, omega_final: float, xi: float) -> float:
    """Closed-form ramp duration T = |1 - omega0/omegaT| / (4 sqrt(2) xi omega0)."""
    if omega_initial <= 0 or omega_final <= 0 or xi <= 0:
        raise PhysicsDomainError("frequencies and xi must be positive")
    return abs(1.0 - omega_initial / omega_final) / (
        4.0 * math.sqrt(2.0) * xi * omega_initial)


def _phase(ramp: HarmonicRamp, t) -> np.ndarray:
    """Argument of the sin^2 in the analytic excitation probability."""
    return np.log(1.0 - _signed_rate(ramp) * np.asarray(t, dtype=float)) / (
        4.0 * math.sqrt(2.0) * ramp.adiabaticity)


def excitation_analytic(ramp: HarmonicRamp, t) -> np.ndarray:
    """P_e(t) = 4 xi^2 sin^2(ln(1 -/+ 4 sqrt(2) xi omega0 t) / (4 sqrt(2) xi))."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > ramp.duration * (1.0 + 1e-12)):
        raise PhysicsDomainError("t outside the ramp domain")
    return 4.0 * ramp.adiabaticity ** 2 * np.sin(_phase(ramp, t_arr)) ** 2


def max_excitation_analytic(ramp: HarmonicRamp) -> float:
    """Maximum of the analytic P_e over the ramp: exactly 4 xi^2 once the
    phase has swept past pi/2, the endpoint value otherwise."""
    phase_end = abs(float(_phase(ramp, ramp.duration)))
    ceiling = 4.0 * ramp.adiabaticity ** 2
    return ceiling if phase_end >= math.pi / 2.0 else ceiling * math.sin(phase_end) ** 2


@dataclass(frozen=True)
class TransferResult:
    duration: float
    max_excitation: float
    times: np.ndarray
    excitation_numeric: np.ndarray
    excitation_analytic: np.ndarray
    analytic_numeric_gap: float
    norm_drift: float


def excitation_numeric(ramp: HarmonicRamp, n_samples: int = 1500,
                       rel_tol: float = 1e-11, abs_tol: float = 1e-13) -> TransferResult:
    """Integrate the two-state adiabatic-frame system along the ramp.

    The states are the instantaneous ground and second excited levels with
    E_g = omega/2, E_e = 5 omega/2 and the Hermitian coupling i xi Delta E_g
    off diagonal; the result reports the sampled P_e(t) and its sup-norm gap
    to the closed form.
    """
    xi = ramp.adiabaticity

    def rhs(t, c):
        omega = ramp_schedule(ramp, float(t))
        gap = 2.0 * omega
        cg, ce = c[0], c[1]
        dg = -1j * (0.5 * omega * cg + 1j * xi * gap * ce)
        de = -1j * (-1j * xi * gap * cg + 2.5 * omega * ce)
        return np.array([dg, de])

    duration = ramp.duration
    problem = OdeProblem(dimension=2, rhs=rhs,
                         initial_state=np.array([1.0 + 0.0j, 0.0 + 0.0j]),
                         time_span=(0.0, duration), rel_tol=rel_tol, abs_tol=abs_tol)
    traj = integrate_ode(problem)
    ts = np.linspace(0.0, duration, n_samples)
    states = traj.sample(ts)
    p_num = np.abs(states[:, 1]) ** 2
    p_ana = excitation_analytic(ramp, ts)
    norms = np.abs(states[:, 0]) ** 2 + p_num
    return TransferResult(duration=duration,
                          max_excitation=float(np.max(p_num)),
                          times=ts, excitation_numeric=p_num,
                          excitation_analytic=p_ana,
                          analytic_numeric_gap=float(np.max(np.abs(p_num - p_ana))),
                          norm_drift=float(np.max(np.abs(norms - 1.0))))


def band_tunneling(lattice_depth: float, n_waves: int = 12) -> float:
    """Ground-band tunneling J (E_R) of the 1-D sinusoidal lattice from the
    central-equation matrix: J = (E0(band edge) - E0(0)) / 4."""
    if lattice_depth < 5.0:
        warnings.warn("lattice depth below the tight-binding regime; "
                      "J = bandwidth/4 is unreliable here", stacklevel=2)

    def ground_energy(q: float) -> float:
        ms = np.arange(-n_waves, n_waves + 1)
        mat = np.diag((q + 2.0 * ms) ** 2 + lattice_depth / 2.0)
        off = -lattice_depth / 4.0
        for j in range(len(ms) - 1):
            mat[j, j + 1] = off
            mat[j + 1, j] = off
        return jacobi_eigh(mat)[0][0]

    return (ground_energy(1.0) - ground_energy(0.0)) / 4.0


def hopping_time(lattice_depth: float) -> float:
    """Characteristic hopping time hbar/J in natural time units (hbar/E_R)."""
    return 1.0 / band_tunneling(lattice_depth)
