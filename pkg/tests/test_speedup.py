"""Moving-focus extraction: potential, minimum tracking, basis spectra
against finite-difference oracles, moving time, and cycle yield."""
import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from mottreg.errors import NumericsError, PhysicsDomainError
from mottreg.numerics import jacobi_eigh
from mottreg.speedup import (MASS, DoubleGaussianPotential, FocusLaserModel,
                             MovingSchedule, build_moving_schedule,
                             calibrate_adiabaticity, cycle_yield,
                             excitation_and_scattering, gap_and_element,
                             local_basis, moving_time, potential,
                             track_minimum)

WELLS = DoubleGaussianPotential(confine_depth=400.0, focus_depth=560.0,
                                confine_waist=1.0, focus_waist=0.5)


def _fd_levels(pot, a, n_levels=5, span=(-4.0, 5.5), n=6000):
    """Oracle: dense-grid finite-difference Schrodinger spectrum."""
    ys = np.linspace(span[0], span[1], n)
    h = ys[1] - ys[0]
    diag = 1.0 / (MASS * h * h) + pot.at(a).value(ys)
    off = -0.5 / (MASS * h * h) * np.ones(n - 1)
    return eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, n_levels - 1))[0]


def test_potential_depth_at_origin():
    assert potential(WELLS.at(0.0), 0.0) == pytest.approx(-960.0, rel=1e-14)


def test_potential_single_gaussian_when_focus_off():
    single = DoubleGaussianPotential(confine_depth=400.0, focus_depth=0.0)
    ys = np.linspace(-2.0, 2.0, 401)
    vals = single.value(ys)
    assert int(np.argmin(vals)) == 200
    assert vals[200] == pytest.approx(-400.0, rel=1e-14)


def test_double_well_emerges_with_displacement():
    # count strict sign changes of V' from - to + on a fine grid
    def minima_count(a):
        ys = np.linspace(-1.5, a + 1.5, 4001)
        g = WELLS.at(a).gradient(ys)
        return int(np.sum((g[:-1] < 0) & (g[1:] > 0)))

    assert minima_count(0.2) == 1
    assert minima_count(1.5) == 2


def test_track_minimum_start_and_asymptote():
    a_path = np.linspace(0.0, 3.0, 241)
    minima = track_minimum(WELLS, a_path)
    assert minima[0] == 0.0
    assert abs(minima[-1] - 3.0) < 0.01
    # continuity: no jumps beyond a few grid steps
    assert np.max(np.abs(np.diff(minima))) < 3 * (a_path[1] - a_path[0])


def test_track_minimum_matches_grid_argmin_of_focus_branch():
    a_path = np.linspace(0.0, 0.8, 65)
    minima = track_minimum(WELLS, a_path)
    # oracle: dense scan restricted to the focus-well neighbourhood
    ys = np.linspace(0.3, 1.3, 1_000_001)
    vals = WELLS.at(0.8).value(ys)
    y_oracle = ys[int(np.argmin(vals))]
    assert abs(minima[-1] - y_oracle) <= 2 * (ys[1] - ys[0])


def test_track_minimum_requires_monotone_path():
    with pytest.raises(PhysicsDomainError):
        track_minimum(WELLS, [0.0, 0.5, 0.3])
    with pytest.raises(PhysicsDomainError):
        track_minimum(WELLS, [0.1, 0.2])


def test_track_minimum_reports_branch_merge():
    # a focus well too weak to survive the confinement gradient merges away
    weak = DoubleGaussianPotential(confine_depth=400.0, focus_depth=120.0,
                                   focus_waist=0.35)
    with pytest.raises(NumericsError, match="last valid a"):
        track_minimum(weak, np.linspace(0.0, 3.0, 241))


class _Harmonic:
    """Pure harmonic test potential with the same duck-typed surface."""

    def __init__(self, omega):
        self.omega = omega

    def value(self, y):
        return 0.5 * MASS * self.omega ** 2 * np.asarray(y) ** 2

    def curvature(self, y):
        return MASS * self.omega ** 2 * np.ones_like(np.asarray(y, dtype=float))

    def displacement_gradient(self, y):
        return -MASS * self.omega ** 2 * np.asarray(y)


def test_local_basis_exact_on_pure_harmonic():
    omega = 7.3
    basis = local_basis(_Harmonic(omega), 0.0, size=11)
    levels = np.sort(np.diagonal(basis.hamiltonian))
    expected = omega * (np.arange(11) + 0.5)
    off_diag = basis.hamiltonian - np.diag(np.diagonal(basis.hamiltonian))
    assert np.max(np.abs(off_diag)) < 1e-10 * omega
    assert np.max(np.abs(levels / expected - 1.0)) < 1e-10


def test_local_basis_hermitian_and_bound():
    minima = track_minimum(WELLS, np.linspace(0.0, 0.2, 17))
    basis = local_basis(WELLS.at(0.2), float(minima[-1]), size=11)
    assert np.array_equal(basis.hamiltonian, basis.hamiltonian.T)
    energies, _ = jacobi_eigh(basis.hamiltonian)
    # ground state bound below the confinement depth alone
    assert energies[0] < -400.0
    assert energies[1] - energies[0] > 0


def test_local_basis_matches_fd_oracle():
    minima = track_minimum(WELLS, np.linspace(0.0, 0.2, 17))
    basis = local_basis(WELLS.at(0.2), float(minima[-1]), size=14)
    energies, _ = jacobi_eigh(basis.hamiltonian)
    fd = _fd_levels(WELLS, 0.2, n_levels=3)
    assert energies[0] == pytest.approx(fd[0], abs=0.05)
    assert energies[1] == pytest.approx(fd[1], abs=0.2)


def test_local_basis_rejects_concave_point():
    with pytest.raises(PhysicsDomainError):
        local_basis(WELLS.at(1.5), 0.75, size=11)  # near the barrier top


def test_gap_parity_at_zero_displacement():
    # dV/da is odd at a = 0, so the first excited state carries the coupling
    basis = local_basis(WELLS.at(0.0), 0.0, size=11)
    energies, vectors = jacobi_eigh(basis.hamiltonian)
    couplings = np.abs(vectors[:, 1:].T @ basis.coupling_operator @ vectors[:, 0])
    gap, element = gap_and_element(WELLS, 0.0, 0.0, size=11)
    assert gap == pytest.approx(energies[1] - energies[0], rel=1e-12)
    assert element == pytest.approx(couplings[0], rel=1e-12)
    # even-parity states are uncoupled at the symmetric point
    assert couplings[1] < 1e-8 * couplings[0]


def test_gap_far_displacement_matches_isolated_focus_well():
    # harmonic-expansion oracle: omega_f = sqrt(4 V_f / (m sigma_f^2)),
    # softened by the Gaussian well's anharmonicity
    minima = track_minimum(WELLS, np.linspace(0.0, 4.0, 321))
    gap, _ = gap_and_element(WELLS, 4.0, float(minima[-1]), size=11)
    omega_f = math.sqrt(4 * 560.0 / (MASS * 0.5 ** 2))
    assert gap == pytest.approx(omega_f, rel=0.15)
    # tight oracle: finite-difference gap of the isolated focus well
    isolated = DoubleGaussianPotential(confine_depth=0.0, focus_depth=560.0,
                                       focus_waist=0.5)
    fd = _fd_levels(isolated, 0.0, n_levels=2, span=(-2.0, 2.0))
    assert gap == pytest.approx(fd[1] - fd[0], rel=5e-3)


def test_gap_basis_size_convergence():
    for a in (0.2, 0.8, 1.5):
        minima = track_minimum(WELLS, np.linspace(0.0, a, 33))
        g11, _ = gap_and_element(WELLS, a, float(minima[-1]), size=11)
        g16, _ = gap_and_element(WELLS, a, float(minima[-1]), size=16)
        assert abs(g11 / g16 - 1.0) < 0.01


def test_ground_energy_variational_monotone():
    minima = track_minimum(WELLS, np.linspace(0.0, 0.8, 65))
    energies = []
    for size in (6, 11, 16):
        basis = local_basis(WELLS.at(0.8), float(minima[-1]), size=size)
        energies.append(jacobi_eigh(basis.hamiltonian)[0][0])
    assert energies[0] >= energies[1] - 1e-9
    assert energies[1] >= energies[2] - 1e-9


def test_moving_time_linearity_and_trivial_zero():
    xi = calibrate_adiabaticity(7e-3)
    sched = build_moving_schedule(WELLS, 2.0, xi, n_points=81)
    sched2 = build_moving_schedule(WELLS, 2.0, 2 * xi, n_points=81)
    assert moving_time(sched2) == pytest.approx(moving_time(sched) / 2, rel=1e-12)
    empty = build_moving_schedule(WELLS, 0.0, xi, n_points=9)
    assert moving_time(empty) == 0.0


def test_moving_time_grid_refinement_invariance():
    xi = calibrate_adiabaticity(7e-3)
    coarse = moving_time(build_moving_schedule(WELLS, 2.0, xi, n_points=81))
    fine = moving_time(build_moving_schedule(WELLS, 2.0, xi, n_points=161))
    assert abs(coarse / fine - 1.0) < 0.01


def test_schedule_validation_rejects_vanishing_gap():
    with pytest.raises(PhysicsDomainError, match="gap"):
        MovingSchedule(final_displacement=1.0, adiabaticity=0.04,
                       displacements=np.array([0.0, 1.0]),
                       minima=np.array([0.0, 1.0]),
                       gap_profile=np.array([100.0, 0.0]),
                       element_profile=np.array([1.0, 1.0]),
                       depth_profile=np.array([500.0, 500.0]))


def test_excitation_and_scattering_limits():
    laser = FocusLaserModel(effective_linewidth=2 * math.pi * 5e6,
                            detuning=-2 * math.pi * 780e9)
    small = build_moving_schedule(WELLS, 2.0, 1e-4, n_points=81)
    p_exc, _ = excitation_and_scattering(small, laser)
    assert p_exc == pytest.approx(4e-8, rel=1e-12)
    # halving xi_bar doubles the move duration and hence the scattering
    xi = calibrate_adiabaticity(7e-3)
    full = build_moving_schedule(WELLS, 2.0, xi, n_points=81)
    half = build_moving_schedule(WELLS, 2.0, xi / 2, n_points=81)
    _, scatter_full = excitation_and_scattering(full, laser)
    _, scatter_half = excitation_and_scattering(half, laser)
    assert scatter_half == pytest.approx(2 * scatter_full, rel=1e-12)


def test_excitation_requires_laser_model():
    sched = build_moving_schedule(WELLS, 1.0, 0.04, n_points=41)
    with pytest.raises(PhysicsDomainError):
        excitation_and_scattering(sched, None)


def test_operating_point_orders_of_magnitude():
    laser = FocusLaserModel(effective_linewidth=2 * math.pi * 5e6,
                            detuning=-2 * math.pi * 780e9)
    xi = calibrate_adiabaticity(7e-3)
    sched = build_moving_schedule(WELLS, 2.0, xi)
    p_exc, p_scatter = excitation_and_scattering(sched, laser)
    assert p_exc == pytest.approx(7e-3, rel=1e-12)
    assert 1e-3 < p_scatter < 1e-1


def test_cycle_yield_values():
    assert cycle_yield(5, 1 / 3) == pytest.approx(0.8683, abs=1e-4)
    assert cycle_yield(0) == 0.0
    assert cycle_yield(1, 1 / 9) == pytest.approx(1 / 9, rel=1e-14)
    with pytest.raises(PhysicsDomainError):
        cycle_yield(-1)
    with pytest.raises(PhysicsDomainError):
        cycle_yield(3, 1.5)
