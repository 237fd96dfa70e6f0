"""Light shifts, scattering rates, and the wavelength optimisation."""
import math

import numpy as np
import pytest

from mottreg.errors import PhysicsDomainError
from mottreg.stark import (FieldAtAtom, HyperfineComposition, TransitionSet,
                           default_search_band, fine_structure_shifts,
                           hyperfine_shifts, optimize_lpol_wavelength,
                           scattering_rates, shift_report)
from mottreg.units import RB87

# independent oracle constants
C_ORACLE = 299792458.0
HBAR_ORACLE = 1.054571817e-34


def _oracle_terms(lam_l, intensity):
    """Term-by-term evaluation with an independent constant set."""
    w1 = 2 * math.pi * C_ORACLE / 794.98e-9
    w2 = 2 * math.pi * C_ORACLE / 780.24e-9
    g1 = 2 * math.pi * 5.75e6
    g2 = 2 * math.pi * 6.07e6
    d1 = 2 * math.pi * C_ORACLE * (1 / lam_l - 1 / 794.98e-9)
    d2 = 2 * math.pi * C_ORACLE * (1 / lam_l - 1 / 780.24e-9)
    pref = 3 * math.pi * C_ORACLE ** 2 * intensity / 2
    a1 = pref * g1 / w1 ** 3
    a2 = pref * g2 / w2 ** 3
    d_plus = a2 / d2
    d_minus = (2 / 3) * a1 / d1 + (1 / 3) * a2 / d2
    gamma0 = (a1 * g1 / (6 * d1 ** 2) + 5 * a2 * g2 / (6 * d2 ** 2)) / HBAR_ORACLE
    gamma1 = (2 * a1 * g1 / (3 * d1 ** 2) + a2 * g2 / (3 * d2 ** 2)) / HBAR_ORACLE
    closed_diff = a1 / (2 * d1) - a2 / (2 * d2)
    return d_plus, d_minus, gamma0, gamma1, closed_diff


def test_fine_shift_plus_depends_only_on_d2():
    field = FieldAtAtom(intensity=1e3, wavelength=787.6e-9)
    trans = TransitionSet.for_species(RB87, field.wavelength)
    altered = TransitionSet(c_plus=trans.c_plus, c_minus=trans.c_minus,
                            omega1=trans.omega1 * 1.1, omega2=trans.omega2,
                            gamma1=trans.gamma1 * 3.0, gamma2=trans.gamma2,
                            detuning1=trans.detuning1 * 0.5,
                            detuning2=trans.detuning2)
    d_plus, _ = fine_structure_shifts(field, trans)
    d_plus_alt, _ = fine_structure_shifts(field, altered)
    assert d_plus == d_plus_alt


def test_fine_shifts_linear_in_intensity():
    trans = TransitionSet.for_species(RB87, 787.6e-9)
    one = fine_structure_shifts(FieldAtAtom(1e3, 787.6e-9), trans)
    two = fine_structure_shifts(FieldAtAtom(2e3, 787.6e-9), trans)
    assert two[0] == pytest.approx(2 * one[0], rel=1e-14)
    assert two[1] == pytest.approx(2 * one[1], rel=1e-14)


def test_fine_shifts_against_term_oracle():
    field = FieldAtAtom(intensity=1e3, wavelength=787.6e-9)
    trans = TransitionSet.for_species(RB87, field.wavelength)
    d_plus, d_minus = fine_structure_shifts(field, trans)
    o_plus, o_minus, _, _, _ = _oracle_terms(787.6e-9, 1e3)
    assert d_plus == pytest.approx(o_plus, rel=1e-10)
    assert d_minus == pytest.approx(o_minus, rel=1e-10)


def test_fine_shifts_resonance_error():
    trans = TransitionSet.for_species(RB87, RB87.d2_wavelength)
    with pytest.raises(PhysicsDomainError, match="resonance"):
        fine_structure_shifts(FieldAtAtom(1.0, RB87.d2_wavelength), trans)


def test_hyperfine_equal_shifts_degenerate():
    d0, d1, diff = hyperfine_shifts(3.3, 3.3)
    assert d0 == pytest.approx(3.3) and d1 == pytest.approx(3.3)
    assert diff == pytest.approx(0.0, abs=1e-15)


def test_hyperfine_stated_mixture():
    d0, d1, diff = hyperfine_shifts(0.0, 4.0)
    assert (d0, d1, diff) == (1.0, 4.0, 3.0)


def test_hyperfine_closed_form_oracle():
    field = FieldAtAtom(intensity=2.5e6, wavelength=787.6e-9)
    rep = shift_report(field, RB87)
    closed = _oracle_terms(787.6e-9, 2.5e6)[4]
    assert rep.deltaE_diff == pytest.approx(closed, rel=1e-10)
    assert rep.deltaE_diff == rep.deltaE_1 - rep.deltaE_0


def test_hyperfine_weight_validation():
    with pytest.raises(PhysicsDomainError):
        HyperfineComposition(state0=(0.3, 0.3))


def test_scattering_zero_intensity():
    trans = TransitionSet.for_species(RB87, 787.6e-9)
    assert scattering_rates(FieldAtAtom(0.0, 787.6e-9), trans) == (0.0, 0.0)


def test_scattering_positive_and_oracle():
    field = FieldAtAtom(intensity=1e3, wavelength=787.6e-9)
    trans = TransitionSet.for_species(RB87, field.wavelength)
    g0, g1 = scattering_rates(field, trans)
    assert g0 > 0 and g1 > 0
    _, _, o0, o1, _ = _oracle_terms(787.6e-9, 1e3)
    assert g0 == pytest.approx(o0, rel=1e-10)
    assert g1 == pytest.approx(o1, rel=1e-10)


def test_scattering_monotone_in_d2_detuning():
    # move away from D2 with D1 essentially fixed far away: both rates drop
    lams = np.array([781.5, 782.5, 784.0, 786.0]) * 1e-9
    rates = [scattering_rates(FieldAtAtom(1e3, lam),
                              TransitionSet.for_species(RB87, lam)) for lam in lams]
    g0s = [r[0] for r in rates]
    g1s = [r[1] for r in rates]
    assert all(a > b for a, b in zip(g0s, g0s[1:]))
    assert all(a > b for a, b in zip(g1s, g1s[1:]))


@pytest.mark.parametrize("lam_nm", [781.0, 784.0, 787.6, 790.0, 794.0])
def test_plus_shift_sign_follows_d2_detuning(lam_nm):
    lam = lam_nm * 1e-9
    trans = TransitionSet.for_species(RB87, lam)
    d_plus, _ = fine_structure_shifts(FieldAtAtom(1e3, lam), trans)
    assert math.copysign(1.0, d_plus) == math.copysign(1.0, trans.detuning2)


def test_eta_intensity_invariant():
    for lam_nm in (783.0, 787.6, 791.0):
        lam = lam_nm * 1e-9
        eta1 = shift_report(FieldAtAtom(1.0, lam), RB87).eta
        eta2 = shift_report(FieldAtAtom(2.0, lam), RB87).eta
        assert abs(eta1 / eta2 - 1.0) < 1e-12


def test_optimum_wavelength_near_reference_value():
    lam, eta = optimize_lpol_wavelength(RB87)
    assert abs(lam - 787.6e-9) < 1.5e-9
    assert eta > 0


def test_optimum_matches_dense_grid_oracle():
    band = default_search_band(RB87)
    grid = np.linspace(band[0], band[1], 10_000)
    etas = [shift_report(FieldAtAtom(1.0, float(w)), RB87).eta for w in grid]
    lam_grid = grid[int(np.argmax(etas))]
    lam, _ = optimize_lpol_wavelength(RB87)
    assert abs(lam - lam_grid) <= 2 * (grid[1] - grid[0])


def test_optimum_argmax_invariant_under_intensity():
    # argmax does not move when every shift and rate scales together
    band = default_search_band(RB87)
    grid = np.linspace(band[0], band[1], 801)
    e1 = np.array([shift_report(FieldAtAtom(1.0, float(w)), RB87).eta for w in grid])
    e2 = np.array([shift_report(FieldAtAtom(7.0, float(w)), RB87).eta for w in grid])
    assert int(np.argmax(e1)) == int(np.argmax(e2))


def test_band_validation():
    with pytest.raises(PhysicsDomainError):
        optimize_lpol_wavelength(RB87, (RB87.d2_wavelength + 0.05e-9,
                                        RB87.d1_wavelength - 1e-9))
    with pytest.raises(PhysicsDomainError):
        optimize_lpol_wavelength(RB87, (770e-9, 790e-9))
