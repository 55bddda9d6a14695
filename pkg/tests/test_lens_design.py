import dataclasses
import math

import numpy as np
import pytest
from scipy.constants import hbar

from gouysim import lens_design as ld

TWO_PI = 2 * math.pi


def test_atom_params_level_ordering():
    with pytest.raises(ValueError, match="ordering"):
        ld.AtomParams(mass=1e-25, v_z=50.0, omega_i=2.0, omega_g=1.0, omega_e=3.0)


def test_atom_params_omega_gi(paper_atom):
    assert paper_atom.omega_gi == paper_atom.omega_g - paper_atom.omega_i


def test_cavity_params_validation(paper_cavity):
    with pytest.raises(ValueError, match="detunings"):
        dataclasses.replace(paper_cavity, detuning_g=0.0)
    with pytest.raises(ValueError, match="photon_number"):
        dataclasses.replace(paper_cavity, photon_number=-1.0)
    # the empty cavity is a legal no-lens state
    empty = dataclasses.replace(paper_cavity, photon_number=0.0)
    assert ld.potential_curvature(empty, "g") == 0.0


# --- susceptibilities -------------------------------------------------------


def two_level_system(omega_eg=TWO_PI * 51.66e9, dipole=1e-26):
    return ld.LevelSystem(
        levels=(("g", 0.0), ("e", omega_eg)),
        dipole_couplings=(("e", "g", dipole),),
    )


def test_susceptibility_no_couplings_is_zero():
    system = ld.LevelSystem(levels=(("g", 0.0), ("e", 1.0)), dipole_couplings=())
    assert ld.susceptibility(system, "g", 0.5) == 0.0


def test_susceptibility_unknown_coupling_label_rejected():
    with pytest.raises(ValueError, match="unknown level"):
        ld.LevelSystem(levels=(("g", 0.0),), dipole_couplings=(("g", "x", 1e-26),))


def test_susceptibility_pole_guard():
    system = two_level_system()
    with pytest.raises(ValueError, match="resonant"):
        ld.susceptibility(system, "g", TWO_PI * 51.66e9)


def test_susceptibility_sign_follows_detuning():
    system = two_level_system()
    omega_eg = TWO_PI * 51.66e9
    assert ld.susceptibility(system, "g", omega_eg - TWO_PI * 30e6) > 0
    assert ld.susceptibility(system, "g", omega_eg + TWO_PI * 30e6) < 0


def test_susceptibility_reduces_to_near_resonant_form():
    # the two-term sum collapses to d^2/(hbar*Delta) with relative error
    # bounded by |Delta/omega_transition| near resonance
    rng = np.random.default_rng(3)
    for _ in range(100):
        omega_eg = TWO_PI * rng.uniform(1e9, 1e11)
        dipole = rng.uniform(1e-27, 1e-25)
        detuning = omega_eg * 10 ** rng.uniform(-5, math.log10(0.3))
        system = two_level_system(omega_eg, dipole)
        full = ld.susceptibility(system, "g", omega_eg - detuning)
        near = ld.near_resonant_susceptibility(dipole, detuning)
        rel = abs(full - near) / abs(near)
        assert rel <= abs(detuning / omega_eg)


def test_susceptibility_reduction_leading_order():
    # deep in the dispersive regime the error approaches |Delta/(2*omega)|
    omega_eg = TWO_PI * 51.66e9
    detuning = 1e-4 * omega_eg
    system = two_level_system(omega_eg)
    full = ld.susceptibility(system, "g", omega_eg - detuning)
    near = ld.near_resonant_susceptibility(1e-26, detuning)
    rel = abs(full - near) / abs(near)
    assert rel == pytest.approx(detuning / (2 * omega_eg), rel=1e-3)


def test_near_resonant_susceptibility_scaling():
    base = ld.near_resonant_susceptibility(1e-26, TWO_PI * 30e6)
    assert ld.near_resonant_susceptibility(1e-26, TWO_PI * 60e6) == pytest.approx(base / 2)
    assert ld.near_resonant_susceptibility(1e-26, -TWO_PI * 30e6) < 0
    with pytest.raises(ValueError):
        ld.near_resonant_susceptibility(1e-26, 0.0)


def test_state_selectivity_ratio(paper_cavity):
    # alpha_g/alpha_i = Delta_i/Delta_g for equal dipoles
    a_g = ld.near_resonant_susceptibility(1e-26, paper_cavity.detuning_g)
    a_i = ld.near_resonant_susceptibility(1e-26, paper_cavity.detuning_i)
    assert a_g / a_i == pytest.approx(3.2e9 / -3.0e7, rel=1e-12)
    assert a_g / a_i == pytest.approx(-106.67, rel=1e-4)


# --- lens strength ----------------------------------------------------------


def test_potential_curvature_paper_value(paper_atom, paper_cavity):
    c = ld.potential_curvature(paper_cavity, "g")
    expected = (
        -hbar
        * paper_cavity.photon_number
        * paper_cavity.rabi_per_photon**2
        / paper_cavity.detuning_g
        * (TWO_PI / paper_cavity.wavelength) ** 2
    )
    assert c == pytest.approx(expected, rel=1e-14)
    assert c == pytest.approx(1.71773e-19, rel=1e-5)
    assert c > 0  # negative detuning: converging
    assert ld.harmonic_frequency(paper_cavity, paper_atom, "g") == pytest.approx(1.5446e3, rel=1e-4)
    assert ld.harmonic_frequency(paper_cavity, paper_atom, "g") == pytest.approx(1.55e3, rel=5e-3)


def test_potential_curvature_signs_and_zero(paper_cavity):
    flipped = dataclasses.replace(paper_cavity, detuning_g=-paper_cavity.detuning_g)
    assert ld.potential_curvature(flipped, "g") == -ld.potential_curvature(paper_cavity, "g")
    empty = dataclasses.replace(paper_cavity, photon_number=0.0)
    assert ld.potential_curvature(empty, "g") == 0.0


def test_focal_time_paper_values(paper_atom, paper_cavity):
    t_f = ld.focal_time(paper_cavity, paper_atom, "g")
    assert t_f == pytest.approx(2.0958e-3, rel=1e-4)
    assert t_f == pytest.approx(2.1e-3, rel=5e-3)
    z_f = ld.focal_distance(paper_cavity, paper_atom, "g")
    assert z_f == pytest.approx(0.105, rel=0.01)
    z_f_i = ld.focal_distance(paper_cavity, paper_atom, "i")
    assert z_f_i == pytest.approx(-11.178, rel=1e-4)
    assert z_f_i == pytest.approx(-11.2, rel=5e-3)


def test_focal_time_linear_in_photon_number(paper_atom, paper_cavity):
    t_f = ld.focal_time(paper_cavity, paper_atom, "g")
    doubled = dataclasses.replace(paper_cavity, photon_number=2 * paper_cavity.photon_number)
    assert ld.focal_time(doubled, paper_atom, "g") == pytest.approx(t_f / 2, rel=1e-12)


def test_focal_time_empty_cavity_sentinel(paper_atom, paper_cavity):
    empty = dataclasses.replace(paper_cavity, photon_number=0.0)
    assert math.isinf(ld.focal_time(empty, paper_atom, "g"))
    assert math.isinf(ld.focal_distance(empty, paper_atom, "g"))


def test_focal_time_matches_curvature(paper_atom, paper_cavity):
    # 1/t_F == 2*c*t_i/m ties the lens formula to the potential coefficient
    rng = np.random.default_rng(5)
    for _ in range(50):
        cav = dataclasses.replace(
            paper_cavity,
            photon_number=rng.uniform(1e4, 1e8),
            rabi_per_photon=TWO_PI * rng.uniform(1e3, 1e6),
            detuning_g=TWO_PI * rng.uniform(1e6, 1e9) * rng.choice([-1, 1]),
            interaction_time=rng.uniform(1e-5, 1e-3),
            wavelength=rng.uniform(1e-3, 1e-2),
        )
        t_f = ld.focal_time(cav, paper_atom, "g")
        c = ld.potential_curvature(cav, "g")
        assert 1.0 / t_f == pytest.approx(2 * c * cav.interaction_time / paper_atom.mass, rel=1e-12)


def test_focal_time_scalings(paper_atom, paper_cavity):
    t_f = ld.focal_time(paper_cavity, paper_atom, "g")
    rng = np.random.default_rng(9)
    for _ in range(20):
        s = rng.uniform(0.2, 5.0)
        assert ld.focal_time(
            dataclasses.replace(paper_cavity, detuning_g=s * paper_cavity.detuning_g),
            paper_atom, "g") == pytest.approx(s * t_f, rel=1e-12)
        assert ld.focal_time(
            dataclasses.replace(paper_cavity, wavelength=s * paper_cavity.wavelength),
            paper_atom, "g") == pytest.approx(s**2 * t_f, rel=1e-12)
        assert ld.focal_time(
            dataclasses.replace(paper_cavity, interaction_time=s * paper_cavity.interaction_time),
            paper_atom, "g") == pytest.approx(t_f / s, rel=1e-12)
        heavier = dataclasses.replace(paper_atom, mass=s * paper_atom.mass)
        assert ld.focal_time(paper_cavity, heavier, "g") == pytest.approx(s * t_f, rel=1e-12)


# --- feasibility figures ----------------------------------------------------


def test_absorption_parameter_paper_value(paper_cavity):
    val = ld.absorption_parameter(paper_cavity, 10e-6)
    assert val == pytest.approx(8.6413e-4, rel=1e-4)
    assert val == pytest.approx(8e-4, rel=0.1)  # proposal rounds to 8e-4
    assert ld.absorption_parameter(paper_cavity, 0.0) == 0.0
    assert ld.absorption_parameter(paper_cavity, 20e-6) == pytest.approx(4 * val, rel=1e-12)


def test_q_residual_phase_values(paper_cavity):
    phase = ld.q_residual_phase(paper_cavity)
    assert phase == pytest.approx(-0.069398, rel=1e-4)  # signed: Delta_g < 0
    assert abs(2 * phase) == pytest.approx(0.139, rel=5e-3)
    huge_q = dataclasses.replace(paper_cavity, quality_factor=1e30)
    assert ld.q_residual_phase(huge_q) == pytest.approx(0.0, abs=1e-20)


def test_min_quality_factor(paper_cavity):
    q1 = ld.min_quality_factor(paper_cavity, math.pi / 20, cavities=1)
    q2 = ld.min_quality_factor(paper_cavity, math.pi / 20, cavities=2)
    assert q1 == pytest.approx(1.7672e6, rel=1e-4)
    assert q2 == pytest.approx(2 * q1, rel=1e-12)
    # the proposed Q = 4e6 clears both bookkeepings
    assert paper_cavity.quality_factor > q2 > q1


# --- design report ----------------------------------------------------------

EXPECTED_CHECKS = (
    "plane_wave_rayleigh_ratio",
    "focal_matches_half_separation",
    "separation_over_focused_rayleigh",
    "absorption_parameter",
    "two_cavity_q_phase",
    "thin_lens_parameter",
    "lens_selectivity",
)


def test_design_report_paper_parameters_all_pass(paper_atom, paper_cavity):
    report = ld.design_report(paper_atom, 10e-6, paper_cavity, d=0.21, apparatus_length=0.3)
    assert tuple(c.name for c in report.checks) == EXPECTED_CHECKS
    assert report.all_passed
    assert report["thin_lens_parameter"].value == pytest.approx(0.309, rel=2e-3)
    assert report["lens_selectivity"].value == pytest.approx(106.7, rel=1e-3)


def test_design_report_low_photon_number_fails_focal_check(paper_atom, paper_cavity):
    weak = dataclasses.replace(paper_cavity, photon_number=paper_cavity.photon_number / 10)
    report = ld.design_report(paper_atom, 10e-6, weak, d=0.21, apparatus_length=0.3)
    assert not report["focal_matches_half_separation"].passed
    assert report["focal_matches_half_separation"].value == pytest.approx(1.048, rel=1e-3)
    assert not report.all_passed


def test_design_report_low_q_fails_phase_check(paper_atom, paper_cavity):
    lossy = dataclasses.replace(paper_cavity, quality_factor=1e5)
    report = ld.design_report(paper_atom, 10e-6, lossy, d=0.21, apparatus_length=0.3)
    assert not report["two_cavity_q_phase"].passed
    assert not report.all_passed
