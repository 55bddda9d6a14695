"""Dispersive atomic-lens physics and feasibility checks.

A far-detuned microwave cavity with an electric-field node on the beam axis
acts on one internal state of a passing atom as a thin cylindrical lens.
This module computes the atomic susceptibilities behind that effect, the
quadratic-potential coefficient, the resulting focal time and distance, the
photon-absorption and residual-cavity-phase figures of merit, and bundles
the whole parameter-set validation into one report.

Sign conventions: detunings are stored signed exactly as defined,
Delta_g = (omega_e - omega_g) - omega and Delta_i = (omega_g - omega_i) - omega.
A negative detuning gives a positive potential curvature, i.e. a converging
lens.  All angular frequencies are rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.constants import hbar as HBAR

from . import beam_optics

#: Focal-time sentinel meaning "no lens" (empty cavity); matches the
#: LensSpec convention in beam_optics.
NO_LENS_FOCAL_TIME = math.inf


@dataclass(frozen=True)
class AtomParams:
    """Mass, longitudinal speed and internal level frequencies of the atom.

    omega_i, omega_g, omega_e are the angular frequencies (E/hbar) of the
    interferometer levels, ordered omega_i < omega_g < omega_e.
    """

    mass: float
    v_z: float
    omega_i: float
    omega_g: float
    omega_e: float

    def __post_init__(self):
        if not (self.mass > 0 and self.v_z > 0):
            raise ValueError("mass and v_z must be positive")
        if not (self.omega_i < self.omega_g < self.omega_e):
            raise ValueError("level ordering omega_i < omega_g < omega_e violated")

    @property
    def omega_gi(self) -> float:
        """Transition angular frequency omega_g - omega_i."""
        return self.omega_g - self.omega_i


@dataclass(frozen=True)
class LevelSystem:
    """Explicit level structure with dipole couplings.

    levels: list of (label, angular frequency rad/s).
    dipole_couplings: list of (label_a, label_b, |<a|P|b>| in C*m).
    """

    levels: tuple
    dipole_couplings: tuple

    def __post_init__(self):
        labels = {lab for lab, _ in self.levels}
        for a, b, d in self.dipole_couplings:
            if a not in labels or b not in labels:
                raise ValueError(f"coupling ({a}, {b}) references unknown level")
            if d < 0:
                raise ValueError("dipole magnitudes must be nonnegative")

    def level_frequency(self, label) -> float:
        for lab, omega in self.levels:
            if lab == label:
                return omega
        raise KeyError(label)


@dataclass(frozen=True)
class CavityLensParams:
    """One dispersive cavity acting as a state-selective atomic lens.

    rabi_per_photon is the single-photon Rabi angular frequency Omega
    (rad/s); detunings are signed (rad/s); interaction_time is the effective
    time t_i the atom spends in the mode.
    """

    wavelength: float
    photon_number: float
    rabi_per_photon: float
    detuning_g: float
    detuning_i: float
    interaction_time: float
    quality_factor: float

    def __post_init__(self):
        for name in ("wavelength", "interaction_time", "quality_factor"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive")
        if self.photon_number < 0:
            raise ValueError("photon_number must be nonnegative")
        if self.detuning_g == 0 or self.detuning_i == 0:
            raise ValueError("detunings must be nonzero")

    def detuning(self, which_state: str) -> float:
        if which_state == "g":
            return self.detuning_g
        if which_state == "i":
            return self.detuning_i
        raise ValueError("which_state must be 'g' or 'i'")


@dataclass
class DesignCheck:
    name: str
    value: float
    unit: str
    bound: str
    passed: bool


@dataclass
class DesignReport:
    """Named feasibility checks, each with its computed value and verdict."""

    checks: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> DesignCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


#: Relative pole-proximity tolerance for the full susceptibility sum.
_POLE_RTOL = 1e-9


def susceptibility(system: LevelSystem, state_label, probe: float) -> float:
    """Full two-term linear susceptibility of one internal state.

    alpha_n = sum_m |<m|P|n>|^2/hbar * [1/((w_m - w_n) + w) + 1/((w_m - w_n) - w)]
    summed over every level m dipole-coupled to n, probed at angular
    frequency w.  Units C^2 m^2 / J.
    """
    omega_n = system.level_frequency(state_label)
    total = 0.0
    for a, b, dip in system.dipole_couplings:
        if state_label == a:
            other = b
        elif state_label == b:
            other = a
        else:
            continue
        omega_mn = system.level_frequency(other) - omega_n
        if abs(abs(omega_mn) - abs(probe)) <= _POLE_RTOL * abs(probe):
            raise ValueError(
                f"probe frequency resonant with transition ({a}, {b}); "
                "dispersive formula invalid"
            )
        total += (dip**2 / HBAR) * (1.0 / (omega_mn + probe) + 1.0 / (omega_mn - probe))
    return total


def near_resonant_susceptibility(dipole: float, detuning: float) -> float:
    """Single-transition susceptibility |d|^2/(hbar*Delta) near resonance."""
    if detuning == 0:
        raise ValueError("detuning must be nonzero")
    return dipole**2 / (HBAR * detuning)


def potential_curvature(cavity: CavityLensParams, which_state: str) -> float:
    """Coefficient c of the in-cavity potential V(x) = c*x^2.

    c = -hbar * (N*Omega^2/Delta) * (2*pi/lambda)^2.  Positive c (negative
    detuning) means a converging lens.
    """
    delta = cavity.detuning(which_state)
    k_field = 2 * math.pi / cavity.wavelength
    return -HBAR * (cavity.photon_number * cavity.rabi_per_photon**2 / delta) * k_field**2


def harmonic_frequency(cavity: CavityLensParams, atom: AtomParams, which_state: str) -> float:
    """omega_ho = sqrt(2|c|/m) of the in-cavity quadratic potential."""
    c = potential_curvature(cavity, which_state)
    return math.sqrt(2 * abs(c) / atom.mass)


def focal_time(cavity: CavityLensParams, atom: AtomParams, which_state: str) -> float:
    """Focal time of the cavity lens, 1/t_F = 2*c*t_i/m.

    Equivalently 1/t_F = -(2*hbar*t_i/m)*(N*Omega^2/Delta)*(2*pi/lambda)^2.
    Positive for a converging lens, negative for a diverging one; an empty
    cavity (N*Omega^2 = 0) returns the "no lens" sentinel.
    """
    c = potential_curvature(cavity, which_state)
    inverse = 2 * c * cavity.interaction_time / atom.mass
    if inverse == 0.0:
        return NO_LENS_FOCAL_TIME
    return 1.0 / inverse


def focal_distance(cavity: CavityLensParams, atom: AtomParams, which_state: str) -> float:
    """z_F = v_z * t_F (inf for the no-lens sentinel)."""
    return atom.v_z * focal_time(cavity, atom, which_state)


def absorption_parameter(cavity: CavityLensParams, x_scale: float) -> float:
    """Photon-absorption figure of merit 4*pi^2*N*Omega^2*x^2/(Delta_g^2*lambda^2).

    Must stay well below 1 over the beam extent for the dispersive (no real
    transitions) treatment to hold.
    """
    if x_scale < 0:
        raise ValueError("x_scale must be nonnegative")
    return (
        4 * math.pi**2
        * cavity.photon_number
        * cavity.rabi_per_photon**2
        * x_scale**2
        / (cavity.detuning_g**2 * cavity.wavelength**2)
    )


def q_residual_phase(cavity: CavityLensParams) -> float:
    """Spurious phase N*Omega^2*t_i/(Delta_g*Q) per cavity traversal (signed).

    A real cavity cannot hold a perfect field node; the residual intensity
    on axis scales as 1/Q and imprints this phase on the lensed component.
    """
    return (
        cavity.photon_number
        * cavity.rabi_per_photon**2
        * cavity.interaction_time
        / (cavity.detuning_g * cavity.quality_factor)
    )


def min_quality_factor(cavity: CavityLensParams, phase_bound: float, cavities: int = 1) -> float:
    """Smallest Q keeping the total residual phase of `cavities` traversals below phase_bound."""
    if not (phase_bound > 0):
        raise ValueError("phase_bound must be positive")
    per_cavity = abs(
        cavity.photon_number * cavity.rabi_per_photon**2 * cavity.interaction_time / cavity.detuning_g
    )
    return cavities * per_cavity / phase_bound


def design_report(
    atom: AtomParams,
    slit_w0: float,
    cavity: CavityLensParams,
    d: float,
    apparatus_length: float,
) -> DesignReport:
    """Run the full feasibility validation for one parameter set.

    Checks, in order:
      1. plane-wave approximation: z_r / apparatus_length > 10
      2. focal distance matches the cavity separation: z_F(g) = d/2 within 1%
      3. the focus is short: d / z_r' > 10
      4. absorption parameter at the beam width < 1e-2
      5. two-cavity residual Q phase < pi/20
      6. thin-lens (Raman-Nath) validity: omega_ho * t_i < 0.5
      7. lens selectivity: |z_F(i)/z_F(g)| > 20

    Failures are report entries, never exceptions.
    """
    report = DesignReport()

    z_r = beam_optics.matter_rayleigh_range(atom, slit_w0)
    ratio = z_r / apparatus_length
    report.checks.append(
        DesignCheck("plane_wave_rayleigh_ratio", ratio, "", "> 10", ratio > 10)
    )

    z_f_g = focal_distance(cavity, atom, "g")
    rel = abs(z_f_g - d / 2) / (d / 2)
    report.checks.append(
        DesignCheck("focal_matches_half_separation", z_f_g, "m", f"= {d / 2:g} m within 1%", rel < 0.01)
    )

    beam = beam_optics.matter_beam(atom, slit_w0)
    focused = beam_optics.apply_thin_lens(beam, beam_optics.LensSpec(z_f_g))
    ratio_d = d / focused.rayleigh_range
    report.checks.append(
        DesignCheck("separation_over_focused_rayleigh", ratio_d, "", "> 10", ratio_d > 10)
    )

    absorb = absorption_parameter(cavity, slit_w0)
    report.checks.append(
        DesignCheck("absorption_parameter", absorb, "", "< 1e-2", absorb < 1e-2)
    )

    two_cavity_phase = 2 * abs(q_residual_phase(cavity))
    bound = math.pi / 20
    report.checks.append(
        DesignCheck("two_cavity_q_phase", two_cavity_phase, "rad", "< pi/20", two_cavity_phase < bound)
    )

    thin = harmonic_frequency(cavity, atom, "g") * cavity.interaction_time
    report.checks.append(
        DesignCheck("thin_lens_parameter", thin, "", "< 0.5", thin < 0.5)
    )

    z_f_i = focal_distance(cavity, atom, "i")
    selectivity = abs(z_f_i / z_f_g)
    report.checks.append(
        DesignCheck("lens_selectivity", selectivity, "", "> 20", selectivity > 20)
    )

    return report
