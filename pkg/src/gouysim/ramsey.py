"""Ramsey interferometry coupled to the transverse wavefunction.

The atom enters in internal state |i> with a collimated transverse packet.
A pi/2 pulse at R1 splits it into (|i> + |g>)/sqrt(2); the two internal
components then fly through the cavity pair C1, C2, which lens the |g>
component strongly (focal distance ~ d/2) and the |i> component only
weakly.  After the second pi/2 pulse at R2 the detection probability
oscillates with the pulse detuning, and the focused arm's extra Gouy phase
shifts the whole fringe pattern.  That shift is the headline observable.

Bookkeeping notes
-----------------
* The fringe law produced by the unitary sequence is
  p_g = (1 + C*cos((omega_r - omega_gi)*T - gamma))/2 with C and gamma the
  magnitude and argument of the transverse arm overlap <g-arm|i-arm>; the
  fit treats the fringe period as a free parameter, so the extracted shift
  in radians is independent of any cos^2 convention.
* fitted_phase is the phase of the underlying cosine fringe, which is what
  arg(component_overlap) predicts and what the shift measurement differences.
* Internal-state phases exp(-i*omega*T) are uniform over the transverse
  profile; they set the fringe position but drop out of component_overlap,
  which keeps only the differential transverse (Gouy + residual) phase.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from . import wavepacket
from .lens_design import AtomParams, CavityLensParams, focal_time, potential_curvature
from .wavepacket import Grid, QuadraticPotential, Wavefunction, _wrap_angle


@dataclass(eq=False)
class HybridState:
    """Internal-state pair (|i>, |g>), each with its own transverse packet.

    The component norms carry the internal-state weights, so the combined
    norm (sum of both probabilities) is 1 for a physical state.
    """

    amp_i: Wavefunction
    amp_g: Wavefunction

    def __post_init__(self):
        if self.amp_i.grid is not self.amp_g.grid and self.amp_i.grid != self.amp_g.grid:
            raise ValueError("components must share one grid")

    @property
    def grid(self) -> Grid:
        return self.amp_i.grid

    def combined_norm(self) -> float:
        return wavepacket.norm(self.amp_i) + wavepacket.norm(self.amp_g)


@dataclass(frozen=True)
class RamseyConfig:
    """Pulse-pair timing and frequencies.

    ramsey_time is the free-evolution time between R1 and R2; omega_r the
    drive frequency; omega_gi the |i> -> |g> transition frequency;
    pulse_phase the drive phase convention at R1.
    """

    ramsey_time: float
    omega_r: float
    omega_gi: float
    pulse_phase: float = 0.0

    def __post_init__(self):
        if not (self.ramsey_time > 0):
            raise ValueError("ramsey_time must be positive")


@dataclass
class FringePattern:
    """A sampled fringe scan plus the fitted contrast and phase."""

    samples: list
    contrast: float
    fitted_phase: float


@dataclass(frozen=True)
class InterferometerGeometry:
    """Axial layout: R1 -> drift_pre -> C1 -> d -> C2 -> drift_post -> R2 (m)."""

    cavity_separation: float
    drift_pre: float = 0.02
    drift_post: float = 0.02

    def __post_init__(self):
        if not (self.cavity_separation > 0 and self.drift_pre >= 0 and self.drift_post >= 0):
            raise ValueError("invalid geometry")


@dataclass
class InterferometerSetup:
    """Everything one interferometer run needs except the run-mode flags."""

    atom: AtomParams
    slit_w0: float
    cavity_c1: CavityLensParams
    cavity_c2: CavityLensParams
    geometry: InterferometerGeometry
    ramsey: RamseyConfig
    grid: Grid = field(default_factory=wavepacket.default_grid)
    cavity_steps: int = 64
    suppress_i_lens: bool = False
    g_phase_offset: float = 0.0


@dataclass(frozen=True)
class InterferometerResult:
    p_g: float
    component_overlap: complex


def pi_half_pulse(state: HybridState, pulse_phase: float = 0.0) -> HybridState:
    """Apply the resonant pi/2 unitary to the internal pair at every point.

    U = (1/sqrt(2)) [[1, -i e^{i phi}], [-i e^{-i phi}, 1]] on (amp_i, amp_g),
    with phi the drive phase at the pulse.  Unitary, so the combined norm is
    preserved exactly.
    """
    s = 1 / math.sqrt(2)
    new_i = s * (state.amp_i.amplitudes
                 + (-1j * cmath.exp(1j * pulse_phase)) * state.amp_g.amplitudes)
    new_g = s * ((-1j * cmath.exp(-1j * pulse_phase)) * state.amp_i.amplitudes
                 + state.amp_g.amplitudes)
    g = state.grid
    return HybridState(Wavefunction(g, new_i), Wavefunction(g, new_g))


def evolve_internal(state: HybridState, atom: AtomParams, t: float) -> HybridState:
    """Internal-state evolution exp(-i*omega_i*t), exp(-i*omega_g*t)."""
    g = state.grid
    return HybridState(
        Wavefunction(g, cmath.exp(-1j * atom.omega_i * t) * state.amp_i.amplitudes),
        Wavefunction(g, cmath.exp(-1j * atom.omega_g * t) * state.amp_g.amplitudes),
    )


def fringe_probability_analytic(omega_r: float, omega_gi: float, t: float, extra_phase: float = 0.0) -> float:
    """Idealized fringe law cos^2((omega_r - omega_gi)*t - extra_phase).

    The lens-induced Gouy phase enters as extra_phase and slides the whole
    pattern without changing its contrast.
    """
    if not (t > 0):
        raise ValueError("t must be positive")
    return math.cos((omega_r - omega_gi) * t - extra_phase) ** 2


def _apply_cavity(
    psi: Wavefunction,
    atom: AtomParams,
    cavity: CavityLensParams,
    which_state: str,
    exact_mode: bool,
    steps: int,
) -> Wavefunction:
    if exact_mode:
        pot = QuadraticPotential(potential_curvature(cavity, which_state), cavity.interaction_time)
        return wavepacket.propagate_quadratic(psi, atom, pot, steps)
    return wavepacket.apply_lens_phase(psi, atom, focal_time(cavity, atom, which_state))


def _free_both(state: HybridState, atom: AtomParams, t: float) -> HybridState:
    if t == 0:
        return state
    return HybridState(
        wavepacket.propagate_free(state.amp_i, atom, t),
        wavepacket.propagate_free(state.amp_g, atom, t),
    )


def run_interferometer(
    setup: InterferometerSetup,
    lenses_on: bool = True,
    exact_mode: bool = False,
    omega_r: float | None = None,
) -> InterferometerResult:
    """Run the full R1 -> C1 -> C2 -> R2 sequence for one drive frequency.

    Returns the detection probability p_g (the combined norm of the |g>
    component after R2) and component_overlap, the transverse overlap
    <g-arm|i-arm> just before R2.  Its argument is the accumulated
    differential phase (Gouy plus residuals, positive for the focused arm)
    and its magnitude bounds the fringe contrast.

    In exact_mode each cavity crossing is split-operator evolution of
    duration t_i centered on the lens plane (t_i/2 shaved from each adjacent
    free segment), so thin and exact runs share one timeline.
    """
    atom = setup.atom
    geom = setup.geometry
    ram = setup.ramsey
    if omega_r is None:
        omega_r = ram.omega_r
    v = atom.v_z
    t_total = ram.ramsey_time
    t_pre = geom.drift_pre / v
    t_mid = geom.cavity_separation / v
    t_post = t_total - t_pre - t_mid
    if t_post < geom.drift_post / v - 1e-15:
        raise ValueError(
            "ramsey_time too short for the geometry: needs at least "
            f"{(geom.drift_pre + geom.cavity_separation + geom.drift_post) / v:g} s"
        )
    shave = setup.cavity_c1.interaction_time / 2 if exact_mode else 0.0
    shave2 = setup.cavity_c2.interaction_time / 2 if exact_mode else 0.0
    segments = (t_pre - shave, t_mid - shave - shave2, t_post - shave2)
    if min(segments) < 0:
        raise ValueError("cavity interaction time does not fit between the drift segments")

    psi0 = wavepacket.make_gaussian(setup.grid, setup.slit_w0)
    zero = Wavefunction(setup.grid, np.zeros_like(psi0.amplitudes))
    state = HybridState(amp_i=psi0, amp_g=zero)
    state = pi_half_pulse(state, ram.pulse_phase)

    for leg, cavity in (("pre", setup.cavity_c1), ("mid", setup.cavity_c2)):
        state = _free_both(state, atom, segments[0] if leg == "pre" else segments[1])
        if lenses_on:
            amp_g = _apply_cavity(state.amp_g, atom, cavity, "g", exact_mode, setup.cavity_steps)
            if setup.suppress_i_lens:
                amp_i = state.amp_i
            else:
                amp_i = _apply_cavity(state.amp_i, atom, cavity, "i", exact_mode, setup.cavity_steps)
            state = HybridState(amp_i, amp_g)
        wavepacket.check_contained(state.amp_i)
        wavepacket.check_contained(state.amp_g)
    state = _free_both(state, atom, segments[2])
    wavepacket.check_contained(state.amp_i)
    wavepacket.check_contained(state.amp_g)

    if setup.g_phase_offset != 0.0:
        state = HybridState(
            state.amp_i,
            Wavefunction(state.grid, cmath.exp(-1j * setup.g_phase_offset) * state.amp_g.amplitudes),
        )

    # Strip the R1 pulse scalar (-i e^{-i phi}) and the 1/2 weights so the
    # overlap argument is purely the differential transverse phase.
    raw = wavepacket.overlap(state.amp_g, state.amp_i)
    r1_factor = -1j * cmath.exp(-1j * ram.pulse_phase)
    n_g = math.sqrt(wavepacket.norm(state.amp_g))
    n_i = math.sqrt(wavepacket.norm(state.amp_i))
    component_overlap = raw * r1_factor / (n_g * n_i)

    state = evolve_internal(state, atom, t_total)
    state = pi_half_pulse(state, ram.pulse_phase + omega_r * t_total)
    p_g = wavepacket.norm(state.amp_g)
    if not -1e-9 <= p_g <= 1 + 1e-9:
        raise RuntimeError(f"detection probability {p_g!r} outside [0, 1]")
    return InterferometerResult(p_g=min(max(p_g, 0.0), 1.0), component_overlap=component_overlap)


def _fringe_model(u, amplitude, offset, half_period, half_phase):
    return amplitude * np.cos(half_period * u - half_phase) ** 2 + offset


def fit_fringe(omega_r: np.ndarray, p_g: np.ndarray, omega_gi: float) -> FringePattern:
    """Least-squares fit of a fringe scan to A*cos^2(tau*u - phi) + B.

    u = omega_r - omega_gi and all four parameters are free, so the fringe
    period never has to be assumed.  fitted_phase is the phase 2*phi of the
    underlying cosine pattern, wrapped to (-pi, pi]; contrast is A/(A + 2B)
    clipped to [0, 1].
    """
    u = np.asarray(omega_r, dtype=float) - omega_gi
    p = np.asarray(p_g, dtype=float)
    if len(u) < 8:
        raise ValueError("need at least 8 samples to fit a fringe")

    # Seed the period from the dominant DFT bin of the detrended pattern and
    # the phase from the matching lock-in (the cross-correlation argmax in
    # closed form).
    detrended = p - p.mean()
    du = u[1] - u[0]
    spectrum = np.fft.rfft(detrended)
    k_peak = int(np.argmax(np.abs(spectrum[1:]))) + 1
    freq = 2 * math.pi * k_peak / (len(u) * du)  # rad per unit u of the cosine
    tau0 = freq / 2
    lockin = np.sum(detrended * np.exp(-1j * freq * u))
    chi0 = -math.atan2(lockin.imag, lockin.real)
    a0 = max(4 * abs(lockin) / len(u), 1e-6)
    b0 = max(p.mean() - a0 / 2, 0.0)
    p0 = [a0, b0, tau0, _wrap_angle(chi0) / 2]

    try:
        with warnings.catch_warnings():
            # a perfect (noise-free) fit makes the covariance singular
            warnings.simplefilter("ignore", OptimizeWarning)
            params, _ = curve_fit(_fringe_model, u, p, p0=p0, maxfev=20000)
    except RuntimeError as err:
        residual = float(np.linalg.norm(p - _fringe_model(u, *p0)))
        raise RuntimeError(f"fringe fit failed to converge (seed residual {residual:g})") from err
    amplitude, offset, half_period, half_phase = params
    if amplitude < 0:  # cos^2 identity: -A cos^2(x - phi) = A cos^2(x - phi - pi/2) - A
        amplitude, offset, half_phase = -amplitude, offset + amplitude, half_phase + math.pi / 2
    if half_period < 0:  # even in the period sign
        half_period, half_phase = -half_period, -half_phase

    residual = float(np.linalg.norm(p - _fringe_model(u, amplitude, offset, half_period, half_phase)))
    if residual > 0.05 * max(amplitude, 1e-12) * math.sqrt(len(u)):
        raise RuntimeError(f"fringe fit did not converge: residual norm {residual:g}")

    contrast = amplitude / (amplitude + 2 * offset) if amplitude + 2 * offset > 0 else 0.0
    contrast = min(max(contrast, 0.0), 1.0)
    return FringePattern(
        samples=list(zip(np.asarray(omega_r, dtype=float), p)),
        contrast=contrast,
        fitted_phase=_wrap_angle(2 * half_phase),
    )


def fringe_scan(
    setup: InterferometerSetup,
    omega_r_range: tuple,
    n_points: int,
    lenses_on: bool = True,
    exact_mode: bool = False,
) -> FringePattern:
    """Sample p_g over a drive-frequency range and fit the fringe."""
    if n_points < 8:
        raise ValueError("n_points must be >= 8")
    omegas = np.linspace(omega_r_range[0], omega_r_range[1], n_points)
    p = np.array(
        [run_interferometer(setup, lenses_on, exact_mode, omega_r=w).p_g for w in omegas]
    )
    if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        raise RuntimeError("detection probability left [0, 1]")
    return fit_fringe(omegas, p, setup.ramsey.omega_gi)


def default_scan_range(setup: InterferometerSetup, periods: float = 2.0) -> tuple:
    """A symmetric scan window spanning the given number of fringe periods."""
    span = periods * 2 * math.pi / setup.ramsey.ramsey_time
    return (setup.ramsey.omega_gi - span / 2, setup.ramsey.omega_gi + span / 2)


def gouy_shift_measurement(
    setup: InterferometerSetup,
    omega_r_range: tuple | None = None,
    n_points: int = 33,
    exact_mode: bool = False,
) -> float:
    """Fringe shift between lenses-on and lenses-off runs, in radians.

    This is the experiment's headline observable: the lens fields are the
    only difference between the two patterns, so the shift is the
    accumulated differential Gouy phase of the focused arm.
    """
    if omega_r_range is None:
        omega_r_range = default_scan_range(setup)
    on = fringe_scan(setup, omega_r_range, n_points, lenses_on=True, exact_mode=exact_mode)
    off = fringe_scan(setup, omega_r_range, n_points, lenses_on=False, exact_mode=exact_mode)
    return _wrap_angle(on.fitted_phase - off.fitted_phase)
