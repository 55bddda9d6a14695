"""Configuration parsing, named scenarios and reproducible CSV/report output.

Config files are flat `section.key = value` lines with `#` comments; every
key has a documented default and the defaults reproduce the proposed
experimental parameter set exactly.  User-facing frequencies are ordinary
frequencies in Hz; the conversion to angular frequencies happens here and
nowhere else.

Scenarios:
  design-check  feasibility report (one PASS/FAIL line per check)
  beam          analytic beam tables (z, w, R, xi) for raw and focused beams
  gouy-trace    analytic vs numeric Gouy phase from C1 to C2
  fringes       fringe scans with the lens fields off and on
  shift         the headline fringe-shift summary

Exit codes: 0 success, 1 configuration or guard error, 2 design-check run
with --strict and at least one FAIL entry.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import beam_optics, lens_design, ramsey, wavepacket
from .beam_optics import FLAT_WAVEFRONT, GaussianBeamParams, LensSpec
from .lens_design import AtomParams, CavityLensParams
from .ramsey import InterferometerGeometry, InterferometerSetup, RamseyConfig

TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """Invalid configuration text or field values (CLI exit code 1)."""


@dataclass
class AtomSection:
    mass_kg: float = 1.44e-25
    vz_mps: float = 50.0
    omega_i_hz: float = 0.0
    # Level defaults are anchored to the 5.8 mm cavity: the lens transition
    # sits 30 MHz above the field, the R-zone transition 3.2 GHz below it.
    omega_g_hz: float = 299792458.0 / 5.8e-3 + 3.2e9
    omega_e_hz: float = (299792458.0 / 5.8e-3 + 3.2e9) + (299792458.0 / 5.8e-3 - 3.0e7)


@dataclass
class SlitSection:
    w0_m: float = 10e-6


@dataclass
class CavitySection:
    lambda_m: float = 5.8e-3
    n_photons: float = 3e6
    rabi_hz: float = 47e3
    detuning_g_hz: float = -3.0e7
    detuning_i_hz: float = 3.2e9
    t_i_s: float = 2e-4
    q_factor: float = 4e6


@dataclass
class GeometrySection:
    d_m: float = 0.21
    apparatus_length_m: float = 0.3
    drift_pre_m: float = 0.02
    drift_post_m: float = 0.02


@dataclass
class RamseySection:
    ramsey_time_s: float = 6e-3
    omega_gi_hz: float | None = None  # default: atom.omega_g_hz - atom.omega_i_hz
    scan_center_hz: float | None = None  # default: omega_gi_hz
    scan_span_hz: float = 500.0
    scan_points: int = 41


@dataclass
class NumericsSection:
    grid_points: int = 8192
    grid_half_extent_m: float = 80e-6
    cavity_steps: int = 64
    exact_mode: bool = False


@dataclass
class ExperimentConfig:
    atom: AtomSection = field(default_factory=AtomSection)
    slit: SlitSection = field(default_factory=SlitSection)
    cavity: CavitySection = field(default_factory=CavitySection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    ramsey: RamseySection = field(default_factory=RamseySection)
    numerics: NumericsSection = field(default_factory=NumericsSection)

    # --- builders: the Hz -> rad/s boundary -------------------------------

    def atom_params(self) -> AtomParams:
        a = self.atom
        return AtomParams(
            mass=a.mass_kg,
            v_z=a.vz_mps,
            omega_i=TWO_PI * a.omega_i_hz,
            omega_g=TWO_PI * a.omega_g_hz,
            omega_e=TWO_PI * a.omega_e_hz,
        )

    def cavity_params(self) -> CavityLensParams:
        c = self.cavity
        return CavityLensParams(
            wavelength=c.lambda_m,
            photon_number=c.n_photons,
            rabi_per_photon=TWO_PI * c.rabi_hz,
            detuning_g=TWO_PI * c.detuning_g_hz,
            detuning_i=TWO_PI * c.detuning_i_hz,
            interaction_time=c.t_i_s,
            quality_factor=c.q_factor,
        )

    def ramsey_config(self, omega_r: float | None = None) -> RamseyConfig:
        omega_gi = TWO_PI * self.ramsey.omega_gi_hz
        return RamseyConfig(
            ramsey_time=self.ramsey.ramsey_time_s,
            omega_r=omega_gi if omega_r is None else omega_r,
            omega_gi=omega_gi,
        )

    def interferometer_setup(self) -> InterferometerSetup:
        cav = self.cavity_params()
        return InterferometerSetup(
            atom=self.atom_params(),
            slit_w0=self.slit.w0_m,
            cavity_c1=cav,
            cavity_c2=cav,
            geometry=InterferometerGeometry(
                cavity_separation=self.geometry.d_m,
                drift_pre=self.geometry.drift_pre_m,
                drift_post=self.geometry.drift_post_m,
            ),
            ramsey=self.ramsey_config(),
            grid=wavepacket.Grid(self.numerics.grid_points, self.numerics.grid_half_extent_m),
            cavity_steps=self.numerics.cavity_steps,
        )

    def scan_range(self) -> tuple:
        center = TWO_PI * self.ramsey.scan_center_hz
        span = TWO_PI * self.ramsey.scan_span_hz
        return (center - span / 2, center + span / 2)


_SECTIONS = {
    "atom": AtomSection,
    "slit": SlitSection,
    "cavity": CavitySection,
    "geometry": GeometrySection,
    "ramsey": RamseySection,
    "numerics": NumericsSection,
}

_INT_KEYS = {"ramsey.scan_points", "numerics.grid_points", "numerics.cavity_steps"}
_BOOL_KEYS = {"numerics.exact_mode"}


def _known_keys():
    keys = set()
    for name, cls in _SECTIONS.items():
        for f in fields(cls):
            keys.add(f"{name}.{f.name}")
    return keys


_KNOWN_KEYS = _known_keys()


def _parse_value(key: str, text: str, line_no: int):
    if key in _BOOL_KEYS:
        lowered = text.lower()
        if lowered in ("true", "1"):
            return True
        if lowered in ("false", "0"):
            return False
        raise ConfigError(f"line {line_no}: expected true/false for {key}, got {text!r}")
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"line {line_no}: malformed number {text!r} for {key}") from None
    if key in _INT_KEYS:
        if value != int(value):
            raise ConfigError(f"line {line_no}: {key} must be an integer, got {text!r}")
        return int(value)
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat dotted-key config text; unknown keys are errors.

    Missing keys take the documented defaults; the empty string yields the
    full default (proposed-experiment) configuration.
    """
    config = ExperimentConfig()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'section.key = value', got {raw!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        section_name, field_name = key.split(".", 1)
        setattr(getattr(config, section_name), field_name, _parse_value(key, value_text, line_no))
    _resolve_derived(config)
    _validate(config)
    return config


def _resolve_derived(config: ExperimentConfig):
    if config.ramsey.omega_gi_hz is None:
        config.ramsey.omega_gi_hz = config.atom.omega_g_hz - config.atom.omega_i_hz
    if config.ramsey.scan_center_hz is None:
        config.ramsey.scan_center_hz = config.ramsey.omega_gi_hz


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _validate(config: ExperimentConfig):
    a, s, c, g, r, n = (config.atom, config.slit, config.cavity, config.geometry,
                        config.ramsey, config.numerics)
    _require(a.mass_kg > 0, "atom.mass_kg must be positive")
    _require(a.vz_mps > 0, "atom.vz_mps must be positive")
    _require(a.omega_i_hz < a.omega_g_hz < a.omega_e_hz,
             "atom levels must satisfy omega_i_hz < omega_g_hz < omega_e_hz")
    _require(s.w0_m > 0, "slit.w0_m must be positive")
    _require(c.lambda_m > 0, "cavity.lambda_m must be positive")
    _require(c.n_photons > 0, "cavity.n_photons must be positive")
    _require(c.rabi_hz > 0, "cavity.rabi_hz must be positive")
    _require(c.detuning_g_hz != 0, "cavity.detuning_g_hz must be nonzero")
    _require(c.detuning_i_hz != 0, "cavity.detuning_i_hz must be nonzero")
    _require(c.t_i_s > 0, "cavity.t_i_s must be positive")
    _require(c.q_factor > 0, "cavity.q_factor must be positive")
    _require(g.d_m > 0, "geometry.d_m must be positive")
    _require(g.apparatus_length_m > 0, "geometry.apparatus_length_m must be positive")
    _require(g.drift_pre_m >= 0, "geometry.drift_pre_m must be nonnegative")
    _require(g.drift_post_m >= 0, "geometry.drift_post_m must be nonnegative")
    _require(r.ramsey_time_s > 0, "ramsey.ramsey_time_s must be positive")
    _require(r.omega_gi_hz > 0, "ramsey.omega_gi_hz must be positive")
    _require(r.scan_span_hz > 0, "ramsey.scan_span_hz must be positive")
    _require(r.scan_points >= 8, "ramsey.scan_points must be >= 8")
    points = n.grid_points
    _require(points >= 2 and (points & (points - 1)) == 0,
             "numerics.grid_points must be a power of two")
    _require(n.grid_half_extent_m > 0, "numerics.grid_half_extent_m must be positive")
    _require(n.cavity_steps >= 1, "numerics.cavity_steps must be >= 1")


# --- output formatting ------------------------------------------------------


def _format_cell(value) -> str:
    """Shortest round-trip decimal; integral floats drop the trailing .0."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def write_csv(path, rows, header) -> Path:
    """Write rectangular rows as UTF-8, LF-terminated, comma-separated text."""
    path = Path(path)
    n_cols = len(header)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != n_cols:
            raise ValueError(f"row has {len(row)} cells, header has {n_cols}")
        lines.append(",".join(_format_cell(v) for v in row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as err:
        raise OSError(f"could not write {path}: {err}") from err
    return path


def format_check(check: lens_design.DesignCheck) -> str:
    unit = f" {check.unit}" if check.unit else ""
    verdict = "PASS" if check.passed else "FAIL"
    return f"{check.name}: {check.value:.6g}{unit} ({check.bound}) {verdict}"


@dataclass
class ScenarioResult:
    scenario: str
    files: list
    summary: dict
    exit_code: int = 0

    def summary_text(self) -> str:
        lines = []
        for key, value in self.summary.items():
            if isinstance(value, float):
                lines.append(f"{key} = {value:.17g}")
            else:
                lines.append(f"{key} = {value}")
        return "\n".join(lines)


SCENARIOS = ("design-check", "beam", "gouy-trace", "fringes", "shift")


def run_scenario(name: str, config: ExperimentConfig, out_dir=".", strict: bool = False) -> ScenarioResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if name == "design-check":
        return _scenario_design_check(config, out, strict)
    if name == "beam":
        return _scenario_beam(config, out)
    if name == "gouy-trace":
        return _scenario_gouy_trace(config, out)
    if name == "fringes":
        return _scenario_fringes(config, out)
    if name == "shift":
        return _scenario_shift(config, out)
    raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


def _scenario_design_check(config: ExperimentConfig, out: Path, strict: bool) -> ScenarioResult:
    report = lens_design.design_report(
        config.atom_params(),
        config.slit.w0_m,
        config.cavity_params(),
        config.geometry.d_m,
        config.geometry.apparatus_length_m,
    )
    text = "\n".join(format_check(c) for c in report.checks) + "\n"
    path = out / "design_check.txt"
    path.write_text(text, encoding="utf-8")
    summary = {c.name: c.value for c in report.checks}
    summary["all_passed"] = report.all_passed
    code = 2 if strict and not report.all_passed else 0
    return ScenarioResult("design-check", [path], summary, exit_code=code)


def _beam_rows(beam: GaussianBeamParams, z_values) -> list:
    rows = []
    xi0 = beam_optics.gouy_phase(beam, z_values[0])
    for z in z_values:
        r = beam_optics.curvature_radius(beam, z)
        rows.append(
            (
                z,
                beam_optics.beam_width(beam, z),
                math.inf if r is FLAT_WAVEFRONT else r,
                beam_optics.gouy_phase(beam, z) - xi0,
            )
        )
    return rows


def _scenario_beam(config: ExperimentConfig, out: Path) -> ScenarioResult:
    atom = config.atom_params()
    raw = beam_optics.matter_beam(atom, config.slit.w0_m, waist_position=0.0)
    z_f = lens_design.focal_distance(config.cavity_params(), atom, "g")
    focused = beam_optics.apply_thin_lens(raw, LensSpec(z_f, position=0.0))
    z_values = np.linspace(0.0, config.geometry.d_m, 201)
    header = ("z_m", "w_m", "r_m", "xi_rad")
    path_raw = write_csv(out / "beam_raw.csv", _beam_rows(raw, z_values), header)
    path_foc = write_csv(out / "beam_focused.csv", _beam_rows(focused, z_values), header)
    summary = {
        "rayleigh_range_m": raw.rayleigh_range,
        "focal_distance_g_m": z_f,
        "focused_rayleigh_range_m": focused.rayleigh_range,
        "focused_waist_m": focused.waist_radius,
        "focused_waist_position_m": focused.waist_position,
    }
    return ScenarioResult("beam", [path_raw, path_foc], summary)


def _scenario_gouy_trace(config: ExperimentConfig, out: Path) -> ScenarioResult:
    atom = config.atom_params()
    cavity = config.cavity_params()
    grid = wavepacket.Grid(config.numerics.grid_points, config.numerics.grid_half_extent_m)
    d = config.geometry.d_m
    t_f = lens_design.focal_time(cavity, atom, "g")

    raw = beam_optics.matter_beam(atom, config.slit.w0_m, waist_position=0.0)
    focused = beam_optics.apply_thin_lens(raw, LensSpec(atom.v_z * t_f, position=0.0))

    psi0 = wavepacket.make_gaussian(grid, config.slit.w0_m)
    lensed = wavepacket.apply_lens_phase(psi0, atom, t_f)
    # 81 samples keep successive Gouy steps below pi/2 through the focus.
    z_values = np.linspace(0.0, d, 81)
    states = [wavepacket.propagate_free(lensed, atom, z / atom.v_z) for z in z_values]
    xi_numeric = wavepacket.gouy_numeric_trajectory(states, psi0)
    rows = [
        (z, beam_optics.gouy_accumulated(focused, 0.0, z) if z > 0 else 0.0, xi_n)
        for z, xi_n in zip(z_values, xi_numeric)
    ]
    path = write_csv(out / "gouy_trace.csv", rows, ("z_m", "xi_analytic_rad", "xi_numeric_rad"))
    summary = {
        "accumulated_analytic_rad": rows[-1][1],
        "accumulated_numeric_rad": float(xi_numeric[-1]),
    }
    return ScenarioResult("gouy-trace", [path], summary)


def _scenario_fringes(config: ExperimentConfig, out: Path) -> ScenarioResult:
    setup = config.interferometer_setup()
    lo, hi = config.scan_range()
    omegas = np.linspace(lo, hi, config.ramsey.scan_points)
    exact = config.numerics.exact_mode
    p_off = [ramsey.run_interferometer(setup, lenses_on=False, exact_mode=exact, omega_r=w).p_g
             for w in omegas]
    p_on = [ramsey.run_interferometer(setup, lenses_on=True, exact_mode=exact, omega_r=w).p_g
            for w in omegas]
    rows = [(w / TWO_PI, off, on) for w, off, on in zip(omegas, p_off, p_on)]
    path = write_csv(out / "fringes.csv", rows, ("omega_r_hz", "p_g_off", "p_g_on"))
    fit_off = ramsey.fit_fringe(omegas, np.array(p_off), setup.ramsey.omega_gi)
    fit_on = ramsey.fit_fringe(omegas, np.array(p_on), setup.ramsey.omega_gi)
    summary = {
        "fitted_phase_off_rad": fit_off.fitted_phase,
        "fitted_phase_on_rad": fit_on.fitted_phase,
        "contrast_off": fit_off.contrast,
        "contrast_on": fit_on.contrast,
    }
    return ScenarioResult("fringes", [path], summary)


def _scenario_shift(config: ExperimentConfig, out: Path) -> ScenarioResult:
    setup = config.interferometer_setup()
    lo, hi = config.scan_range()
    exact = config.numerics.exact_mode
    on = ramsey.fringe_scan(setup, (lo, hi), config.ramsey.scan_points,
                            lenses_on=True, exact_mode=exact)
    off = ramsey.fringe_scan(setup, (lo, hi), config.ramsey.scan_points,
                             lenses_on=False, exact_mode=exact)
    shift = ramsey._wrap_angle(on.fitted_phase - off.fitted_phase)
    result = ramsey.run_interferometer(setup, lenses_on=True, exact_mode=exact)
    summary = {
        "fringe_shift_rad": shift,
        "contrast_on": on.contrast,
        "contrast_off": off.contrast,
        "overlap_phase_rad": math.atan2(result.component_overlap.imag,
                                        result.component_overlap.real),
        "overlap_magnitude": abs(result.component_overlap),
        "shift_minus_half_pi_rad": shift - math.pi / 2,
        "shift_over_half_pi": shift / (math.pi / 2),
    }
    path = out / "shift.txt"
    text = "\n".join(f"{k} = {v:.17g}" for k, v in summary.items()) + "\n"
    path.write_text(text, encoding="utf-8")
    return ScenarioResult("shift", [path], summary)


# --- entry point ------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gouysim",
        description="Simulate the matter-wave Gouy phase measurement",
    )
    parser.add_argument("scenario", help=f"one of: {', '.join(SCENARIOS)}")
    parser.add_argument("--config", default=None, help="path to a config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--strict", action="store_true",
                        help="design-check: exit 2 if any check fails")
    args = parser.parse_args(argv)

    try:
        if args.scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {args.scenario!r}; choose from {', '.join(SCENARIOS)}"
            )
        text = ""
        if args.config is not None:
            text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(text)
        result = run_scenario(args.scenario, config, args.out, strict=args.strict)
    except (ConfigError, ValueError, OSError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    print(result.summary_text())
    if args.scenario == "design-check":
        print((result.files[0]).read_text(encoding="utf-8"), end="")
    for path in result.files:
        print(f"wrote {path}", file=sys.stderr)
    return result.exit_code


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
