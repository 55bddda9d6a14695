"""Matter-wave Gouy phase simulator.

Simulates a Ramsey interferometer in which two dispersive microwave
cavities act as state-selective cylindrical lenses on an atomic beam, and
extracts the Gouy-phase-induced fringe shift the focusing imprints.
"""

from .beam_optics import (
    FLAT_WAVEFRONT,
    GaussianBeamParams,
    LensSpec,
    apply_thin_lens,
    beam_width,
    curvature_radius,
    gouy_accumulated,
    gouy_phase,
    matter_beam,
    matter_rayleigh_range,
)
from .lens_design import (
    AtomParams,
    CavityLensParams,
    DesignReport,
    LevelSystem,
    absorption_parameter,
    design_report,
    focal_distance,
    focal_time,
    near_resonant_susceptibility,
    potential_curvature,
    q_residual_phase,
    susceptibility,
)
from .ramsey import (
    FringePattern,
    HybridState,
    InterferometerGeometry,
    InterferometerSetup,
    RamseyConfig,
    fringe_probability_analytic,
    fringe_scan,
    gouy_shift_measurement,
    pi_half_pulse,
    run_interferometer,
)
from .wavepacket import (
    Grid,
    QuadraticPotential,
    Wavefunction,
    apply_lens_phase,
    covariance_xp,
    default_grid,
    gouy_numeric,
    make_gaussian,
    norm,
    overlap,
    propagate_free,
    propagate_quadratic,
    width,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
