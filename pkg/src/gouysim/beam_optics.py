"""Closed-form Gaussian-beam algebra.

Width, curvature radius, Gouy phase and Rayleigh range of a 1D (cylindrical)
Gaussian beam, plus ideal thin-lens transformations.  Everything is valid for
light (wavenumber k) and for matter waves alike: a monoenergetic atomic beam
with longitudinal speed v_z maps onto the same algebra with k -> m*v_z/hbar
and the axial coordinate z -> v_z*t.

Conventions
-----------
* Beam amplitude ~ exp(-x^2/w(z)^2), so w is the 1/e amplitude radius and the
  intensity falls as exp(-2x^2/w^2).
* Gouy phase xi(z) = arctan((z - z_waist)/z0)/2 enters the field as
  exp(-i*xi); accumulated Gouy phase is reported as the positive difference
  xi(z2) - xi(z1).
* The internal lens algebra uses the complex beam parameter
  q(z) = (z - z_waist) + i*z0 with the thin-lens map 1/q' = 1/q - 1/z_F, so a
  lens may sit anywhere, not just at a waist.

All quantities are SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from scipy.constants import hbar as HBAR

if TYPE_CHECKING:
    from .lens_design import AtomParams


class FlatWavefront:
    """Tagged value for the infinite curvature radius at a beam waist."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FLAT_WAVEFRONT"


#: Returned by :func:`curvature_radius` exactly at the waist.
FLAT_WAVEFRONT = FlatWavefront()

CurvatureRadius = Union[float, FlatWavefront]

#: Relative tolerance for the Rayleigh-range consistency invariant.
_RAYLEIGH_RTOL = 1e-12


@dataclass(frozen=True)
class GaussianBeamParams:
    """Analytic state of a collimated or focused Gaussian beam.

    Parameters
    ----------
    waist_radius : float
        w0, the 1/e amplitude radius at the waist (m).
    waist_position : float
        Axial coordinate of the waist (m).
    rayleigh_range : float
        z0 = k*w0^2/2 (m).  Must be consistent with the other fields.
    wavenumber : float
        k (rad/m); for matter waves k = m*v_z/hbar.
    """

    waist_radius: float
    waist_position: float
    rayleigh_range: float
    wavenumber: float

    def __post_init__(self):
        if not (self.waist_radius > 0):
            raise ValueError("waist_radius must be positive")
        if not (self.wavenumber > 0):
            raise ValueError("wavenumber must be positive")
        expected = self.wavenumber * self.waist_radius**2 / 2
        if abs(self.rayleigh_range - expected) > _RAYLEIGH_RTOL * expected:
            raise ValueError(
                "rayleigh_range inconsistent with k*w0^2/2: "
                f"{self.rayleigh_range!r} vs {expected!r}"
            )

    @classmethod
    def from_waist(cls, waist_radius, wavenumber, waist_position=0.0):
        """Build a beam from waist radius and wavenumber; z0 is derived."""
        return cls(
            waist_radius=waist_radius,
            waist_position=waist_position,
            rayleigh_range=wavenumber * waist_radius**2 / 2,
            wavenumber=wavenumber,
        )

    @classmethod
    def from_rayleigh_range(cls, rayleigh_range, waist_radius, waist_position=0.0):
        """Build a beam from z0 and w0; the wavenumber is derived."""
        return cls(
            waist_radius=waist_radius,
            waist_position=waist_position,
            rayleigh_range=rayleigh_range,
            wavenumber=2 * rayleigh_range / waist_radius**2,
        )


@dataclass(frozen=True)
class LensSpec:
    """An ideal thin cylindrical lens.

    focal_length is positive for a converging lens, negative for a diverging
    one, and math.inf for the distinct "no lens" state (the identity).
    """

    focal_length: float
    position: float = 0.0

    def __post_init__(self):
        if self.focal_length == 0:
            raise ValueError("focal_length must be nonzero")

    @classmethod
    def no_lens(cls, position=0.0):
        return cls(focal_length=math.inf, position=position)

    @property
    def is_no_lens(self):
        return math.isinf(self.focal_length)


def matter_rayleigh_range(atom: "AtomParams", w0: float) -> float:
    """Rayleigh range of an atomic beam: (m*v_z/hbar) * w0^2 / 2."""
    if not (atom.mass > 0 and atom.v_z > 0 and w0 > 0):
        raise ValueError("mass, v_z and w0 must be positive")
    return (atom.mass * atom.v_z / HBAR) * w0**2 / 2


def matter_beam(atom: "AtomParams", w0: float, waist_position=0.0) -> GaussianBeamParams:
    """Gaussian beam parameters of an atomic beam collimated to waist w0."""
    k = atom.mass * atom.v_z / HBAR
    return GaussianBeamParams.from_waist(w0, k, waist_position)


def beam_q(beam: GaussianBeamParams, z: float) -> complex:
    """Complex beam parameter q(z) = (z - z_waist) + i*z0."""
    return complex(z - beam.waist_position, beam.rayleigh_range)


def beam_from_q(q: complex, z: float, wavenumber: float) -> GaussianBeamParams:
    """Beam whose complex parameter equals q at axial position z."""
    z0 = q.imag
    if not (z0 > 0):
        raise ValueError("Im(q) must be positive")
    return GaussianBeamParams(
        waist_radius=math.sqrt(2 * z0 / wavenumber),
        waist_position=z - q.real,
        rayleigh_range=z0,
        wavenumber=wavenumber,
    )


def beam_width(beam: GaussianBeamParams, z: float) -> float:
    """w(z) = w0*sqrt(1 + ((z - z_waist)/z0)^2)."""
    u = (z - beam.waist_position) / beam.rayleigh_range
    return beam.waist_radius * math.sqrt(1 + u * u)


def curvature_radius(beam: GaussianBeamParams, z: float) -> CurvatureRadius:
    """R(z) = z'*(1 + (z0/z')^2) with z' = z - z_waist.

    At the waist the wavefront is flat; the tagged FLAT_WAVEFRONT value is
    returned instead of an infinite float so downstream arithmetic stays
    total.
    """
    zp = z - beam.waist_position
    if zp == 0.0:
        return FLAT_WAVEFRONT
    ratio = beam.rayleigh_range / zp
    return zp * (1 + ratio * ratio)


def gouy_phase(beam: GaussianBeamParams, z: float) -> float:
    """xi(z) = arctan((z - z_waist)/z0)/2 for a 1D (cylindrical) beam.

    Strictly increasing in z and odd about the waist; the total variation
    from z = -inf to +inf is pi/2.
    """
    return 0.5 * math.atan((z - beam.waist_position) / beam.rayleigh_range)


def gouy_accumulated(beam_after_lens: GaussianBeamParams, z_start: float, z_end: float) -> float:
    """Gouy phase accumulated between two planes, xi(z_end) - xi(z_start)."""
    if not (z_start < z_end):
        raise ValueError("z_start must be less than z_end")
    return gouy_phase(beam_after_lens, z_end) - gouy_phase(beam_after_lens, z_start)


def apply_thin_lens(beam: GaussianBeamParams, lens: LensSpec) -> GaussianBeamParams:
    """Transform a beam through an ideal thin lens.

    Uses the complex-parameter map 1/q' = 1/q - 1/z_F, valid for any waist
    location.  For a waist coinciding with the lens this reduces to

        z_r' = z_r / (1 + (z_r/z_F)^2)
        w0'  = w0 / sqrt(1 + (z_r/z_F)^2)

    with the new waist a distance z_F*(z_r/z_F)^2/(1 + (z_r/z_F)^2) past the
    lens.  The "no lens" sentinel is the identity.
    """
    if lens.is_no_lens:
        return beam
    q = beam_q(beam, lens.position)
    q_out = 1.0 / (1.0 / q - 1.0 / lens.focal_length)
    return beam_from_q(q_out, lens.position, beam.wavenumber)
