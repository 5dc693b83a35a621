"""Circular-array geometry and the plane-wave phase model.

Conventions, pinned here and relied on everywhere else:

* Antennas are numbered 1..N clockwise. Antenna k sits at angular position
  ``orientation_offset_deg + (k - 1) * 360 / N`` degrees, measured clockwise
  from the board's +x axis, so antenna 1 of a default board is at (r, 0) and
  antenna 3 at (0, -r).
* An arriving signal is a 2-D plane wave described by the clockwise azimuth
  of its propagation direction ("aoa"); boards are coplanar, elevation is out
  of scope.
* ``spatial_phase`` is 360/lambda times the projection of the antenna
  position onto the propagation direction: the phase lead of that antenna
  relative to the board center, in degrees, unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import wrap180
from .errors import ConfigError
from .profiles import FOLDED, DiffProfile

SPEED_OF_LIGHT_M_S = 299792458.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Circle of equally spaced antennas, clockwise numbering."""

    antenna_count: int = 8
    radius_mm: float = 65.0
    orientation_offset_deg: float = 0.0

    def __post_init__(self):
        if self.antenna_count < 3:
            raise ConfigError("antenna_count must be at least 3")
        if not self.radius_mm > 0:
            raise ConfigError("radius_mm must be positive")


@dataclass(frozen=True)
class CarrierModel:
    """Tone carrier; wavelength sets the scale of every spatial phase."""

    frequency_hz: float = 2.402e9
    propagation_speed_m_s: float = SPEED_OF_LIGHT_M_S

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise ConfigError("frequency_hz must be positive")
        if not self.propagation_speed_m_s > 0:
            raise ConfigError("propagation_speed_m_s must be positive")

    @property
    def wavelength_mm(self) -> float:
        return self.propagation_speed_m_s / self.frequency_hz * 1000.0


def antenna_angles(geom: ArrayGeometry) -> np.ndarray:
    """Clockwise angular position of each antenna, degrees, antenna 1 first."""
    step = 360.0 / geom.antenna_count
    return geom.orientation_offset_deg + step * np.arange(geom.antenna_count)


def antenna_positions(geom: ArrayGeometry) -> np.ndarray:
    """(N, 2) antenna feed-point coordinates in millimeters, centroid at 0."""
    a = np.deg2rad(antenna_angles(geom))
    return geom.radius_mm * np.column_stack([np.cos(a), -np.sin(a)])


def adjacent_chord_mm(geom: ArrayGeometry) -> float:
    """Distance between neighbouring antennas."""
    return 2.0 * geom.radius_mm * np.sin(np.pi / geom.antenna_count)


def pair_axis_angles(geom: ArrayGeometry) -> np.ndarray:
    """Clockwise azimuth of each adjacent pair's midpoint, pair (A1, A2) first."""
    step = 360.0 / geom.antenna_count
    return geom.orientation_offset_deg + step * (np.arange(geom.antenna_count) + 0.5)


def propagation_unit(aoa_deg: float) -> np.ndarray:
    """Unit propagation direction for a clockwise azimuth."""
    a = np.deg2rad(aoa_deg)
    return np.array([np.cos(a), -np.sin(a)])


def spatial_phases(geom: ArrayGeometry, carrier: CarrierModel, aoa_deg: float) -> np.ndarray:
    """Per-antenna phase lead relative to the board center, degrees, unwrapped."""
    proj = antenna_positions(geom) @ propagation_unit(aoa_deg)
    return 360.0 / carrier.wavelength_mm * proj


def spatial_phase(
    geom: ArrayGeometry, carrier: CarrierModel, aoa_deg: float, antenna_index: int
) -> float:
    """spatial_phases for a single 1-based antenna index."""
    if not 1 <= antenna_index <= geom.antenna_count:
        raise ValueError(
            f"antenna_index must be in 1..{geom.antenna_count}, got {antenna_index}"
        )
    return float(spatial_phases(geom, carrier, aoa_deg)[antenna_index - 1])


def profile_amplitude(geom: ArrayGeometry, carrier: CarrierModel) -> float:
    """Peak of the model difference profile: 360 * chord / wavelength, degrees."""
    return 360.0 * adjacent_chord_mm(geom) / carrier.wavelength_mm


def expected_profile(
    geom: ArrayGeometry, carrier: CarrierModel, aoa_deg: float
) -> DiffProfile:
    """Model folded profile: entry n = wrap180(phase(A_n+1) - phase(A_n+2)).

    Pairs run (A1,A2), (A2,A3), ..., (AN,A1); the unwrapped entries trace one
    period of a sampled sinusoid whose phase encodes the arrival azimuth.
    """
    phases = spatial_phases(geom, carrier, aoa_deg)
    diffs = phases - np.roll(phases, -1)
    return DiffProfile(wrap180(diffs), FOLDED)
