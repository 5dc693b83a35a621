"""Switched circular-array BLE tone toolkit.

Simulates per-packet fixed-point phase captures from an antenna ring,
processes them into adjacent-pair phase-difference profiles, fits the
arrival azimuth, and solves receiver self-position over a known beacon map.
"""

from .angles import circ_dist, circ_mean, circ_rms, circ_std, wrap180, wrap360
from .errors import ConfigError, DegenerateInputError, FormatError
from .estimator import (
    AVERAGE_THEN_FIT,
    FIT_THEN_AVERAGE,
    AoAEstimate,
    estimate_from_packets,
    estimate_grid,
    estimate_harmonic,
)
from .geometry import (
    ArrayGeometry,
    CarrierModel,
    adjacent_chord_mm,
    antenna_positions,
    expected_profile,
    profile_amplitude,
    spatial_phase,
    spatial_phases,
)
from .locator import (
    BeaconMap,
    PositionEstimate,
    aoa_to_bearing,
    bearing_to_aoa,
    bearings_oracle,
    field_test_map,
    locate,
)
from .pipeline import (
    average_profiles,
    fold_rotations,
    folded_matrix,
    normalize_profile,
    packet_to_profile,
    packets_to_profiles,
    phase_diffs,
    unwrap,
)
from .profiles import DiffProfile, PhaseSeries
from .simulator import (
    NoiseModel,
    PacketSamples,
    SamplingConfig,
    simulate_packet,
    simulate_packets,
    simulate_phases,
    to_degrees,
    to_fixed_point,
)

__version__ = "0.1.0"
