"""Angle-of-arrival recovery from a folded difference profile.

Two fitters share one angle convention (clockwise propagation azimuth,
[0, 360)):

* estimate_grid exhaustively scores candidate angles against the geometric
  forward model and refines the best cell -- the unconditionally safe oracle.
* estimate_harmonic reads the profile's phase from its first circular
  harmonic in closed form -- the O(N) fast path. A constant offset on every
  entry lives in harmonic zero and cannot move the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from .angles import circ_dist, circ_mean, circ_rms, circ_std, wrap180, wrap360
from .errors import DegenerateInputError
from .geometry import (
    ArrayGeometry,
    CarrierModel,
    expected_profile,
    pair_axis_angles,
    profile_amplitude,
)
from .pipeline import packets_to_profiles
from .profiles import FOLDED, DiffProfile, average_profiles

AVERAGE_THEN_FIT = "average-then-fit"
FIT_THEN_AVERAGE = "fit-then-average"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class AoAEstimate:
    """A fitted arrival azimuth with its RMS circular misfit in degrees."""

    angle_deg: float
    residual_deg: float
    method: str
    n_packets: int = 1
    dispersion_deg: float = 0.0
    packet_angles: tuple[float, ...] = field(default_factory=tuple, repr=False)
    sources: tuple[str, ...] = field(default_factory=tuple, repr=False)


def _require_signal(geom: ArrayGeometry, carrier: CarrierModel) -> None:
    if profile_amplitude(geom, carrier) < 1e-6:
        raise DegenerateInputError(
            "array geometry produces no angular information (profile amplitude ~ 0)"
        )


def _check_profile(profile: DiffProfile, geom: ArrayGeometry) -> np.ndarray:
    if profile.kind != FOLDED:
        raise ValueError("estimation expects a folded profile")
    if len(profile) != geom.antenna_count:
        raise ValueError(
            f"profile length {len(profile)} != antenna count {geom.antenna_count}"
        )
    return np.asarray(profile.values, dtype=float)


def profile_residual(
    values: np.ndarray, geom: ArrayGeometry, carrier: CarrierModel, theta_deg: float
) -> float:
    """RMS circular distance between a profile and the model at theta."""
    model = expected_profile(geom, carrier, theta_deg).values
    return circ_rms(values - model)


@lru_cache(maxsize=8)
def _model_table(geom: ArrayGeometry, carrier: CarrierModel, step_deg: float):
    thetas = np.arange(math.ceil(360.0 / step_deg)) * step_deg
    table = np.stack([expected_profile(geom, carrier, t).values for t in thetas])
    return thetas, table


def estimate_grid(
    profile: DiffProfile,
    geom: ArrayGeometry,
    carrier: CarrierModel,
    step_deg: float = 0.1,
) -> AoAEstimate:
    """Exhaustive-search fit: argmin over a theta grid, then golden-section
    refinement within one grid step. Ties break toward the smallest theta."""
    if not step_deg > 0:
        raise ValueError("step_deg must be positive")
    _require_signal(geom, carrier)
    values = _check_profile(profile, geom)

    thetas, table = _model_table(geom, carrier, float(step_deg))
    d = wrap180(values[None, :] - table)
    rms = np.sqrt((d * d).mean(axis=1))
    i = int(np.argmin(rms))
    best_theta, best_rms = float(thetas[i]), float(rms[i])

    def f(t: float) -> float:
        return profile_residual(values, geom, carrier, t)

    theta, res = _golden_section(f, best_theta - step_deg, best_theta + step_deg)
    if res >= best_rms:
        theta, res = best_theta, best_rms
    return AoAEstimate(wrap360(theta), res, "grid", sources=profile.sources)


def _golden_section(f, lo: float, hi: float, tol: float = 1e-6):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def estimate_harmonic(
    profile: DiffProfile,
    geom: ArrayGeometry,
    carrier: CarrierModel,
    min_amplitude_deg: float = 1.0,
) -> AoAEstimate:
    """Closed-form fit from the first circular harmonic of the profile.

    For an N-antenna ring the model profile is amp * sin(psi_n - theta) with
    psi_n the pair-axis azimuths, so sum(value_n * exp(i psi_n)) has argument
    theta + 90 degrees and magnitude N * amp / 2.
    """
    _require_signal(geom, carrier)
    values = _check_profile(profile, geom)
    psi = np.deg2rad(pair_axis_angles(geom))
    z = np.sum(values * np.exp(1j * psi))
    amplitude = 2.0 * np.abs(z) / geom.antenna_count
    if amplitude < min_amplitude_deg:
        raise DegenerateInputError(
            f"profile first harmonic {amplitude:.3g} deg is below "
            f"{min_amplitude_deg:g} deg: no directional signal"
        )
    theta = wrap360(np.rad2deg(np.angle(z)) - 90.0)
    res = profile_residual(values, geom, carrier, theta)
    return AoAEstimate(theta, res, "harmonic", sources=profile.sources)


def harmonic_angles(
    matrix: np.ndarray, geom: ArrayGeometry, carrier: CarrierModel
) -> np.ndarray:
    """Vectorized estimate_harmonic over a (n_profiles, N) folded array.

    No amplitude guard; intended for Monte-Carlo sweeps on simulated data.
    """
    psi = np.deg2rad(pair_axis_angles(geom))
    z = (matrix * np.exp(1j * psi)[None, :]).sum(axis=1)
    return wrap360(np.rad2deg(np.angle(z)) - 90.0)


def _fit(profile, geom, carrier, method, step_deg):
    if method == "grid":
        return estimate_grid(profile, geom, carrier, step_deg)
    if method == "harmonic":
        return estimate_harmonic(profile, geom, carrier)
    raise ValueError(f"unknown estimation method {method!r}")


def estimate_from_packets(
    packets,
    geom: ArrayGeometry,
    carrier: CarrierModel,
    cfg,
    method: str = "grid",
    strategy: str = AVERAGE_THEN_FIT,
    step_deg: float = 0.1,
    mean_method: str = "circular",
) -> AoAEstimate:
    """Estimate one angle from many packets.

    average-then-fit averages the folded profiles and fits once;
    fit-then-average fits every packet and circularly averages the angles.
    Either way the per-packet fits are kept: dispersion_deg is their circular
    standard deviation and packet_angles exposes them for dispersion studies.
    For fit-then-average the residual is the RMS circular deviation of the
    per-packet angles about the returned angle.
    """
    packets = list(packets)
    if not packets:
        raise ValueError("need at least one packet")
    profiles = packets_to_profiles(packets, cfg, geom.antenna_count)
    fits = [_fit(p, geom, carrier, method, step_deg) for p in profiles]
    angles = [e.angle_deg for e in fits]
    dispersion = circ_std(angles) if len(angles) > 1 else 0.0
    sources = tuple(p.packet_id for p in packets)

    if strategy == AVERAGE_THEN_FIT:
        averaged = average_profiles(profiles, mean_method)
        final = _fit(averaged, geom, carrier, method, step_deg)
        angle, residual = final.angle_deg, final.residual_deg
    elif strategy == FIT_THEN_AVERAGE:
        angle = wrap360(circ_mean(angles))
        residual = circ_rms(circ_dist(angles, angle))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return AoAEstimate(
        angle,
        residual,
        method,
        n_packets=len(packets),
        dispersion_deg=dispersion,
        packet_angles=tuple(angles),
        sources=sources,
    )
