"""Degree-domain angle arithmetic and circular statistics."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError


def wrap180(x):
    """Fold angle(s) into [-180, 180) via mod(x + 180, 360) - 180."""
    r = np.mod(np.asarray(x, dtype=float) + 180.0, 360.0) - 180.0
    # float rounding can land mod() exactly on the modulus
    r = np.where(r >= 180.0, -180.0, r)
    return float(r) if np.ndim(x) == 0 else r


def wrap360(x):
    """Fold angle(s) into [0, 360)."""
    r = np.mod(np.asarray(x, dtype=float), 360.0)
    r = np.where(r >= 360.0, 0.0, r)
    return float(r) if np.ndim(x) == 0 else r


def circ_dist(a, b):
    """Signed circular difference a - b in [-180, 180)."""
    return wrap180(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def resultant(values_deg, axis=None):
    """Vector sum of unit vectors at the given angles (complex)."""
    z = np.exp(1j * np.deg2rad(np.asarray(values_deg, dtype=float)))
    return z.sum(axis=axis)


def circ_mean(values_deg, axis=None, min_magnitude=1e-9):
    """Circular mean in [-180, 180).

    Raises DegenerateInputError when the summed unit vectors (unnormalized)
    nearly cancel, i.e. the mean direction is undefined.
    """
    z = resultant(values_deg, axis=axis)
    mag = np.abs(z)
    if np.any(mag < min_magnitude):
        raise DegenerateInputError(
            "circular mean undefined: unit vectors cancel "
            f"(resultant magnitude < {min_magnitude:g})"
        )
    m = wrap180(np.rad2deg(np.angle(z)))
    return m


def circ_std(values_deg):
    """Circular standard deviation sqrt(-2 ln R) in degrees."""
    values = np.asarray(values_deg, dtype=float)
    rbar = np.abs(resultant(values)) / values.size
    if rbar <= 0.0:
        return float("inf")
    rbar = min(rbar, 1.0)
    return float(np.rad2deg(np.sqrt(-2.0 * np.log(rbar))))


def circ_rms(values_deg):
    """RMS of circular deviations from zero, in degrees."""
    d = wrap180(np.asarray(values_deg, dtype=float))
    return float(np.sqrt(np.mean(d * d)))
