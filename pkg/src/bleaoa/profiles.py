"""Phase-series and difference-profile containers plus profile-level math."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .angles import resultant, wrap180
from .errors import DegenerateInputError

RAW = "raw"
FOLDED = "folded"


@dataclass(eq=False)
class PhaseSeries:
    """Decoded, unwrapped per-slot phase samples in degrees.

    samples has shape (n_slots, n_retained); antennas carries the 1-based
    antenna index sampled in each slot.
    """

    samples: np.ndarray
    antennas: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        self.antennas = np.asarray(self.antennas, dtype=int)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2-D (slots, retained) array")
        if self.antennas.shape != (self.samples.shape[0],):
            raise ValueError("one antenna index required per slot")

    @property
    def n_slots(self) -> int:
        return self.samples.shape[0]


@dataclass(eq=False)
class DiffProfile:
    """Ordered adjacent-antenna phase differences in degrees.

    kind is "raw" (one entry per consecutive slot pair, cycling through the
    antenna ring) or "folded" (one entry per antenna pair, sweeps averaged).
    Entry 0 of a folded profile is the (A1, A2) pair. sources lists the
    packet ids that contributed.
    """

    values: np.ndarray
    kind: str
    sources: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("profile values must be 1-D")
        if self.kind not in (RAW, FOLDED):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.values.size and (
            self.values.min() < -180.0 or self.values.max() >= 180.0
        ):
            raise ValueError("profile values must lie in [-180, 180)")
        self.sources = tuple(self.sources)

    def __len__(self) -> int:
        return self.values.size


def average_profiles(profiles, method="circular") -> DiffProfile:
    """Per-index average across equal-length profiles of the same kind.

    method "circular" (default) averages unit vectors, which is correct near
    the +/-180 seam; "arithmetic" takes the plain mean of the stored values,
    matching naive plotting pipelines.
    """
    profiles = list(profiles)
    if not profiles:
        raise ValueError("need at least one profile to average")
    kind = profiles[0].kind
    n = len(profiles[0])
    for p in profiles[1:]:
        if p.kind != kind:
            raise ValueError("cannot average profiles of different kinds")
        if len(p) != n:
            raise ValueError("cannot average profiles of different lengths")
    stacked = np.stack([p.values for p in profiles])
    if method == "circular":
        values = circ_mean_by_index(stacked)
    elif method == "arithmetic":
        values = stacked.mean(axis=0)
    else:
        raise ValueError(f"unknown averaging method {method!r}")
    sources = tuple(s for p in profiles for s in p.sources)
    return DiffProfile(values, kind, sources)


def circ_mean_by_index(stacked: np.ndarray, min_magnitude=1e-9) -> np.ndarray:
    """Column-wise circular mean of a (contributors, index) array.

    Raises DegenerateInputError naming the first index whose unit vectors
    cancel.
    """
    z = resultant(stacked, axis=0)
    mag = np.abs(np.atleast_1d(z))
    bad = np.flatnonzero(mag < min_magnitude)
    if bad.size:
        raise DegenerateInputError(
            f"circular mean undefined at index {bad[0]}: contributing vectors cancel"
        )
    return wrap180(np.rad2deg(np.angle(np.atleast_1d(z))))


def normalize_profile(profile: DiffProfile) -> DiffProfile:
    """Scale values by 1 / max|value|; shape and kind are preserved."""
    peak = np.max(np.abs(profile.values)) if len(profile) else 0.0
    if peak == 0.0:
        raise ValueError("cannot normalize an all-zero profile")
    return DiffProfile(profile.values / peak, profile.kind, profile.sources)
