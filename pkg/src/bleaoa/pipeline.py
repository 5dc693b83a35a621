"""Packet processing: decode, unwrap, pairwise differences, rotation folding.

The chain turns one packet's fixed-point samples into a difference profile:

1. decode retained samples of each switched slot to degrees,
2. unwrap each slot independently (undo the +/-180 fold within a dwell),
3. subtract corresponding samples of consecutive slots, average within the
   slot pair, and fold the result into [-180, 180) -- one raw entry per
   consecutive slot pair, cycling (A1,A2) ... (AN,A1),
4. fold the repeated sweeps down to one entry per antenna pair by circular
   averaging.

All internal math is double-precision degrees; fixed point exists only at
the packet boundary.
"""

from __future__ import annotations

import logging

import numpy as np

from .angles import wrap180
from .errors import DegenerateInputError
from .profiles import (
    FOLDED,
    RAW,
    DiffProfile,
    PhaseSeries,
    average_profiles,
    normalize_profile,
)
from .simulator import PacketSamples, SamplingConfig, to_degrees

__all__ = [
    "unwrap",
    "phase_diffs",
    "fold_rotations",
    "average_profiles",
    "normalize_profile",
    "packet_to_profile",
    "packets_to_profiles",
    "folded_matrix",
]

log = logging.getLogger(__name__)


def _unwrap_array(slots: np.ndarray) -> np.ndarray:
    """Per-slot unwrap on the trailing axis.

    Whenever a sample drops more than 180 below its predecessor, 360 is added
    to it and every later sample in the slot. Works on any (..., n) stack.
    """
    d = np.diff(slots, axis=-1)
    out = slots.copy()
    out[..., 1:] += 360.0 * np.cumsum(d < -180.0, axis=-1)
    return out


def unwrap(slots, antennas=None) -> PhaseSeries:
    """Unwrap decoded per-slot samples (degrees); slots are independent.

    slots: sequence of equal-length per-slot sample runs, time order within
    each slot. Rejects ragged input and slots shorter than 2 samples.
    """
    rows = [np.asarray(s, dtype=float) for s in slots]
    if not rows:
        raise ValueError("no slots to unwrap")
    lengths = {r.shape[-1] for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"slots have mismatched sample counts: {sorted(lengths)}")
    if lengths.pop() < 2:
        raise ValueError("each slot needs at least 2 retained samples to unwrap")
    arr = np.stack(rows)
    if antennas is None:
        antennas = np.zeros(arr.shape[0], dtype=int)
    return PhaseSeries(_unwrap_array(arr), antennas)


def phase_diffs(series: PhaseSeries) -> DiffProfile:
    """Raw profile: entry i is the folded mean of slot[i] minus slot[i+1] samples.

    Matches the subtraction order previous-minus-current, so entry 0 of a
    sweep that starts on antenna 1 is the (A1, A2) pair.
    """
    if series.n_slots < 2:
        raise ValueError("need at least 2 slots to form differences")
    d = series.samples[:-1] - series.samples[1:]
    return DiffProfile(wrap180(d.mean(axis=1)), RAW)


def _fold_array(raw: np.ndarray, antenna_count: int):
    """Unit-vector sums per pair index over rotations; raw is (..., n_raw)."""
    n = raw.shape[-1]
    if n < antenna_count:
        raise ValueError(
            f"raw profile has {n} entries, fewer than one full rotation "
            f"of {antenna_count}"
        )
    if n % antenna_count:
        log.warning(
            "raw profile length %d is not a multiple of %d; trailing pair "
            "indices are averaged over fewer rotations",
            n,
            antenna_count,
        )
    z = np.exp(1j * np.deg2rad(raw))
    acc = np.zeros(raw.shape[:-1] + (antenna_count,), dtype=complex)
    counts = np.zeros(antenna_count)
    for p in range(antenna_count):
        acc[..., p] = z[..., p::antenna_count].sum(axis=-1)
        counts[p] = raw[..., p::antenna_count].shape[-1]
    return acc, counts


def fold_rotations(raw: DiffProfile, antenna_count: int) -> DiffProfile:
    """Fold a raw profile to one circular-mean entry per antenna pair."""
    if raw.kind != RAW:
        raise ValueError("fold_rotations expects a raw profile")
    acc, _ = _fold_array(raw.values, antenna_count)
    bad = np.flatnonzero(np.abs(acc) < 1e-9)
    if bad.size:
        raise DegenerateInputError(
            f"fold undefined at pair index {bad[0]}: rotation vectors cancel"
        )
    return DiffProfile(wrap180(np.rad2deg(np.angle(acc))), FOLDED, raw.sources)


def slots_to_feed(cfg: SamplingConfig, antenna_count: int, available: int) -> int:
    """Switched slots the pipeline consumes: one sweep-set plus, when present,
    the slot after it, which closes the last (AN, A1) pair."""
    want = cfg.rotations * antenna_count
    return min(available, want + 1)


def packet_to_profile(
    packet: PacketSamples,
    cfg: SamplingConfig,
    antenna_count: int,
    fold: bool = True,
) -> DiffProfile:
    """Run the full per-packet chain; returns a folded (default) or raw profile."""
    _check_antenna_sequence(packet.antennas, antenna_count)
    n = slots_to_feed(cfg, antenna_count, packet.slots.shape[0])
    if n < 2:
        raise ValueError("packet has fewer than 2 usable slots")
    retained = list(cfg.retained_indices)
    if len(retained) < 2:
        raise ValueError("need at least 2 retained samples per slot")
    decoded = to_degrees(packet.slots[:n, retained], cfg.fixed_point_halfscale)
    series = PhaseSeries(_unwrap_array(decoded), packet.antennas[:n])
    raw = phase_diffs(series)
    raw = DiffProfile(raw.values, RAW, (packet.packet_id,))
    return fold_rotations(raw, antenna_count) if fold else raw


def packets_to_profiles(
    packets, cfg: SamplingConfig, antenna_count: int, fold: bool = True
) -> list[DiffProfile]:
    return [packet_to_profile(p, cfg, antenna_count, fold) for p in packets]


def folded_matrix(packets, cfg: SamplingConfig, antenna_count: int) -> np.ndarray:
    """(n_packets, antenna_count) folded profiles, one vectorized pass.

    Fast path for sweeps and Monte-Carlo runs; agrees with packet_to_profile
    entry for entry.
    """
    packets = list(packets)
    if not packets:
        return np.zeros((0, antenna_count))
    for p in packets:
        _check_antenna_sequence(p.antennas, antenna_count)
    n = slots_to_feed(cfg, antenna_count, packets[0].slots.shape[0])
    retained = list(cfg.retained_indices)
    stacked = np.stack([p.slots[:n, retained] for p in packets])
    decoded = to_degrees(stacked, cfg.fixed_point_halfscale)
    unwrapped = _unwrap_array(decoded)
    d = wrap180((unwrapped[:, :-1] - unwrapped[:, 1:]).mean(axis=2))
    acc, _ = _fold_array(d, antenna_count)
    return wrap180(np.rad2deg(np.angle(acc)))


def _check_antenna_sequence(antennas: np.ndarray, antenna_count: int) -> None:
    expect = np.arange(len(antennas)) % antenna_count + 1
    if not np.array_equal(antennas, expect):
        raise ValueError(
            "slot antenna sequence does not follow the circular pattern "
            f"1..{antenna_count} repeating"
        )
