"""Receiver self-localization from per-beacon bearings over a known map.

World frame: x east, y north, bearings counter-clockwise from +x in degrees.
A receiver heading h means the receiver's zero-bearing axis points at world
azimuth h, so receiver-frame bearing = world bearing - h. These conventions
are pinned by the axis tests; ``aoa_to_bearing`` bridges from the board
frame's clockwise propagation azimuth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .angles import wrap180, wrap360
from .errors import ConfigError, DegenerateInputError


@dataclass(eq=False)
class BeaconMap:
    """Fixed transmitters: id -> (x, y) meters, plus the search-area bounds.

    bounds is (xmin, ymin, xmax, ymax); when omitted it defaults to the
    bounding box of the beacons.
    """

    beacons: dict[str, tuple[float, float]]
    bounds: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        self.beacons = {k: (float(x), float(y)) for k, (x, y) in self.beacons.items()}
        if len(self.beacons) < 2:
            raise ConfigError("beacon map needs at least 2 beacons")
        positions = list(self.beacons.values())
        if len(set(positions)) != len(positions):
            raise ConfigError("beacon positions must be distinct")
        if self.bounds is not None:
            x0, y0, x1, y1 = self.bounds
            if x1 < x0 or y1 < y0:
                raise ConfigError("bounds must satisfy xmin <= xmax, ymin <= ymax")

    def resolved_bounds(self) -> tuple[float, float, float, float]:
        if self.bounds is not None:
            return self.bounds
        xs = [p[0] for p in self.beacons.values()]
        ys = [p[1] for p in self.beacons.values()]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass
class PositionEstimate:
    """Solved receiver position with RMS bearing misfit in degrees."""

    x_m: float
    y_m: float
    residual_deg: float
    beacons: tuple[str, ...] = field(default_factory=tuple)

    @property
    def position(self) -> tuple[float, float]:
        return (self.x_m, self.y_m)


def field_test_map() -> BeaconMap:
    """Four-corner beacon layout on a 12 m square (3 m grid pitch)."""
    return BeaconMap(
        beacons={
            "b2": (0.0, 0.0),
            "b4": (0.0, 12.0),
            "b1": (12.0, 12.0),
            "b5": (12.0, 0.0),
        },
        bounds=(0.0, 0.0, 12.0, 12.0),
    )


def aoa_to_bearing(aoa_deg):
    """Board-frame propagation azimuth (clockwise) to receiver-frame arrival
    bearing (counter-clockwise): the wave arrives from the opposite direction."""
    return wrap360(180.0 - np.asarray(aoa_deg, dtype=float)) if np.ndim(aoa_deg) else wrap360(180.0 - float(aoa_deg))


def bearing_to_aoa(bearing_deg):
    """Inverse of aoa_to_bearing (the map is an involution)."""
    return aoa_to_bearing(bearing_deg)


def bearings_oracle(
    bmap: BeaconMap, position: tuple[float, float], heading_deg: float = 0.0
) -> dict[str, float]:
    """Exact receiver-frame bearing to every beacon, degrees in [0, 360)."""
    x, y = float(position[0]), float(position[1])
    out = {}
    for bid, (bx, by) in bmap.beacons.items():
        if bx == x and by == y:
            raise ValueError(f"receiver coincides with beacon {bid}: bearing undefined")
        world = np.rad2deg(np.arctan2(by - y, bx - x))
        out[bid] = wrap360(world - heading_deg)
    return out


def _measured_angle(value) -> float:
    angle = getattr(value, "angle_deg", value)
    return float(angle)


def locate(
    bmap: BeaconMap,
    bearings,
    heading_deg: float = 0.0,
    grid_step_m: float = 0.1,
) -> PositionEstimate:
    """Solve for the receiver position from >= 2 beacon bearings.

    Minimizes the sum of squared circular differences between the measured
    bearings (rotated into the world frame by heading) and the geometric
    bearings from a candidate position to each beacon: a coarse grid over the
    map bounds followed by least-squares refinement. Values in ``bearings``
    may be floats or AoAEstimate objects.
    """
    ids = sorted(bearings)
    if len(ids) < 2:
        raise ValueError("need bearings to at least 2 beacons")
    unknown = [i for i in ids if i not in bmap.beacons]
    if unknown:
        raise ConfigError(f"bearings reference unknown beacon ids: {unknown}")
    bpos = np.array([bmap.beacons[i] for i in ids])
    world = wrap360(
        np.array([_measured_angle(bearings[i]) for i in ids]) + heading_deg
    )

    def residuals(xy: np.ndarray) -> np.ndarray:
        geo = np.rad2deg(np.arctan2(bpos[:, 1] - xy[1], bpos[:, 0] - xy[0]))
        return wrap180(world - geo)

    x0, y0, x1, y1 = bmap.resolved_bounds()
    xs = np.arange(x0, x1 + grid_step_m / 2, grid_step_m)
    ys = np.arange(y0, y1 + grid_step_m / 2, grid_step_m)
    gx, gy = np.meshgrid(xs, ys)
    obj = np.zeros_like(gx)
    for (bx, by), w in zip(bpos, world):
        geo = np.rad2deg(np.arctan2(by - gy, bx - gx))
        d = wrap180(w - geo)
        obj += d * d
        obj[(gx == bx) & (gy == by)] = np.inf
    obj /= len(ids)

    flat = np.flatnonzero(obj <= obj.min() + 1e-12)
    cells = np.column_stack([gx.ravel()[flat], gy.ravel()[flat]])
    spread = cells.max(axis=0) - cells.min(axis=0)
    if np.hypot(*spread) > 10.0 * grid_step_m:
        raise DegenerateInputError(
            "bearing objective is flat over the search area: beacon geometry "
            "does not constrain the position"
        )

    start = cells[0]
    fit = least_squares(residuals, start, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    best = fit.x if _rms(residuals(fit.x)) <= _rms(residuals(start)) else start
    return PositionEstimate(
        float(best[0]), float(best[1]), _rms(residuals(best)), tuple(ids)
    )


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v)))
