"""Run configuration: defaults, the INI-style config file, flag overrides.

The config file uses plain key = value sections (geometry, carrier,
sampling, noise, beacons, receiver). Every key is optional and falls back to
the defaults below; flags override file values. The fully resolved
configuration is echoed into every output file, together with a short hash
of its canonical text, so outputs are traceable to the exact settings that
produced them.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .geometry import ArrayGeometry, CarrierModel, adjacent_chord_mm
from .locator import BeaconMap, field_test_map
from .simulator import NoiseModel, SamplingConfig

_SECTION_KEYS = {
    "geometry": {"antenna_count": int, "radius_mm": float, "orientation_offset_deg": float},
    "carrier": {"frequency_hz": float, "propagation_speed_m_s": float},
    "sampling": {
        "cte_length_us": float,
        "guard_us": float,
        "reference_us": float,
        "slot_us": float,
        "sample_period_ns": float,
        "tone_rate_deg_per_us": float,
        "fixed_point_halfscale": int,
        "retained_indices": "indices",
        "rotations": int,
        "switched_slots": int,
    },
    "noise": {
        "sigma_deg": float,
        "transient_corruption": "flag",
        "corruption_deg": float,
        "seed": int,
    },
    "receiver": {"heading_deg": float},
}


@dataclass
class RunConfig:
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)
    carrier: CarrierModel = field(default_factory=CarrierModel)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    noise: NoiseModel = field(default_factory=NoiseModel)
    beacons: BeaconMap = field(default_factory=field_test_map)
    heading_deg: float = 0.0

    def validate(self) -> None:
        self.sampling.validate_geometry(self.geometry)
        chord = adjacent_chord_mm(self.geometry)
        if 2.0 * chord >= self.carrier.wavelength_mm:
            raise ConfigError(
                f"adjacent-antenna chord {chord:.2f} mm is not below half the "
                f"wavelength {self.carrier.wavelength_mm:.2f} mm: adjacent-pair "
                "phase differences would alias"
            )


def _parse_value(caster, raw: str, where: str):
    try:
        if caster == "flag":
            lowered = raw.strip().lower()
            if lowered in ("on", "true", "1", "yes"):
                return True
            if lowered in ("off", "false", "0", "no"):
                return False
            raise ValueError(f"expected on/off, got {raw!r}")
        if caster == "indices":
            return tuple(int(t) for t in raw.split(","))
        return caster(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str | None = None) -> RunConfig:
    """Build a RunConfig from defaults overlaid with an optional INI file."""
    cfg = RunConfig()
    if path is None:
        cfg.validate()
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")

    overrides: dict[str, dict] = {}
    beacons: dict[str, tuple[float, float]] = {}
    bounds = None
    for section in parser.sections():
        if section == "beacons":
            for key, raw in parser.items(section):
                parts = [p.strip() for p in raw.split(",")]
                try:
                    values = tuple(float(p) for p in parts)
                except ValueError as exc:
                    raise ConfigError(f"[beacons] {key}: {exc}") from exc
                if key == "bounds":
                    if len(values) != 4:
                        raise ConfigError("[beacons] bounds needs 4 values")
                    bounds = values
                else:
                    if len(values) != 2:
                        raise ConfigError(f"[beacons] {key} needs x, y")
                    beacons[key] = values
            continue
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        known = _SECTION_KEYS[section]
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigError(f"unknown config key [{section}] {key}")
            overrides.setdefault(section, {})[key] = _parse_value(
                known[key], raw, f"[{section}] {key}"
            )

    try:
        if "geometry" in overrides:
            cfg.geometry = replace(cfg.geometry, **overrides["geometry"])
        if "carrier" in overrides:
            cfg.carrier = replace(cfg.carrier, **overrides["carrier"])
        if "sampling" in overrides:
            cfg.sampling = replace(cfg.sampling, **overrides["sampling"])
        if "noise" in overrides:
            cfg.noise = replace(cfg.noise, **overrides["noise"])
    except ConfigError:
        raise
    if "receiver" in overrides:
        cfg.heading_deg = overrides["receiver"].get("heading_deg", cfg.heading_deg)
    if beacons:
        cfg.beacons = BeaconMap(beacons, bounds)
    elif bounds is not None:
        cfg.beacons = BeaconMap(cfg.beacons.beacons, bounds)
    cfg.validate()
    return cfg


def canonical_lines(cfg: RunConfig) -> list[str]:
    """Deterministic key = value rendering of the resolved configuration."""
    g, c, s, n = cfg.geometry, cfg.carrier, cfg.sampling, cfg.noise
    lines = [
        f"geometry.antenna_count = {g.antenna_count}",
        f"geometry.radius_mm = {g.radius_mm!r}",
        f"geometry.orientation_offset_deg = {g.orientation_offset_deg!r}",
        f"carrier.frequency_hz = {c.frequency_hz!r}",
        f"carrier.propagation_speed_m_s = {c.propagation_speed_m_s!r}",
        f"sampling.cte_length_us = {s.cte_length_us!r}",
        f"sampling.guard_us = {s.guard_us!r}",
        f"sampling.reference_us = {s.reference_us!r}",
        f"sampling.slot_us = {s.slot_us!r}",
        f"sampling.sample_period_ns = {s.sample_period_ns!r}",
        f"sampling.tone_rate_deg_per_us = {s.tone_rate_deg_per_us!r}",
        f"sampling.fixed_point_halfscale = {s.fixed_point_halfscale}",
        "sampling.retained_indices = " + ",".join(str(i) for i in s.retained_indices),
        f"sampling.rotations = {s.rotations}",
        f"sampling.switched_slots = {s.switched_slots}",
        f"noise.sigma_deg = {n.sigma_deg!r}",
        f"noise.transient_corruption = {'on' if n.transient_corruption else 'off'}",
        f"noise.corruption_deg = {n.corruption_deg!r}",
        f"noise.seed = {n.seed}",
        f"receiver.heading_deg = {cfg.heading_deg!r}",
    ]
    for bid in sorted(cfg.beacons.beacons):
        x, y = cfg.beacons.beacons[bid]
        lines.append(f"beacons.{bid} = {x!r},{y!r}")
    x0, y0, x1, y1 = cfg.beacons.resolved_bounds()
    lines.append(f"beacons.bounds = {x0!r},{y0!r},{x1!r},{y1!r}")
    return lines


def config_hash(cfg: RunConfig) -> str:
    text = "\n".join(canonical_lines(cfg)).encode()
    return hashlib.sha256(text).hexdigest()[:16]
