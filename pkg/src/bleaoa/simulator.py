"""Synthetic packet generation: switched-antenna tone sampling in fixed point.

A packet is one constant-tone capture: a guard interval (nothing sampled), a
reference interval on antenna 1, then a repeating sweep over the ring, one
antenna per switching slot. Every phase value the virtual radio reports is
``initial + tone_rate * t + spatial_phase(antenna) + noise``, wrapped to
[-180, 180) and quantized to the radio's fixed-point scale.

All randomness flows through an explicit (seed, packet counter) pair; there
is no hidden global RNG.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .angles import wrap180
from .errors import ConfigError
from .geometry import ArrayGeometry, CarrierModel, spatial_phases


@dataclass(frozen=True)
class SamplingConfig:
    """Timing and encoding of one capture.

    Defaults give the production shape: a 160 us tone with 4 us guard, 8 us
    reference and 4 us switching slots sampled every 500 ns, i.e. 8 samples
    per slot, 16 reference samples, and 36 switched slots for a 304-sample
    packet. The tone advances 90 deg/us, so one full slot is exactly one tone
    period and corresponding sample positions in different slots see the same
    tone phase; the processing pipeline leans on that slot equivalence.
    """

    cte_length_us: float = 160.0
    guard_us: float = 4.0
    reference_us: float = 8.0
    slot_us: float = 4.0
    sample_period_ns: float = 500.0
    tone_rate_deg_per_us: float = 90.0
    fixed_point_halfscale: int = 201
    retained_indices: tuple[int, ...] = (1, 2, 3)
    rotations: int = 4
    switched_slots: int = 36

    def __post_init__(self):
        if not self.cte_length_us > 0:
            raise ConfigError("cte_length_us must be positive")
        if self.guard_us < 0 or self.reference_us < 0:
            raise ConfigError("guard_us and reference_us must be non-negative")
        if not self.slot_us > 0 or not self.sample_period_ns > 0:
            raise ConfigError("slot_us and sample_period_ns must be positive")
        if not 1 <= self.fixed_point_halfscale <= 32767:
            raise ConfigError(
                "fixed_point_halfscale must fit a 16-bit sample word (1..32767)"
            )
        if self.rotations < 1:
            raise ConfigError("rotations must be at least 1")
        if self.switched_slots < 1:
            raise ConfigError("switched_slots must be at least 1")
        for name, duration in (
            ("slot_us", self.slot_us),
            ("reference_us", self.reference_us),
        ):
            n = duration * 1000.0 / self.sample_period_ns
            if abs(n - round(n)) > 1e-9:
                raise ConfigError(
                    f"{name} must be an integer multiple of sample_period_ns"
                )
        phase_per_slot = self.tone_rate_deg_per_us * self.slot_us
        residue = phase_per_slot % 360.0
        if min(residue, 360.0 - residue) > 1e-9:
            raise ConfigError(
                "tone_rate_deg_per_us * slot_us must be a multiple of 360 "
                "(slot equivalence)"
            )
        object.__setattr__(
            self, "retained_indices", tuple(sorted(set(self.retained_indices)))
        )
        if not self.retained_indices:
            raise ConfigError("retained_indices must not be empty")
        if any(not 0 <= i < self.samples_per_slot for i in self.retained_indices):
            raise ConfigError(
                f"retained_indices must lie in [0, {self.samples_per_slot})"
            )
        if self.switching_window_us() < self.switched_slots * self.slot_us:
            raise ConfigError(
                "switched_slots do not fit within cte_length - guard - reference"
            )

    @property
    def sample_period_us(self) -> float:
        return self.sample_period_ns / 1000.0

    @property
    def samples_per_slot(self) -> int:
        return round(self.slot_us * 1000.0 / self.sample_period_ns)

    @property
    def reference_samples(self) -> int:
        return round(self.reference_us * 1000.0 / self.sample_period_ns)

    @property
    def samples_per_packet(self) -> int:
        return self.reference_samples + self.switched_slots * self.samples_per_slot

    def switching_window_us(self) -> float:
        return self.cte_length_us - self.guard_us - self.reference_us

    def validate_geometry(self, geom: ArrayGeometry) -> None:
        """Cross-check: the configured sweeps must fit the switching window."""
        needed = self.rotations * geom.antenna_count
        available = int(self.switching_window_us() / self.slot_us + 1e-9)
        if needed > available:
            raise ConfigError(
                f"rotations * antenna_count = {needed} slots exceed the "
                f"{available} that fit within cte_length - guard - reference"
            )


@dataclass(frozen=True)
class NoiseModel:
    """Per-sample Gaussian phase noise plus optional switch-transient corruption.

    Corruption adds a uniform draw from [-corruption_deg, corruption_deg) to
    every non-retained sample of every switched slot, mimicking samples taken
    while the RF switch is settling. Identical seeds reproduce packets
    bit-for-bit.
    """

    sigma_deg: float = 0.0
    transient_corruption: bool = False
    corruption_deg: float = 180.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_deg < 0:
            raise ConfigError("sigma_deg must be non-negative")
        if self.corruption_deg < 0:
            raise ConfigError("corruption_deg must be non-negative")


@dataclass(eq=False)
class PacketSamples:
    """One packet's raw fixed-point phase samples.

    reference holds the reference-interval samples (not antenna-switched);
    slots is (n_slots, samples_per_slot); antennas gives the 1-based antenna
    index dwelled on in each slot.
    """

    reference: np.ndarray
    slots: np.ndarray
    antennas: np.ndarray
    transmitter: str = "sim"
    counter: int = 0
    true_aoa_deg: float | None = None

    def __post_init__(self):
        self.reference = np.asarray(self.reference, dtype=np.int16)
        self.slots = np.asarray(self.slots, dtype=np.int16)
        self.antennas = np.asarray(self.antennas, dtype=int)
        if self.slots.ndim != 2:
            raise ValueError("slots must be 2-D (n_slots, samples_per_slot)")
        if self.antennas.shape != (self.slots.shape[0],):
            raise ValueError("one antenna index required per slot")

    @property
    def packet_id(self) -> str:
        return f"{self.transmitter}#{self.counter}"


def to_fixed_point(phase_deg, halfscale: int = 201):
    """Encode degrees in [-180, 180] to the signed fixed-point scale.

    Linear map +/-180 <-> +/-halfscale, rounding half away from zero.
    """
    x = np.asarray(phase_deg, dtype=float)
    if np.any(np.abs(x) > 180.0):
        raise ValueError("phase out of [-180, 180] range")
    scaled = x * halfscale / 180.0
    out = np.copysign(np.floor(np.abs(scaled) + 0.5), scaled).astype(np.int64)
    return int(out) if np.ndim(phase_deg) == 0 else out


def to_degrees(fixed, halfscale: int = 201):
    """Decode fixed-point sample(s) back to degrees in [-180, 180]."""
    v = np.asarray(fixed, dtype=np.int64)
    if np.any(np.abs(v) > halfscale):
        raise ValueError(f"fixed-point value outside [-{halfscale}, {halfscale}]")
    out = v * 180.0 / halfscale
    return float(out) if np.ndim(fixed) == 0 else out


def packet_rng(seed: int, counter: int = 0) -> np.random.Generator:
    """Deterministic per-packet generator; distinct counters give independent streams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(counter,)))


def simulate_phases(
    geom: ArrayGeometry,
    carrier: CarrierModel,
    cfg: SamplingConfig,
    aoa_deg: float,
    noise: NoiseModel = NoiseModel(),
    initial_phase_deg: float | None = None,
    rng: np.random.Generator | None = None,
):
    """Floating-point phases the radio would report with infinite resolution.

    Returns (reference, slots) wrapped to [-180, 180); slots has shape
    (switched_slots, samples_per_slot). Time t = 0 is the start of switched
    sampling, so reference samples sit at negative t and the tone is
    continuous across the whole packet. Draw order is fixed: initial phase
    (when not supplied), Gaussian noise for all samples, then corruption
    uniforms, so outputs are reproducible for a given generator state.
    """
    cfg.validate_geometry(geom)
    if rng is None:
        rng = packet_rng(noise.seed)
    if initial_phase_deg is None:
        initial_phase_deg = float(rng.uniform(-180.0, 180.0))

    spatial = spatial_phases(geom, carrier, aoa_deg)
    n_ref = cfg.reference_samples
    n_slots = cfg.switched_slots
    per_slot = cfg.samples_per_slot
    ts = cfg.sample_period_us

    t_ref = -cfg.reference_us + ts * np.arange(n_ref)
    t_slots = (
        cfg.slot_us * np.arange(n_slots)[:, None] + ts * np.arange(per_slot)[None, :]
    )
    antennas = np.arange(n_slots) % geom.antenna_count  # 0-based here

    ref = initial_phase_deg + cfg.tone_rate_deg_per_us * t_ref + spatial[0]
    slots = (
        initial_phase_deg
        + cfg.tone_rate_deg_per_us * t_slots
        + spatial[antennas][:, None]
    )

    if noise.sigma_deg > 0:
        draws = rng.normal(0.0, noise.sigma_deg, size=n_ref + n_slots * per_slot)
        ref = ref + draws[:n_ref]
        slots = slots + draws[n_ref:].reshape(n_slots, per_slot)
    if noise.transient_corruption:
        corrupt = [j for j in range(per_slot) if j not in cfg.retained_indices]
        if corrupt:
            slots = slots.copy()
            slots[:, corrupt] += rng.uniform(
                -noise.corruption_deg, noise.corruption_deg, size=(n_slots, len(corrupt))
            )
    return wrap180(ref), wrap180(slots)


def simulate_packet(
    geom: ArrayGeometry,
    carrier: CarrierModel,
    cfg: SamplingConfig,
    aoa_deg: float,
    noise: NoiseModel = NoiseModel(),
    initial_phase_deg: float | None = None,
    transmitter: str = "sim",
    counter: int = 0,
) -> PacketSamples:
    """Generate one quantized packet; deterministic in all arguments."""
    rng = packet_rng(noise.seed, counter)
    ref, slots = simulate_phases(
        geom, carrier, cfg, aoa_deg, noise, initial_phase_deg, rng
    )
    halfscale = cfg.fixed_point_halfscale
    return PacketSamples(
        reference=to_fixed_point(ref, halfscale),
        slots=to_fixed_point(slots, halfscale),
        antennas=np.arange(cfg.switched_slots) % geom.antenna_count + 1,
        transmitter=transmitter,
        counter=counter,
        true_aoa_deg=float(aoa_deg),
    )


def simulate_packets(
    geom: ArrayGeometry,
    carrier: CarrierModel,
    cfg: SamplingConfig,
    aoa_deg: float,
    noise: NoiseModel,
    count: int,
    transmitter: str = "sim",
    start_counter: int = 0,
    initial_phase_deg: float | None = None,
) -> list[PacketSamples]:
    """Generate `count` packets with consecutive counters under one base seed."""
    return [
        simulate_packet(
            geom,
            carrier,
            cfg,
            aoa_deg,
            noise,
            initial_phase_deg,
            transmitter,
            start_counter + i,
        )
        for i in range(count)
    ]
