"""Text formats: packet dumps and profile tables.

Both formats are plain CSV so fixtures stay diff-able. A packet dump starts
with a ``# packet-dump v1`` version line and a manifest of ``# key = value``
lines (fixed key order), followed by one record per packet::

    counter,transmitter,true_aoa,<reference samples...>,<slot samples...>

Sample counts per record are fixed by the manifest; true_aoa is empty for
captured (non-simulated) packets. A profile table has columns ``d`` (1-based
difference index), one column per packet (s1..sK) and optionally ``mean``,
with six-decimal values. Writers are canonical: reading a file produced here
and writing it again reproduces it byte for byte.

The exact column names and manifest keys are frozen in docs/formats.md and
covered by golden-file tests.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .geometry import ArrayGeometry, CarrierModel
from .simulator import NoiseModel, PacketSamples, SamplingConfig

log = logging.getLogger(__name__)

DUMP_VERSION_LINE = "# packet-dump v1"


@dataclass
class DumpManifest:
    """Everything needed to regenerate or decode the packets in a dump."""

    geometry: ArrayGeometry
    carrier: CarrierModel
    sampling: SamplingConfig
    noise: NoiseModel
    transmitter: str = "sim"
    config_hash: str | None = None


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _manifest_items(m: DumpManifest) -> list[tuple[str, str]]:
    g, c, s, n = m.geometry, m.carrier, m.sampling, m.noise
    items = [
        ("geometry.antenna_count", _fmt(g.antenna_count)),
        ("geometry.radius_mm", _fmt(g.radius_mm)),
        ("geometry.orientation_offset_deg", _fmt(g.orientation_offset_deg)),
        ("carrier.frequency_hz", _fmt(c.frequency_hz)),
        ("carrier.propagation_speed_m_s", _fmt(c.propagation_speed_m_s)),
        ("sampling.cte_length_us", _fmt(s.cte_length_us)),
        ("sampling.guard_us", _fmt(s.guard_us)),
        ("sampling.reference_us", _fmt(s.reference_us)),
        ("sampling.slot_us", _fmt(s.slot_us)),
        ("sampling.sample_period_ns", _fmt(s.sample_period_ns)),
        ("sampling.tone_rate_deg_per_us", _fmt(s.tone_rate_deg_per_us)),
        ("sampling.fixed_point_halfscale", _fmt(s.fixed_point_halfscale)),
        ("sampling.retained_indices", ",".join(str(i) for i in s.retained_indices)),
        ("sampling.rotations", _fmt(s.rotations)),
        ("sampling.switched_slots", _fmt(s.switched_slots)),
        ("noise.sigma_deg", _fmt(n.sigma_deg)),
        ("noise.transient_corruption", _fmt(n.transient_corruption)),
        ("noise.corruption_deg", _fmt(n.corruption_deg)),
        ("noise.seed", _fmt(n.seed)),
        ("transmitter", m.transmitter),
    ]
    if m.config_hash is not None:
        items.append(("config_hash", m.config_hash))
    return items


def write_dump(manifest: DumpManifest, packets) -> str:
    lines = [DUMP_VERSION_LINE]
    lines += [f"# {k} = {v}" for k, v in _manifest_items(manifest)]
    n_expected = manifest.sampling.samples_per_packet
    for p in packets:
        samples = np.concatenate([p.reference, p.slots.ravel()])
        if samples.size != n_expected:
            raise FormatError(
                f"packet {p.packet_id} has {samples.size} samples, "
                f"manifest declares {n_expected}"
            )
        aoa = "" if p.true_aoa_deg is None else repr(float(p.true_aoa_deg))
        lines.append(
            f"{p.counter},{p.transmitter},{aoa},"
            + ",".join(str(int(v)) for v in samples)
        )
    return "\n".join(lines) + "\n"


def _parse_manifest(pairs: dict[str, str]) -> DumpManifest:
    def need(key):
        if key not in pairs:
            raise FormatError(f"manifest is missing key {key!r}")
        return pairs[key]

    try:
        geometry = ArrayGeometry(
            antenna_count=int(need("geometry.antenna_count")),
            radius_mm=float(need("geometry.radius_mm")),
            orientation_offset_deg=float(need("geometry.orientation_offset_deg")),
        )
        carrier = CarrierModel(
            frequency_hz=float(need("carrier.frequency_hz")),
            propagation_speed_m_s=float(need("carrier.propagation_speed_m_s")),
        )
        sampling = SamplingConfig(
            cte_length_us=float(need("sampling.cte_length_us")),
            guard_us=float(need("sampling.guard_us")),
            reference_us=float(need("sampling.reference_us")),
            slot_us=float(need("sampling.slot_us")),
            sample_period_ns=float(need("sampling.sample_period_ns")),
            tone_rate_deg_per_us=float(need("sampling.tone_rate_deg_per_us")),
            fixed_point_halfscale=int(need("sampling.fixed_point_halfscale")),
            retained_indices=tuple(
                int(t) for t in need("sampling.retained_indices").split(",")
            ),
            rotations=int(need("sampling.rotations")),
            switched_slots=int(need("sampling.switched_slots")),
        )
        noise = NoiseModel(
            sigma_deg=float(need("noise.sigma_deg")),
            transient_corruption=need("noise.transient_corruption") == "on",
            corruption_deg=float(need("noise.corruption_deg")),
            seed=int(need("noise.seed")),
        )
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"manifest value invalid: {exc}") from exc
    return DumpManifest(
        geometry,
        carrier,
        sampling,
        noise,
        transmitter=need("transmitter"),
        config_hash=pairs.get("config_hash"),
    )


_KNOWN_KEYS = {k for k, _ in _manifest_items(
    DumpManifest(ArrayGeometry(), CarrierModel(), SamplingConfig(), NoiseModel(),
                 config_hash="x")
)}


def read_dump(text: str, strict: bool = True):
    """Parse a dump; returns (manifest, packets).

    With strict=False malformed records are skipped with a logged diagnostic
    naming the line; with strict=True (default) they raise FormatError.
    """
    lines = text.splitlines()
    if not lines or lines[0] != DUMP_VERSION_LINE:
        raise FormatError(
            f"unknown version tag: expected {DUMP_VERSION_LINE!r} on line 1"
        )
    pairs: dict[str, str] = {}
    records: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                raise FormatError(f"line {lineno}: malformed manifest line")
            key, _, value = body.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _KNOWN_KEYS:
                _complain(f"line {lineno}: unknown manifest key {key!r}", strict)
                continue
            pairs[key] = value
        else:
            records.append((lineno, line))
    manifest = _parse_manifest(pairs)

    s = manifest.sampling
    n_ref, n_slots, per_slot = s.reference_samples, s.switched_slots, s.samples_per_slot
    arity = 3 + n_ref + n_slots * per_slot
    halfscale = s.fixed_point_halfscale
    count = manifest.geometry.antenna_count
    antennas = np.arange(n_slots) % count + 1

    packets = []
    for lineno, line in records:
        fields = line.split(",")
        if len(fields) != arity:
            _complain(
                f"line {lineno}: record has {len(fields)} fields, expected {arity}",
                strict,
            )
            continue
        try:
            counter = int(fields[0])
            aoa = None if fields[2] == "" else float(fields[2])
            samples = np.array([int(v) for v in fields[3:]], dtype=np.int64)
        except ValueError as exc:
            _complain(f"line {lineno}: {exc}", strict)
            continue
        if np.any(np.abs(samples) > halfscale):
            _complain(
                f"line {lineno}: sample value exceeds halfscale {halfscale}", strict
            )
            continue
        packets.append(
            PacketSamples(
                reference=samples[:n_ref],
                slots=samples[n_ref:].reshape(n_slots, per_slot),
                antennas=antennas,
                transmitter=fields[1],
                counter=counter,
                true_aoa_deg=aoa,
            )
        )
    return manifest, packets


def _complain(message: str, strict: bool) -> None:
    if strict:
        raise FormatError(message)
    log.warning("%s (record skipped)", message)


def write_profile_table(profiles, mean=None) -> str:
    """Render profiles as the d,s1..sK[,mean] table, six decimals."""
    columns = [np.asarray(getattr(p, "values", p), dtype=float) for p in profiles]
    if not columns and mean is None:
        return "d\n"
    if mean is not None:
        mean = np.asarray(getattr(mean, "values", mean), dtype=float)
    rows = {c.size for c in columns} | ({mean.size} if mean is not None else set())
    if len(rows) != 1:
        raise ValueError("profiles (and mean) must all have the same length")
    n_rows = rows.pop()

    header = ["d"] + [f"s{i + 1}" for i in range(len(columns))]
    if mean is not None:
        header.append("mean")
    lines = [",".join(header)]
    for r in range(n_rows):
        cells = [str(r + 1)] + [f"{c[r]:.6f}" for c in columns]
        if mean is not None:
            cells.append(f"{mean[r]:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def read_profile_table(text: str):
    """Parse a profile table; returns (values (rows, K) array, mean or None).

    Leading ``#`` comment lines are skipped. K may be zero.
    """
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        raise FormatError("profile table is empty")
    header = lines[0].split(",")
    if header[0] != "d":
        raise FormatError("profile table must start with a 'd' column")
    has_mean = bool(header) and header[-1] == "mean"
    s_cols = header[1:-1] if has_mean else header[1:]
    for i, name in enumerate(s_cols):
        if name != f"s{i + 1}":
            raise FormatError(f"unexpected profile column {name!r}")
    data = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(header):
            raise FormatError(
                f"line {lineno}: row has {len(fields)} fields, expected {len(header)}"
            )
        if int(fields[0]) != lineno - 1:
            raise FormatError(f"line {lineno}: difference index out of order")
        data.append([float(v) for v in fields[1:]])
    arr = np.array(data, dtype=float).reshape(len(data), len(header) - 1)
    if has_mean:
        return arr[:, :-1], arr[:, -1]
    return arr, None
