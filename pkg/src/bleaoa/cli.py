"""Command-line entry point.

One binary, five subcommands: simulate, process, estimate, locate,
sweep-noise. Every command is deterministic given (config file, flags,
seed); every output file is stamped with the resolved configuration and its
hash. Exit codes: 0 success, 2 configuration error, 3 file-format error,
4 estimation degeneracy.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as bio
from .angles import circ_dist, circ_mean, circ_rms, circ_std, wrap360
from .config import RunConfig, canonical_lines, config_hash, load_config
from .errors import ConfigError, DegenerateInputError, FormatError
from .estimator import (
    AVERAGE_THEN_FIT,
    FIT_THEN_AVERAGE,
    estimate_from_packets,
    estimate_grid,
    estimate_harmonic,
)
from .geometry import expected_profile
from .locator import locate
from .pipeline import folded_matrix, packets_to_profiles, average_profiles
from .profiles import FOLDED, DiffProfile
from .simulator import NoiseModel, simulate_packets

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORMAT = 3
EXIT_DEGENERATE = 4

_STRATEGIES = {"avg-fit": AVERAGE_THEN_FIT, "fit-avg": FIT_THEN_AVERAGE}


def _shared_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key-value config file")
    p.add_argument("--seed", type=int, metavar="N", help="override the RNG seed")
    p.add_argument("--out", metavar="DIR", default="out", help="output directory")
    p.add_argument(
        "--grid-step", type=float, default=0.1, metavar="DEG",
        help="angle grid step for the grid estimator",
    )
    p.add_argument("--method", choices=["grid", "harmonic"], default="grid")
    p.add_argument("--strategy", choices=sorted(_STRATEGIES), default="avg-fit")
    p.add_argument(
        "--compat-arithmetic-mean", action="store_true",
        help="average profiles arithmetically instead of circularly",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bleaoa",
        description="Simulate, process, and estimate switched-array phase data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate packet dumps")
    _shared_flags(p)
    p.add_argument("--aoa", type=float, metavar="DEG", help="single arrival azimuth")
    p.add_argument(
        "--aoa-sweep", metavar="START:STOP:STEP", help="inclusive azimuth sweep"
    )
    p.add_argument("--packets", type=int, default=100, metavar="N")
    p.add_argument(
        "--sigma", metavar="DEG[,DEG...]", help="noise sigma(s), one dump per value"
    )
    p.add_argument("--tx", default="sim", metavar="ID", help="transmitter id")

    p = sub.add_parser("process", help="dump -> raw and folded profile tables")
    _shared_flags(p)
    p.add_argument("dump", metavar="DUMP")

    p = sub.add_parser("estimate", help="dump or folded table -> estimate CSV")
    _shared_flags(p)
    p.add_argument("source", metavar="DUMP_OR_TABLE")

    p = sub.add_parser("locate", help="bearings -> position CSV")
    _shared_flags(p)
    p.add_argument(
        "--bearing", action="append", default=[], metavar="ID=DEG", required=True
    )
    p.add_argument("--heading", type=float, default=None, metavar="DEG")

    p = sub.add_parser("sweep-noise", help="profile degradation vs noise sigma")
    _shared_flags(p)
    p.add_argument("--sigmas", default="0,45,55,65", metavar="DEG,DEG,...")
    p.add_argument("--trials", type=int, default=1000, metavar="N")
    p.add_argument("--aoa", type=float, default=0.0, metavar="DEG")

    return parser


def _resolve(args) -> tuple[RunConfig, str]:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.noise = replace(cfg.noise, seed=args.seed)
    return cfg, config_hash(cfg)


def _stamp(cfg: RunConfig, digest: str) -> str:
    lines = [f"# config_hash = {digest}"]
    lines += [f"# {line}" for line in canonical_lines(cfg)]
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(path)


def _cell_noise(noise: NoiseModel, sigma: float, index: int) -> NoiseModel:
    seed = int(np.random.SeedSequence((noise.seed, index)).generate_state(1)[0])
    return replace(noise, sigma_deg=sigma, seed=seed)


def cmd_simulate(args) -> int:
    cfg, digest = _resolve(args)
    if (args.aoa is None) == (args.aoa_sweep is None):
        raise ConfigError("exactly one of --aoa / --aoa-sweep is required")
    if args.aoa is not None:
        aoas = [args.aoa]
    else:
        try:
            start, stop, step = (float(v) for v in args.aoa_sweep.split(":"))
        except ValueError as exc:
            raise ConfigError(f"--aoa-sweep must be START:STOP:STEP: {exc}") from exc
        if step <= 0:
            raise ConfigError("--aoa-sweep step must be positive")
        aoas = list(np.arange(start, stop + step / 2, step))
    sigmas = (
        [cfg.noise.sigma_deg]
        if args.sigma is None
        else [float(s) for s in args.sigma.split(",")]
    )
    if args.packets < 0:
        raise ConfigError("--packets must be non-negative")

    out = Path(args.out)
    for i, aoa in enumerate(aoas):
        for j, sigma in enumerate(sigmas):
            noise = _cell_noise(cfg.noise, sigma, i * len(sigmas) + j)
            packets = simulate_packets(
                cfg.geometry, cfg.carrier, cfg.sampling, aoa, noise,
                args.packets, transmitter=args.tx,
            )
            manifest = bio.DumpManifest(
                cfg.geometry, cfg.carrier, cfg.sampling, noise,
                transmitter=args.tx, config_hash=digest,
            )
            name = f"dump_aoa{aoa:g}_sigma{sigma:g}.csv"
            _write(out / name, bio.write_dump(manifest, packets))
    return EXIT_OK


def _mean_method(args) -> str:
    return "arithmetic" if args.compat_arithmetic_mean else "circular"


def cmd_process(args) -> int:
    cfg, digest = _resolve(args)
    manifest, packets = bio.read_dump(Path(args.dump).read_text())
    count = manifest.geometry.antenna_count
    stem = Path(args.dump).stem
    out = Path(args.out)
    header = _stamp(cfg, digest)
    for kind, fold in (("raw", False), ("folded", True)):
        profiles = packets_to_profiles(packets, manifest.sampling, count, fold=fold)
        mean = average_profiles(profiles, _mean_method(args)) if profiles else None
        table = bio.write_profile_table(profiles, mean)
        _write(out / f"{stem}_{kind}.csv", header + table)
    return EXIT_OK


def _estimate_from_table(text: str, cfg: RunConfig, args):
    values, mean = bio.read_profile_table(text)
    if values.shape[0] != cfg.geometry.antenna_count:
        raise FormatError(
            f"folded table must have {cfg.geometry.antenna_count} rows, "
            f"got {values.shape[0]}"
        )
    profiles = [DiffProfile(values[:, k], FOLDED) for k in range(values.shape[1])]
    if not profiles:
        if mean is None:
            raise FormatError("table has no profile columns to estimate from")
        profiles = [DiffProfile(mean, FOLDED)]

    def fit(profile):
        if args.method == "harmonic":
            return estimate_harmonic(profile, cfg.geometry, cfg.carrier)
        return estimate_grid(profile, cfg.geometry, cfg.carrier, args.grid_step)

    fits = [fit(p) for p in profiles]
    if _STRATEGIES[args.strategy] == AVERAGE_THEN_FIT:
        final = fit(average_profiles(profiles, _mean_method(args)))
        angle, residual = final.angle_deg, final.residual_deg
    else:
        angle = wrap360(circ_mean([e.angle_deg for e in fits]))
        residual = circ_rms(circ_dist([e.angle_deg for e in fits], angle))
    dispersion = circ_std([e.angle_deg for e in fits]) if len(fits) > 1 else 0.0
    return angle, residual, len(profiles), dispersion


def cmd_estimate(args) -> int:
    cfg, digest = _resolve(args)
    text = Path(args.source).read_text()
    if text.startswith(bio.DUMP_VERSION_LINE):
        manifest, packets = bio.read_dump(text)
        if not packets:
            raise DegenerateInputError("dump contains no packets to estimate from")
        est = estimate_from_packets(
            packets, manifest.geometry, manifest.carrier, manifest.sampling,
            method=args.method, strategy=_STRATEGIES[args.strategy],
            step_deg=args.grid_step, mean_method=_mean_method(args),
        )
        angle, residual, n, dispersion = (
            est.angle_deg, est.residual_deg, est.n_packets, est.dispersion_deg,
        )
    else:
        angle, residual, n, dispersion = _estimate_from_table(text, cfg, args)

    stem = Path(args.source).stem
    body = "angle_deg,residual_deg,method,packets,dispersion_deg\n"
    body += f"{angle:.6f},{residual:.6f},{args.method},{n},{dispersion:.6f}\n"
    _write(Path(args.out) / f"{stem}_estimate.csv", _stamp(cfg, digest) + body)
    return EXIT_OK


def cmd_locate(args) -> int:
    cfg, digest = _resolve(args)
    bearings = {}
    for spec in args.bearing:
        bid, sep, value = spec.partition("=")
        if not sep:
            raise ConfigError(f"--bearing must look like ID=DEG, got {spec!r}")
        try:
            bearings[bid.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--bearing {spec!r}: {exc}") from exc
    if len(bearings) < 2:
        raise ConfigError("locate needs bearings to at least 2 beacons")
    heading = cfg.heading_deg if args.heading is None else args.heading
    est = locate(cfg.beacons, bearings, heading)
    body = "x_m,y_m,residual_deg,beacons\n"
    body += f"{est.x_m:.6f},{est.y_m:.6f},{est.residual_deg:.6f},"
    body += "|".join(est.beacons) + "\n"
    _write(Path(args.out) / "position.csv", _stamp(cfg, digest) + body)
    return EXIT_OK


def cmd_sweep_noise(args) -> int:
    cfg, digest = _resolve(args)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    model = expected_profile(cfg.geometry, cfg.carrier, args.aoa).values
    rows = []
    for j, sigma in enumerate(sigmas):
        noise = _cell_noise(cfg.noise, sigma, j)
        packets = simulate_packets(
            cfg.geometry, cfg.carrier, cfg.sampling, args.aoa, noise, args.trials
        )
        folded = folded_matrix(packets, cfg.sampling, cfg.geometry.antenna_count)
        deviations = [circ_rms(row - model) for row in folded]
        rows.append((sigma, args.trials, float(np.mean(deviations))))
    body = "sigma_deg,trials,mean_rms_deviation_deg\n"
    for sigma, trials, dev in rows:
        body += f"{sigma:g},{trials},{dev:.6f}\n"
    _write(Path(args.out) / "noise_sweep.csv", _stamp(cfg, digest) + body)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "process": cmd_process,
    "estimate": cmd_estimate,
    "locate": cmd_locate,
    "sweep-noise": cmd_sweep_noise,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DegenerateInputError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
