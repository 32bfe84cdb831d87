"""
Command-line front end.

    todjumps simulate --seed 7 --out-dir sim
    todjumps detect --input sim/returns.txt --out-dir det
    todjumps validate --sim-dir sim --detect-dir det --out-dir val

Every command writes a ``manifest.json`` next to its outputs. Exit codes are
0 on success (warnings included), 2 on usage errors, 3 on input or data
errors and 4 on configuration errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from todjumps import __version__
from todjumps.detector import (
    SIZE_MODE_RANDOMIZED,
    DetectorConfig,
    JumpReport,
    detect_jumps,
)
from todjumps.exceptions import (
    ConfigurationError,
    InputDataError,
    JumpDetectionError,
    StructuralError,
)
from todjumps.grid import (
    DEFAULT_SLOTS_PER_DAY,
    LAYOUTS,
    ReturnGrid,
    load_returns,
)
from todjumps.simulator.config import SimConfig
from todjumps.simulator.evaluation import evaluate_indices
from todjumps.simulator.path import simulate_path
from todjumps.tod import DEFAULT_TRUNCATION_EXPONENT, cap_tod, tod_profile
from todjumps.utils.manifest import MANIFEST_NAME, RunManifest
from todjumps.utils.serialization import (
    read_json,
    read_jump_indices,
    read_truth,
    write_jump_report,
    write_json,
    write_sim_path,
    write_spotvol,
    write_tod,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_CONFIG = 4

FORMATS = ("csv", "json")
SIZE_MODE_FLAGS = {"det": "deterministic", "rand": "randomized"}

Command = Callable[[argparse.Namespace, RunManifest], List[Path]]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="todjumps",
        description="Jump detection in high-frequency returns with a "
        "time-of-day corrected threshold",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log INFO messages, or DEBUG messages when given twice",
    )
    common.add_argument(
        "--out-dir",
        type=Path,
        required=True,
        help="directory to write outputs to, created if missing",
    )

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument(
        "--input", type=Path, required=True, help="returns or prices file"
    )
    data.add_argument(
        "--m",
        type=int,
        default=DEFAULT_SLOTS_PER_DAY,
        help=f"intraday slots per day (default: {DEFAULT_SLOTS_PER_DAY})",
    )
    data.add_argument(
        "--delta",
        type=float,
        help="slot length in years (default: 1 / (252 * m))",
    )
    data.add_argument(
        "--layout",
        choices=LAYOUTS,
        default=LAYOUTS[0],
        help="input layout: one return per line, or 'day_id,price' lines "
        "(default: returns)",
    )
    data.add_argument(
        "--exponent",
        type=float,
        default=DEFAULT_TRUNCATION_EXPONENT,
        help="exponent of the raw truncation "
        f"(default: {DEFAULT_TRUNCATION_EXPONENT})",
    )
    data.add_argument(
        "--format",
        choices=FORMATS,
        action="append",
        help="output format, may be given twice (default: csv and json)",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    tod = subparsers.add_parser(
        "tod",
        parents=[common, data],
        help="estimate the time-of-day volatility profile",
    )
    tod.add_argument(
        "--cap",
        type=float,
        help="also write the profile capped at this value",
    )
    tod.set_defaults(func=cmd_tod)

    defaults = DetectorConfig()
    detect = subparsers.add_parser(
        "detect", parents=[common, data], help="detect jumps"
    )
    detect.add_argument(
        "--raw-mult",
        type=float,
        default=defaults.raw_multiplier,
        help="raw threshold multiplier "
        f"(default: {defaults.raw_multiplier:g})",
    )
    detect.add_argument(
        "--round-mult",
        type=float,
        default=defaults.round_multiplier,
        help="per-round threshold multiplier "
        f"(default: {defaults.round_multiplier:g})",
    )
    detect.add_argument(
        "--cap",
        type=float,
        default=defaults.tod_cap,
        help=f"TOD cap (default: {defaults.tod_cap:g})",
    )
    detect.add_argument(
        "--max-rounds",
        type=int,
        default=defaults.max_rounds,
        help=f"maximum number of rounds (default: {defaults.max_rounds})",
    )
    detect.add_argument(
        "--size-mode",
        choices=sorted(SIZE_MODE_FLAGS),
        default="det",
        help="jump size estimate; 'rand' needs --seed (default: det)",
    )
    detect.add_argument(
        "--seed", type=int, help="seed of the randomized jump sizes"
    )
    detect.set_defaults(func=cmd_detect)

    simulate = subparsers.add_parser(
        "simulate",
        parents=[common],
        help="simulate a path with known jumps",
    )
    simulate.add_argument(
        "--config",
        type=Path,
        help="JSON file with SimConfig fields; flags override it",
    )
    simulate.add_argument("--m", type=int, help="intraday slots per day")
    simulate.add_argument("--n-days", type=int, help="number of days")
    simulate.add_argument("--delta", type=float, help="slot length in years")
    simulate.add_argument("--seed", type=int, help="seed (default: 0)")
    simulate.add_argument("--mu", type=float, help="Hawkes baseline rate")
    simulate.add_argument("--alpha", type=float, help="Hawkes excitation")
    simulate.add_argument("--beta", type=float, help="Hawkes decay")
    simulate.add_argument("--jump-mean", type=float, help="mean jump size")
    simulate.add_argument("--jump-sd", type=float, help="jump size sd")
    simulate.set_defaults(func=cmd_simulate)

    validate = subparsers.add_parser(
        "validate",
        parents=[common],
        help="score detected jumps against simulated ones",
    )
    validate.add_argument(
        "--sim-dir",
        type=Path,
        required=True,
        help="output directory of 'simulate'",
    )
    validate.add_argument(
        "--detect-dir",
        type=Path,
        required=True,
        help="output directory of 'detect' run with csv output",
    )
    validate.add_argument(
        "--tolerance",
        type=int,
        default=0,
        help="largest slot distance of a match (default: 0)",
    )
    validate.set_defaults(func=cmd_validate)

    return parser


def cmd_tod(args: argparse.Namespace, manifest: RunManifest) -> List[Path]:
    grid = load_returns(args.input, args.m, args.layout, args.delta)
    _record_grid(manifest, grid)
    profile = tod_profile(grid, args.exponent)

    formats = _formats(args)
    written = write_tod(args.out_dir, profile, formats)
    if args.cap is not None:
        written += write_tod(
            args.out_dir, cap_tod(profile, args.cap), formats, "tod_capped"
        )

    undefined = int(profile.undefined_slots.sum())
    print(f"TOD estimated for {profile.m} slots ({undefined} undefined)")

    return written


def cmd_detect(
    args: argparse.Namespace, manifest: RunManifest
) -> List[Path]:
    size_mode = SIZE_MODE_FLAGS[args.size_mode]
    if size_mode == SIZE_MODE_RANDOMIZED and args.seed is None:
        raise ConfigurationError("seed", "required with --size-mode rand")

    config = DetectorConfig(
        raw_multiplier=args.raw_mult,
        round_multiplier=args.round_mult,
        tod_cap=args.cap,
        max_rounds=args.max_rounds,
        truncation_exponent=args.exponent,
    )

    grid = load_returns(args.input, args.m, args.layout, args.delta)
    _record_grid(manifest, grid)
    report = detect_jumps(
        grid,
        config,
        seed=args.seed if size_mode == SIZE_MODE_RANDOMIZED else None,
    )

    written = write_jump_report(args.out_dir, report, grid, _formats(args))
    if report.rounds:
        written += write_spotvol(args.out_dir, report.rounds[-1].sigmaq)

    _print_rounds(report)

    return written


def cmd_simulate(
    args: argparse.Namespace, manifest: RunManifest
) -> List[Path]:
    values: Dict[str, Any] = {}
    if args.config is not None:
        values = read_json(args.config)
        if not isinstance(values, dict):
            raise ConfigurationError("config", "must be a JSON object")

    overrides = {
        "m": args.m,
        "n_days": args.n_days,
        "delta": args.delta,
        "seed": args.seed,
    }
    nested = {
        "hawkes": {"mu": args.mu, "alpha": args.alpha, "beta": args.beta},
        "jump_size": {"mean": args.jump_mean, "sd": args.jump_sd},
    }

    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    for section, entries in nested.items():
        for key, value in entries.items():
            if value is not None:
                values.setdefault(section, {})[key] = value

    path = simulate_path(SimConfig.from_dict(values))
    manifest.seed = path.config.seed

    print(
        f"Simulated {path.grid.n} returns with "
        f"{path.true_jump_indices.size} jump slots"
    )

    return write_sim_path(args.out_dir, path)


def cmd_validate(
    args: argparse.Namespace, manifest: RunManifest
) -> List[Path]:
    sim_path = args.sim_dir / "sim_config.json"
    detect_path = args.detect_dir / MANIFEST_NAME
    sim = read_json(sim_path)
    detection = read_json(detect_path)

    sim_shape = (_entry(sim, sim_path, "m"), _entry(sim, sim_path, "n_days"))
    detect_shape = (
        _entry(detection, detect_path, "parameters", "grid", "m"),
        _entry(detection, detect_path, "parameters", "grid", "n_days"),
    )
    if sim_shape != detect_shape:
        raise StructuralError(
            f"simulation has (m, n_days) = {sim_shape}, detection ran on "
            f"{detect_shape}"
        )

    true_indices, true_sizes = read_truth(args.sim_dir / "truth.csv")
    detected_indices, detected_sizes = read_jump_indices(
        args.detect_dir / "jumps.csv"
    )

    summary = evaluate_indices(
        true_indices,
        true_sizes,
        detected_indices,
        detected_sizes,
        args.tolerance,
    )

    print(
        f"tp={summary.true_positives} fp={summary.false_positives} "
        f"fn={summary.false_negatives} precision={summary.precision} "
        f"recall={summary.recall}"
    )

    return [write_json(args.out_dir / "metrics.json", summary.to_dict())]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][
            min(args.verbose, 2)
        ],
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)

    command: Command = args.func
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        manifest = _manifest(args)
        manifest.add_outputs(command(args, manifest))
        logger.info("Wrote %s", ", ".join(sorted(manifest.outputs)))
        manifest.write(args.out_dir)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (JumpDetectionError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT

    return EXIT_OK


def _entry(data: Any, path: Path, *keys: str) -> Any:
    for key in keys:
        if not isinstance(data, dict) or key not in data:
            raise InputDataError(
                f"missing entry {'.'.join(keys)!r}", path=str(path)
            )
        data = data[key]

    return data


def _formats(args: argparse.Namespace) -> Tuple[str, ...]:
    return tuple(args.format) if args.format else FORMATS


def _manifest(args: argparse.Namespace) -> RunManifest:
    parameters = {
        key: str(value) if isinstance(value, Path) else value
        for key, value in sorted(vars(args).items())
        if key not in ("func", "verbose", "out_dir")
    }

    manifest = RunManifest(
        command=args.command,
        parameters=parameters,
        tool_version=__version__,
        seed=getattr(args, "seed", None),
    )
    for key in ("input", "config"):
        path = getattr(args, key, None)
        if path is not None:
            manifest.add_input(path)

    if args.command == "validate":
        manifest.add_input(args.sim_dir / "truth.csv")
        manifest.add_input(args.detect_dir / "jumps.csv")

    return manifest


def _record_grid(manifest: RunManifest, grid: ReturnGrid) -> None:
    manifest.parameters["grid"] = {
        "m": grid.m,
        "n_days": grid.n_days,
        "delta": grid.delta,
    }


def _print_rounds(report: JumpReport) -> None:
    for number, count in enumerate(report.round_counts, start=1):
        print(f"Round {number}: {count} new jumps")
    print(f"{report.total} jumps")
    if not report.converged:
        print(f"not converged within {report.config.max_rounds} rounds")
