#!/usr/bin/python3

# Sample usage of the todjumps package
#
# Simulates a number of independent paths with a U-shaped intraday volatility
# pattern and self-exciting jumps, runs the jump detector on each of them and
# prints how well the detections match the simulated jumps. You can run this
# program as follows from the directory where this file is located:
#
# python3 detect_simulated.py \
#   --paths 5                 \
#   --days 50                 \
#   --seed 11                 \
#   --tolerance 1

import argparse
import warnings

import numpy as np
from todjumps import DetectorConfig, JumpDetectionWarning, detect_jumps
from todjumps.simulator import SimConfig, evaluate_detection, simulate_batch

# Parse arguments
parser = argparse.ArgumentParser()

parser.add_argument(
    "--paths", type=int, default=5, help="number of paths (default: 5)"
)

parser.add_argument(
    "--days", type=int, default=50, help="days per path (default: 50)"
)

parser.add_argument(
    "--seed",
    type=int,
    default=0,
    help="seed of the first path; path k uses seed + k (default: 0)",
)

parser.add_argument(
    "--tolerance",
    type=int,
    default=0,
    help="largest slot distance at which a detection matches a jump "
    "(default: 0)",
)

parser.add_argument(
    "--cap",
    type=float,
    default=1.5,
    help="cap applied to the TOD factors (default: 1.5)",
)

parser.add_argument(
    "--quiet",
    action="store_true",
    help="silence detector warnings (default: false)",
)

args = parser.parse_args()

if args.paths < 1:
    raise ValueError(f"Invalid path count: {args.paths}")

if args.quiet:
    warnings.simplefilter("ignore", JumpDetectionWarning)

config = SimConfig(n_days=args.days)
detector = DetectorConfig(tod_cap=args.cap)
seeds = range(args.seed, args.seed + args.paths)

precisions = []
recalls = []
for seed, path in zip(seeds, simulate_batch(config, seeds)):
    report = detect_jumps(path.grid, detector)
    summary = evaluate_detection(path, report, args.tolerance)

    print(
        f"seed {seed}: {path.true_jump_indices.size} true, "
        f"{report.total} detected in rounds {report.round_counts}, "
        f"precision {summary.precision}, recall {summary.recall}"
    )

    if summary.precision is not None:
        precisions.append(summary.precision)
    if summary.recall is not None:
        recalls.append(summary.recall)

if precisions:
    print(f"Mean precision: {np.mean(precisions):.3f}")
if recalls:
    print(f"Mean recall: {np.mean(recalls):.3f}")
