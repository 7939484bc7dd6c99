"""
Command-line entry point.

    hydrofrac run src/hydrofrac/config/fluid_driven.yaml --out-dir results/
    hydrofrac bench consolidation --out-dir results/
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .exceptions import HydrofracError
from .scenarios import create_scenario
from .services import benchmarks, writers
from .services.config_loader import load_config

logger = logging.getLogger("hydrofrac")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrofrac", description="Coupled peridynamic / finite-element hydraulic fracture simulator"
    )
    parser.add_argument("--verbose", action="store_true", help="Log per-iteration detail")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run a scenario file")
    run.add_argument("config", type=Path, help="Scenario YAML file")
    run.add_argument("--out-dir", type=Path, default=Path("results"), help="Output directory")
    run.add_argument("--steps", type=int, help="Override the number of outer steps")
    run.add_argument("--dt", type=float, help="Override the time step [s]")
    run.add_argument("--snapshot-every", type=int, help="Write a VTK snapshot every N steps (0: none)")

    bench = subparsers.add_parser("bench", help="Run a benchmark against its reference solution")
    bench.add_argument("name", choices=sorted(benchmarks.BENCHMARKS), help="Benchmark name")
    bench.add_argument("--out-dir", type=Path, default=Path("results"), help="Output directory")
    bench.add_argument(
        "--config-dir",
        type=Path,
        default=benchmarks.DEFAULT_CONFIG_DIR,
        help="Directory holding the benchmark presets",
    )
    return parser


def run_scenario(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.dt is not None:
        config = dataclasses.replace(config, time=dataclasses.replace(config.time, dt=args.dt))
        config.time.validate()
    if args.snapshot_every is not None:
        config = dataclasses.replace(
            config, output=dataclasses.replace(config.output, snapshot_every=args.snapshot_every)
        )

    out_dir = args.out_dir / args.config.stem
    scenario = create_scenario(config, out_dir)
    record = scenario.run(args.steps)
    if config.output.timeseries:
        writers.emit_timeseries(record.rows, out_dir / "timeseries.csv")
    if record.final_state is not None:
        scenario.write_snapshot(record.final_state, record.damage, record.aperture, "final.vtk")
    logger.info(f"Finished {config.name}: {len(record.rows)} steps, output in {out_dir}")
    return 0


def run_bench(args: argparse.Namespace) -> int:
    report = benchmarks.run_benchmark(args.name, args.config_dir, args.out_dir)
    print(report.summary())
    return 0 if report.passed else 1


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            return run_scenario(args)
        return run_bench(args)
    except HydrofracError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
